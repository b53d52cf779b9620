#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "safs/dataset.hpp"
#include "safs/descriptor.hpp"

namespace safs {

// Features are named f0, f1, ... with labels v0, v1, ...; codes are uniform.
struct PlantedSpec {
  std::size_t records = 5000;
  std::vector<std::size_t> cardinalities;
  SubgroupDescriptor planted;
  double inside_rate = 0.8;
  double background_rate = 0.2;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  DiscreteDataset dataset;
  std::vector<std::uint32_t> planted_records;
};

SyntheticData generate_planted(const PlantedSpec& spec);

// Outcome independent of every feature.
DiscreteDataset generate_noise(std::size_t records, const std::vector<std::size_t>& cardinalities,
                               double rate, std::uint64_t seed);

}  // namespace safs

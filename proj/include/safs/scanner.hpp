#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "safs/dataset.hpp"
#include "safs/descriptor.hpp"

namespace safs {

enum class Direction { over, under };

std::string_view to_string(Direction direction);
Direction parse_direction(std::string_view text);

struct ScanConfig {
  Direction direction = Direction::over;
  std::size_t restarts = 10;
  std::size_t max_passes = 50;
  std::uint64_t seed = 0;
  // Worker threads for restarts; 0 means hardware concurrency.
  unsigned threads = 1;
};

struct Score {
  double gamma = 0.0;
  double q_hat = 1.0;
};

struct ScanResult {
  SubgroupDescriptor descriptor;
  double score = 0.0;
  double q_hat = 1.0;
  std::vector<std::uint32_t> matched;
  std::uint64_t subset_size = 0;
  std::uint64_t subset_outcome_sum = 0;
  std::chrono::nanoseconds elapsed{0};
};

// Maximizer of the Bernoulli likelihood ratio over the odds multiplier q.
// Returns +inf when every record is positive and 0 when none is.
double q_mle(std::uint64_t n_s, std::uint64_t sum_y, double mu);

// Scan statistic of a subset with n_s records and sum_y positives against the
// global rate mu. q is clamped to [1, inf) for over-scans and (0, 1] for
// under-scans; the all-positive / all-negative limits are taken analytically.
Score score_counts(std::uint64_t n_s, std::uint64_t sum_y, double mu, Direction direction);

Score score_subgroup(const DiscreteDataset& dataset, const SubgroupDescriptor& descriptor,
                     Direction direction);

struct FeatureStep {
  // nullopt: the feature is best left unconstrained.
  std::optional<std::vector<Code>> included;
  double score = 0.0;
};

/// Best included-value set for one feature with every other constraint held
/// fixed. Values are ordered by outcome rate among the records matching the
/// other constraints and every prefix of that order is scored; the optimum
/// over all value subsets is always one of these prefixes.
FeatureStep optimize_feature(const DiscreteDataset& dataset,
                             const SubgroupDescriptor& descriptor, std::size_t feature,
                             Direction direction);

struct AscentResult {
  SubgroupDescriptor descriptor;
  double score = 0.0;
  // Score after every optimize_feature step, in order.
  std::vector<double> step_scores;
  std::size_t passes = 0;
};

// One restart: passes of optimize_feature over a freshly shuffled feature
// order until a pass brings no improvement or max_passes is reached. `start`
// must match at least one record and constrain only features in `features`.
AscentResult local_ascent(const DiscreteDataset& dataset, std::span<const std::size_t> features,
                          const SubgroupDescriptor& start, Direction direction,
                          std::size_t max_passes, std::uint64_t seed);

// Coordinate ascent over `features` with random restarts. Deterministic given
// config.seed, independent of config.threads.
ScanResult scan(const DiscreteDataset& dataset, std::span<const std::size_t> features,
                const ScanConfig& config);

// Largest search space brute_force_scan accepts.
inline constexpr double kBruteForceLimit = 1e7;

// Exhaustive maximization over every AND-of-ORs descriptor on `features`.
ScanResult brute_force_scan(const DiscreteDataset& dataset, std::span<const std::size_t> features,
                            Direction direction);

}  // namespace safs

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "safs/dataset.hpp"
#include "safs/objective.hpp"
#include "safs/post_discovery.hpp"
#include "safs/scanner.hpp"

namespace safs {

// Extrapolated rank-biased overlap of two equal-length rankings of the same
// items. Throws ArgumentError when the item sets differ or p is not in (0,1).
double rank_biased_overlap(std::span<const std::string> a, std::span<const std::string> b,
                           double p = 0.9);

struct RankOverlapMatrix {
  std::vector<std::string> methods;
  std::vector<std::vector<double>> values;
  double persistence = 0.9;
};

RankOverlapMatrix rank_overlap_matrix(std::span<const FeatureRanking> rankings,
                                      std::span<const std::string> names, double p = 0.9);

// |a ∩ b| / |a ∪ b| over sorted index sets; 1 when both are empty.
double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

// Spearman rank correlation with average ranks for ties.
double spearman_correlation(std::span<const double> x, std::span<const double> y);

enum class Phase { rank, scan };

struct TimingRecord {
  Phase phase = Phase::scan;
  std::string method;
  std::size_t k = 0;
  std::chrono::nanoseconds duration{0};
};

struct SweepEntry {
  std::size_t k = 0;
  std::vector<std::size_t> features;
  ScanResult scan;
  SubgroupReport report;
  double jaccard_vs_full = 1.0;
  TimingRecord timing;
};

/// Scans the top-K prefix of `ranking` for every K in `k_values` (ascending,
/// each <= M) and compares each detected record set with the K = M scan,
/// which is run as a reference when M is not in the list. `permutations` = 0
/// skips the p-value.
std::vector<SweepEntry> sweep_k(const DiscreteDataset& dataset, const FeatureRanking& ranking,
                                std::span<const std::size_t> k_values, const ScanConfig& config,
                                std::size_t permutations = 0);

}  // namespace safs

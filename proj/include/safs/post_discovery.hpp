#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "safs/dataset.hpp"
#include "safs/descriptor.hpp"
#include "safs/scanner.hpp"

namespace safs {

struct OddsRatio {
  double odds_ratio = 1.0;
  double ci_low = 1.0;
  double ci_high = 1.0;
};

// Woolf (log-normal) 95% interval. Zero cells get +0.5 on all four cells.
OddsRatio odds_ratio_ci(const ContingencyTable& table);

// Subgroup (alpha, beta) against its complement (delta, gamma).
ContingencyTable subgroup_table(const DiscreteDataset& dataset, std::uint64_t subset_size,
                                std::uint64_t subset_positives);

struct PermutationTest {
  double p_value = 1.0;
  // Replicates scoring at least the observed score.
  std::size_t exceedances = 0;
  std::vector<double> null_scores;
};

/// Label-permutation test of a scan score. Each replicate shuffles the outcome
/// and reruns `scan` with the unchanged config (same seed, same restarts);
/// p = (1 + #{null >= observed}) / (R + 1). Replicates run on config.threads
/// workers. An observed score of 0 short-circuits to p = 1.
PermutationTest permutation_test(const DiscreteDataset& dataset,
                                 std::span<const std::size_t> features, const ScanConfig& config,
                                 double observed_score, std::size_t permutations = 100);

double empirical_p_value(const DiscreteDataset& dataset, std::span<const std::size_t> features,
                         const ScanConfig& config, double observed_score,
                         std::size_t permutations = 100);

struct SubgroupReport {
  SubgroupDescriptor descriptor;
  std::size_t num_features = 0;
  std::size_t num_values = 0;
  std::uint64_t subset_size = 0;
  std::uint64_t total_records = 0;
  // round(100 * subset_size / total_records)
  int subset_percent = 0;
  double odds_ratio = 1.0;
  double ci_low = 1.0;
  double ci_high = 1.0;
  std::optional<double> p_value;
  double score = 0.0;
  double q_hat = 1.0;
  // Unconstrained result: the whole dataset, nothing to compare against.
  bool no_divergence = false;
  std::chrono::nanoseconds elapsed{0};
};

SubgroupReport build_report(const DiscreteDataset& dataset, const ScanResult& result,
                            std::optional<double> p_value);

}  // namespace safs

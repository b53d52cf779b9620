#include "safs/post_discovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "safs/errors.hpp"
#include "safs/parallel.hpp"
#include "safs/random.hpp"

namespace safs {

namespace {
constexpr double kZ95 = 1.96;
// Stream id separating permutation shuffles from the scan's restart seeds.
constexpr std::uint64_t kPermutationStream = 0x7065726D75746521ULL;
}  // namespace

OddsRatio odds_ratio_ci(const ContingencyTable& table) {
  if (table.total() == 0) throw ArgumentError("odds ratio of an all-zero table");
  double a = static_cast<double>(table.alpha);
  double b = static_cast<double>(table.beta);
  double d = static_cast<double>(table.delta);
  double g = static_cast<double>(table.gamma);
  if (table.alpha == 0 || table.beta == 0 || table.delta == 0 || table.gamma == 0) {
    a += 0.5;
    b += 0.5;
    d += 0.5;
    g += 0.5;
  }
  const double log_or = std::log(a * g) - std::log(b * d);
  const double se = std::sqrt(1.0 / a + 1.0 / b + 1.0 / d + 1.0 / g);
  return {std::exp(log_or), std::exp(log_or - kZ95 * se), std::exp(log_or + kZ95 * se)};
}

ContingencyTable subgroup_table(const DiscreteDataset& dataset, std::uint64_t subset_size,
                                std::uint64_t subset_positives) {
  if (subset_positives > subset_size || subset_size > dataset.num_records() ||
      subset_positives > dataset.positives()) {
    throw ArgumentError("subgroup counts inconsistent with the dataset");
  }
  return table_for_value({subset_size, subset_positives}, dataset.num_records(),
                         dataset.positives());
}

PermutationTest permutation_test(const DiscreteDataset& dataset,
                                 std::span<const std::size_t> features, const ScanConfig& config,
                                 double observed_score, std::size_t permutations) {
  if (permutations == 0) throw ArgumentError("permutation count must be at least 1");
  PermutationTest test;
  if (observed_score <= 0.0) {
    test.p_value = 1.0;
    test.exceedances = permutations;
    test.null_scores.assign(permutations, 0.0);
    return test;
  }
  test.null_scores.resize(permutations);
  ScanConfig replicate_config = config;
  replicate_config.threads = 1;
  const auto labels = dataset.outcome();
  parallel_for(permutations, config.threads, [&](std::size_t r) {
    std::vector<std::uint8_t> shuffled(labels.begin(), labels.end());
    std::mt19937_64 rng(derive_seed(config.seed ^ kPermutationStream, r));
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto permuted = dataset.with_outcome(std::move(shuffled));
    test.null_scores[r] = scan(permuted, features, replicate_config).score;
  });
  test.exceedances = static_cast<std::size_t>(
      std::count_if(test.null_scores.begin(), test.null_scores.end(),
                    [&](double s) { return s >= observed_score; }));
  test.p_value = static_cast<double>(1 + test.exceedances) / static_cast<double>(permutations + 1);
  return test;
}

double empirical_p_value(const DiscreteDataset& dataset, std::span<const std::size_t> features,
                         const ScanConfig& config, double observed_score,
                         std::size_t permutations) {
  return permutation_test(dataset, features, config, observed_score, permutations).p_value;
}

SubgroupReport build_report(const DiscreteDataset& dataset, const ScanResult& result,
                            std::optional<double> p_value) {
  SubgroupReport report;
  report.descriptor = result.descriptor;
  report.num_features = result.descriptor.num_features();
  report.num_values = result.descriptor.num_values();
  report.subset_size = result.subset_size;
  report.total_records = dataset.num_records();
  report.subset_percent = static_cast<int>(std::lround(
      100.0 * static_cast<double>(result.subset_size) / static_cast<double>(report.total_records)));
  report.p_value = p_value;
  report.score = result.score;
  report.q_hat = result.q_hat;
  report.elapsed = result.elapsed;
  report.no_divergence = result.subset_size == report.total_records;
  if (!report.no_divergence) {
    const auto odds = odds_ratio_ci(
        subgroup_table(dataset, result.subset_size, result.subset_outcome_sum));
    report.odds_ratio = odds.odds_ratio;
    report.ci_low = odds.ci_low;
    report.ci_high = odds.ci_high;
  }
  return report;
}

}  // namespace safs

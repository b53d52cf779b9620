#include "safs/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "safs/errors.hpp"

namespace safs {

double yules_y(const ContingencyTable& table) {
  if (table.total() == 0) throw ArgumentError("Yule's Y of an all-zero table");
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
  const double concordant = std::sqrt(a * g);
  const double discordant = std::sqrt(b * d);
  return (concordant - discordant) / (concordant + discordant);
}

double gini_index(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("Gini index of an empty vector");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!(v >= 0.0)) throw ArgumentError("Gini index needs non-negative entries");
  }
  std::sort(sorted.begin(), sorted.end());
  const double l1 = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  if (l1 == 0.0) return 0.0;
  const double c = static_cast<double>(sorted.size());
  double weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // 1-based rank i+1: weight (C - rank + 1/2) / C
    weighted += (sorted[i] / l1) * ((c - static_cast<double>(i) - 0.5) / c);
  }
  return 1.0 - 2.0 * weighted;
}

std::string_view to_string(RankingMethod method) {
  return method == RankingMethod::safs ? "safs" : "mi";
}

RankingMethod parse_ranking_method(std::string_view text) {
  if (text == "safs") return RankingMethod::safs;
  if (text == "mi" || text == "mutual-information") return RankingMethod::mutual_information;
  throw ArgumentError("unknown ranking method '" + std::string(text) + "' (expected safs or mi)");
}

std::vector<double> objective_vector(const DiscreteDataset& dataset, std::size_t feature) {
  const auto counts = value_counts(dataset, feature);
  std::vector<double> coefficients;
  coefficients.reserve(counts.size());
  for (const auto& value : counts) {
    coefficients.push_back(
        yules_y(table_for_value(value, dataset.num_records(), dataset.positives())));
  }
  return coefficients;
}

double sparsity_score(const DiscreteDataset& dataset, std::size_t feature) {
  if (dataset.schema(feature).cardinality() == 1) return 0.0;
  auto coefficients = objective_vector(dataset, feature);
  for (double& c : coefficients) c = std::abs(c);
  return gini_index(coefficients);
}

namespace {

FeatureRanking sorted_ranking(const DiscreteDataset& dataset, RankingMethod method,
                              const std::vector<double>& scores) {
  FeatureRanking ranking;
  ranking.method = method;
  ranking.entries.reserve(scores.size());
  for (std::size_t m = 0; m < scores.size(); ++m) {
    ranking.entries.push_back({m, dataset.schema(m).name, scores[m]});
  }
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const RankedFeature& a, const RankedFeature& b) { return a.score > b.score; });
  return ranking;
}

}  // namespace

FeatureRanking safs_rank(const DiscreteDataset& dataset) {
  std::vector<double> scores(dataset.num_features());
  for (std::size_t m = 0; m < scores.size(); ++m) scores[m] = sparsity_score(dataset, m);
  return sorted_ranking(dataset, RankingMethod::safs, scores);
}

double mutual_information(const DiscreteDataset& dataset, std::size_t feature) {
  const auto counts = value_counts(dataset, feature);
  const double n = static_cast<double>(dataset.num_records());
  const double pos = static_cast<double>(dataset.positives());
  const double outcome_marginal[2] = {(n - pos) / n, pos / n};
  double mi = 0.0;
  for (const auto& value : counts) {
    if (value.records == 0) continue;
    const double p_value = static_cast<double>(value.records) / n;
    const double joint_counts[2] = {static_cast<double>(value.records - value.positives),
                                    static_cast<double>(value.positives)};
    for (int y = 0; y < 2; ++y) {
      if (joint_counts[y] == 0.0) continue;
      const double joint = joint_counts[y] / n;
      mi += joint * std::log(joint / (p_value * outcome_marginal[y]));
    }
  }
  // Rounding can leave -1e-17 for independent features.
  return std::max(mi, 0.0);
}

FeatureRanking mutual_information_rank(const DiscreteDataset& dataset) {
  std::vector<double> scores(dataset.num_features());
  for (std::size_t m = 0; m < scores.size(); ++m) scores[m] = mutual_information(dataset, m);
  return sorted_ranking(dataset, RankingMethod::mutual_information, scores);
}

FeatureRanking rank_features(const DiscreteDataset& dataset, RankingMethod method) {
  return method == RankingMethod::safs ? safs_rank(dataset) : mutual_information_rank(dataset);
}

std::vector<std::size_t> top_k(const FeatureRanking& ranking, std::size_t k) {
  if (k < 1 || k > ranking.entries.size()) {
    throw ArgumentError("top-k must be between 1 and " + std::to_string(ranking.entries.size()) +
                        ", got " + std::to_string(k));
  }
  std::vector<std::size_t> features;
  features.reserve(k);
  for (std::size_t i = 0; i < k; ++i) features.push_back(ranking.entries[i].feature);
  return features;
}

}  // namespace safs

#include "safs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <unordered_set>

#include "safs/errors.hpp"

namespace safs {

double rank_biased_overlap(std::span<const std::string> a, std::span<const std::string> b,
                           double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("RBO persistence must lie in (0, 1)");
  if (a.size() != b.size()) throw ArgumentError("RBO needs rankings of equal length");
  {
    std::vector<std::string> sa(a.begin(), a.end());
    std::vector<std::string> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb || std::adjacent_find(sa.begin(), sa.end()) != sa.end()) {
      throw ArgumentError("RBO needs two permutations of the same items");
    }
  }
  if (a.empty()) return 1.0;

  std::unordered_set<std::string_view> seen_a;
  std::unordered_set<std::string_view> seen_b;
  std::size_t overlap = 0;
  double weighted = 0.0;
  double p_power = 1.0;
  double agreement = 0.0;
  for (std::size_t d = 1; d <= a.size(); ++d) {
    const std::string_view x = a[d - 1];
    const std::string_view y = b[d - 1];
    if (x == y) {
      ++overlap;
    } else {
      overlap += seen_b.count(x) + seen_a.count(y);
    }
    seen_a.insert(x);
    seen_b.insert(y);
    p_power *= p;
    agreement = static_cast<double>(overlap) / static_cast<double>(d);
    weighted += p_power * agreement;
  }
  return agreement * p_power + ((1.0 - p) / p) * weighted;
}

RankOverlapMatrix rank_overlap_matrix(std::span<const FeatureRanking> rankings,
                                      std::span<const std::string> names, double p) {
  if (rankings.size() != names.size()) throw ArgumentError("one name per ranking is required");
  RankOverlapMatrix matrix;
  matrix.methods.assign(names.begin(), names.end());
  matrix.persistence = p;
  std::vector<std::vector<std::string>> orders;
  for (const auto& ranking : rankings) {
    std::vector<std::string> order;
    for (const auto& entry : ranking.entries) order.push_back(entry.name);
    orders.push_back(std::move(order));
  }
  const auto n = rankings.size();
  matrix.values.assign(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      matrix.values[i][j] = matrix.values[j][i] = rank_biased_overlap(orders[i], orders[j], p);
    }
  }
  return matrix;
}

double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ArgumentError("Spearman correlation needs two equal-length samples of size >= 2");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<SweepEntry> sweep_k(const DiscreteDataset& dataset, const FeatureRanking& ranking,
                                std::span<const std::size_t> k_values, const ScanConfig& config,
                                std::size_t permutations) {
  const std::size_t m = ranking.entries.size();
  if (k_values.empty()) throw ArgumentError("sweep needs at least one K");
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    if (k_values[i] < 1 || k_values[i] > m) {
      throw ArgumentError("sweep K values must lie in [1, " + std::to_string(m) + "]");
    }
    if (i > 0 && k_values[i] <= k_values[i - 1]) {
      throw ArgumentError("sweep K values must be strictly ascending");
    }
  }

  std::vector<SweepEntry> entries;
  for (auto k : k_values) {
    SweepEntry entry;
    entry.k = k;
    entry.features = top_k(ranking, k);
    entry.scan = scan(dataset, entry.features, config);
    std::optional<double> p_value;
    if (permutations > 0) {
      p_value = empirical_p_value(dataset, entry.features, config, entry.scan.score, permutations);
    }
    entry.report = build_report(dataset, entry.scan, p_value);
    entry.timing = {Phase::scan, std::string(to_string(ranking.method)), k, entry.scan.elapsed};
    entries.push_back(std::move(entry));
  }

  std::vector<std::uint32_t> reference;
  if (k_values.back() == m) {
    reference = entries.back().scan.matched;
  } else {
    reference = scan(dataset, top_k(ranking, m), config).matched;
  }
  for (auto& entry : entries) entry.jaccard_vs_full = jaccard(entry.scan.matched, reference);
  return entries;
}

}  // namespace safs

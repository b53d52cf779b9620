#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "safs/dataset.hpp"
#include "safs/descriptor.hpp"
#include "safs/scanner.hpp"

namespace safs::testing {

// Golden-section maximization of s*log(q) - n*log(1 - mu + q*mu) over
// log q in [lo, hi]; independent of the closed form.
inline double numeric_gamma(double n, double s, double mu, double log_lo, double log_hi) {
  auto f = [&](double t) {
    const double q = std::exp(t);
    return s * t - n * std::log(1.0 - mu + q * mu);
  };
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = log_lo, b = log_hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - ratio * (b - a);
    d = a + ratio * (b - a);
  }
  return f((a + b) / 2.0);
}

// Exhaustive best included set for `feature` with every other constraint of
// `base` held fixed; nullopt means unconstrained. Ties: higher score, then
// unconstrained, then fewer values, then lexicographic.
inline std::optional<std::vector<Code>> exhaustive_feature_best(const DiscreteDataset& d,
                                                                const SubgroupDescriptor& base,
                                                                std::size_t feature,
                                                                Direction direction,
                                                                double* best_score = nullptr) {
  const auto c = d.schema(feature).cardinality();
  const auto column = d.column(feature);
  const auto y = d.outcome();
  auto others = base;
  others.release(feature);
  const auto pool = subgroup_mask(d, others);
  double best = -1.0;
  std::optional<std::vector<Code>> best_set;
  bool have = false;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << c); ++mask) {
    std::uint64_t n = 0, s = 0;
    for (auto i : pool) {
      if (mask >> column[i] & 1) {
        ++n;
        s += y[i];
      }
    }
    if (n == 0) continue;
    const double g = score_counts(n, s, d.global_mean(), direction).gamma;
    std::optional<std::vector<Code>> set;
    if (mask != (std::uint64_t{1} << c) - 1) {
      std::vector<Code> values;
      for (Code v = 0; v < c; ++v) if (mask >> v & 1) values.push_back(v);
      set = values;
    }
    bool take = !have || g > best;
    if (have && g == best) {
      if (!set) {
        take = best_set.has_value();
      } else if (best_set) {
        take = set->size() < best_set->size() ||
               (set->size() == best_set->size() && *set < *best_set);
      }
    }
    if (take) {
      best = g;
      best_set = set;
      have = true;
    }
  }
  if (best_score) *best_score = best;
  return best_set;
}

}  // namespace safs::testing

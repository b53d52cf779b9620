#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "safs/objective.hpp"

namespace safs::testing {

// Violations of the sparsity requirements Gini is supposed to satisfy,
// counted over random non-negative vectors.
struct GiniViolations {
  int robin_hood = 0;
  int scaling = 0;
  int rising_tide = 0;
  int cloning = 0;
  int bill_gates = 0;
  int babies = 0;
  int range = 0;

  int total() const {
    return robin_hood + scaling + rising_tide + cloning + bill_gates + babies + range;
  }
};

inline std::vector<double> random_sparse_vector(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> length(2, 64);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::bernoulli_distribution zero(0.1);
  std::vector<double> v(static_cast<std::size_t>(length(rng)));
  for (auto& x : v) x = zero(rng) ? 0.0 : value(rng);
  if (std::accumulate(v.begin(), v.end(), 0.0) == 0.0) v[0] = 1.0;
  return v;
}

inline void check_gini_properties(const std::vector<double>& v, std::mt19937_64& rng,
                                  GiniViolations& out) {
  const double g = gini_index(v);
  if (!(g >= 0.0 && g < 1.0)) ++out.range;

  const auto [min_it, max_it] = std::minmax_element(v.begin(), v.end());
  const bool uniform = *min_it == *max_it;

  // Robin Hood: move a quarter of the gap from a richer to a poorer entry.
  if (!uniform) {
    auto robbed = v;
    const auto rich = static_cast<std::size_t>(max_it - v.begin());
    const auto poor = static_cast<std::size_t>(min_it - v.begin());
    const double transfer = (v[rich] - v[poor]) / 4.0;
    robbed[rich] -= transfer;
    robbed[poor] += transfer;
    if (!(gini_index(robbed) < g)) ++out.robin_hood;
  }

  // Scaling.
  std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
  const double c = std::pow(10.0, log_scale(rng));
  auto scaled = v;
  for (auto& x : scaled) x *= c;
  if (std::abs(gini_index(scaled) - g) > 1e-12) ++out.scaling;

  // Rising tide.
  if (!uniform) {
    std::uniform_real_distribution<double> tide(1e-3, 1.0);
    auto raised = v;
    const double t = tide(rng);
    for (auto& x : raised) x += t;
    if (!(gini_index(raised) < g)) ++out.rising_tide;
  }

  // Cloning.
  auto cloned = v;
  cloned.insert(cloned.end(), v.begin(), v.end());
  if (std::abs(gini_index(cloned) - g) > 1e-9) ++out.cloning;

  // Bill Gates: grow the largest entry geometrically; Gini never falls and
  // approaches its supremum 1 - 1/C.
  {
    auto grown = v;
    const auto top = static_cast<std::size_t>(max_it - v.begin());
    const double l1 = std::accumulate(v.begin(), v.end(), 0.0);
    double previous = g;
    bool monotone = true;
    for (int k = 0; k <= 40; ++k) {
      grown[top] = v[top] + std::ldexp(l1, k);
      const double next = gini_index(grown);
      if (next < previous - 1e-12) monotone = false;
      previous = next;
    }
    const double supremum = 1.0 - 1.0 / static_cast<double>(v.size());
    if (!monotone || std::abs(previous - supremum) > 1e-9) ++out.bill_gates;
  }

  // Babies: appending a zero makes the vector strictly sparser.
  auto with_baby = v;
  with_baby.push_back(0.0);
  if (!(gini_index(with_baby) > g)) ++out.babies;
}

}  // namespace safs::testing

#include "safs/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "safs/errors.hpp"
#include "safs/parallel.hpp"
#include "safs/random.hpp"

namespace safs {

std::string_view to_string(Direction direction) {
  return direction == Direction::over ? "over" : "under";
}

Direction parse_direction(std::string_view text) {
  if (text == "over") return Direction::over;
  if (text == "under") return Direction::under;
  throw ArgumentError("unknown direction '" + std::string(text) + "' (expected over or under)");
}

double q_mle(std::uint64_t n_s, std::uint64_t sum_y, double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw ArgumentError("global rate must lie strictly in (0, 1)");
  if (n_s == 0 || sum_y > n_s) throw ArgumentError("q_mle needs 0 <= sum_y <= n_s and n_s >= 1");
  if (sum_y == n_s) return std::numeric_limits<double>::infinity();
  if (sum_y == 0) return 0.0;
  return (static_cast<double>(sum_y) * (1.0 - mu)) /
         (mu * static_cast<double>(n_s - sum_y));
}

Score score_counts(std::uint64_t n_s, std::uint64_t sum_y, double mu, Direction direction) {
  const double q = q_mle(n_s, sum_y, mu);
  const double n = static_cast<double>(n_s);
  const double s = static_cast<double>(sum_y);
  if (direction == Direction::over) {
    if (q <= 1.0) return {0.0, 1.0};
    if (std::isinf(q)) return {-n * std::log(mu), q};
  } else {
    if (q >= 1.0) return {0.0, 1.0};
    if (q == 0.0) return {-n * std::log1p(-mu), q};
  }
  const double gamma = s * std::log(q) - n * std::log1p(mu * (q - 1.0));
  return {std::max(gamma, 0.0), q};
}

namespace {

double checked_mean(const DiscreteDataset& dataset) {
  if (dataset.positives() == 0 || dataset.positives() == dataset.num_records()) {
    throw DataError("outcome is constant (global rate " + std::to_string(dataset.global_mean()) +
                    "); nothing to scan for");
  }
  return dataset.global_mean();
}

void check_features(const DiscreteDataset& dataset, std::span<const std::size_t> features) {
  if (features.empty()) throw ArgumentError("feature list is empty");
  std::set<std::size_t> seen;
  for (auto f : features) {
    if (f >= dataset.num_features()) throw ArgumentError("feature index out of range");
    if (!seen.insert(f).second) throw ArgumentError("feature list repeats a feature");
  }
}

__extension__ using Wide = unsigned __int128;

// Rate of a over rate of b, compared exactly on integer counts.
bool higher_rate(const ValueCount& a, const ValueCount& b) {
  return static_cast<Wide>(a.positives) * b.records > static_cast<Wide>(b.positives) * a.records;
}

/// Coordinate-ascent state over a fixed list of feature slots.
///
/// violations_[i] counts the constrained slots whose included set excludes
/// record i, so the records matching "every constraint except slot k" are
/// found in one pass without re-testing the other constraints.
class AscentState {
 public:
  AscentState(const DiscreteDataset& dataset, std::span<const std::size_t> features,
              Direction direction)
      : outcome_(dataset.outcome()),
        features_(features.begin(), features.end()),
        mu_(checked_mean(dataset)),
        direction_(direction),
        violations_(dataset.num_records(), 0) {
    for (auto f : features_) {
      columns_.push_back(dataset.column(f));
      cardinality_.push_back(dataset.schema(f).cardinality());
    }
    allowed_.resize(features_.size());
  }

  std::size_t slots() const { return features_.size(); }

  void assign(const SubgroupDescriptor& descriptor) {
    for (std::size_t k = 0; k < slots(); ++k) set_slot(k, std::nullopt);
    for (const auto& [feature, values] : descriptor.constraints()) {
      auto it = std::find(features_.begin(), features_.end(), feature);
      if (it == features_.end()) {
        throw ArgumentError("descriptor constrains a feature outside the scanned list");
      }
      set_slot(static_cast<std::size_t>(it - features_.begin()), values);
    }
  }

  void set_slot(std::size_t k, const std::optional<std::vector<Code>>& values) {
    std::vector<char> next;
    if (values) {
      next.assign(cardinality_[k], 0);
      for (Code v : *values) next[v] = 1;
    }
    const auto& prev = allowed_[k];
    const auto column = columns_[k];
    for (std::size_t i = 0; i < violations_.size(); ++i) {
      const Code c = column[i];
      const int was_bad = !prev.empty() && !prev[c];
      const int is_bad = !next.empty() && !next[c];
      violations_[i] += is_bad - was_bad;
    }
    allowed_[k] = std::move(next);
  }

  ValueCount matched_counts() const {
    ValueCount counts;
    for (std::size_t i = 0; i < violations_.size(); ++i) {
      if (violations_[i] == 0) {
        ++counts.records;
        counts.positives += outcome_[i];
      }
    }
    return counts;
  }

  double current_score() const {
    const auto counts = matched_counts();
    if (counts.records == 0) throw ArgumentError("subgroup matches no records");
    return score_counts(counts.records, counts.positives, mu_, direction_).gamma;
  }

  FeatureStep best_step(std::size_t k) const {
    const auto& own = allowed_[k];
    const auto column = columns_[k];
    std::vector<ValueCount> cells(cardinality_[k]);
    for (std::size_t i = 0; i < violations_.size(); ++i) {
      const Code c = column[i];
      const unsigned own_bad = !own.empty() && !own[c];
      if (violations_[i] - own_bad == 0) {
        ++cells[c].records;
        cells[c].positives += outcome_[i];
      }
    }
    std::vector<Code> order;
    for (Code v = 0; v < cells.size(); ++v) {
      if (cells[v].records > 0) order.push_back(v);
    }
    if (order.empty()) throw ArgumentError("no records match the other constraints");
    std::stable_sort(order.begin(), order.end(), [&](Code a, Code b) {
      return direction_ == Direction::over ? higher_rate(cells[a], cells[b])
                                           : higher_rate(cells[b], cells[a]);
    });

    ValueCount running;
    double best = -1.0;
    std::size_t best_length = 0;
    for (std::size_t len = 1; len <= order.size(); ++len) {
      running.records += cells[order[len - 1]].records;
      running.positives += cells[order[len - 1]].positives;
      const double gamma = score_counts(running.records, running.positives, mu_, direction_).gamma;
      // Ties keep the shorter prefix, except that the full prefix wins any tie.
      if (gamma > best || (len == order.size() && gamma >= best)) {
        best = gamma;
        best_length = len;
      }
    }
    FeatureStep step;
    step.score = best;
    if (best_length < order.size()) {
      std::vector<Code> included(order.begin(), order.begin() + best_length);
      std::sort(included.begin(), included.end());
      step.included = std::move(included);
    }
    return step;
  }

  SubgroupDescriptor descriptor() const {
    SubgroupDescriptor out;
    for (std::size_t k = 0; k < slots(); ++k) {
      if (allowed_[k].empty()) continue;
      std::vector<Code> values;
      for (Code v = 0; v < allowed_[k].size(); ++v) {
        if (allowed_[k][v]) values.push_back(v);
      }
      out.constrain(features_[k], std::move(values), cardinality_[k]);
    }
    return out;
  }

  std::size_t cardinality(std::size_t k) const { return cardinality_[k]; }

 private:
  std::span<const std::uint8_t> outcome_;
  std::vector<std::size_t> features_;
  std::vector<std::span<const Code>> columns_;
  std::vector<std::size_t> cardinality_;
  std::vector<std::vector<char>> allowed_;
  double mu_;
  Direction direction_;
  std::vector<std::uint32_t> violations_;
};

bool improves(double after, double before) {
  return after > before + 1e-12 * std::max(1.0, std::abs(before));
}

AscentResult run_ascent(AscentState& state, Direction, std::size_t max_passes,
                        std::mt19937_64& rng) {
  if (max_passes == 0) throw ArgumentError("max passes must be at least 1");
  AscentResult result;
  double score = state.current_score();
  std::vector<std::size_t> order(state.slots());
  std::iota(order.begin(), order.end(), 0);
  while (result.passes < max_passes) {
    ++result.passes;
    std::shuffle(order.begin(), order.end(), rng);
    const double pass_start = score;
    for (auto k : order) {
      auto step = state.best_step(k);
      state.set_slot(k, step.included);
      score = step.score;
      result.step_scores.push_back(score);
    }
    if (!improves(score, pass_start)) break;
  }
  result.descriptor = state.descriptor();
  result.score = score;
  return result;
}

// Each slot gets a uniformly random non-empty value subset; redrawn while the
// combination matches nothing.
SubgroupDescriptor random_start(AscentState& state, std::span<const std::size_t> features,
                                std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  for (int attempt = 0; attempt < 64; ++attempt) {
    SubgroupDescriptor start;
    for (std::size_t k = 0; k < features.size(); ++k) {
      const auto c = state.cardinality(k);
      std::vector<Code> values;
      while (values.empty()) {
        for (Code v = 0; v < c; ++v) {
          if (coin(rng)) values.push_back(v);
        }
      }
      start.constrain(features[k], std::move(values), c);
    }
    state.assign(start);
    if (state.matched_counts().records > 0) return start;
  }
  SubgroupDescriptor unconstrained;
  state.assign(unconstrained);
  return unconstrained;
}

bool better(double score, const SubgroupDescriptor& descriptor, double best_score,
            const SubgroupDescriptor& best_descriptor) {
  if (score != best_score) return score > best_score;
  return more_compact(descriptor, best_descriptor);
}

ScanResult finish(const DiscreteDataset& dataset, SubgroupDescriptor descriptor,
                  Direction direction) {
  ScanResult result;
  result.matched = subgroup_mask(dataset, descriptor);
  result.subset_size = result.matched.size();
  const auto outcome = dataset.outcome();
  for (auto i : result.matched) result.subset_outcome_sum += outcome[i];
  const auto score =
      score_counts(result.subset_size, result.subset_outcome_sum, dataset.global_mean(), direction);
  result.score = score.gamma;
  result.q_hat = score.q_hat;
  result.descriptor = std::move(descriptor);
  return result;
}

}  // namespace

Score score_subgroup(const DiscreteDataset& dataset, const SubgroupDescriptor& descriptor,
                     Direction direction) {
  const double mu = checked_mean(dataset);
  const auto counts = subgroup_counts(dataset, descriptor);
  if (counts.records == 0) throw ArgumentError("subgroup matches no records");
  return score_counts(counts.records, counts.positives, mu, direction);
}

FeatureStep optimize_feature(const DiscreteDataset& dataset,
                             const SubgroupDescriptor& descriptor, std::size_t feature,
                             Direction direction) {
  validate(dataset, descriptor);
  if (feature >= dataset.num_features()) throw ArgumentError("feature index out of range");
  std::vector<std::size_t> features{feature};
  for (const auto& [f, values] : descriptor.constraints()) {
    if (f != feature) features.push_back(f);
  }
  AscentState state(dataset, features, direction);
  state.assign(descriptor);
  return state.best_step(0);
}

AscentResult local_ascent(const DiscreteDataset& dataset, std::span<const std::size_t> features,
                          const SubgroupDescriptor& start, Direction direction,
                          std::size_t max_passes, std::uint64_t seed) {
  check_features(dataset, features);
  validate(dataset, start);
  AscentState state(dataset, features, direction);
  state.assign(start);
  std::mt19937_64 rng(seed);
  return run_ascent(state, direction, max_passes, rng);
}

ScanResult scan(const DiscreteDataset& dataset, std::span<const std::size_t> features,
                const ScanConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  check_features(dataset, features);
  checked_mean(dataset);
  if (config.restarts == 0) throw ArgumentError("restarts must be at least 1");
  if (config.max_passes == 0) throw ArgumentError("max passes must be at least 1");

  std::vector<AscentResult> outcomes(config.restarts);
  parallel_for(config.restarts, config.threads, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(config.seed, r));
    AscentState state(dataset, features, config.direction);
    if (r > 0) random_start(state, features, rng);
    outcomes[r] = run_ascent(state, config.direction, config.max_passes, rng);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r) {
    if (better(outcomes[r].score, outcomes[r].descriptor, outcomes[best].score,
               outcomes[best].descriptor)) {
      best = r;
    }
  }
  auto result = finish(dataset, std::move(outcomes[best].descriptor), config.direction);
  result.elapsed = std::chrono::steady_clock::now() - started;
  return result;
}

namespace {

struct Cells {
  std::vector<std::vector<Code>> codes;  // [cell][slot]
  std::vector<ValueCount> counts;
};

Cells aggregate_cells(const DiscreteDataset& dataset, std::span<const std::size_t> features) {
  std::map<std::vector<Code>, ValueCount> joint;
  const auto outcome = dataset.outcome();
  std::vector<std::span<const Code>> columns;
  for (auto f : features) columns.push_back(dataset.column(f));
  std::vector<Code> key(features.size());
  for (std::size_t i = 0; i < dataset.num_records(); ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) key[k] = columns[k][i];
    auto& cell = joint[key];
    ++cell.records;
    cell.positives += outcome[i];
  }
  Cells cells;
  for (auto& [k, v] : joint) {
    cells.codes.push_back(k);
    cells.counts.push_back(v);
  }
  return cells;
}

struct Exhaustive {
  const Cells& cells;
  std::span<const std::size_t> features;
  std::vector<std::size_t> cardinality;
  double mu;
  Direction direction;
  std::vector<std::uint64_t> masks;
  double best_score = -1.0;
  SubgroupDescriptor best;

  void visit(std::size_t depth, const std::vector<std::uint32_t>& alive) {
    if (alive.empty()) return;
    if (depth == features.size()) {
      ValueCount total;
      for (auto c : alive) {
        total.records += cells.counts[c].records;
        total.positives += cells.counts[c].positives;
      }
      const double gamma = score_counts(total.records, total.positives, mu, direction).gamma;
      if (gamma < best_score) return;
      auto candidate = descriptor();
      if (better(gamma, candidate, best_score, best)) {
        best_score = gamma;
        best = std::move(candidate);
      }
      return;
    }
    const std::uint64_t full = (std::uint64_t{1} << cardinality[depth]) - 1;
    std::vector<std::uint32_t> next;
    for (std::uint64_t mask = 1; mask <= full; ++mask) {
      masks[depth] = mask;
      next.clear();
      for (auto c : alive) {
        if (mask >> cells.codes[c][depth] & 1) next.push_back(c);
      }
      visit(depth + 1, next);
    }
  }

  SubgroupDescriptor descriptor() const {
    SubgroupDescriptor d;
    for (std::size_t k = 0; k < features.size(); ++k) {
      std::vector<Code> values;
      for (Code v = 0; v < cardinality[k]; ++v) {
        if (masks[k] >> v & 1) values.push_back(v);
      }
      d.constrain(features[k], std::move(values), cardinality[k]);
    }
    return d;
  }
};

}  // namespace

ScanResult brute_force_scan(const DiscreteDataset& dataset, std::span<const std::size_t> features,
                            Direction direction) {
  const auto started = std::chrono::steady_clock::now();
  check_features(dataset, features);
  const double mu = checked_mean(dataset);
  double space = 1.0;
  std::vector<std::size_t> cardinality;
  for (auto f : features) {
    const auto c = dataset.schema(f).cardinality();
    space *= std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(c, 1000))) - 1.0;
    cardinality.push_back(c);
  }
  if (space > kBruteForceLimit) {
    throw ArgumentError("exhaustive search space of " + std::to_string(space) +
                        " descriptors exceeds the limit of " + std::to_string(kBruteForceLimit));
  }
  const auto cells = aggregate_cells(dataset, features);
  Exhaustive search{cells, features, cardinality, mu, direction,
                    std::vector<std::uint64_t>(features.size(), 0), -1.0, {}};
  std::vector<std::uint32_t> all(cells.counts.size());
  std::iota(all.begin(), all.end(), 0);
  search.visit(0, all);
  auto result = finish(dataset, std::move(search.best), direction);
  result.elapsed = std::chrono::steady_clock::now() - started;
  return result;
}

}  // namespace safs

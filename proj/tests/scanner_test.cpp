#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "safs/errors.hpp"
#include "safs/evaluation.hpp"
#include "safs/scanner.hpp"
#include "safs/synthetic.hpp"
#include "scanner_oracles.hpp"
#include "test_util.hpp"

namespace safs {
namespace {

using testing::make_coded;

TEST(QMle, Examples) {
  EXPECT_DOUBLE_EQ(q_mle(10, 2, 0.2), 1.0);
  EXPECT_DOUBLE_EQ(q_mle(10, 5, 0.25), 3.0);
  EXPECT_TRUE(std::isinf(q_mle(4, 4, 0.5)));
  EXPECT_EQ(q_mle(4, 0, 0.5), 0.0);
  EXPECT_THROW(q_mle(4, 1, 0.0), ArgumentError);
  EXPECT_THROW(q_mle(4, 1, 1.0), ArgumentError);
  EXPECT_THROW(q_mle(0, 0, 0.5), ArgumentError);
  EXPECT_THROW(q_mle(3, 4, 0.5), ArgumentError);
}

TEST(QMle, IsTheNumericMaximizer) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t n = 2 + rng() % 500;
    const std::uint64_t s = 1 + rng() % (n - 1);
    const double mu = 0.02 + 0.96 * std::uniform_real_distribution<double>()(rng);
    const double q = q_mle(n, s, mu);
    const double closed = s * std::log(q) - n * std::log(1 - mu + q * mu);
    const double numeric = testing::numeric_gamma(n, s, mu, -20, 20);
    EXPECT_NEAR(closed, numeric, 1e-7 * std::max(1.0, std::abs(numeric)));
  }
}

TEST(ScoreCounts, Examples) {
  const auto null_rate = score_counts(10, 2, 0.2, Direction::over);
  EXPECT_EQ(null_rate.gamma, 0.0);
  EXPECT_EQ(null_rate.q_hat, 1.0);

  const auto over = score_counts(10, 5, 0.25, Direction::over);
  EXPECT_DOUBLE_EQ(over.q_hat, 3.0);
  EXPECT_NEAR(over.gamma, 1.43841036225890463719609502997, 1e-13);
  // Independent route: maximize over q in (1, 100].
  EXPECT_NEAR(over.gamma, testing::numeric_gamma(10, 5, 0.25, 0.0, std::log(100.0)), 1e-9);

  const auto under_observed = score_counts(10, 1, 0.25, Direction::over);
  EXPECT_EQ(under_observed.gamma, 0.0);
  EXPECT_EQ(under_observed.q_hat, 1.0);
}

TEST(ScoreCounts, AllPositiveAndAllNegativeLimits) {
  const auto all_pos = score_counts(8, 8, 0.3, Direction::over);
  EXPECT_TRUE(std::isinf(all_pos.q_hat));
  EXPECT_NEAR(all_pos.gamma, -8 * std::log(0.3), 1e-12);
  // Limit approached by nearly-all-positive subsets.
  EXPECT_NEAR(score_counts(800000, 799999, 0.3, Direction::over).gamma / 100000.0,
              -8 * std::log(0.3), 1e-3);

  const auto all_neg = score_counts(8, 0, 0.3, Direction::under);
  EXPECT_EQ(all_neg.q_hat, 0.0);
  EXPECT_NEAR(all_neg.gamma, -8 * std::log(0.7), 1e-12);
  EXPECT_EQ(score_counts(8, 8, 0.3, Direction::under).gamma, 0.0);
  EXPECT_EQ(score_counts(8, 0, 0.3, Direction::over).gamma, 0.0);
}

TEST(ScoreCounts, NonNegativeAndZeroExactlyWhenClamped) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t n = 1 + rng() % 300;
    const std::uint64_t s = rng() % (n + 1);
    const double mu = 0.05 + 0.9 * std::uniform_real_distribution<double>()(rng);
    for (auto dir : {Direction::over, Direction::under}) {
      const auto sc = score_counts(n, s, mu, dir);
      ASSERT_GE(sc.gamma, 0.0);
      const double rate = static_cast<double>(s) / static_cast<double>(n);
      const bool divergent = dir == Direction::over ? rate > mu : rate < mu;
      if (!divergent) {
        EXPECT_EQ(sc.gamma, 0.0);
        EXPECT_EQ(sc.q_hat, 1.0);
      } else {
        EXPECT_NE(sc.q_hat, 1.0);
      }
    }
  }
}

TEST(ScoreSubgroup, ErrorsAndAgreementWithCounts) {
  const auto d = make_coded({2}, {{0, 0, 1, 1}}, {1, 1, 0, 0});
  SubgroupDescriptor a;
  a.constrain(0, {0}, 2);
  const auto sc = score_subgroup(d, a, Direction::over);
  EXPECT_NEAR(sc.gamma, -2 * std::log(0.5), 1e-12);

  const auto constant = make_coded({2}, {{0, 1}}, {1, 1});
  EXPECT_THROW(score_subgroup(constant, {}, Direction::over), DataError);

  const auto sparse = make_coded({3}, {{0, 1}}, {1, 0});
  SubgroupDescriptor empty_match;
  empty_match.constrain(0, {2}, 3);
  EXPECT_THROW(score_subgroup(sparse, empty_match, Direction::over), ArgumentError);
}

TEST(OptimizeFeature, TwoValueExample) {
  // Value A: rate 0.9, value B: rate 0.1, global rate 0.5.
  std::vector<Code> column;
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 100; ++i) {
    column.push_back(i < 50 ? 0 : 1);
    y.push_back(i < 50 ? (i < 45) : (i < 55));
  }
  const auto d = make_coded({2}, {column}, y);
  ASSERT_DOUBLE_EQ(d.global_mean(), 0.5);
  const auto step = optimize_feature(d, {}, 0, Direction::over);
  ASSERT_TRUE(step.included.has_value());
  EXPECT_EQ(*step.included, std::vector<Code>{0});
  SubgroupDescriptor a;
  a.constrain(0, {0}, 2);
  EXPECT_DOUBLE_EQ(step.score, score_subgroup(d, a, Direction::over).gamma);
  EXPECT_GT(step.score, score_subgroup(d, {}, Direction::over).gamma);

  const auto under = optimize_feature(d, {}, 0, Direction::under);
  ASSERT_TRUE(under.included.has_value());
  EXPECT_EQ(*under.included, std::vector<Code>{1});
}

TEST(OptimizeFeature, DropsConstraintWhenFullSetIsBest) {
  // Every value has the global rate: nothing beats the unconstrained set.
  const auto d = make_coded({3}, {{0, 0, 1, 1, 2, 2}}, {1, 0, 1, 0, 1, 0});
  SubgroupDescriptor start;
  start.constrain(0, {1}, 3);
  const auto step = optimize_feature(d, start, 0, Direction::over);
  EXPECT_FALSE(step.included.has_value());
  EXPECT_EQ(step.score, 0.0);
}

TEST(OptimizeFeature, ErrorsWhenOtherConstraintsMatchNothing) {
  const auto d = make_coded({2, 2, 2}, {{0, 1}, {0, 1}, {0, 1}}, {1, 0});
  SubgroupDescriptor impossible;
  impossible.constrain(1, {0}, 2);
  impossible.constrain(2, {1}, 2);
  EXPECT_THROW(optimize_feature(d, impossible, 0, Direction::over), ArgumentError);
}

TEST(OptimizeFeature, PrefixEqualsExhaustiveBestWithOtherConstraints) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 150; ++trial) {
    const std::vector<std::size_t> card{2 + rng() % 7, 2 + rng() % 3, 2 + rng() % 3};
    PlantedSpec spec;
    spec.records = 60 + rng() % 300;
    spec.cardinalities = card;
    spec.planted.constrain(0, {0, 1}, card[0]);
    spec.inside_rate = 0.6;
    spec.background_rate = 0.3;
    spec.seed = rng();
    const auto d = generate_planted(spec).dataset;
    if (d.positives() == 0 || d.positives() == d.num_records()) continue;
    SubgroupDescriptor base;
    base.constrain(1, {0}, card[1]);
    if (rng() % 2) base.constrain(0, {static_cast<Code>(rng() % card[0])}, card[0]);
    if (subgroup_counts(d, base).records == 0) continue;
    for (auto dir : {Direction::over, Direction::under}) {
      double best = 0.0;
      const auto expected = testing::exhaustive_feature_best(d, base, 0, dir, &best);
      const auto step = optimize_feature(d, base, 0, dir);
      EXPECT_EQ(step.included, expected) << "trial " << trial;
      EXPECT_EQ(step.score, best);
    }
  }
}

TEST(Scan, ValidatesInputs) {
  const auto d = make_coded({2}, {{0, 1, 0}}, {1, 0, 0});
  const std::vector<std::size_t> none;
  EXPECT_THROW(scan(d, none, {}), ArgumentError);
  const std::vector<std::size_t> bad{3};
  EXPECT_THROW(scan(d, bad, {}), ArgumentError);
  const std::vector<std::size_t> dup{0, 0};
  EXPECT_THROW(scan(d, dup, {}), ArgumentError);
  const auto constant = make_coded({2}, {{0, 1}}, {0, 0});
  const std::vector<std::size_t> one{0};
  EXPECT_THROW(scan(constant, one, {}), DataError);
  ScanConfig zero_restarts;
  zero_restarts.restarts = 0;
  EXPECT_THROW(scan(d, one, zero_restarts), ArgumentError);
}

TEST(Scan, ResultInvariantsAndSeededDeterminism) {
  PlantedSpec spec;
  spec.records = 1200;
  spec.cardinalities = {3, 4, 3, 5, 4};
  spec.planted.constrain(1, {0, 1}, 4);
  spec.planted.constrain(3, {2}, 5);
  spec.seed = 77;
  const auto d = generate_planted(spec).dataset;
  const std::vector<std::size_t> features{0, 1, 2, 3, 4};
  ScanConfig config;
  config.seed = 99;
  const auto a = scan(d, features, config);
  const auto b = scan(d, features, config);
  EXPECT_EQ(a.descriptor, b.descriptor);
  EXPECT_EQ(a.score, b.score);
  EXPECT_EQ(a.matched, b.matched);

  ScanConfig threaded = config;
  threaded.threads = 4;
  const auto c = scan(d, features, threaded);
  EXPECT_EQ(c.descriptor, a.descriptor);
  EXPECT_EQ(c.score, a.score);

  EXPECT_EQ(a.subset_size, a.matched.size());
  EXPECT_LE(a.subset_outcome_sum, a.subset_size);
  EXPECT_NEAR(a.score, score_subgroup(d, a.descriptor, Direction::over).gamma, 1e-9);
  EXPECT_EQ(a.matched, subgroup_mask(d, a.descriptor));
  EXPECT_GT(a.elapsed.count(), 0);
}

TEST(Scan, AscentIsMonotoneWithinRestarts) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = generate_noise(300, {3, 4, 2, 5}, 0.3, rng());
    if (d.positives() == 0) continue;
    const std::vector<std::size_t> features{0, 1, 2, 3};
    SubgroupDescriptor start;
    start.constrain(0, {static_cast<Code>(rng() % 3)}, 3);
    start.constrain(3, {0, 1, 2}, 5);
    if (subgroup_counts(d, start).records == 0) continue;
    for (auto dir : {Direction::over, Direction::under}) {
      const auto ascent = local_ascent(d, features, start, dir, 50, rng());
      double previous = score_subgroup(d, start, dir).gamma;
      for (double s : ascent.step_scores) {
        EXPECT_GE(s, previous - 1e-12);
        previous = s;
      }
      EXPECT_EQ(ascent.score, ascent.step_scores.back());
      EXPECT_NEAR(ascent.score, score_subgroup(d, ascent.descriptor, dir).gamma, 1e-9);
      EXPECT_LE(ascent.passes, 50u);
    }
  }
}

TEST(Scan, MoreRestartsNeverScoreLower) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 15; ++trial) {
    const auto d = generate_noise(250, {3, 3, 4, 4, 2}, 0.35, rng());
    const std::vector<std::size_t> features{0, 1, 2, 3, 4};
    ScanConfig config;
    config.seed = rng();
    double previous = -1.0;
    for (std::size_t r = 1; r <= 8; ++r) {
      config.restarts = r;
      const double s = scan(d, features, config).score;
      EXPECT_GE(s, previous);
      previous = s;
    }
  }
}

TEST(BruteForce, OneBinaryFeature) {
  const auto d = make_coded({2}, {{0, 0, 0, 1, 1, 1}}, {1, 1, 0, 0, 0, 1});
  const std::vector<std::size_t> f{0};
  const auto r = brute_force_scan(d, f, Direction::over);
  SubgroupDescriptor zero;
  zero.constrain(0, {0}, 2);
  EXPECT_EQ(r.descriptor, zero);
  EXPECT_NEAR(r.score, score_subgroup(d, zero, Direction::over).gamma, 1e-15);
}

TEST(BruteForce, ConstantRatePicksEmptyDescriptor) {
  const auto d = make_coded({2, 2}, {{0, 0, 1, 1, 0, 0, 1, 1}, {0, 1, 0, 1, 0, 1, 0, 1}},
                            {1, 0, 1, 0, 0, 1, 0, 1});
  const std::vector<std::size_t> f{0, 1};
  const auto r = brute_force_scan(d, f, Direction::over);
  EXPECT_TRUE(r.descriptor.empty());
  EXPECT_EQ(r.score, 0.0);
  EXPECT_EQ(r.subset_size, d.num_records());
}

TEST(BruteForce, GuardsSearchSpace) {
  const auto d = generate_noise(50, {12, 12}, 0.4, 1);
  const std::vector<std::size_t> f{0, 1};
  EXPECT_THROW(brute_force_scan(d, f, Direction::over), ArgumentError);
}

TEST(BruteForce, ScanNeverExceedsAndUsuallyMatches) {
  std::mt19937_64 rng(8);
  int matches = 0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<std::size_t> card;
    for (int f = 0; f < 4; ++f) card.push_back(2 + rng() % 2);
    PlantedSpec spec;
    spec.records = 200;
    spec.cardinalities = card;
    spec.planted.constrain(0, {0}, card[0]);
    spec.inside_rate = 0.5;
    spec.background_rate = 0.25;
    spec.seed = rng();
    const auto d = generate_planted(spec).dataset;
    const std::vector<std::size_t> features{0, 1, 2, 3};
    ScanConfig config;
    config.restarts = 20;
    config.seed = rng();
    const auto heuristic = scan(d, features, config);
    const auto exact = brute_force_scan(d, features, Direction::over);
    EXPECT_LE(heuristic.score, exact.score);
    if (heuristic.score == exact.score) ++matches;
  }
  EXPECT_GE(matches, trials * 95 / 100);
}

TEST(Scan, RecoversPlantedSubgroup) {
  PlantedSpec spec;
  spec.records = 5000;
  spec.cardinalities = {3, 4, 3, 4, 3, 4};
  spec.planted.constrain(0, {0}, 3);
  spec.planted.constrain(1, {0, 1}, 4);  // f1=A AND f2 in {X, Y}
  spec.inside_rate = 0.9;
  spec.background_rate = 0.2;
  spec.seed = 2024;
  const auto data = generate_planted(spec);
  const std::vector<std::size_t> features{0, 1, 2, 3, 4, 5};
  ScanConfig config;
  config.seed = 1;
  const auto r = scan(data.dataset, features, config);
  EXPECT_EQ(r.descriptor, spec.planted);
  EXPECT_GE(jaccard(r.matched, data.planted_records), 0.95);
}

TEST(Direction, Parsing) {
  EXPECT_EQ(parse_direction("over"), Direction::over);
  EXPECT_EQ(parse_direction("under"), Direction::under);
  EXPECT_THROW(parse_direction("sideways"), ArgumentError);
}

}  // namespace
}  // namespace safs

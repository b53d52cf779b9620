#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "safs/dataset.hpp"

namespace safs {

// Yule's Y, (sqrt(a*g) - sqrt(b*d)) / (sqrt(a*g) + sqrt(b*d)). When any cell is
// zero, 0.5 is added to all four cells first. Throws ArgumentError on an
// all-zero table.
double yules_y(const ContingencyTable& table);

// Gini sparsity of a non-negative vector. 0 for uniform vectors and for the
// zero vector, 1 - 1/C for one-hot vectors. Throws ArgumentError on empty
// input or a negative entry.
double gini_index(std::span<const double> values);

enum class RankingMethod { safs, mutual_information };

std::string_view to_string(RankingMethod method);
RankingMethod parse_ranking_method(std::string_view text);

struct RankedFeature {
  std::size_t feature = 0;
  std::string name;
  double score = 0.0;

  bool operator==(const RankedFeature&) const = default;
};

/// Features in descending score order; ties go to the lower feature index.
struct FeatureRanking {
  RankingMethod method = RankingMethod::safs;
  std::vector<RankedFeature> entries;

  bool operator==(const FeatureRanking&) const = default;
};

// Yule's Y of every value of a feature against the rest of the data.
std::vector<double> objective_vector(const DiscreteDataset& dataset, std::size_t feature);

// Gini sparsity of |Y| across the values of one feature; 0 for single-valued
// features.
double sparsity_score(const DiscreteDataset& dataset, std::size_t feature);

FeatureRanking safs_rank(const DiscreteDataset& dataset);

// Empirical mutual information with the outcome, natural log.
double mutual_information(const DiscreteDataset& dataset, std::size_t feature);

FeatureRanking mutual_information_rank(const DiscreteDataset& dataset);

FeatureRanking rank_features(const DiscreteDataset& dataset, RankingMethod method);

// Feature indices of the first k entries. Throws ArgumentError unless
// 1 <= k <= M.
std::vector<std::size_t> top_k(const FeatureRanking& ranking, std::size_t k);

}  // namespace safs

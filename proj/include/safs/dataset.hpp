#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace safs {

using Code = std::uint32_t;

struct FeatureSchema {
  std::string name;
  std::vector<std::string> labels;
  // Upper-inclusive bin edges when the column was numeric and discretized.
  std::vector<double> bin_edges;

  std::size_t cardinality() const { return labels.size(); }
  std::optional<Code> code_of(std::string_view label) const;
};

// 2x2 table of one stratum against its complement:
//
//                 y=1     y=0
//   stratum      alpha    beta
//   complement   delta    gamma
struct ContingencyTable {
  std::uint64_t alpha = 0;
  std::uint64_t beta = 0;
  std::uint64_t delta = 0;
  std::uint64_t gamma = 0;

  std::uint64_t total() const { return alpha + beta + delta + gamma; }
  bool operator==(const ContingencyTable&) const = default;
};

// Records and positive outcomes carrying one value of a feature.
struct ValueCount {
  std::uint64_t records = 0;
  std::uint64_t positives = 0;
};

/// N records over M categorical features plus a binary outcome.
///
/// Storage is columnar: one code vector per feature. The object is immutable
/// once built; copies share the feature columns, so `with_outcome` is cheap
/// enough to use once per permutation replicate.
class DiscreteDataset {
 public:
  DiscreteDataset(std::vector<FeatureSchema> schemas,
                  std::vector<std::vector<Code>> columns,
                  std::vector<std::uint8_t> outcome,
                  std::string outcome_name = "y");

  std::size_t num_records() const { return outcome_.size(); }
  std::size_t num_features() const { return schemas_->size(); }

  const FeatureSchema& schema(std::size_t feature) const;
  const std::vector<FeatureSchema>& schemas() const { return *schemas_; }
  std::span<const Code> column(std::size_t feature) const;
  std::span<const std::uint8_t> outcome() const { return outcome_; }
  const std::string& outcome_name() const { return outcome_name_; }

  std::uint64_t positives() const { return positives_; }
  double global_mean() const;

  std::optional<std::size_t> feature_index(std::string_view name) const;

  // Same features, new outcome labels (must have the same length).
  DiscreteDataset with_outcome(std::vector<std::uint8_t> outcome) const;

 private:
  std::shared_ptr<const std::vector<FeatureSchema>> schemas_;
  std::shared_ptr<const std::vector<std::vector<Code>>> columns_;
  std::vector<std::uint8_t> outcome_;
  std::string outcome_name_;
  std::uint64_t positives_ = 0;
};

// Per-value record and positive counts for one feature, indexed by code.
std::vector<ValueCount> value_counts(const DiscreteDataset& dataset, std::size_t feature);

// Table for one value given its counts and the dataset totals.
ContingencyTable table_for_value(const ValueCount& value, std::uint64_t records,
                                 std::uint64_t positives);

ContingencyTable stratify(const DiscreteDataset& dataset, std::size_t feature, Code value);

}  // namespace safs

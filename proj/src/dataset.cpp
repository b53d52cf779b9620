#include "safs/dataset.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>

#include "safs/errors.hpp"

namespace safs {

std::optional<Code> FeatureSchema::code_of(std::string_view label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<Code>(it - labels.begin());
}

DiscreteDataset::DiscreteDataset(std::vector<FeatureSchema> schemas,
                                 std::vector<std::vector<Code>> columns,
                                 std::vector<std::uint8_t> outcome, std::string outcome_name)
    : outcome_(std::move(outcome)), outcome_name_(std::move(outcome_name)) {
  if (outcome_.empty()) throw DataError("dataset has no records");
  if (schemas.size() != columns.size()) {
    throw ArgumentError("schema count does not match column count");
  }
  for (std::size_t m = 0; m < schemas.size(); ++m) {
    const auto& schema = schemas[m];
    if (schema.labels.empty()) {
      throw ArgumentError("feature '" + schema.name + "' has no categories");
    }
    std::set<std::string_view> seen;
    for (const auto& label : schema.labels) {
      if (label.empty()) throw ArgumentError("feature '" + schema.name + "' has an empty label");
      if (!seen.insert(label).second) {
        throw ArgumentError("feature '" + schema.name + "' repeats label '" + label + "'");
      }
    }
    if (columns[m].size() != outcome_.size()) {
      throw ArgumentError("column '" + schema.name + "' length differs from outcome length");
    }
    const auto cardinality = schema.cardinality();
    for (Code code : columns[m]) {
      if (code >= cardinality) {
        throw ArgumentError("column '" + schema.name + "' has an out-of-range code");
      }
    }
  }
  for (auto y : outcome_) {
    if (y > 1) throw ArgumentError("outcome must be 0 or 1");
    positives_ += y;
  }
  schemas_ = std::make_shared<const std::vector<FeatureSchema>>(std::move(schemas));
  columns_ = std::make_shared<const std::vector<std::vector<Code>>>(std::move(columns));
}

const FeatureSchema& DiscreteDataset::schema(std::size_t feature) const {
  if (feature >= num_features()) throw ArgumentError("feature index out of range");
  return (*schemas_)[feature];
}

std::span<const Code> DiscreteDataset::column(std::size_t feature) const {
  if (feature >= num_features()) throw ArgumentError("feature index out of range");
  return (*columns_)[feature];
}

double DiscreteDataset::global_mean() const {
  return static_cast<double>(positives_) / static_cast<double>(num_records());
}

std::optional<std::size_t> DiscreteDataset::feature_index(std::string_view name) const {
  for (std::size_t m = 0; m < num_features(); ++m) {
    if ((*schemas_)[m].name == name) return m;
  }
  return std::nullopt;
}

DiscreteDataset DiscreteDataset::with_outcome(std::vector<std::uint8_t> outcome) const {
  if (outcome.size() != outcome_.size()) {
    throw ArgumentError("replacement outcome has a different length");
  }
  DiscreteDataset copy = *this;
  copy.positives_ = 0;
  for (auto y : outcome) {
    if (y > 1) throw ArgumentError("outcome must be 0 or 1");
    copy.positives_ += y;
  }
  copy.outcome_ = std::move(outcome);
  return copy;
}

std::vector<ValueCount> value_counts(const DiscreteDataset& dataset, std::size_t feature) {
  const auto column = dataset.column(feature);
  const auto outcome = dataset.outcome();
  std::vector<ValueCount> counts(dataset.schema(feature).cardinality());
  for (std::size_t i = 0; i < column.size(); ++i) {
    auto& cell = counts[column[i]];
    ++cell.records;
    cell.positives += outcome[i];
  }
  return counts;
}

ContingencyTable table_for_value(const ValueCount& value, std::uint64_t records,
                                 std::uint64_t positives) {
  ContingencyTable table;
  table.alpha = value.positives;
  table.beta = value.records - value.positives;
  table.delta = positives - value.positives;
  table.gamma = (records - positives) - table.beta;
  return table;
}

ContingencyTable stratify(const DiscreteDataset& dataset, std::size_t feature, Code value) {
  if (feature >= dataset.num_features()) throw ArgumentError("feature index out of range");
  if (value >= dataset.schema(feature).cardinality()) {
    throw ArgumentError("value code out of range for feature '" + dataset.schema(feature).name +
                        "'");
  }
  const auto column = dataset.column(feature);
  const auto outcome = dataset.outcome();
  ContingencyTable table;
  for (std::size_t i = 0; i < column.size(); ++i) {
    const bool in_stratum = column[i] == value;
    const bool positive = outcome[i] != 0;
    if (in_stratum) {
      positive ? ++table.alpha : ++table.beta;
    } else {
      positive ? ++table.delta : ++table.gamma;
    }
  }
  return table;
}

}  // namespace safs

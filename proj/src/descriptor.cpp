#include "safs/descriptor.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "safs/errors.hpp"

namespace safs {

void SubgroupDescriptor::constrain(std::size_t feature, std::vector<Code> values,
                                   std::size_t cardinality) {
  if (values.empty()) throw ArgumentError("included value set must be non-empty");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.back() >= cardinality) throw ArgumentError("included value code out of range");
  if (values.size() == cardinality) {
    constraints_.erase(feature);
    return;
  }
  constraints_[feature] = std::move(values);
}

const std::vector<Code>* SubgroupDescriptor::included(std::size_t feature) const {
  auto it = constraints_.find(feature);
  return it == constraints_.end() ? nullptr : &it->second;
}

std::size_t SubgroupDescriptor::num_values() const {
  std::size_t total = 0;
  for (const auto& [feature, values] : constraints_) total += values.size();
  return total;
}

bool more_compact(const SubgroupDescriptor& a, const SubgroupDescriptor& b) {
  if (a.num_features() != b.num_features()) return a.num_features() < b.num_features();
  if (a.num_values() != b.num_values()) return a.num_values() < b.num_values();
  return a.constraints() < b.constraints();
}

void validate(const DiscreteDataset& dataset, const SubgroupDescriptor& descriptor) {
  for (const auto& [feature, values] : descriptor.constraints()) {
    if (feature >= dataset.num_features()) {
      throw ArgumentError("descriptor references feature index " + std::to_string(feature) +
                          " but the dataset has " + std::to_string(dataset.num_features()));
    }
    const auto cardinality = dataset.schema(feature).cardinality();
    for (Code v : values) {
      if (v >= cardinality) {
        throw ArgumentError("descriptor references value " + std::to_string(v) +
                            " of feature '" + dataset.schema(feature).name + "'");
      }
    }
  }
}

namespace {

// Per constrained feature, a membership table indexed by code.
struct CompiledDescriptor {
  std::vector<std::span<const Code>> columns;
  std::vector<std::vector<char>> allowed;

  CompiledDescriptor(const DiscreteDataset& dataset, const SubgroupDescriptor& descriptor) {
    validate(dataset, descriptor);
    for (const auto& [feature, values] : descriptor.constraints()) {
      columns.push_back(dataset.column(feature));
      std::vector<char> table(dataset.schema(feature).cardinality(), 0);
      for (Code v : values) table[v] = 1;
      allowed.push_back(std::move(table));
    }
  }

  bool matches(std::size_t row) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (!allowed[c][columns[c][row]]) return false;
    }
    return true;
  }
};

}  // namespace

std::vector<std::uint32_t> subgroup_mask(const DiscreteDataset& dataset,
                                         const SubgroupDescriptor& descriptor) {
  const CompiledDescriptor compiled(dataset, descriptor);
  std::vector<std::uint32_t> rows;
  for (std::size_t i = 0; i < dataset.num_records(); ++i) {
    if (compiled.matches(i)) rows.push_back(static_cast<std::uint32_t>(i));
  }
  return rows;
}

ValueCount subgroup_counts(const DiscreteDataset& dataset, const SubgroupDescriptor& descriptor) {
  const CompiledDescriptor compiled(dataset, descriptor);
  const auto outcome = dataset.outcome();
  ValueCount counts;
  for (std::size_t i = 0; i < dataset.num_records(); ++i) {
    if (compiled.matches(i)) {
      ++counts.records;
      counts.positives += outcome[i];
    }
  }
  return counts;
}

std::string describe(const DiscreteDataset& dataset, const SubgroupDescriptor& descriptor) {
  if (descriptor.empty()) return "(all records)";
  std::ostringstream out;
  bool first_feature = true;
  for (const auto& [feature, values] : descriptor.constraints()) {
    const auto& schema = dataset.schema(feature);
    if (!first_feature) out << " AND ";
    first_feature = false;
    out << schema.name << " in {";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out << ", ";
      out << schema.labels[values[i]];
    }
    out << "}";
  }
  return out.str();
}

}  // namespace safs

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "safs/dataset.hpp"

namespace safs {

/// AND-of-ORs subgroup description: a record matches when, for every
/// constrained feature, its value lies in that feature's included set.
///
/// Included sets are kept sorted and unique. A set that covers every value of
/// its feature is vacuous and is dropped, so only real constraints appear.
class SubgroupDescriptor {
 public:
  using Constraints = std::map<std::size_t, std::vector<Code>>;

  SubgroupDescriptor() = default;

  // Throws ArgumentError on an empty set or a code >= cardinality.
  void constrain(std::size_t feature, std::vector<Code> values, std::size_t cardinality);
  void release(std::size_t feature) { constraints_.erase(feature); }

  const Constraints& constraints() const { return constraints_; }
  const std::vector<Code>* included(std::size_t feature) const;

  bool empty() const { return constraints_.empty(); }
  std::size_t num_features() const { return constraints_.size(); }
  std::size_t num_values() const;

  bool operator==(const SubgroupDescriptor&) const = default;

 private:
  Constraints constraints_;
};

// Strict order used to break score ties: fewer constrained features, then
// fewer included values, then lexicographic on (feature, values).
bool more_compact(const SubgroupDescriptor& a, const SubgroupDescriptor& b);

// Throws ArgumentError when the descriptor references a feature or value the
// dataset does not have.
void validate(const DiscreteDataset& dataset, const SubgroupDescriptor& descriptor);

std::vector<std::uint32_t> subgroup_mask(const DiscreteDataset& dataset,
                                         const SubgroupDescriptor& descriptor);

// Size and positive count of the matched records.
ValueCount subgroup_counts(const DiscreteDataset& dataset, const SubgroupDescriptor& descriptor);

// "f1 in {A, B} AND f2 in {X}" using the dataset's names and labels.
std::string describe(const DiscreteDataset& dataset, const SubgroupDescriptor& descriptor);

}  // namespace safs

#include "safs/synthetic.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <utility>

#include "safs/errors.hpp"

namespace safs {

namespace {

std::vector<FeatureSchema> make_schemas(const std::vector<std::size_t>& cardinalities) {
  std::vector<FeatureSchema> schemas;
  for (std::size_t m = 0; m < cardinalities.size(); ++m) {
    if (cardinalities[m] == 0) throw ArgumentError("feature cardinality must be at least 1");
    FeatureSchema schema;
    schema.name = "f" + std::to_string(m);
    for (std::size_t v = 0; v < cardinalities[m]; ++v) schema.labels.push_back("v" + std::to_string(v));
    schemas.push_back(std::move(schema));
  }
  return schemas;
}

std::vector<std::vector<Code>> uniform_columns(const std::vector<std::size_t>& cardinalities,
                                               std::size_t records, std::mt19937_64& rng) {
  std::vector<std::vector<Code>> columns;
  for (auto c : cardinalities) {
    std::uniform_int_distribution<Code> draw(0, static_cast<Code>(c - 1));
    std::vector<Code> column(records);
    for (auto& code : column) code = draw(rng);
    columns.push_back(std::move(column));
  }
  return columns;
}

void check_rate(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ArgumentError("outcome rate must lie in [0, 1]");
}

}  // namespace

SyntheticData generate_planted(const PlantedSpec& spec) {
  check_rate(spec.inside_rate);
  check_rate(spec.background_rate);
  if (spec.records == 0) throw ArgumentError("synthetic dataset needs at least one record");
  for (const auto& [feature, values] : spec.planted.constraints()) {
    if (feature >= spec.cardinalities.size() || values.back() >= spec.cardinalities[feature]) {
      throw ArgumentError("planted descriptor does not fit the feature cardinalities");
    }
  }
  std::mt19937_64 rng(spec.seed);
  auto columns = uniform_columns(spec.cardinalities, spec.records, rng);

  std::vector<std::uint32_t> planted;
  std::vector<std::uint8_t> outcome(spec.records);
  std::bernoulli_distribution inside(spec.inside_rate);
  std::bernoulli_distribution background(spec.background_rate);
  for (std::size_t i = 0; i < spec.records; ++i) {
    bool member = true;
    for (const auto& [feature, values] : spec.planted.constraints()) {
      if (!std::binary_search(values.begin(), values.end(), columns[feature][i])) {
        member = false;
        break;
      }
    }
    if (member) planted.push_back(static_cast<std::uint32_t>(i));
    outcome[i] = member ? inside(rng) : background(rng);
  }
  return {DiscreteDataset(make_schemas(spec.cardinalities), std::move(columns),
                          std::move(outcome)),
          std::move(planted)};
}

DiscreteDataset generate_noise(std::size_t records, const std::vector<std::size_t>& cardinalities,
                               double rate, std::uint64_t seed) {
  check_rate(rate);
  if (records == 0) throw ArgumentError("synthetic dataset needs at least one record");
  std::mt19937_64 rng(seed);
  auto columns = uniform_columns(cardinalities, records, rng);
  std::bernoulli_distribution draw(rate);
  std::vector<std::uint8_t> outcome(records);
  for (auto& y : outcome) y = draw(rng);
  return DiscreteDataset(make_schemas(cardinalities), std::move(columns), std::move(outcome));
}

}  // namespace safs

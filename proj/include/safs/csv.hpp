#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "safs/dataset.hpp"

namespace safs {

inline constexpr std::string_view kDefaultMissingLabel = "⟨missing⟩";

struct DiscretizationSpec {
  // Equal-frequency bins per numeric column, before duplicate edges collapse.
  std::size_t bins = 5;
  // Label of the category that empty cells are coded to.
  std::string missing_label{kDefaultMissingLabel};
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC-4180: comma delimiter, double-quote quoting with "" escapes, CRLF or LF
// line ends. Every row must have as many fields as the header.
CsvTable parse_csv(std::istream& in);

DiscreteDataset dataset_from_table(const CsvTable& table, std::string_view outcome_column,
                                   const DiscretizationSpec& spec = {});

DiscreteDataset load_csv(const std::filesystem::path& path, std::string_view outcome_column,
                         const DiscretizationSpec& spec = {});

// Upper-inclusive edges of equal-frequency bins over `values` (inverse
// empirical CDF at k/bins). Duplicates and edges at or above the maximum are
// removed, so every resulting bin holds at least one value.
std::vector<double> quantile_edges(std::vector<double> values, std::size_t bins);

// Index of the bin holding `value` given upper-inclusive edges.
std::size_t bin_of(double value, const std::vector<double>& edges);

// Writes labels (not codes), outcome last. Quotes fields when needed.
void write_csv(std::ostream& out, const DiscreteDataset& dataset);

}  // namespace safs

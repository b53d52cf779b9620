#include "safs/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <utility>

#include "safs/errors.hpp"

namespace safs {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool is_missing(std::string_view cell) { return trim(cell).empty(); }

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string format_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

std::uint8_t parse_outcome(std::string_view cell, std::size_t line) {
  std::string lowered(trim(cell));
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "1" || lowered == "true") return 1;
  if (lowered == "0" || lowered == "false") return 0;
  throw DataError("outcome value '" + std::string(cell) + "' on data row " +
                  std::to_string(line) + " is neither 0 nor 1");
}

struct CodedColumn {
  FeatureSchema schema;
  std::vector<Code> codes;
};

CodedColumn code_text_column(const CsvTable& table, std::size_t col,
                             const DiscretizationSpec& spec) {
  CodedColumn out;
  out.schema.name = table.header[col];
  std::unordered_map<std::string, Code> index;
  out.codes.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    std::string label = is_missing(row[col]) ? spec.missing_label : row[col];
    auto [it, inserted] = index.try_emplace(label, static_cast<Code>(out.schema.labels.size()));
    if (inserted) out.schema.labels.push_back(std::move(label));
    out.codes.push_back(it->second);
  }
  return out;
}

CodedColumn code_numeric_column(const CsvTable& table, std::size_t col,
                                const DiscretizationSpec& spec) {
  std::vector<double> present;
  for (const auto& row : table.rows) {
    if (auto v = parse_number(row[col])) present.push_back(*v);
  }
  const auto [min_it, max_it] = std::minmax_element(present.begin(), present.end());
  const double lo = *min_it;
  const double hi = *max_it;

  CodedColumn out;
  out.schema.name = table.header[col];
  out.schema.bin_edges = quantile_edges(present, spec.bins);
  const auto& edges = out.schema.bin_edges;
  for (std::size_t b = 0; b <= edges.size(); ++b) {
    const double low = b == 0 ? lo : edges[b - 1];
    const double high = b == edges.size() ? hi : edges[b];
    out.schema.labels.push_back((b == 0 ? "[" : "(") + format_number(low) + ", " +
                                format_number(high) + "]");
  }
  const Code missing_code = static_cast<Code>(out.schema.labels.size());
  bool any_missing = false;
  out.codes.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (auto v = parse_number(row[col])) {
      out.codes.push_back(static_cast<Code>(bin_of(*v, edges)));
    } else {
      any_missing = true;
      out.codes.push_back(missing_code);
    }
  }
  if (any_missing) out.schema.labels.push_back(spec.missing_label);
  return out;
}

bool column_is_numeric(const CsvTable& table, std::size_t col) {
  bool any_value = false;
  for (const auto& row : table.rows) {
    if (is_missing(row[col])) continue;
    if (!parse_number(row[col])) return false;
    any_value = true;
  }
  return any_value;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line is a record with one empty field; skip it.
    if (!(record.size() == 1 && record.front().empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) {
          throw DataError("CSV line " + std::to_string(line) + ": quote inside unquoted field");
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("CSV ends inside a quoted field");
  if (field_started || !record.empty()) end_record();

  if (records.empty()) throw DataError("CSV has no header row");
  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw DataError("CSV data row " + std::to_string(r) + " has " +
                      std::to_string(records[r].size()) + " fields, header has " +
                      std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

DiscreteDataset dataset_from_table(const CsvTable& table, std::string_view outcome_column,
                                   const DiscretizationSpec& spec) {
  if (spec.bins == 0) throw ArgumentError("bin count must be at least 1");
  if (spec.missing_label.empty()) throw ArgumentError("missing-value label must be non-empty");
  const auto outcome_it = std::find(table.header.begin(), table.header.end(), outcome_column);
  if (outcome_it == table.header.end()) {
    throw DataError("outcome column '" + std::string(outcome_column) + "' not found in header");
  }
  if (table.rows.empty()) throw DataError("CSV has a header but no data rows");
  const auto outcome_col = static_cast<std::size_t>(outcome_it - table.header.begin());

  std::vector<std::uint8_t> outcome;
  outcome.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    outcome.push_back(parse_outcome(table.rows[r][outcome_col], r + 1));
  }

  std::vector<FeatureSchema> schemas;
  std::vector<std::vector<Code>> columns;
  for (std::size_t col = 0; col < table.header.size(); ++col) {
    if (col == outcome_col) continue;
    if (table.header[col].empty()) {
      throw DataError("CSV header has an empty column name at position " + std::to_string(col));
    }
    auto coded = column_is_numeric(table, col) ? code_numeric_column(table, col, spec)
                                               : code_text_column(table, col, spec);
    schemas.push_back(std::move(coded.schema));
    columns.push_back(std::move(coded.codes));
  }
  return DiscreteDataset(std::move(schemas), std::move(columns), std::move(outcome),
                         std::string(outcome_column));
}

DiscreteDataset load_csv(const std::filesystem::path& path, std::string_view outcome_column,
                         const DiscretizationSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return dataset_from_table(parse_csv(in), outcome_column, spec);
}

std::vector<double> quantile_edges(std::vector<double> values, std::size_t bins) {
  if (bins == 0) throw ArgumentError("bin count must be at least 1");
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> edges;
  for (std::size_t k = 1; k < bins; ++k) {
    // Smallest x with ECDF(x) >= k / bins.
    const std::size_t rank = (k * n + bins - 1) / bins;
    const double edge = values[rank - 1];
    if (edge >= values.back()) break;
    if (edges.empty() || edge > edges.back()) edges.push_back(edge);
  }
  return edges;
}

std::size_t bin_of(double value, const std::vector<double>& edges) {
  return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), value) -
                                  edges.begin());
}

namespace {

void write_field(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

void write_csv(std::ostream& out, const DiscreteDataset& dataset) {
  for (std::size_t m = 0; m < dataset.num_features(); ++m) {
    write_field(out, dataset.schema(m).name);
    out << ',';
  }
  write_field(out, dataset.outcome_name());
  out << '\n';
  const auto outcome = dataset.outcome();
  for (std::size_t i = 0; i < dataset.num_records(); ++i) {
    for (std::size_t m = 0; m < dataset.num_features(); ++m) {
      const auto& schema = dataset.schema(m);
      write_field(out, schema.labels[dataset.column(m)[i]]);
      out << ',';
    }
    out << static_cast<int>(outcome[i]) << '\n';
  }
}

}  // namespace safs

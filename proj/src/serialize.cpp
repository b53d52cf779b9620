#include "safs/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "safs/errors.hpp"

namespace safs {

using nlohmann::json;

namespace {

double to_ms(std::chrono::nanoseconds d) {
  return std::chrono::duration<double, std::milli>(d).count();
}

std::string fixed(double value, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << value;
  return out.str();
}

}  // namespace

json finite_or_null(double value) {
  if (std::isfinite(value)) return value;
  return nullptr;
}

json descriptor_to_json(const DiscreteDataset& dataset, const SubgroupDescriptor& descriptor) {
  json out = json::array();
  for (const auto& [feature, values] : descriptor.constraints()) {
    const auto& schema = dataset.schema(feature);
    json labels = json::array();
    for (Code v : values) labels.push_back(schema.labels[v]);
    out.push_back({{"feature", schema.name}, {"values", std::move(labels)}});
  }
  return out;
}

json ranking_to_json(const FeatureRanking& ranking) {
  json entries = json::array();
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const auto& e = ranking.entries[i];
    entries.push_back({{"feature", e.name}, {"index", e.feature}, {"score", e.score},
                       {"rank", i + 1}});
  }
  return {{"schema", kSchemaTag}, {"method", to_string(ranking.method)}, {"ranking", entries}};
}

json ranking_to_json(const FeatureRanking& ranking, const TimingRecord& timing) {
  auto doc = ranking_to_json(ranking);
  doc["volatile"] = {{"rank_ms", to_ms(timing.duration)}};
  return doc;
}

FeatureRanking ranking_from_json(const json& doc) {
  try {
    if (doc.at("schema").get<std::string>() != kSchemaTag) {
      throw DataError("unsupported ranking schema '" + doc.at("schema").get<std::string>() + "'");
    }
    FeatureRanking ranking;
    ranking.method = parse_ranking_method(doc.at("method").get<std::string>());
    const auto& entries = doc.at("ranking");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      if (e.at("rank").get<std::size_t>() != i + 1) {
        throw DataError("ranking entries out of rank order");
      }
      ranking.entries.push_back({e.at("index").get<std::size_t>(),
                                 e.at("feature").get<std::string>(), e.at("score").get<double>()});
    }
    return ranking;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ranking document: ") + e.what());
  } catch (const ArgumentError& e) {
    throw DataError(std::string("malformed ranking document: ") + e.what());
  }
}

json scan_result_to_json(const DiscreteDataset& dataset, const ScanResult& result) {
  const double n = static_cast<double>(dataset.num_records());
  return {{"schema", kSchemaTag},
          {"descriptor", descriptor_to_json(dataset, result.descriptor)},
          {"description", describe(dataset, result.descriptor)},
          {"score", result.score},
          {"q_hat", finite_or_null(result.q_hat)},
          {"subset_size", result.subset_size},
          {"subset_fraction", static_cast<double>(result.subset_size) / n},
          {"subset_outcome_sum", result.subset_outcome_sum},
          {"volatile", {{"elapsed_ms", to_ms(result.elapsed)}}}};
}

json report_to_json(const DiscreteDataset& dataset, const SubgroupReport& report) {
  json doc = {{"schema", kSchemaTag},
              {"descriptor", descriptor_to_json(dataset, report.descriptor)},
              {"description", describe(dataset, report.descriptor)},
              {"num_features", report.num_features},
              {"num_values", report.num_values},
              {"subset_size", report.subset_size},
              {"total_records", report.total_records},
              {"subset_percent", report.subset_percent},
              {"odds_ratio", report.odds_ratio},
              {"ci_low", report.ci_low},
              {"ci_high", report.ci_high},
              {"p_value", report.p_value ? json(*report.p_value) : json(nullptr)},
              {"score", report.score},
              {"q_hat", finite_or_null(report.q_hat)},
              {"no_divergence", report.no_divergence},
              {"volatile", {{"elapsed_ms", to_ms(report.elapsed)}}}};
  return doc;
}

json overlap_to_json(const RankOverlapMatrix& matrix) {
  return {{"schema", kSchemaTag},
          {"methods", matrix.methods},
          {"persistence", matrix.persistence},
          {"rbo", matrix.values}};
}

json sweep_entry_to_json(const DiscreteDataset& dataset, const SweepEntry& entry) {
  json features = json::array();
  for (auto f : entry.features) features.push_back(dataset.schema(f).name);
  json anomalous = json::array();
  for (const auto& [f, values] : entry.report.descriptor.constraints()) {
    anomalous.push_back(dataset.schema(f).name);
  }
  auto report = report_to_json(dataset, entry.report);
  report.erase("schema");
  report.erase("volatile");
  return {{"schema", kSchemaTag},
          {"k", entry.k},
          {"method", entry.timing.method},
          {"features", features},
          {"anomalous_features", anomalous},
          {"jaccard_vs_full", entry.jaccard_vs_full},
          {"report", report},
          {"volatile", {{"scan_ms", to_ms(entry.timing.duration)}}}};
}

std::string dump_canonical(const json& doc) { return doc.dump(2) + "\n"; }

void write_ranking_table(std::ostream& out, const FeatureRanking& ranking) {
  std::size_t width = 7;
  for (const auto& e : ranking.entries) width = std::max(width, e.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "feature" << "  "
      << to_string(ranking.method) << "\n";
  for (const auto& e : ranking.entries) {
    out << std::left << std::setw(static_cast<int>(width)) << e.name << "  " << fixed(e.score, 6)
        << "\n";
  }
}

void write_report_header(std::ostream& out) {
  out << std::right << std::setw(5) << "K" << std::setw(17) << "#Feats (#Vals)" << std::setw(13)
      << "Subset size" << std::setw(5) << "%" << std::setw(12) << "Jacc. Sim." << std::setw(12)
      << "Odds ratio" << std::setw(20) << "CI" << std::setw(9) << "p" << "\n";
}

void write_report_row(std::ostream& out, std::size_t k, const SubgroupReport& report,
                      double jaccard_vs_full) {
  const std::string feats =
      std::to_string(report.num_features) + " (" + std::to_string(report.num_values) + ")";
  const std::string ci = "(" + fixed(report.ci_low, 2) + ", " + fixed(report.ci_high, 2) + ")";
  const std::string p = report.p_value ? fixed(*report.p_value, 4) : "-";
  out << std::right << std::setw(5) << k << std::setw(17) << feats << std::setw(13)
      << report.subset_size << std::setw(5) << report.subset_percent << std::setw(12)
      << fixed(jaccard_vs_full, 2) << std::setw(12) << fixed(report.odds_ratio, 2)
      << std::setw(20) << ci << std::setw(9) << p << "\n";
}

void write_overlap_table(std::ostream& out, const RankOverlapMatrix& matrix) {
  std::size_t width = 8;
  for (const auto& m : matrix.methods) width = std::max(width, m.size() + 2);
  const int w = static_cast<int>(width);
  out << std::left << std::setw(w) << ("p=" + fixed(matrix.persistence, 2));
  for (const auto& m : matrix.methods) out << std::right << std::setw(w) << m;
  out << "\n";
  for (std::size_t i = 0; i < matrix.methods.size(); ++i) {
    out << std::left << std::setw(w) << matrix.methods[i];
    for (double v : matrix.values[i]) out << std::right << std::setw(w) << fixed(v, 4);
    out << "\n";
  }
}

}  // namespace safs

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "safs/dataset.hpp"
#include "safs/descriptor.hpp"
#include "safs/evaluation.hpp"
#include "safs/objective.hpp"
#include "safs/post_discovery.hpp"
#include "safs/scanner.hpp"

namespace safs {

inline constexpr std::string_view kSchemaTag = "safs/1";

// Every document carries "schema": "safs/1". Wall-clock values live under a
// separate "volatile" key so the rest is byte-stable for a given seed.

nlohmann::json descriptor_to_json(const DiscreteDataset& dataset,
                                  const SubgroupDescriptor& descriptor);

nlohmann::json ranking_to_json(const FeatureRanking& ranking);
nlohmann::json ranking_to_json(const FeatureRanking& ranking, const TimingRecord& timing);
// Throws DataError on a malformed document.
FeatureRanking ranking_from_json(const nlohmann::json& doc);

nlohmann::json scan_result_to_json(const DiscreteDataset& dataset, const ScanResult& result);
nlohmann::json report_to_json(const DiscreteDataset& dataset, const SubgroupReport& report);
nlohmann::json overlap_to_json(const RankOverlapMatrix& matrix);
nlohmann::json sweep_entry_to_json(const DiscreteDataset& dataset, const SweepEntry& entry);

// Canonical text of a JSON document: sorted keys, 2-space indent, trailing
// newline.
std::string dump_canonical(const nlohmann::json& doc);

// Plain-text renderings.
void write_ranking_table(std::ostream& out, const FeatureRanking& ranking);
// Columns: K, #Feats (#Vals), Subset size, %, Jacc. Sim., Odds ratio, CI, p.
void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, std::size_t k, const SubgroupReport& report,
                      double jaccard_vs_full);
void write_overlap_table(std::ostream& out, const RankOverlapMatrix& matrix);

// JSON has no infinity; an unbounded q_hat is written as null.
nlohmann::json finite_or_null(double value);

}  // namespace safs

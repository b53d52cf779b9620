#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "safs/csv.hpp"
#include "safs/errors.hpp"
#include "safs/evaluation.hpp"
#include "safs/objective.hpp"
#include "safs/post_discovery.hpp"
#include "safs/scanner.hpp"
#include "safs/serialize.hpp"
#include "safs/synthetic.hpp"

namespace safs::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct PipelineConfig {
  std::string input;
  std::string outcome_column = "y";
  std::size_t bins = 5;
  std::string missing_label{kDefaultMissingLabel};
  std::string method = "safs";
  std::optional<std::size_t> top_k;
  std::size_t restarts = 10;
  std::size_t max_passes = 50;
  std::string direction = "over";
  std::uint64_t seed = 0;
  std::size_t permutations = 100;
  unsigned threads = 1;
  std::string out = "-";
  std::string format = "json";
};

// Flags override SAFS_* environment variables, which override defaults.
void add_data_options(CLI::App& app, PipelineConfig& c) {
  app.add_option("--input", c.input, "Discretized or raw CSV file")
      ->required()
      ->envname("SAFS_INPUT");
  app.add_option("--outcome-col", c.outcome_column, "Binary outcome column")
      ->envname("SAFS_OUTCOME_COL")
      ->capture_default_str();
  app.add_option("--bins", c.bins, "Quantile bins per numeric column")
      ->envname("SAFS_BINS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--missing-category", c.missing_label, "Label for empty cells")
      ->envname("SAFS_MISSING_CATEGORY");
}

void add_output_options(CLI::App& app, PipelineConfig& c) {
  app.add_option("--out", c.out, "Output path, '-' for stdout")
      ->envname("SAFS_OUT")
      ->capture_default_str();
  app.add_option("--format", c.format, "Output format")
      ->envname("SAFS_FORMAT")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
}

void add_rank_options(CLI::App& app, PipelineConfig& c) {
  app.add_option("--method", c.method, "Ranking method")
      ->envname("SAFS_METHOD")
      ->check(CLI::IsMember({"safs", "mi"}))
      ->capture_default_str();
  app.add_option("--top-k", c.top_k, "Number of top-ranked features to keep")
      ->envname("SAFS_TOP_K")
      ->check(CLI::PositiveNumber);
}

void add_scan_options(CLI::App& app, PipelineConfig& c) {
  app.add_option("--restarts", c.restarts, "Random restarts")
      ->envname("SAFS_RESTARTS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--max-passes", c.max_passes, "Coordinate-ascent passes per restart")
      ->envname("SAFS_MAX_PASSES")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--direction", c.direction, "Scan for over- or under-observed outcome")
      ->envname("SAFS_DIRECTION")
      ->check(CLI::IsMember({"over", "under"}))
      ->capture_default_str();
  app.add_option("--seed", c.seed, "Random seed")->envname("SAFS_SEED")->capture_default_str();
  app.add_option("--threads", c.threads, "Worker threads (0 = all cores)")
      ->envname("SAFS_THREADS")
      ->capture_default_str();
}

void add_permutation_options(CLI::App& app, PipelineConfig& c) {
  app.add_option("--permutations", c.permutations, "Label permutations for the p-value (0 = skip)")
      ->envname("SAFS_PERMUTATIONS")
      ->capture_default_str();
}

DiscreteDataset load(const PipelineConfig& c) {
  DiscretizationSpec spec;
  spec.bins = c.bins;
  spec.missing_label = c.missing_label;
  return load_csv(c.input, c.outcome_column, spec);
}

ScanConfig scan_config(const PipelineConfig& c) {
  ScanConfig config;
  config.direction = parse_direction(c.direction);
  config.restarts = c.restarts;
  config.max_passes = c.max_passes;
  config.seed = c.seed;
  config.threads = c.threads;
  return config;
}

std::size_t resolved_k(const PipelineConfig& c, const DiscreteDataset& dataset) {
  return c.top_k.value_or(dataset.num_features());
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw DataError("cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

json names_of(const DiscreteDataset& dataset, const std::vector<std::size_t>& features) {
  json names = json::array();
  for (auto f : features) names.push_back(dataset.schema(f).name);
  return names;
}

struct RankOutcome {
  FeatureRanking ranking;
  TimingRecord timing;
};

RankOutcome timed_rank(const DiscreteDataset& dataset, const PipelineConfig& c) {
  const auto method = parse_ranking_method(c.method);
  const auto start = Clock::now();
  auto ranking = rank_features(dataset, method);
  const auto elapsed = Clock::now() - start;
  return {std::move(ranking), {Phase::rank, c.method, dataset.num_features(), elapsed}};
}

void cmd_rank(const PipelineConfig& c, std::ostream& stdout_stream) {
  const auto dataset = load(c);
  const auto [ranking, timing] = timed_rank(dataset, c);
  auto doc = ranking_to_json(ranking, timing);
  std::vector<std::size_t> selected;
  if (c.top_k) {
    selected = top_k(ranking, *c.top_k);
    doc["selected"] = names_of(dataset, selected);
  }
  Output out(c.out, stdout_stream);
  if (c.format == "json") {
    *out << dump_canonical(doc);
  } else {
    write_ranking_table(*out, ranking);
    if (c.top_k) *out << "top-" << *c.top_k << ": " << doc["selected"].dump() << "\n";
  }
}

void cmd_scan(const PipelineConfig& c, std::ostream& stdout_stream) {
  const auto dataset = load(c);
  const auto [ranking, timing] = timed_rank(dataset, c);
  const auto features = top_k(ranking, resolved_k(c, dataset));
  const auto result = scan(dataset, features, scan_config(c));
  auto doc = scan_result_to_json(dataset, result);
  doc["method"] = c.method;
  doc["top_k"] = features.size();
  doc["features"] = names_of(dataset, features);
  Output out(c.out, stdout_stream);
  if (c.format == "json") {
    *out << dump_canonical(doc);
  } else {
    *out << "subgroup: " << describe(dataset, result.descriptor) << "\n"
         << "score: " << result.score << "\n"
         << "q_hat: " << result.q_hat << "\n"
         << "subset: " << result.subset_size << " of " << dataset.num_records() << "\n";
  }
}

void cmd_pipeline(const PipelineConfig& c, std::ostream& stdout_stream) {
  const auto dataset = load(c);
  const auto [ranking, rank_timing] = timed_rank(dataset, c);
  const auto k = resolved_k(c, dataset);
  const auto features = top_k(ranking, k);
  const auto config = scan_config(c);
  const auto result = scan(dataset, features, config);
  std::optional<double> p_value;
  const auto perm_start = Clock::now();
  if (c.permutations > 0) {
    p_value = empirical_p_value(dataset, features, config, result.score, c.permutations);
  }
  const double perm_ms = ms_since(perm_start);
  const auto report = build_report(dataset, result, p_value);

  auto report_doc = report_to_json(dataset, report);
  report_doc.erase("schema");
  report_doc.erase("volatile");
  json doc = {{"schema", kSchemaTag},
              {"method", c.method},
              {"top_k", k},
              {"features", names_of(dataset, features)},
              {"permutations", c.permutations},
              {"seed", c.seed},
              {"restarts", c.restarts},
              {"direction", c.direction},
              {"report", report_doc},
              {"volatile",
               {{"rank_ms", std::chrono::duration<double, std::milli>(rank_timing.duration).count()},
                {"scan_ms", std::chrono::duration<double, std::milli>(result.elapsed).count()},
                {"permutation_ms", perm_ms}}}};
  Output out(c.out, stdout_stream);
  if (c.format == "json") {
    *out << dump_canonical(doc);
  } else {
    *out << "subgroup: " << describe(dataset, report.descriptor)
         << (report.no_divergence ? "  [no divergence]" : "") << "\n";
    write_report_header(*out);
    write_report_row(*out, k, report, 1.0);
  }
}

void cmd_compare(const std::vector<std::string>& paths, double persistence,
                 const PipelineConfig& c, std::ostream& stdout_stream) {
  if (paths.size() < 2) throw ArgumentError("compare needs at least two ranking files");
  std::vector<FeatureRanking> rankings;
  std::vector<std::string> names;
  std::map<std::string, int> seen;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw DataError("'" + path + "' is not JSON: " + e.what());
    }
    rankings.push_back(ranking_from_json(doc));
    std::string name(to_string(rankings.back().method));
    if (seen[name]++ > 0) name += ":" + std::filesystem::path(path).stem().string();
    names.push_back(name);
  }
  const auto matrix = rank_overlap_matrix(rankings, names, persistence);
  Output out(c.out, stdout_stream);
  if (c.format == "json") {
    *out << dump_canonical(overlap_to_json(matrix));
  } else {
    write_overlap_table(*out, matrix);
  }
}

void cmd_sweep(const std::vector<std::size_t>& ks, const PipelineConfig& c,
               std::ostream& stdout_stream) {
  const auto dataset = load(c);
  const auto [ranking, timing] = timed_rank(dataset, c);
  const auto entries = sweep_k(dataset, ranking, ks, scan_config(c), c.permutations);
  Output out(c.out, stdout_stream);
  if (c.format == "json") {
    for (const auto& entry : entries) *out << sweep_entry_to_json(dataset, entry).dump() << "\n";
  } else {
    write_report_header(*out);
    for (const auto& entry : entries) write_report_row(*out, entry.k, entry.report, entry.jaccard_vs_full);
  }
}

struct SynthOptions {
  std::size_t records = 5000;
  std::size_t features = 12;
  std::size_t cardinality = 4;
  std::size_t planted_features = 3;
  double inside_rate = 0.8;
  double background_rate = 0.2;
};

void cmd_synth(const SynthOptions& s, const PipelineConfig& c, std::ostream& stdout_stream) {
  if (s.planted_features > s.features) {
    throw ArgumentError("--planted-features cannot exceed --features");
  }
  if (s.cardinality < 3) throw ArgumentError("--cardinality must be at least 3");
  PlantedSpec spec;
  spec.records = s.records;
  spec.cardinalities.assign(s.features, s.cardinality);
  spec.inside_rate = s.inside_rate;
  spec.background_rate = s.background_rate;
  spec.seed = c.seed;
  for (std::size_t f = 0; f < s.planted_features; ++f) {
    spec.planted.constrain(f, f == 0 ? std::vector<Code>{0} : std::vector<Code>{0, 1},
                           s.cardinality);
  }
  const auto data = generate_planted(spec);
  Output out(c.out, stdout_stream);
  write_csv(*out, data.dataset);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparsity-based feature selection and divergent subgroup scanning"};
  app.require_subcommand(1);
  PipelineConfig c;

  auto* rank = app.add_subcommand("rank", "Rank features (SAFS or mutual information)");
  add_data_options(*rank, c);
  add_rank_options(*rank, c);
  add_output_options(*rank, c);

  auto* scan_cmd = app.add_subcommand("scan", "Scan the top-K features for the most divergent subgroup");
  add_data_options(*scan_cmd, c);
  add_rank_options(*scan_cmd, c);
  add_scan_options(*scan_cmd, c);
  add_output_options(*scan_cmd, c);

  auto* pipeline = app.add_subcommand("pipeline", "Rank, select, scan, test and report");
  add_data_options(*pipeline, c);
  add_rank_options(*pipeline, c);
  add_scan_options(*pipeline, c);
  add_permutation_options(*pipeline, c);
  add_output_options(*pipeline, c);

  std::vector<std::string> ranking_paths;
  double persistence = 0.9;
  auto* compare = app.add_subcommand("compare", "Rank-biased overlap between ranking files");
  compare->add_option("--rankings", ranking_paths, "Ranking JSON files")->required()->expected(2, -1);
  compare->add_option("--rbo-p", persistence, "RBO persistence in (0,1)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_output_options(*compare, c);

  std::vector<std::size_t> ks;
  auto* sweep = app.add_subcommand("sweep", "Scan over several top-K prefixes");
  add_data_options(*sweep, c);
  add_rank_options(*sweep, c);
  add_scan_options(*sweep, c);
  add_permutation_options(*sweep, c);
  sweep->add_option("--k", ks, "Comma-separated ascending K values")->required()->delimiter(',');
  add_output_options(*sweep, c);

  SynthOptions synth_options;
  auto* synth = app.add_subcommand("synth", "Write a planted-subgroup CSV fixture");
  synth->add_option("--records", synth_options.records)->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--features", synth_options.features)->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--cardinality", synth_options.cardinality)->capture_default_str();
  synth->add_option("--planted-features", synth_options.planted_features)->capture_default_str();
  synth->add_option("--inside-rate", synth_options.inside_rate)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  synth->add_option("--background-rate", synth_options.background_rate)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  synth->add_option("--seed", c.seed)->capture_default_str();
  synth->add_option("--out", c.out)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (rank->parsed()) cmd_rank(c, out);
    if (scan_cmd->parsed()) cmd_scan(c, out);
    if (pipeline->parsed()) cmd_pipeline(c, out);
    if (compare->parsed()) cmd_compare(ranking_paths, persistence, c, out);
    if (sweep->parsed()) cmd_sweep(ks, c, out);
    if (synth->parsed()) cmd_synth(synth_options, c, out);
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}

}  // namespace safs::cli

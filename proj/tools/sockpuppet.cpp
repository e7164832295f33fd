// Command-line front end: ingest -> detect -> eval, plus synth and sweep.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sockpuppet/detect.hpp"
#include "sockpuppet/error.hpp"
#include "sockpuppet/eval.hpp"
#include "sockpuppet/features.hpp"
#include "sockpuppet/ingest.hpp"
#include "sockpuppet/pipeline.hpp"
#include "sockpuppet/simhash.hpp"
#include "sockpuppet/synth.hpp"

namespace fs = std::filesystem;
using namespace sockpuppet;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

std::string read_file(const std::string& path) {
  auto in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

struct IngestOptions {
  std::string input;
  std::string format = "jsonl";
  std::string output;
};

int cmd_ingest(const IngestOptions& opt) {
  std::vector<MessageRecord> messages;
  if (opt.format == "telegram") {
    messages = convert_telegram_export(read_file(opt.input));
  } else if (opt.format == "jsonl") {
    auto in = open_input(opt.input);
    messages = parse_messages(in);
  } else {
    throw ConfigError("unknown input format '" + opt.format + "' (expected jsonl|telegram)");
  }
  if (messages.empty()) std::cerr << "warning: " << opt.input << " contains no messages\n";
  const auto graph = build_interaction_graph(messages);
  if (opt.output.empty()) {
    write_edge_tsv(std::cout, graph);
  } else {
    auto out = open_output(opt.output);
    write_edge_tsv(out, graph);
  }
  std::cerr << "messages=" << messages.size() << " nodes=" << graph.node_count()
            << " edges=" << graph.edge_count() << " replies=" << graph.total_weight() << '\n';
  return 0;
}

void add_run_flags(CLI::App* cmd, RunConfig& cfg, std::string& mode, std::string& direction,
                   std::string& weighting) {
  cmd->add_option("--bits", cfg.bits, "Fingerprint width (32, 64, 128, 256)");
  cmd->add_option("--max-distance", cfg.max_distance, "Hamming radius d");
  cmd->add_option("--threshold", cfg.threshold, "Drop normalized links below this weight");
  cmd->add_option("--mode", mode, "Weight normalization: max|sum");
  cmd->add_option("--direction", direction, "Neighbor features: out|in|both");
  cmd->add_option("--weighting", weighting, "SimHash votes: weighted|binary");
  cmd->add_option("--seed", cfg.seed, "Hash seed");
  cmd->add_option("--blocks", cfg.blocks, "Index block count (0 = choose automatically)");
}

int cmd_detect(RunConfig cfg, const std::string& mode, const std::string& direction,
               const std::string& weighting) {
  cfg.mode = parse_norm_mode(mode);
  cfg.direction = parse_direction(direction);
  cfg.weighting = parse_weighting(weighting);
  cfg.validate();

  auto in = open_input(cfg.input);
  const auto graph = read_edge_tsv(in);
  const auto result = run_detection(graph, cfg);
  const fs::path dir = cfg.output_dir;

  {
    auto out = open_output(dir / "candidates.tsv");
    write_candidates_tsv(out, cfg, result.candidates);
  }
  {
    auto out = open_output(dir / "report.json");
    out << report_to_json(result.report, cfg.to_json()).dump(2) << '\n';
  }
  {
    auto out = open_output(dir / "fingerprints.tsv");
    write_fingerprints_tsv(out, cfg.hash_config(), result.fingerprints.fingerprints);
  }
  {
    auto out = open_output(dir / "features.tsv");
    out << cfg.header() << '\n';
    write_features_tsv(out, result.features);
  }
  {
    nlohmann::ordered_json doc;
    doc["config"] = cfg.to_json();
    doc["stats"] = result.stats.to_json();
    auto out = open_output(dir / "stats.json");
    out << doc.dump(2) << '\n';
  }

  const auto& s = result.stats;
  std::cout << cfg.header() << '\n'
            << "nodes=" << s.nodes << " edges=" << s.edges << " fingerprinted=" << s.fingerprinted
            << " unfingerprintable=" << s.unfingerprintable << '\n'
            << "blocks=" << s.block_count << " bucket_memberships=" << s.bucket_memberships
            << " largest_bucket=" << s.largest_bucket << " probes=" << s.candidate.probes
            << " bucket_pairs=" << s.candidate.bucket_pairs << '\n'
            << "candidates=" << s.candidates << " clusters=" << s.clusters
            << " mutual=" << s.mutual << '\n'
            << "time_ms features=" << s.features_ms << " fingerprint=" << s.fingerprint_ms
            << " index=" << s.index_ms << " candidates=" << s.candidates_ms << '\n';
  if (s.large_bucket_warning) {
    std::cerr << "warning: largest bucket holds " << s.largest_bucket
              << " users (> 8*sqrt(n)); candidate generation degrades toward O(n^2)\n";
  }
  return 0;
}

int cmd_eval(const std::string& candidates_path, const std::string& truth_path,
             const std::string& output, bool json_only) {
  auto cin = open_input(candidates_path);
  const auto pairs = read_candidates_tsv(cin);
  auto tin = open_input(truth_path);
  const auto truth = read_truth(tin);
  const auto report = pairwise_metrics(pairs, truth);

  nlohmann::ordered_json doc;
  doc["candidates"] = candidates_path;
  doc["truth"] = truth_path;
  doc["metrics"] = report.to_json();
  if (!output.empty()) {
    auto out = open_output(output);
    out << doc.dump(2) << '\n';
  }
  if (json_only) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << "tp=" << report.tp << " fp=" << report.fp << " fn=" << report.fn << '\n'
              << "precision=" << format_real(report.precision)
              << " recall=" << format_real(report.recall) << " f1=" << format_real(report.f1)
              << '\n';
  }
  return 0;
}

int cmd_synth(const SynthConfig& cfg, const std::string& output_dir) {
  const auto corpus = generate(cfg);
  const fs::path dir = output_dir;
  {
    auto out = open_output(dir / "edges.tsv");
    write_edge_tsv(out, corpus.graph);
  }
  {
    auto out = open_output(dir / "truth.txt");
    write_truth(out, corpus.truth);
  }
  {
    nlohmann::ordered_json doc;
    doc["config"] = cfg.to_json();
    doc["nodes"] = corpus.graph.node_count();
    doc["edges"] = corpus.graph.edge_count();
    doc["total_weight"] = corpus.graph.total_weight();
    doc["truth_clusters"] = corpus.truth.clusters().size();
    auto out = open_output(dir / "manifest.json");
    out << doc.dump(2) << '\n';
  }
  std::cerr << "nodes=" << corpus.graph.node_count() << " edges=" << corpus.graph.edge_count()
            << " truth_clusters=" << corpus.truth.clusters().size() << '\n';
  return 0;
}

struct SweepOptions {
  std::string input;
  std::string truth;
  std::string output;
  std::vector<std::string> modes{"max"};
  std::vector<std::string> directions{"out"};
  std::vector<std::string> weightings{"weighted"};
};

int cmd_sweep(SweepGrid grid, const SweepOptions& opt) {
  grid.modes.clear();
  grid.directions.clear();
  grid.weightings.clear();
  for (const auto& m : opt.modes) grid.modes.push_back(parse_norm_mode(m));
  for (const auto& d : opt.directions) grid.directions.push_back(parse_direction(d));
  for (const auto& w : opt.weightings) grid.weightings.push_back(parse_weighting(w));

  auto in = open_input(opt.input);
  const auto graph = read_edge_tsv(in);
  auto tin = open_input(opt.truth);
  const auto truth = read_truth(tin);

  auto rows = sweep(grid, graph, truth);
  for (auto& row : rows) row.config.input = opt.input;
  if (!opt.output.empty()) {
    auto out = open_output(opt.output);
    write_sweep_csv(out, rows);
  }
  write_sweep_table(std::cout, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sockpuppet candidate detection from reply-interaction graphs"};
  app.require_subcommand(1);

  IngestOptions ingest_opt;
  auto* ingest = app.add_subcommand("ingest", "Build the reply edge list from messages");
  ingest->add_option("--input", ingest_opt.input, "Messages JSONL or chat export JSON")->required();
  ingest->add_option("--format", ingest_opt.format, "jsonl|telegram");
  ingest->add_option("--output", ingest_opt.output, "Edge TSV path (default: stdout)");

  RunConfig run_cfg;
  run_cfg.output_dir = ".";
  std::string mode = "max", direction = "out", weighting = "weighted";
  auto* detect = app.add_subcommand("detect", "Fingerprint users and report near pairs");
  detect->add_option("--input", run_cfg.input, "Edge TSV")->required();
  detect->add_option("--output-dir", run_cfg.output_dir, "Directory for result files");
  add_run_flags(detect, run_cfg, mode, direction, weighting);

  std::string candidates_path, truth_path, eval_output;
  bool json_only = false;
  auto* eval = app.add_subcommand("eval", "Pairwise precision/recall against ground truth");
  eval->add_option("--input,--candidates", candidates_path, "Candidates TSV")->required();
  eval->add_option("--truth", truth_path, "Truth file")->required();
  eval->add_option("--output", eval_output, "Write the JSON report here");
  eval->add_flag("--json", json_only, "Print the JSON report instead of the table");

  SynthConfig synth_cfg;
  std::string synth_dir = ".";
  auto* synth = app.add_subcommand("synth", "Generate a corpus with planted clones");
  synth->add_option("--users", synth_cfg.users, "Base user count");
  synth->add_option("--mean-degree", synth_cfg.mean_out_degree, "Mean out-degree");
  synth->add_option("--clones", synth_cfg.clones, "Planted clone count");
  synth->add_option("--perturbation", synth_cfg.perturbation, "Copied-edge drop probability");
  synth->add_option("--weight-max", synth_cfg.weight_max, "Maximum edge weight");
  synth->add_option("--seed", synth_cfg.seed, "Random seed");
  synth->add_option("--output-dir", synth_dir, "Directory for corpus files");

  SweepGrid grid;
  SweepOptions sweep_opt;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a parameter grid");
  sweep_cmd->add_option("--input", sweep_opt.input, "Edge TSV")->required();
  sweep_cmd->add_option("--truth", sweep_opt.truth, "Truth file")->required();
  sweep_cmd->add_option("--output", sweep_opt.output, "CSV path");
  sweep_cmd->add_option("--bits", grid.bits, "Widths")->delimiter(',');
  sweep_cmd->add_option("--max-distance", grid.max_distances, "Radii")->delimiter(',');
  sweep_cmd->add_option("--threshold", grid.thresholds, "Thresholds")->delimiter(',');
  sweep_cmd->add_option("--mode", sweep_opt.modes, "max|sum")->delimiter(',');
  sweep_cmd->add_option("--direction", sweep_opt.directions, "out|in|both")->delimiter(',');
  sweep_cmd->add_option("--weighting", sweep_opt.weightings, "weighted|binary")->delimiter(',');
  sweep_cmd->add_option("--seed", grid.seed, "Hash seed");
  sweep_cmd->add_option("--blocks", grid.blocks, "Index block count (0 = auto)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*ingest) return cmd_ingest(ingest_opt);
    if (*detect) return cmd_detect(run_cfg, mode, direction, weighting);
    if (*eval) return cmd_eval(candidates_path, truth_path, eval_output, json_only);
    if (*synth) return cmd_synth(synth_cfg, synth_dir);
    if (*sweep_cmd) return cmd_sweep(grid, sweep_opt);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}

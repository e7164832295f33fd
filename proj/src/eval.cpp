#include "sockpuppet/eval.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "sockpuppet/error.hpp"

namespace sockpuppet {

GroundTruth::GroundTruth(std::vector<std::set<UserId>> clusters) : clusters_(std::move(clusters)) {
  for (const auto& c : clusters_) {
    if (c.empty()) throw InputError("truth cluster is empty");
    for (const auto& u : c) {
      if (u.empty()) throw InputError("truth cluster contains an empty id");
      if (!labeled_.insert(u).second) {
        throw InputError("user " + u + " appears in more than one truth cluster");
      }
    }
  }
}

std::uint64_t GroundTruth::positive_pair_count() const {
  std::uint64_t total = 0;
  for (const auto& c : clusters_) total += c.size() * (c.size() - 1) / 2;
  return total;
}

GroundTruth read_truth(std::istream& in) {
  std::vector<std::set<UserId>> clusters;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::set<UserId> cluster;
    std::istringstream fields(line);
    std::string id;
    while (std::getline(fields, id, ',')) {
      auto first = id.find_first_not_of(" \t");
      auto last = id.find_last_not_of(" \t");
      if (first == std::string::npos) {
        throw InputError("empty id in truth file at line " + std::to_string(line_no));
      }
      if (!cluster.insert(id.substr(first, last - first + 1)).second) {
        throw InputError("repeated id in truth cluster at line " + std::to_string(line_no));
      }
    }
    clusters.push_back(std::move(cluster));
  }
  return GroundTruth(std::move(clusters));
}

void write_truth(std::ostream& out, const GroundTruth& truth) {
  for (const auto& c : truth.clusters()) {
    bool first = true;
    for (const auto& u : c) {
      out << (first ? "" : ",") << u;
      first = false;
    }
    out << '\n';
  }
}

nlohmann::ordered_json EvalReport::to_json() const {
  return nlohmann::ordered_json{{"tp", tp},           {"fp", fp},         {"fn", fn},
                                {"precision", precision}, {"recall", recall}, {"f1", f1}};
}

EvalReport pairwise_metrics(std::span<const CandidatePair> predicted, const GroundTruth& truth) {
  std::map<UserId, std::size_t> cluster_of;
  for (std::size_t i = 0; i < truth.clusters().size(); ++i) {
    for (const auto& u : truth.clusters()[i]) cluster_of.emplace(u, i);
  }

  std::set<std::pair<UserId, UserId>> labeled_pairs;
  for (const auto& p : predicted) {
    if (p.a == p.b || !cluster_of.contains(p.a) || !cluster_of.contains(p.b)) continue;
    labeled_pairs.insert(p.a < p.b ? std::pair(p.a, p.b) : std::pair(p.b, p.a));
  }

  EvalReport r;
  for (const auto& [a, b] : labeled_pairs) {
    if (cluster_of.at(a) == cluster_of.at(b)) {
      ++r.tp;
    } else {
      ++r.fp;
    }
  }
  r.fn = truth.positive_pair_count() - r.tp;
  r.precision = r.tp + r.fp == 0 ? 1.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  r.recall = r.tp + r.fn == 0 ? 1.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  r.f1 = r.precision + r.recall == 0.0 ? 0.0
                                        : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

std::vector<RunConfig> SweepGrid::configs() const {
  std::vector<RunConfig> out;
  for (unsigned b : bits) {
    for (unsigned d : max_distances) {
      for (double t : thresholds) {
        for (auto dir : directions) {
          for (auto mode : modes) {
            for (auto w : weightings) {
              RunConfig cfg;
              cfg.bits = b;
              cfg.max_distance = d;
              cfg.threshold = t;
              cfg.direction = dir;
              cfg.mode = mode;
              cfg.weighting = w;
              cfg.seed = seed;
              cfg.blocks = blocks;
              out.push_back(cfg);
            }
          }
        }
      }
    }
  }
  return out;
}

std::vector<SweepRow> sweep(const SweepGrid& grid, const InteractionGraph& graph,
                            const GroundTruth& truth) {
  std::vector<SweepRow> rows;
  for (const auto& cfg : grid.configs()) {
    SweepRow row;
    row.config = cfg;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto result = run_detection(graph, cfg);
      row.report = pairwise_metrics(result.candidates, truth);
      row.candidates = result.candidates.size();
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    row.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

}  // namespace

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "bits,max_distance,threshold,mode,direction,weighting,seed,status,error,"
         "tp,fp,fn,precision,recall,f1,candidates,wall_ms\n";
  for (const auto& r : rows) {
    const auto& c = r.config;
    out << c.bits << ',' << c.max_distance << ',' << format_real(c.threshold) << ','
        << to_string(c.mode) << ',' << to_string(c.direction) << ',' << to_string(c.weighting)
        << ',' << c.seed << ',' << (r.ok ? "ok" : "failed") << ',' << csv_field(r.error) << ',';
    if (r.ok) {
      out << r.report.tp << ',' << r.report.fp << ',' << r.report.fn << ','
          << format_real(r.report.precision) << ',' << format_real(r.report.recall) << ','
          << format_real(r.report.f1) << ',' << r.candidates;
    } else {
      out << ",,,,,,";
    }
    out << ',' << std::fixed << std::setprecision(3) << r.wall_ms << std::defaultfloat << '\n';
  }
}

void write_sweep_table(std::ostream& out, std::span<const SweepRow> rows) {
  out << std::left << std::setw(6) << "bits" << std::setw(6) << "d" << std::setw(8) << "theta"
      << std::setw(6) << "mode" << std::setw(6) << "dir" << std::setw(10) << "weighting"
      << std::right << std::setw(8) << "tp" << std::setw(8) << "fp" << std::setw(8) << "fn"
      << std::setw(11) << "precision" << std::setw(9) << "recall" << std::setw(9) << "f1"
      << std::setw(12) << "candidates" << std::setw(11) << "wall_ms" << '\n';
  for (const auto& r : rows) {
    const auto& c = r.config;
    out << std::left << std::setw(6) << c.bits << std::setw(6) << c.max_distance << std::setw(8)
        << format_real(c.threshold) << std::setw(6) << to_string(c.mode) << std::setw(6)
        << to_string(c.direction) << std::setw(10) << to_string(c.weighting) << std::right;
    if (!r.ok) {
      out << "  failed: " << r.error << '\n';
      continue;
    }
    out << std::setw(8) << r.report.tp << std::setw(8) << r.report.fp << std::setw(8)
        << r.report.fn << std::fixed << std::setprecision(4) << std::setw(11)
        << r.report.precision << std::setw(9) << r.report.recall << std::setw(9) << r.report.f1
        << std::setw(12) << r.candidates << std::setprecision(1) << std::setw(11) << r.wall_ms
        << std::defaultfloat << '\n';
  }
}

}  // namespace sockpuppet

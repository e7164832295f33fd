#include "sockpuppet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "sockpuppet/error.hpp"

namespace sockpuppet {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

void RunConfig::validate() const {
  hash_config().validate();
  if (max_distance >= bits) {
    throw ConfigError("max distance " + std::to_string(max_distance) +
                      " must be smaller than the fingerprint width " + std::to_string(bits));
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("threshold " + format_real(threshold) + " outside [0, 1]");
  }
  if (blocks > max_distance + 1) {
    throw ConfigError("block count " + std::to_string(blocks) + " exceeds max distance + 1");
  }
}

std::string RunConfig::header() const {
  std::ostringstream out;
  out << "# bits=" << bits << " max_distance=" << max_distance
      << " threshold=" << format_real(threshold) << " mode=" << to_string(mode)
      << " direction=" << to_string(direction) << " weighting=" << to_string(weighting)
      << " seed=" << seed << " blocks=" << (blocks == 0 ? std::string("auto") : std::to_string(blocks));
  return out.str();
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["bits"] = bits;
  j["max_distance"] = max_distance;
  j["threshold"] = threshold;
  j["mode"] = to_string(mode);
  j["direction"] = to_string(direction);
  j["weighting"] = to_string(weighting);
  j["seed"] = seed;
  j["blocks"] = blocks == 0 ? nlohmann::ordered_json("auto") : nlohmann::ordered_json(blocks);
  j["input"] = input;
  return j;
}

nlohmann::ordered_json DetectionStats::to_json() const {
  nlohmann::ordered_json j;
  j["nodes"] = nodes;
  j["edges"] = edges;
  j["fingerprinted"] = fingerprinted;
  j["unfingerprintable"] = unfingerprintable;
  j["block_count"] = block_count;
  j["bucket_memberships"] = bucket_memberships;
  j["largest_bucket"] = largest_bucket;
  j["large_bucket_warning"] = large_bucket_warning;
  j["probes"] = candidate.probes;
  j["bucket_pairs"] = candidate.bucket_pairs;
  j["candidates"] = candidates;
  j["clusters"] = clusters;
  j["mutual"] = mutual;
  return j;
}

DetectionResult run_detection(const InteractionGraph& graph, const RunConfig& config) {
  config.validate();
  DetectionResult result;
  auto& stats = result.stats;
  stats.nodes = graph.node_count();
  stats.edges = graph.edge_count();

  auto t0 = Clock::now();
  const auto filtered = filter_edges(normalize_weights(graph, config.mode), config.threshold);
  result.features = extract_features(filtered, config.direction);
  stats.features_ms = elapsed_ms(t0);

  t0 = Clock::now();
  result.fingerprints = fingerprint_all(result.features, config.hash_config(), config.weighting);
  stats.fingerprint_ms = elapsed_ms(t0);
  const auto& fps = result.fingerprints.fingerprints;
  stats.fingerprinted = fps.size();
  stats.unfingerprintable = result.fingerprints.unfingerprintable.size();

  t0 = Clock::now();
  result.plan = config.blocks == 0
                    ? plan_blocks_for_population(config.bits, config.max_distance, fps.size())
                    : plan_blocks(config.bits, config.max_distance, config.blocks);
  const LshIndex index(fps, result.plan);
  stats.index_ms = elapsed_ms(t0);
  stats.block_count = result.plan.block_count();
  stats.bucket_memberships = index.bucket_memberships();
  stats.largest_bucket = index.largest_bucket();
  stats.large_bucket_warning =
      static_cast<double>(stats.largest_bucket) > 8.0 * std::sqrt(static_cast<double>(fps.size()));

  t0 = Clock::now();
  result.candidates = index.candidate_pairs(&stats.candidate);
  stats.candidates_ms = elapsed_ms(t0);
  stats.candidates = result.candidates.size();

  result.report = build_report(result.candidates);
  stats.clusters = result.report.clusters.size();
  stats.mutual = result.report.mutual.size();
  return result;
}

void write_candidates_tsv(std::ostream& out, const RunConfig& config,
                          const std::vector<CandidatePair>& pairs) {
  out << config.header() << '\n';
  out << "# input=" << config.input << '\n';
  for (const auto& p : pairs) out << p.a << '\t' << p.b << '\t' << p.distance << '\n';
}

std::vector<CandidatePair> read_candidates_tsv(std::istream& in) {
  std::vector<CandidatePair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string a, b, d;
    if (!std::getline(fields, a, '\t') || !std::getline(fields, b, '\t') ||
        !std::getline(fields, d) || a.empty() || b.empty() || a == b) {
      throw InputError("expected a<TAB>b<TAB>distance at line " + std::to_string(line_no));
    }
    unsigned distance = 0;
    try {
      std::size_t used = 0;
      distance = static_cast<unsigned>(std::stoul(d, &used));
      if (used != d.size() || d.front() == '-') throw std::invalid_argument("distance");
    } catch (const std::exception&) {
      throw InputError("invalid distance '" + d + "' at line " + std::to_string(line_no));
    }
    pairs.push_back(canonical_pair(std::move(a), std::move(b), distance));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

}  // namespace sockpuppet

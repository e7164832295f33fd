#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sockpuppet/detect.hpp"
#include "sockpuppet/features.hpp"
#include "sockpuppet/ingest.hpp"
#include "sockpuppet/lsh_index.hpp"
#include "sockpuppet/simhash.hpp"

namespace sockpuppet {

/// Full detection configuration. Defaults are the reference operating point:
/// 128-bit fingerprints, radius 20, links below 0.5 dropped.
struct RunConfig {
  unsigned bits = 128;
  unsigned max_distance = 20;
  double threshold = 0.5;
  NormMode mode = NormMode::max;
  DirectionSelect direction = DirectionSelect::out;
  Weighting weighting = Weighting::weighted;
  std::uint64_t seed = 0;
  unsigned blocks = 0;  // 0 = choose from the population size
  std::string input;
  std::string output_dir;

  /// Throws ConfigError for invalid widths, radius or threshold.
  void validate() const;
  HashConfig hash_config() const { return HashConfig{bits, seed}; }
  /// `# bits=... max_distance=... threshold=... mode=... direction=...
  /// weighting=... seed=... blocks=...`
  std::string header() const;
  nlohmann::ordered_json to_json() const;
};

struct DetectionStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t fingerprinted = 0;
  std::size_t unfingerprintable = 0;
  std::size_t block_count = 0;
  std::size_t bucket_memberships = 0;
  std::size_t largest_bucket = 0;
  bool large_bucket_warning = false;  // largest bucket > 8 * sqrt(n)
  CandidateStats candidate;
  std::size_t candidates = 0;
  std::size_t clusters = 0;
  std::size_t mutual = 0;

  double features_ms = 0;
  double fingerprint_ms = 0;
  double index_ms = 0;
  double candidates_ms = 0;

  /// Deterministic fields only (no timings).
  nlohmann::ordered_json to_json() const;
};

struct DetectionResult {
  std::map<UserId, FeatureMap> features;
  FingerprintSet fingerprints;
  BlockPlan plan;
  std::vector<CandidatePair> candidates;
  MatchReport report;
  DetectionStats stats;
};

DetectionResult run_detection(const InteractionGraph& graph, const RunConfig& config);

/// Config header, then a<TAB>b<TAB>distance sorted by (distance, a, b).
void write_candidates_tsv(std::ostream& out, const RunConfig& config,
                          const std::vector<CandidatePair>& pairs);
std::vector<CandidatePair> read_candidates_tsv(std::istream& in);

}  // namespace sockpuppet

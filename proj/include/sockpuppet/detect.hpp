#pragma once

#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "sockpuppet/lsh_index.hpp"

namespace sockpuppet {

/// Connected component of the candidate-pair graph.
struct MatchCluster {
  std::vector<UserId> members;               // sorted, size >= 2
  std::vector<CandidatePair> witness_pairs;  // sorted

  bool operator==(const MatchCluster&) const = default;
};

/// A pair of users that are each other's nearest candidate.
struct MutualMatch {
  UserId a;
  UserId b;
  unsigned distance = 0;
  bool exact = false;

  bool operator==(const MutualMatch&) const = default;
};

struct MatchReport {
  std::vector<MatchCluster> clusters;
  std::vector<MutualMatch> mutual;
  /// Users with two or more candidates, mapped to their full candidate
  /// list sorted by (distance, user).
  std::map<UserId, std::vector<Neighbor>> one_to_many;
};

/// Union-find over the pair graph; clusters sorted by (size desc, smallest member).
std::vector<MatchCluster> cluster(std::span<const CandidatePair> pairs);

/// Mutual nearest neighbours; nearest is the minimum by (distance, user id).
/// Sorted by (distance, a, b).
std::vector<MutualMatch> mutual_matches(std::span<const CandidatePair> pairs);

std::map<UserId, std::vector<Neighbor>> one_to_many(std::span<const CandidatePair> pairs);

MatchReport build_report(std::span<const CandidatePair> pairs);

/// {config, clusters, mutual, one_to_many} with deterministic ordering.
nlohmann::ordered_json report_to_json(const MatchReport& report,
                                      const nlohmann::ordered_json& config);

}  // namespace sockpuppet

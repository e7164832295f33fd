#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "sockpuppet/ingest.hpp"

namespace sockpuppet {

enum class Direction : std::uint8_t { out = 0, in = 1 };
enum class DirectionSelect { out, in, both };
enum class NormMode { max, sum };
enum class Weighting { weighted, binary };

std::string_view to_string(Direction d);
std::string_view to_string(DirectionSelect d);
std::string_view to_string(NormMode m);
std::string_view to_string(Weighting w);
// Parsers throw ConfigError on unknown names.
DirectionSelect parse_direction(std::string_view text);
NormMode parse_norm_mode(std::string_view text);
Weighting parse_weighting(std::string_view text);

/// A neighbor seen through one edge direction. Ordered by (direction, neighbor).
struct FeatureToken {
  Direction direction = Direction::out;
  UserId neighbor;

  auto operator<=>(const FeatureToken&) const = default;
};

struct FeatureMap {
  UserId owner;
  std::map<FeatureToken, double> entries;

  bool empty() const { return entries.empty(); }
  bool operator==(const FeatureMap&) const = default;
};

/// Per-user weight slices. `out[u][v]` is the (normalized) weight of edge
/// u -> v; `in[v][u]` the same edge seen from its target. Slices are
/// normalized independently. `users` lists every graph node, including
/// users whose slices are empty.
struct NeighborWeights {
  using Slice = std::map<UserId, double>;

  std::set<UserId> users;
  std::map<UserId, Slice> out;
  std::map<UserId, Slice> in;

  bool operator==(const NeighborWeights&) const = default;
};

/// Divides every slice by its maximum (mode max) or its total (mode sum).
NeighborWeights normalize_weights(const InteractionGraph& graph, NormMode mode);

/// Keeps exactly the entries with weight >= threshold; empty slices are removed.
NeighborWeights filter_edges(const NeighborWeights& weights, double threshold);

/// One FeatureMap per user in `weights.users`; users without surviving
/// neighbors get an empty map.
std::map<UserId, FeatureMap> extract_features(const NeighborWeights& weights,
                                              DirectionSelect direction);

/// owner<TAB>direction<TAB>neighbor<TAB>weight sorted by (owner, direction, neighbor).
void write_features_tsv(std::ostream& out, const std::map<UserId, FeatureMap>& features);

/// Shortest decimal text that round-trips to the same double.
std::string format_real(double value);

}  // namespace sockpuppet

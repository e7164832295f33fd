#include "sockpuppet/features.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

#include "sockpuppet/error.hpp"

namespace sockpuppet {

std::string_view to_string(Direction d) { return d == Direction::out ? "out" : "in"; }

std::string_view to_string(DirectionSelect d) {
  switch (d) {
    case DirectionSelect::out: return "out";
    case DirectionSelect::in: return "in";
    case DirectionSelect::both: return "both";
  }
  return "?";
}

std::string_view to_string(NormMode m) { return m == NormMode::max ? "max" : "sum"; }

std::string_view to_string(Weighting w) {
  return w == Weighting::weighted ? "weighted" : "binary";
}

DirectionSelect parse_direction(std::string_view text) {
  if (text == "out") return DirectionSelect::out;
  if (text == "in") return DirectionSelect::in;
  if (text == "both") return DirectionSelect::both;
  throw ConfigError("unknown direction '" + std::string(text) + "' (expected out|in|both)");
}

NormMode parse_norm_mode(std::string_view text) {
  if (text == "max") return NormMode::max;
  if (text == "sum") return NormMode::sum;
  throw ConfigError("unknown normalization mode '" + std::string(text) + "' (expected max|sum)");
}

Weighting parse_weighting(std::string_view text) {
  if (text == "weighted") return Weighting::weighted;
  if (text == "binary") return Weighting::binary;
  throw ConfigError("unknown weighting '" + std::string(text) + "' (expected weighted|binary)");
}

std::string format_real(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

namespace {

void normalize_slices(std::map<UserId, NeighborWeights::Slice>& slices, NormMode mode) {
  for (auto& [user, slice] : slices) {
    double scale = 0.0;
    for (const auto& [_, w] : slice) {
      scale = mode == NormMode::max ? std::max(scale, w) : scale + w;
    }
    for (auto& [_, w] : slice) w /= scale;
  }
}

void filter_slices(const std::map<UserId, NeighborWeights::Slice>& from,
                   std::map<UserId, NeighborWeights::Slice>& to, double threshold) {
  for (const auto& [user, slice] : from) {
    NeighborWeights::Slice kept;
    for (const auto& [v, w] : slice) {
      if (w >= threshold) kept.emplace(v, w);
    }
    if (!kept.empty()) to.emplace(user, std::move(kept));
  }
}

}  // namespace

NeighborWeights normalize_weights(const InteractionGraph& graph, NormMode mode) {
  NeighborWeights result;
  result.users = graph.nodes();
  for (const auto& [edge, weight] : graph.edges()) {
    const auto w = static_cast<double>(weight);
    result.out[edge.first][edge.second] = w;
    result.in[edge.second][edge.first] = w;
  }
  normalize_slices(result.out, mode);
  normalize_slices(result.in, mode);
  return result;
}

NeighborWeights filter_edges(const NeighborWeights& weights, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("threshold " + format_real(threshold) + " outside [0, 1]");
  }
  NeighborWeights result;
  result.users = weights.users;
  filter_slices(weights.out, result.out, threshold);
  filter_slices(weights.in, result.in, threshold);
  return result;
}

std::map<UserId, FeatureMap> extract_features(const NeighborWeights& weights,
                                              DirectionSelect direction) {
  std::map<UserId, FeatureMap> features;
  for (const auto& user : weights.users) features[user].owner = user;

  auto add = [&](const std::map<UserId, NeighborWeights::Slice>& slices, Direction tag) {
    for (const auto& [user, slice] : slices) {
      auto& fmap = features[user];
      fmap.owner = user;
      for (const auto& [v, w] : slice) {
        if (v != user) fmap.entries.emplace(FeatureToken{tag, v}, w);
      }
    }
  };
  if (direction != DirectionSelect::in) add(weights.out, Direction::out);
  if (direction != DirectionSelect::out) add(weights.in, Direction::in);
  return features;
}

void write_features_tsv(std::ostream& out, const std::map<UserId, FeatureMap>& features) {
  for (const auto& [owner, fmap] : features) {
    for (const auto& [token, w] : fmap.entries) {
      out << owner << '\t' << to_string(token.direction) << '\t' << token.neighbor << '\t'
          << format_real(w) << '\n';
    }
  }
}

}  // namespace sockpuppet

#include "sockpuppet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sockpuppet/error.hpp"
#include "sockpuppet/features.hpp"

namespace sockpuppet {

std::uint64_t SynthRandom::below(std::uint64_t bound) {
  // Rejection keeps the draw unbiased; threshold = 2^64 mod bound.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % bound;
  }
}

double SynthRandom::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t SynthRandom::poisson(double mean) {
  if (mean > 500.0) return poisson(mean / 2) + poisson(mean / 2);
  const double u = unit();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    const double next = cdf + p;
    if (next == cdf) break;
    cdf = next;
  }
  return k;
}

std::set<std::uint64_t> SynthRandom::sample(std::uint64_t count, std::uint64_t bound) {
  // Floyd's algorithm.
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = bound - count; j < bound; ++j) {
    const std::uint64_t t = below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return chosen;
}

void SynthConfig::validate() const {
  if (users == 0) throw ConfigError("synthetic corpus needs at least one user");
  if (!(mean_out_degree > 0.0) || !std::isfinite(mean_out_degree)) {
    throw ConfigError("mean out-degree must be positive");
  }
  if (clones > users) throw ConfigError("clone count exceeds user count");
  if (!(perturbation >= 0.0 && perturbation <= 1.0)) {
    throw ConfigError("perturbation must lie in [0, 1]");
  }
  if (weight_max < 1) throw ConfigError("weight_max must be at least 1");
}

nlohmann::ordered_json SynthConfig::to_json() const {
  return nlohmann::ordered_json{{"users", users},
                                {"mean_out_degree", mean_out_degree},
                                {"clones", clones},
                                {"perturbation", perturbation},
                                {"weight_max", weight_max},
                                {"seed", seed}};
}

SynthCorpus generate(const SynthConfig& cfg) {
  cfg.validate();
  SynthRandom rng(cfg.seed);
  const std::uint64_t n = cfg.users;
  const std::uint64_t total = n + cfg.clones;

  const auto digits = std::to_string(total - 1).size();
  auto name = [&](std::uint64_t i) {
    auto s = std::to_string(i);
    return "u" + std::string(digits - s.size(), '0') + s;
  };

  // Base graph: Poisson out-degree, distinct uniform targets, uniform weights.
  std::vector<std::pair<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t>> base;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t degree = std::min(rng.poisson(cfg.mean_out_degree), n - 1);
    for (std::uint64_t t : rng.sample(degree, n - 1)) {
      const std::uint64_t target = t >= i ? t + 1 : t;
      base.push_back({{i, target}, 1 + rng.below(cfg.weight_max)});
    }
  }

  std::vector<std::uint64_t> clone_of(n, total);  // total = not cloned
  std::vector<std::uint64_t> original_of(total, total);
  std::vector<std::set<UserId>> truth;
  std::uint64_t next_clone = n;
  for (std::uint64_t o : rng.sample(cfg.clones, n)) {
    clone_of[o] = next_clone;
    original_of[next_clone] = o;
    truth.push_back({name(o), name(next_clone)});
    ++next_clone;
  }

  // A random user other than `keep` and its original.
  auto third_user = [&](std::uint64_t keep) -> std::optional<std::uint64_t> {
    std::vector<std::uint64_t> excluded{keep, original_of[keep]};
    std::sort(excluded.begin(), excluded.end());
    if (total <= 2) return std::nullopt;
    std::uint64_t z = rng.below(total - 2);
    for (std::uint64_t e : excluded) {
      if (z >= e) ++z;
    }
    return z;
  };

  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> edges;
  for (const auto& [edge, weight] : base) {
    const auto [x, y] = edge;
    std::vector<std::uint64_t> sources{x};
    std::vector<std::uint64_t> targets{y};
    if (clone_of[x] != total) sources.push_back(clone_of[x]);
    if (clone_of[y] != total) targets.push_back(clone_of[y]);
    for (std::uint64_t s : sources) {
      for (std::uint64_t t : targets) {
        if (s == x && t == y) {
          edges[{s, t}] += weight;
          continue;
        }
        if (rng.unit() >= cfg.perturbation) {
          edges[{s, t}] += weight;
          continue;
        }
        if (s != x) {
          if (auto z = third_user(s)) edges[{s, *z}] += weight;
        } else {
          if (auto z = third_user(t)) edges[{*z, t}] += weight;
        }
      }
    }
  }

  SynthCorpus corpus;
  for (std::uint64_t i = 0; i < total; ++i) corpus.graph.add_node(name(i));
  for (const auto& [edge, weight] : edges) {
    corpus.graph.add_edge(name(edge.first), name(edge.second), weight);
  }
  corpus.truth = GroundTruth(std::move(truth));
  return corpus;
}

}  // namespace sockpuppet

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <set>

#include <json.hpp>

#include "sockpuppet/eval.hpp"
#include "sockpuppet/ingest.hpp"

namespace sockpuppet {

struct SynthConfig {
  std::size_t users = 1000;      // base population n
  double mean_out_degree = 8.0;  // Poisson mean
  std::size_t clones = 0;        // planted clones s <= n
  double perturbation = 0.0;     // per-copied-edge drop probability
  std::uint64_t weight_max = 5;  // edge weights uniform in [1, weight_max]
  std::uint64_t seed = 0;

  /// Throws ConfigError when a bound is violated.
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

struct SynthCorpus {
  InteractionGraph graph;
  GroundTruth truth;  // one {original, clone} cluster per clone
};

/// Uniform-target random reply graph with planted clones. Clones copy their
/// original's in- and out-edges; each copied edge is dropped with
/// probability `perturbation` and replaced by an edge to or from a random
/// third user. Fully determined by the seed.
SynthCorpus generate(const SynthConfig& cfg);

/// Seeded draws with fixed algorithms, so a seed reproduces the same corpus
/// on every standard library (std:: distributions are implementation-defined).
class SynthRandom {
 public:
  explicit SynthRandom(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t bound);  // uniform in [0, bound)
  double unit();                             // uniform in [0, 1)
  std::uint64_t poisson(double mean);
  /// `count` distinct values from [0, bound), ascending.
  std::set<std::uint64_t> sample(std::uint64_t count, std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace sockpuppet

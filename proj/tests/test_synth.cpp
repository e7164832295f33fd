#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sockpuppet/error.hpp"
#include "sockpuppet/features.hpp"
#include "sockpuppet/simhash.hpp"
#include "sockpuppet/synth.hpp"

using namespace sockpuppet;

namespace {

std::string serialize(const SynthCorpus& c) {
  std::ostringstream out;
  write_edge_tsv(out, c.graph);
  write_truth(out, c.truth);
  return out.str();
}

}  // namespace

TEST_CASE("unperturbed clones are feature twins") {
  SynthConfig cfg;
  cfg.users = 400;
  cfg.clones = 5;
  cfg.perturbation = 0.0;
  cfg.seed = 1;
  const auto corpus = generate(cfg);
  REQUIRE(corpus.truth.clusters().size() == 5);
  CHECK(corpus.graph.node_count() == 405);

  for (auto mode : {NormMode::max, NormMode::sum}) {
    for (auto dir : {DirectionSelect::out, DirectionSelect::in, DirectionSelect::both}) {
      const auto features = extract_features(filter_edges(normalize_weights(corpus.graph, mode), 0.5), dir);
      for (const auto& cluster : corpus.truth.clusters()) {
        const auto& original = *cluster.begin();
        const auto& clone = *std::next(cluster.begin());
        CHECK(features.at(original).entries == features.at(clone).entries);
        if (!features.at(original).empty()) {
          CHECK(hamming(simhash(features.at(original), {}), simhash(features.at(clone), {})) == 0);
        }
      }
    }
  }
}

TEST_CASE("generation is reproducible from the seed") {
  SynthConfig cfg;
  cfg.users = 300;
  cfg.clones = 12;
  cfg.perturbation = 0.4;
  cfg.seed = 7;
  CHECK(serialize(generate(cfg)) == serialize(generate(cfg)));
  auto other = cfg;
  other.seed = 8;
  CHECK(serialize(generate(other)) != serialize(generate(cfg)));
}

TEST_CASE("total out-degree concentrates around n * lambda") {
  SynthConfig cfg;
  cfg.users = 1000;
  cfg.mean_out_degree = 8.0;
  cfg.seed = 5;
  const auto corpus = generate(cfg);
  const double expected = 8000.0;
  const auto edges = static_cast<double>(corpus.graph.edge_count());
  CHECK(std::abs(edges - expected) <= 5.0 * std::sqrt(expected));
}

TEST_CASE("no edge between an original and its clone, graph invariants hold") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SynthConfig cfg;
    cfg.users = 200;
    cfg.clones = 40;
    cfg.perturbation = 0.5;
    cfg.mean_out_degree = 12;
    cfg.weight_max = 3;
    cfg.seed = seed;
    const auto corpus = generate(cfg);
    for (const auto& cluster : corpus.truth.clusters()) {
      const auto& a = *cluster.begin();
      const auto& b = *std::next(cluster.begin());
      CHECK_FALSE(corpus.graph.edges().contains({a, b}));
      CHECK_FALSE(corpus.graph.edges().contains({b, a}));
    }
    for (const auto& [edge, w] : corpus.graph.edges()) {
      CHECK(w >= 1);
      CHECK(edge.first != edge.second);
      CHECK(corpus.graph.nodes().contains(edge.first));
      CHECK(corpus.graph.nodes().contains(edge.second));
    }
  }
}

TEST_CASE("perturbation moves clones away from originals") {
  SynthConfig cfg;
  cfg.users = 500;
  cfg.clones = 20;
  cfg.perturbation = 0.5;
  cfg.seed = 2;
  const auto corpus = generate(cfg);
  const auto features =
      extract_features(filter_edges(normalize_weights(corpus.graph, NormMode::max), 0.5), DirectionSelect::out);
  int differing = 0;
  for (const auto& cluster : corpus.truth.clusters()) {
    if (features.at(*cluster.begin()).entries != features.at(*std::next(cluster.begin())).entries) ++differing;
  }
  CHECK(differing > 10);
}

TEST_CASE("invalid configurations") {
  SynthConfig cfg;
  cfg.users = 10;
  cfg.clones = 11;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
  cfg.clones = 0;
  cfg.mean_out_degree = 0;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
  cfg.mean_out_degree = 2;
  cfg.perturbation = 1.5;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
  cfg.perturbation = 0;
  cfg.weight_max = 0;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
  cfg.weight_max = 1;
  cfg.users = 0;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
}

TEST_CASE("random helpers") {
  SynthRandom rng(1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.below(7) < 7);
    const double u = rng.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  const auto s = rng.sample(5, 5);
  CHECK(s == std::set<std::uint64_t>{0, 1, 2, 3, 4});
  CHECK(rng.sample(0, 10).empty());
  double total = 0;
  for (int i = 0; i < 4000; ++i) total += static_cast<double>(rng.poisson(3.0));
  CHECK(std::abs(total / 4000 - 3.0) < 0.15);
  double big = 0;
  for (int i = 0; i < 200; ++i) big += static_cast<double>(rng.poisson(1200.0));
  CHECK(std::abs(big / 200 - 1200.0) < 15.0);
}

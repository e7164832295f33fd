#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sockpuppet/error.hpp"
#include "sockpuppet/features.hpp"

using namespace sockpuppet;

namespace {

InteractionGraph star() {
  InteractionGraph g;
  g.add_edge("A", "B", 4);
  g.add_edge("A", "C", 2);
  g.add_edge("A", "D", 1);
  return g;
}

InteractionGraph random_graph(std::mt19937_64& rng, int users, int edges) {
  InteractionGraph g;
  for (int i = 0; i < edges; ++i) {
    auto u = rng() % users, v = rng() % users;
    if (u != v) g.add_edge("u" + std::to_string(u), "u" + std::to_string(v), 1 + rng() % 9);
  }
  return g;
}

}  // namespace

TEST_CASE("normalize_weights by maximum") {
  const auto w = normalize_weights(star(), NormMode::max);
  const auto& out = w.out.at("A");
  CHECK(out.at("B") == 1.0);
  CHECK(out.at("C") == 0.5);
  CHECK(out.at("D") == 0.25);
  CHECK(w.in.at("B").at("A") == 1.0);
  CHECK(w.in.at("D").at("A") == 1.0);
  CHECK(w.users.size() == 4);
}

TEST_CASE("normalize_weights by total") {
  const auto w = normalize_weights(star(), NormMode::sum);
  const auto& out = w.out.at("A");
  CHECK(out.at("B") == doctest::Approx(4.0 / 7).epsilon(1e-15));
  CHECK(out.at("C") == doctest::Approx(2.0 / 7).epsilon(1e-15));
  CHECK(out.at("D") == doctest::Approx(1.0 / 7).epsilon(1e-15));
}

TEST_CASE("single edge slice normalizes to one") {
  InteractionGraph g;
  g.add_edge("A", "B", 7);
  for (auto mode : {NormMode::max, NormMode::sum}) {
    const auto w = normalize_weights(g, mode);
    CHECK(w.out.at("A").at("B") == 1.0);
    CHECK(w.in.at("B").at("A") == 1.0);
  }
}

TEST_CASE("normalized slices attain 1 (max) or sum to 1 (sum)") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_graph(rng, 30, 200);
    const auto wmax = normalize_weights(g, NormMode::max);
    for (const auto* slices : {&wmax.out, &wmax.in}) {
      for (const auto& [_, slice] : *slices) {
        double m = 0;
        for (const auto& [v, x] : slice) {
          CHECK(x > 0.0);
          CHECK(x <= 1.0);
          m = std::max(m, x);
        }
        CHECK(m == 1.0);
      }
    }
    const auto wsum = normalize_weights(g, NormMode::sum);
    for (const auto* slices : {&wsum.out, &wsum.in}) {
      for (const auto& [_, slice] : *slices) {
        double total = 0;
        for (const auto& [v, x] : slice) total += x;
        CHECK(std::abs(total - 1.0) <= 1e-9);
      }
    }
  }
}

TEST_CASE("filter_edges drops strictly-below-threshold links") {
  const auto w = normalize_weights(star(), NormMode::max);
  const auto f = filter_edges(w, 0.5);
  CHECK(f.out.at("A") == NeighborWeights::Slice{{"B", 1.0}, {"C", 0.5}});
  CHECK(filter_edges(w, 0.0) == w);
}

TEST_CASE("filter_edges can empty a slice") {
  NeighborWeights w;
  w.users = {"A", "D"};
  w.out["A"] = {{"D", 0.25}};
  const auto f = filter_edges(w, 0.5);
  CHECK_FALSE(f.out.contains("A"));
  const auto features = extract_features(f, DirectionSelect::out);
  CHECK(features.at("A").empty());
}

TEST_CASE("filter_edges validates the threshold") {
  const auto w = normalize_weights(star(), NormMode::max);
  CHECK_THROWS_AS(filter_edges(w, -0.1), ConfigError);
  CHECK_THROWS_AS(filter_edges(w, 1.5), ConfigError);
  CHECK_THROWS_AS(filter_edges(w, std::nan("")), ConfigError);
  CHECK_NOTHROW(filter_edges(w, 1.0));
}

TEST_CASE("filter_edges is a subset and idempotent") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = normalize_weights(random_graph(rng, 25, 150), trial % 2 ? NormMode::sum : NormMode::max);
    const double theta = static_cast<double>(rng() % 101) / 100.0;
    const auto once = filter_edges(w, theta);
    CHECK(filter_edges(once, theta) == once);
    for (const auto& [u, slice] : once.out) {
      for (const auto& [v, x] : slice) {
        CHECK(w.out.at(u).at(v) == x);
        CHECK(x >= theta);
      }
    }
  }
}

TEST_CASE("extract_features tags direction") {
  NeighborWeights w;
  w.users = {"u", "B", "C", "iso"};
  w.out["u"] = {{"B", 1.0}};
  w.in["u"] = {{"C", 0.6}};

  const auto out = extract_features(w, DirectionSelect::out);
  CHECK(out.at("u").entries == std::map<FeatureToken, double>{{{Direction::out, "B"}, 1.0}});

  const auto both = extract_features(w, DirectionSelect::both);
  CHECK(both.at("u").entries ==
        std::map<FeatureToken, double>{{{Direction::out, "B"}, 1.0}, {{Direction::in, "C"}, 0.6}});

  const auto in = extract_features(w, DirectionSelect::in);
  CHECK(in.at("u").entries == std::map<FeatureToken, double>{{{Direction::in, "C"}, 0.6}});

  CHECK(both.at("iso").empty());
  CHECK(both.at("iso").owner == "iso");
}

TEST_CASE("both restricted to out tokens equals out") {
  std::mt19937_64 rng(9);
  const auto w = filter_edges(normalize_weights(random_graph(rng, 40, 300), NormMode::max), 0.3);
  const auto out = extract_features(w, DirectionSelect::out);
  const auto both = extract_features(w, DirectionSelect::both);
  REQUIRE(out.size() == both.size());
  for (const auto& [user, fmap] : both) {
    FeatureMap restricted{user, {}};
    for (const auto& [tok, x] : fmap.entries) {
      CHECK(tok.neighbor != user);
      if (tok.direction == Direction::out) restricted.entries.emplace(tok, x);
    }
    CHECK(restricted == out.at(user));
  }
}

TEST_CASE("features TSV ordering and formatting") {
  NeighborWeights w;
  w.users = {"b", "a"};
  w.out["a"] = {{"b", 1.0}};
  w.in["a"] = {{"b", 0.1}};
  w.in["b"] = {{"a", 0.3333333333333333}};
  std::ostringstream out;
  write_features_tsv(out, extract_features(w, DirectionSelect::both));
  CHECK(out.str() == "a\tout\tb\t1\na\tin\tb\t0.1\nb\tin\ta\t0.3333333333333333\n");
}

TEST_CASE("enum names round-trip") {
  for (auto d : {DirectionSelect::out, DirectionSelect::in, DirectionSelect::both}) {
    CHECK(parse_direction(to_string(d)) == d);
  }
  CHECK(parse_norm_mode("sum") == NormMode::sum);
  CHECK(parse_weighting("binary") == Weighting::binary);
  CHECK_THROWS_AS(parse_direction("up"), ConfigError);
  CHECK_THROWS_AS(parse_norm_mode("degree"), ConfigError);
  CHECK_THROWS_AS(parse_weighting("tfidf"), ConfigError);
}

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "sockpuppet/error.hpp"
#include "sockpuppet/lsh_index.hpp"

using namespace sockpuppet;

namespace {

BitSignature random_bits(std::mt19937_64& rng, unsigned width) {
  std::vector<std::uint64_t> words((width + 63) / 64);
  for (auto& w : words) w = rng();
  if (width == 32) words[0] &= 0xFFFFFFFFULL;
  return BitSignature(width, words);
}

BitSignature flip_random(std::mt19937_64& rng, BitSignature s, unsigned flips) {
  std::vector<unsigned> positions(s.width());
  for (unsigned i = 0; i < s.width(); ++i) positions[i] = i;
  std::shuffle(positions.begin(), positions.end(), rng);
  flips = std::min(flips, s.width());
  for (unsigned i = 0; i < flips; ++i) s.set_bit(positions[i], !s.bit(positions[i]));
  return s;
}

std::string name(std::size_t i) { return "id" + std::to_string(i); }

// Clusters of near-duplicates around random centres, so many pairs sit
// close to the radius.
std::map<UserId, Fingerprint> clustered_population(std::mt19937_64& rng, std::size_t n,
                                                   unsigned width, unsigned max_flips) {
  std::map<UserId, Fingerprint> fps;
  std::vector<BitSignature> centres;
  const std::size_t centre_count = 1 + rng() % std::max<std::size_t>(1, n / 8);
  for (std::size_t c = 0; c < centre_count; ++c) centres.push_back(random_bits(rng, width));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& centre = centres[rng() % centres.size()];
    const auto flips = static_cast<unsigned>(rng() % (max_flips + 1));
    fps.emplace(name(i), Fingerprint{name(i), flip_random(rng, centre, flips)});
  }
  return fps;
}

std::map<UserId, Fingerprint> uniform_population(std::mt19937_64& rng, std::size_t n, unsigned width) {
  std::map<UserId, Fingerprint> fps;
  for (std::size_t i = 0; i < n; ++i) fps.emplace(name(i), Fingerprint{name(i), random_bits(rng, width)});
  return fps;
}

void check_partition(const BlockPlan& plan) {
  unsigned next = 0;
  unsigned slots = 0;
  unsigned widest = plan.ranges.front().width();
  for (const auto& r : plan.ranges) {
    CHECK(r.begin == next);
    CHECK(r.width() >= 1);
    CHECK(r.width() <= widest);
    CHECK(widest - r.width() <= 1);
    widest = r.width();
    next = r.end;
    slots += r.radius + 1;
  }
  CHECK(next == plan.bits);
  CHECK(slots == plan.max_distance + 1);
}

}  // namespace

TEST_CASE("plan_blocks exact pigeonhole examples") {
  SUBCASE("b=128 d=20") {
    const auto plan = plan_blocks(128, 20);
    REQUIRE(plan.block_count() == 21);
    CHECK(plan.is_exact());
    CHECK(std::count_if(plan.ranges.begin(), plan.ranges.end(), [](auto& r) { return r.width() == 7; }) == 2);
    CHECK(std::count_if(plan.ranges.begin(), plan.ranges.end(), [](auto& r) { return r.width() == 6; }) == 19);
    CHECK(plan.ranges[0] == BlockRange{0, 7, 0});
    CHECK(plan.ranges[1] == BlockRange{7, 14, 0});
    CHECK(plan.ranges[2] == BlockRange{14, 20, 0});
    check_partition(plan);
  }
  SUBCASE("b=128 d=15") {
    const auto plan = plan_blocks(128, 15);
    REQUIRE(plan.block_count() == 16);
    for (const auto& r : plan.ranges) CHECK(r.width() == 8);
  }
  SUBCASE("b=8 d=1") {
    const auto plan = plan_blocks(8, 1);
    CHECK(plan.ranges == std::vector<BlockRange>{{0, 4, 0}, {4, 8, 0}});
  }
  SUBCASE("d >= b is a configuration error") {
    CHECK_THROWS_AS(plan_blocks(128, 128), ConfigError);
    CHECK_THROWS_AS(plan_blocks(32, 40), ConfigError);
  }
}

TEST_CASE("generalized plans cover the radius") {
  for (unsigned bits : {32U, 64U, 128U, 256U}) {
    for (unsigned d = 0; d < std::min(bits, 40U); d += 3) {
      for (unsigned m = 1; m <= d + 1; ++m) {
        BlockPlan plan;
        try {
          plan = plan_blocks(bits, d, m);
        } catch (const ConfigError&) {
          continue;  // too many probes or a wide block with radius
        }
        CHECK(plan.block_count() == m);
        check_partition(plan);
        for (const auto& r : plan.ranges) {
          if (r.radius > 0) CHECK(r.width() <= 64);
        }
      }
    }
  }
  CHECK(plan_blocks(128, 20, 21) == plan_blocks(128, 20));
  CHECK_THROWS_AS(plan_blocks(128, 20, 0), ConfigError);
  CHECK_THROWS_AS(plan_blocks(128, 20, 22), ConfigError);
  CHECK_THROWS_AS(plan_blocks(128, 20, 1), ConfigError);
}

TEST_CASE("probes_per_key counts the Hamming ball") {
  CHECK(probes_per_key({0, 6, 0}) == 1);
  CHECK(probes_per_key({0, 16, 1}) == 17);
  CHECK(probes_per_key({0, 16, 2}) == 1 + 16 + 120);
  CHECK(probes_per_key({0, 3, 5}) == 8);
}

TEST_CASE("population-sized plans") {
  CHECK(plan_blocks_for_population(128, 20, 0).is_exact());
  CHECK(plan_blocks_for_population(128, 20, 50).is_exact());
  const auto big = plan_blocks_for_population(128, 20, 20000);
  CHECK(big.block_count() < 21);
  check_partition(big);
  CHECK(plan_blocks_for_population(128, 0, 100000).block_count() == 1);
}

TEST_CASE("build_index basics") {
  std::mt19937_64 rng(1);
  SUBCASE("empty") {
    const auto index = build_index({}, 20);
    CHECK(index.size() == 0);
    CHECK(index.populated_buckets() == 0);
    CHECK(index.bucket_memberships() == 0);
    CHECK(index.candidate_pairs().empty());
  }
  SUBCASE("identical fingerprints share every bucket") {
    const auto bits = random_bits(rng, 128);
    const std::map<UserId, Fingerprint> fps{{"a", {"a", bits}}, {"b", {"b", bits}}};
    const auto index = build_index(fps, 20);
    for (std::size_t j = 0; j < index.plan().block_count(); ++j) CHECK(index.co_bucketed("a", "b", j));
    CHECK(index.largest_bucket() == 2);
  }
  SUBCASE("one membership per table per user") {
    const auto fps = uniform_population(rng, 500, 128);
    const auto exact = build_index(fps, 20);
    CHECK(exact.bucket_memberships() == 500 * 21);
    const auto wide = build_index(fps, plan_blocks(128, 20, 8));
    CHECK(wide.bucket_memberships() == 500 * 8);
  }
  SUBCASE("width mismatch") {
    const std::map<UserId, Fingerprint> fps{{"a", {"a", random_bits(rng, 64)}},
                                            {"b", {"b", random_bits(rng, 128)}}};
    CHECK_THROWS_AS(build_index(fps, 20), ConfigError);
  }
}

TEST_CASE("candidate_pairs examples") {
  std::mt19937_64 rng(2);
  SUBCASE("exact duplicates") {
    const auto bits = random_bits(rng, 128);
    const std::map<UserId, Fingerprint> fps{{"b", {"b", bits}}, {"a", {"a", bits}}};
    CHECK(candidate_pairs(build_index(fps, 20)) == std::vector<CandidatePair>{{"a", "b", 0}});
  }
  SUBCASE("one flip per block exceeds the radius") {
    const auto base = random_bits(rng, 128);
    const auto plan = plan_blocks(128, 20);
    auto flipped = base;
    for (const auto& r : plan.ranges) flipped.set_bit(r.begin, !base.bit(r.begin));
    REQUIRE(hamming(base, flipped) == 21);
    const std::map<UserId, Fingerprint> fps{{"a", {"a", base}}, {"b", {"b", flipped}}};
    const auto index = build_index(fps, 20);
    for (std::size_t j = 0; j < 21; ++j) CHECK_FALSE(index.co_bucketed("a", "b", j));
    CHECK(candidate_pairs(index).empty());
    CHECK(brute_force_pairs(fps, 20).empty());
    CHECK(brute_force_pairs(fps, 21).size() == 1);
  }
  SUBCASE("random population equals brute force") {
    const auto fps = clustered_population(rng, 500, 128, 30);
    const auto expected = brute_force_pairs(fps, 20);
    CHECK_FALSE(expected.empty());
    CHECK(candidate_pairs(build_index(fps, 20)) == expected);
  }
}

TEST_CASE("candidate pairs equal brute force for every plan shape") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 120; ++trial) {
    const unsigned width = 32U << (rng() % 4);
    const unsigned d = static_cast<unsigned>(rng() % std::min(width, 33U));
    const std::size_t n = 2 + rng() % 300;
    const auto fps = clustered_population(rng, n, width, d + 8);
    const auto expected = brute_force_pairs(fps, d);

    const auto exact = candidate_pairs(build_index(fps, d));
    CHECK_MESSAGE(exact == expected, "exact plan width=" << width << " d=" << d << " n=" << n);

    const unsigned m = 1 + static_cast<unsigned>(rng() % (d + 1));
    BlockPlan plan;
    try {
      plan = plan_blocks(width, d, m);
    } catch (const ConfigError&) {
      plan = plan_blocks_for_population(width, d, n);
    }
    CandidateStats stats;
    const auto generalized = build_index(fps, plan).candidate_pairs(&stats);
    CHECK_MESSAGE(generalized == expected,
                  "plan m=" << plan.block_count() << " width=" << width << " d=" << d);
    CHECK(stats.verified == expected.size());
  }
}

TEST_CASE("query") {
  std::mt19937_64 rng(3);
  auto fps = clustered_population(rng, 200, 128, 24);
  const auto twin_bits = fps.at("id5").bits;
  fps.emplace("twin", Fingerprint{"twin", twin_bits});

  for (const auto& plan : {plan_blocks(128, 20), plan_blocks(128, 20, 9)}) {
    const auto index = build_index(fps, plan);
    const auto hits = query(index, fps.at("id5"));
    REQUIRE_FALSE(hits.empty());
    CHECK(hits.front() == Neighbor{"twin", 0});
    CHECK(std::none_of(hits.begin(), hits.end(), [](const Neighbor& n) { return n.user == "id5"; }));

    std::vector<Neighbor> scan;
    for (const auto& [user, fp] : fps) {
      const auto d = hamming(fp, fps.at("id5"));
      if (user != "id5" && d <= 20) scan.push_back({user, d});
    }
    std::sort(scan.begin(), scan.end(), [](auto& x, auto& y) {
      return std::tie(x.distance, x.user) < std::tie(y.distance, y.user);
    });
    CHECK(hits == scan);

    // A probe whose owner is not indexed excludes nobody.
    const auto outsider = query(index, Fingerprint{"nobody", twin_bits});
    CHECK(outsider.size() == hits.size() + 1);
  }
  CHECK(query(build_index({}, 20), fps.at("id1")).empty());
  CHECK_THROWS_AS(query(build_index(fps, 20), Fingerprint{"x", BitSignature(64)}), ConfigError);
}

TEST_CASE("candidate sets grow with the radius") {
  std::mt19937_64 rng(4);
  const auto fps = clustered_population(rng, 400, 128, 28);
  std::vector<CandidatePair> previous;
  for (unsigned d : {0U, 5U, 10U, 15U, 20U, 25U}) {
    const auto pairs = candidate_pairs(build_index(fps, plan_blocks_for_population(128, d, fps.size())));
    std::set<std::pair<UserId, UserId>> now;
    for (const auto& p : pairs) now.insert({p.a, p.b});
    for (const auto& p : previous) CHECK(now.contains({p.a, p.b}));
    CHECK(pairs.size() >= previous.size());
    previous = pairs;
  }
}

TEST_CASE("brute_force_pairs examples") {
  std::mt19937_64 rng(5);
  const auto x = random_bits(rng, 64);
  CHECK(brute_force_pairs({{"p", {"p", x}}, {"q", {"q", x}}}, 3) ==
        std::vector<CandidatePair>{{"p", "q", 0}});
  const std::map<UserId, Fingerprint> far{{"a", {"a", BitSignature(64, {0x0})}},
                                          {"b", {"b", BitSignature(64, {0xFFFFFFFFULL})}},
                                          {"c", {"c", BitSignature(64, {0xFFFFFFFF00000000ULL})}}};
  CHECK(brute_force_pairs(far, 10).empty());
  CHECK(candidate_pairs(build_index(far, 10)).empty());
}

TEST_CASE("candidate ordering") {
  std::vector<CandidatePair> v{{"a", "c", 2}, {"b", "c", 0}, {"a", "b", 2}};
  std::sort(v.begin(), v.end());
  CHECK(v == std::vector<CandidatePair>{{"b", "c", 0}, {"a", "b", 2}, {"a", "c", 2}});
  CHECK(canonical_pair("z", "a", 4) == CandidatePair{"a", "z", 4});
}

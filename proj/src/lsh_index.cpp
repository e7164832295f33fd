#include "sockpuppet/lsh_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <tuple>

#include "sockpuppet/error.hpp"

namespace sockpuppet {

namespace {

// Upper bound on bucket lookups per block; keeps radius plans tractable.
constexpr std::uint64_t kMaxProbesPerKey = std::uint64_t{1} << 20;

// Blocks up to this width use direct-addressed bucket tables.
constexpr unsigned kDenseWidth = 22;

// Relative costs used by the planner, measured on 128-bit populations:
// a direct-addressed lookup, a hashed lookup and one bucket-pair check.
constexpr double kDenseProbeCost = 1.0;
constexpr double kSparseProbeCost = 12.0;
constexpr double kPairCost = 4.0;

std::uint64_t extract_bits(const std::uint64_t* words, unsigned begin, unsigned width) {
  const unsigned idx = begin / 64;
  const unsigned off = begin % 64;
  std::uint64_t v = words[idx] >> off;
  if (off != 0 && off + width > 64) v |= words[idx + 1] << (64 - off);
  if (width < 64) v &= (std::uint64_t{1} << width) - 1;
  return v;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t binomial_sum(unsigned n, unsigned r) {
  // sum_{k<=r} C(n, k), saturating at kMaxProbesPerKey + 1.
  std::uint64_t total = 0;
  double term = 1.0;
  for (unsigned k = 0; k <= r && k <= n; ++k) {
    if (k > 0) term = term * (n - k + 1) / k;
    total += static_cast<std::uint64_t>(std::llround(term));
    if (total > kMaxProbesPerKey) return kMaxProbesPerKey + 1;
  }
  return total;
}

template <class F>
void flip_combinations(std::uint64_t key, unsigned start, unsigned width, unsigned radius, F& f) {
  for (unsigned pos = start; pos < width; ++pos) {
    const std::uint64_t flipped = key ^ (std::uint64_t{1} << pos);
    f(flipped);
    if (radius > 1) flip_combinations(flipped, pos + 1, width, radius - 1, f);
  }
}

template <class F>
void for_each_probe(std::uint64_t key, const BlockRange& range, F&& f) {
  f(key);
  if (range.radius > 0) flip_combinations(key, 0, range.width(), range.radius, f);
}

void check_distance(unsigned bits, unsigned max_distance) {
  if (max_distance >= bits) {
    throw ConfigError("max distance " + std::to_string(max_distance) +
                      " must be smaller than the fingerprint width " + std::to_string(bits));
  }
}

}  // namespace

BlockPlan plan_blocks(unsigned bits, unsigned max_distance) {
  return plan_blocks(bits, max_distance, max_distance + 1);
}

BlockPlan plan_blocks(unsigned bits, unsigned max_distance, unsigned block_count) {
  check_distance(bits, max_distance);
  if (block_count == 0 || block_count > max_distance + 1) {
    throw ConfigError("block count " + std::to_string(block_count) + " outside [1, " +
                      std::to_string(max_distance + 1) + "]");
  }
  BlockPlan plan{bits, max_distance, {}};
  const unsigned base = bits / block_count;
  const unsigned wide = bits % block_count;
  const unsigned slots = max_distance + 1;  // sum of (radius + 1)
  const unsigned base_radius = slots / block_count - 1;
  const unsigned extra = slots % block_count;
  unsigned begin = 0;
  for (unsigned j = 0; j < block_count; ++j) {
    const unsigned width = base + (j < wide ? 1 : 0);
    const unsigned radius = base_radius + (j < extra ? 1 : 0);
    if (radius > 0 && width > 64) {
      throw ConfigError("block of " + std::to_string(width) +
                        " bits cannot be probed with a non-zero radius");
    }
    BlockRange range{begin, begin + width, radius};
    if (probes_per_key(range) > kMaxProbesPerKey) {
      throw ConfigError("block count " + std::to_string(block_count) +
                        " needs too many probes per key");
    }
    plan.ranges.push_back(range);
    begin += width;
  }
  return plan;
}

BlockPlan plan_blocks_for_population(unsigned bits, unsigned max_distance,
                                     std::size_t population) {
  check_distance(bits, max_distance);
  const double n = static_cast<double>(population);
  BlockPlan best = plan_blocks(bits, max_distance);
  double best_cost = std::numeric_limits<double>::infinity();
  for (unsigned m = max_distance + 1; m >= 1; --m) {
    BlockPlan candidate;
    try {
      candidate = plan_blocks(bits, max_distance, m);
    } catch (const ConfigError&) {
      continue;
    }
    double cost = 0.0;
    for (const auto& r : candidate.ranges) {
      const double probes = static_cast<double>(probes_per_key(r));
      const double probe_cost = r.width() <= kDenseWidth ? kDenseProbeCost : kSparseProbeCost;
      cost += probes * (probe_cost + kPairCost * n * std::ldexp(1.0, -static_cast<int>(r.width())));
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(candidate);
    }
  }
  return best;
}

std::uint64_t probes_per_key(const BlockRange& range) {
  return binomial_sum(range.width(), range.radius);
}

bool operator<(const CandidatePair& x, const CandidatePair& y) {
  return std::tie(x.distance, x.a, x.b) < std::tie(y.distance, y.a, y.b);
}

CandidatePair canonical_pair(UserId x, UserId y, unsigned distance) {
  if (y < x) std::swap(x, y);
  return CandidatePair{std::move(x), std::move(y), distance};
}

LshIndex::LshIndex(const std::map<UserId, Fingerprint>& fingerprints, BlockPlan plan)
    : plan_(std::move(plan)) {
  check_distance(plan_.bits, plan_.max_distance);
  word_count_ = (plan_.bits + 63) / 64;
  users_.reserve(fingerprints.size());
  data_.reserve(fingerprints.size() * word_count_);
  for (const auto& [user, fp] : fingerprints) {
    if (fp.bits.width() != plan_.bits) {
      throw ConfigError("fingerprint of " + user + " has width " +
                        std::to_string(fp.bits.width()) + ", index expects " +
                        std::to_string(plan_.bits));
    }
    users_.push_back(user);
    data_.insert(data_.end(), fp.bits.words().begin(), fp.bits.words().end());
  }

  const auto n = static_cast<std::uint32_t>(users_.size());
  tables_.resize(plan_.ranges.size());
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(n);
  for (std::size_t j = 0; j < plan_.ranges.size(); ++j) {
    const auto& range = plan_.ranges[j];
    auto& table = tables_[j];
    table.dense = range.width() <= kDenseWidth;
    for (std::uint32_t u = 0; u < n; ++u) keyed[u] = {block_key(words_of(u), range), u};
    std::sort(keyed.begin(), keyed.end());

    if (table.dense) {
      table.occupied.assign(((std::size_t{1} << range.width()) + 63) / 64, 0);
      table.rank.assign(table.occupied.size(), 0);
    }
    table.members.resize(n);
    table.member_words.resize(std::size_t{n} * word_count_);
    for (std::uint32_t pos = 0; pos < n; ++pos) {
      const auto [key, u] = keyed[pos];
      if (pos == 0 || keyed[pos - 1].first != key) {
        if (table.dense) {
          table.occupied[key / 64] |= std::uint64_t{1} << (key % 64);
        } else {
          table.slot_of_key.emplace(key, static_cast<std::uint32_t>(table.offsets.size()));
        }
        table.offsets.push_back(pos);
      }
      table.members[pos] = u;
      std::copy_n(words_of(u), word_count_, table.member_words.begin() + std::size_t{pos} * word_count_);
    }
    table.offsets.push_back(n);
    std::uint32_t seen = 0;
    for (std::size_t w = 0; w < table.occupied.size(); ++w) {
      table.rank[w] = seen;
      seen += static_cast<std::uint32_t>(std::popcount(table.occupied[w]));
    }
  }
}

std::pair<std::uint32_t, std::uint32_t> LshIndex::bucket(const Table& table,
                                                         std::uint64_t key) const {
  if (table.dense) {
    const std::uint64_t word = table.occupied[key / 64];
    const std::uint64_t bit = std::uint64_t{1} << (key % 64);
    if ((word & bit) == 0) return {0, 0};
    const auto slot = table.rank[key / 64] + static_cast<std::uint32_t>(std::popcount(word & (bit - 1)));
    return {table.offsets[slot], table.offsets[slot + 1]};
  }
  auto it = table.slot_of_key.find(key);
  if (it == table.slot_of_key.end()) return {0, 0};
  return {table.offsets[it->second], table.offsets[it->second + 1]};
}

std::uint64_t LshIndex::block_key(const std::uint64_t* words, const BlockRange& range) const {
  if (range.width() <= 64) return extract_bits(words, range.begin, range.width());
  // Wider blocks are only ever matched exactly; hashing them is safe because
  // every bucket hit is verified.
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (unsigned p = range.begin; p < range.end; p += 64) {
    h = mix64(h ^ extract_bits(words, p, std::min(64U, range.end - p)));
  }
  return h;
}

unsigned LshIndex::block_distance(const std::uint64_t* a, const std::uint64_t* b,
                                  const BlockRange& range) const {
  unsigned d = 0;
  for (unsigned p = range.begin; p < range.end; p += 64) {
    const unsigned w = std::min(64U, range.end - p);
    d += static_cast<unsigned>(std::popcount(extract_bits(a, p, w) ^ extract_bits(b, p, w)));
  }
  return d;
}

unsigned LshIndex::distance(const std::uint64_t* a, const std::uint64_t* b) const {
  unsigned d = 0;
  for (unsigned i = 0; i < word_count_; ++i) {
    d += static_cast<unsigned>(std::popcount(a[i] ^ b[i]));
  }
  return d;
}

bool LshIndex::first_matching_block(const std::uint64_t* a, const std::uint64_t* b,
                                    std::size_t j) const {
  if (block_distance(a, b, plan_.ranges[j]) > plan_.ranges[j].radius) return false;
  for (std::size_t k = 0; k < j; ++k) {
    if (block_distance(a, b, plan_.ranges[k]) <= plan_.ranges[k].radius) return false;
  }
  return true;
}

std::size_t LshIndex::bucket_memberships() const {
  std::size_t total = 0;
  for (const auto& t : tables_) total += t.members.size();
  return total;
}

std::size_t LshIndex::populated_buckets() const {
  std::size_t total = 0;
  for (const auto& t : tables_) total += t.offsets.size() - 1;
  return total;
}

std::size_t LshIndex::largest_bucket() const {
  std::size_t largest = 0;
  for (const auto& t : tables_) {
    for (std::size_t s = 0; s + 1 < t.offsets.size(); ++s) {
      largest = std::max<std::size_t>(largest, t.offsets[s + 1] - t.offsets[s]);
    }
  }
  return largest;
}

std::size_t LshIndex::index_of(const UserId& user) const {
  auto it = std::lower_bound(users_.begin(), users_.end(), user);
  if (it == users_.end() || *it != user) return users_.size();
  return static_cast<std::size_t>(it - users_.begin());
}

bool LshIndex::co_bucketed(const UserId& x, const UserId& y, std::size_t table) const {
  const auto ix = index_of(x);
  const auto iy = index_of(y);
  if (ix == users_.size() || iy == users_.size() || table >= tables_.size()) return false;
  const auto& range = plan_.ranges[table];
  return block_key(words_of(ix), range) == block_key(words_of(iy), range);
}

std::vector<CandidatePair> LshIndex::candidate_pairs(CandidateStats* stats) const {
  CandidateStats local;
  std::vector<CandidatePair> pairs;
  const auto n = static_cast<std::uint32_t>(users_.size());
  // Table-major order keeps a single table's arrays in cache at a time.
  for (std::size_t j = 0; j < tables_.size(); ++j) {
    const auto& range = plan_.ranges[j];
    const auto& table = tables_[j];
    for (std::uint32_t u = 0; u < n; ++u) {
      const auto* wu = words_of(u);
      for_each_probe(block_key(wu, range), range, [&](std::uint64_t key) {
        ++local.probes;
        const auto [first, last] = bucket(table, key);
        if (first == last) return;
        const auto* begin = table.members.data();
        auto pos = static_cast<std::uint32_t>(std::upper_bound(begin + first, begin + last, u) - begin);
        local.bucket_pairs += last - pos;
        for (; pos < last; ++pos) {
          const auto* wv = table.member_words.data() + std::size_t{pos} * word_count_;
          const unsigned d = distance(wu, wv);
          if (d > plan_.max_distance || !first_matching_block(wu, wv, j)) continue;
          pairs.push_back(CandidatePair{users_[u], users_[table.members[pos]], d});
        }
      });
    }
  }
  local.verified = pairs.size();
  std::sort(pairs.begin(), pairs.end());
  if (stats) *stats = local;
  return pairs;
}

std::vector<Neighbor> LshIndex::query(const Fingerprint& fp) const {
  if (fp.bits.width() != plan_.bits) {
    throw ConfigError("query width " + std::to_string(fp.bits.width()) +
                      " does not match index width " + std::to_string(plan_.bits));
  }
  const auto* wq = fp.bits.words().data();
  std::vector<Neighbor> result;
  for (std::size_t j = 0; j < tables_.size(); ++j) {
    const auto& range = plan_.ranges[j];
    const auto& table = tables_[j];
    for_each_probe(block_key(wq, range), range, [&](std::uint64_t key) {
      const auto [first, last] = bucket(table, key);
      for (auto s = first; s < last; ++s) {
        const auto v = table.members[s];
        if (users_[v] == fp.owner) continue;
        const auto* wv = table.member_words.data() + std::size_t{s} * word_count_;
        const unsigned d = distance(wq, wv);
        if (d > plan_.max_distance || !first_matching_block(wq, wv, j)) continue;
        result.push_back(Neighbor{users_[v], d});
      }
    });
  }
  std::sort(result.begin(), result.end(), [](const Neighbor& x, const Neighbor& y) {
    return std::tie(x.distance, x.user) < std::tie(y.distance, y.user);
  });
  return result;
}

LshIndex build_index(const std::map<UserId, Fingerprint>& fingerprints, unsigned max_distance) {
  unsigned bits = fingerprints.empty() ? 128 : fingerprints.begin()->second.bits.width();
  return LshIndex(fingerprints, plan_blocks(bits, max_distance));
}

LshIndex build_index(const std::map<UserId, Fingerprint>& fingerprints, BlockPlan plan) {
  return LshIndex(fingerprints, std::move(plan));
}

std::vector<CandidatePair> candidate_pairs(const LshIndex& index, CandidateStats* stats) {
  return index.candidate_pairs(stats);
}

std::vector<Neighbor> query(const LshIndex& index, const Fingerprint& fp) {
  return index.query(fp);
}

std::vector<CandidatePair> brute_force_pairs(const std::map<UserId, Fingerprint>& fingerprints,
                                             unsigned max_distance) {
  std::vector<const std::pair<const UserId, Fingerprint>*> fps;
  fps.reserve(fingerprints.size());
  for (const auto& entry : fingerprints) fps.push_back(&entry);
  if (!fps.empty()) check_distance(fps.front()->second.bits.width(), max_distance);

  std::vector<CandidatePair> pairs;
  for (std::size_t i = 0; i < fps.size(); ++i) {
    for (std::size_t k = i + 1; k < fps.size(); ++k) {
      const unsigned d = hamming(fps[i]->second, fps[k]->second);
      if (d <= max_distance) pairs.push_back(CandidatePair{fps[i]->first, fps[k]->first, d});
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace sockpuppet

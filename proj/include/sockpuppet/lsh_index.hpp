#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "sockpuppet/simhash.hpp"

namespace sockpuppet {

/// Contiguous bit range [begin, end) searched with Hamming radius `radius`.
struct BlockRange {
  unsigned begin = 0;
  unsigned end = 0;
  unsigned radius = 0;

  unsigned width() const { return end - begin; }
  bool operator==(const BlockRange&) const = default;
};

/// Partition of [0, bits) into contiguous blocks, widest first, with
/// sum(radius + 1) == max_distance + 1. Any two signatures within
/// max_distance then differ by at most `radius` bits on at least one block,
/// so probing every block within its radius finds every true pair.
///
/// The exact plan (max_distance + 1 blocks, all radii zero) is the classic
/// pigeonhole split; fewer, wider blocks with non-zero radii trade bucket
/// probes for far smaller buckets.
struct BlockPlan {
  unsigned bits = 0;
  unsigned max_distance = 0;
  std::vector<BlockRange> ranges;

  std::size_t block_count() const { return ranges.size(); }
  bool is_exact() const { return ranges.size() == std::size_t{max_distance} + 1; }
  bool operator==(const BlockPlan&) const = default;
};

/// Exact pigeonhole plan: max_distance + 1 blocks of radius 0.
/// Throws ConfigError unless max_distance < bits.
BlockPlan plan_blocks(unsigned bits, unsigned max_distance);

/// Generalized plan with `block_count` blocks, 1 <= block_count <= max_distance + 1.
/// Blocks probed with a non-zero radius must be at most 64 bits wide.
BlockPlan plan_blocks(unsigned bits, unsigned max_distance, unsigned block_count);

/// Picks the block count minimizing expected probes plus bucket collisions for
/// `population` uniformly distributed signatures.
BlockPlan plan_blocks_for_population(unsigned bits, unsigned max_distance,
                                     std::size_t population);

/// Number of keys within `range.radius` of a key (bucket lookups per block).
std::uint64_t probes_per_key(const BlockRange& range);

/// Verified near pair, a < b, ordered by (distance, a, b).
struct CandidatePair {
  UserId a;
  UserId b;
  unsigned distance = 0;

  bool operator==(const CandidatePair&) const = default;
};

bool operator<(const CandidatePair& x, const CandidatePair& y);

/// Normalizes (a, b) to canonical order.
CandidatePair canonical_pair(UserId x, UserId y, unsigned distance);

struct Neighbor {
  UserId user;
  unsigned distance = 0;

  bool operator==(const Neighbor&) const = default;
};

struct CandidateStats {
  std::uint64_t probes = 0;        // bucket lookups
  std::uint64_t bucket_pairs = 0;  // (u, v) pairs examined out of buckets
  std::uint64_t verified = 0;      // pairs emitted after exact verification
};

class LshIndex {
 public:
  LshIndex(const std::map<UserId, Fingerprint>& fingerprints, BlockPlan plan);

  const BlockPlan& plan() const { return plan_; }
  std::size_t size() const { return users_.size(); }
  std::size_t bucket_memberships() const;
  std::size_t populated_buckets() const;
  std::size_t largest_bucket() const;
  bool co_bucketed(const UserId& x, const UserId& y, std::size_t table) const;

  /// Every pair at distance <= max_distance, each exactly once, sorted.
  std::vector<CandidatePair> candidate_pairs(CandidateStats* stats = nullptr) const;

  /// Indexed users within max_distance of `fp`, sorted by (distance, user),
  /// excluding fp.owner.
  std::vector<Neighbor> query(const Fingerprint& fp) const;

 private:
  // Narrow blocks locate buckets through an occupancy bitmap with per-word
  // ranks; wider ones go through a key -> slot map. Bucket s spans
  // members[offsets[s], offsets[s + 1]).
  struct Table {
    bool dense = false;
    std::vector<std::uint64_t> occupied;
    std::vector<std::uint32_t> rank;  // set bits before each occupied word
    std::unordered_map<std::uint64_t, std::uint32_t> slot_of_key;
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> members;       // ascending within a bucket
    std::vector<std::uint64_t> member_words;  // fingerprint copy per member
  };

  const std::uint64_t* words_of(std::size_t user) const { return data_.data() + user * word_count_; }
  // Returns [first, last) member positions for `key`, empty if absent.
  std::pair<std::uint32_t, std::uint32_t> bucket(const Table& table, std::uint64_t key) const;
  std::uint64_t block_key(const std::uint64_t* words, const BlockRange& range) const;
  unsigned block_distance(const std::uint64_t* a, const std::uint64_t* b,
                          const BlockRange& range) const;
  unsigned distance(const std::uint64_t* a, const std::uint64_t* b) const;
  // True iff block `j` is the first block on which a and b are within radius.
  bool first_matching_block(const std::uint64_t* a, const std::uint64_t* b, std::size_t j) const;
  std::size_t index_of(const UserId& user) const;

  BlockPlan plan_;
  unsigned word_count_ = 0;
  std::vector<UserId> users_;        // sorted
  std::vector<std::uint64_t> data_;  // users_.size() * word_count_ words
  std::vector<Table> tables_;
};

/// Exact-plan index (max_distance + 1 blocks).
LshIndex build_index(const std::map<UserId, Fingerprint>& fingerprints, unsigned max_distance);
LshIndex build_index(const std::map<UserId, Fingerprint>& fingerprints, BlockPlan plan);

std::vector<CandidatePair> candidate_pairs(const LshIndex& index, CandidateStats* stats = nullptr);
std::vector<Neighbor> query(const LshIndex& index, const Fingerprint& fp);

/// All-pairs scan; the O(n^2) reference for candidate_pairs.
std::vector<CandidatePair> brute_force_pairs(const std::map<UserId, Fingerprint>& fingerprints,
                                             unsigned max_distance);

}  // namespace sockpuppet

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sockpuppet/features.hpp"

namespace sockpuppet {

/// Fixed-width bit vector, width in {32, 64, 128, 256}.
///
/// Bit position i lives in word i / 64 at bit i % 64 (LSB first). Hex text
/// writes word 0 first, each word as 16 hex digits most-significant nibble
/// first (8 digits for width 32), so the text is 2 * width / 8 characters.
class BitSignature {
 public:
  explicit BitSignature(unsigned width = 128);
  BitSignature(unsigned width, std::vector<std::uint64_t> words);

  static bool is_supported_width(unsigned width);
  static BitSignature from_hex(std::string_view hex);

  unsigned width() const { return width_; }
  std::span<const std::uint64_t> words() const { return words_; }
  bool bit(unsigned i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set_bit(unsigned i, bool value);
  std::string to_hex() const;

  bool operator==(const BitSignature&) const = default;

 private:
  unsigned width_;
  std::vector<std::uint64_t> words_;
};

struct Fingerprint {
  UserId owner;
  BitSignature bits;

  bool operator==(const Fingerprint&) const = default;
};

struct HashConfig {
  unsigned bits = 128;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless bits is a supported width.
  void validate() const;
};

/// Thrown by simhash() for an empty feature map.
class UnfingerprintableError : public std::runtime_error {
 public:
  explicit UnfingerprintableError(const UserId& owner);
  const UserId& owner() const { return owner_; }

 private:
  UserId owner_;
};

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t state = kFnvOffsetBasis);

/// direction byte ++ 4-byte big-endian neighbor length ++ neighbor bytes.
std::vector<std::uint8_t> token_encoding(const FeatureToken& token);

/// Word j = FNV-1a-64(encoding ++ big-endian seed ++ byte j); width 32 keeps
/// the low half of word 0.
BitSignature hash_token(const FeatureToken& token, const HashConfig& cfg);

/// Weighted SimHash: each token votes +w on its set bits and -w on the others;
/// a bit is set iff its total is strictly positive.
Fingerprint simhash(const FeatureMap& features, const HashConfig& cfg,
                    Weighting weighting = Weighting::weighted);

/// Throws ConfigError on width mismatch.
unsigned hamming(const BitSignature& a, const BitSignature& b);
unsigned hamming(const Fingerprint& a, const Fingerprint& b);

struct FingerprintSet {
  std::map<UserId, Fingerprint> fingerprints;
  std::vector<UserId> unfingerprintable;  // sorted
};

FingerprintSet fingerprint_all(const std::map<UserId, FeatureMap>& features,
                               const HashConfig& cfg,
                               Weighting weighting = Weighting::weighted);

/// Header `# bits=<b> seed=<seed>` then user<TAB>hex per line, sorted by user.
void write_fingerprints_tsv(std::ostream& out, const HashConfig& cfg,
                            const std::map<UserId, Fingerprint>& fingerprints);
std::map<UserId, Fingerprint> read_fingerprints_tsv(std::istream& in, HashConfig* cfg = nullptr);

}  // namespace sockpuppet

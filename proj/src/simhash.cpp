#include "sockpuppet/simhash.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <optional>
#include <istream>
#include <ostream>

#include "sockpuppet/error.hpp"

namespace sockpuppet {

namespace {

constexpr unsigned word_count(unsigned width) { return (width + 63) / 64; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

bool BitSignature::is_supported_width(unsigned width) {
  return width == 32 || width == 64 || width == 128 || width == 256;
}

BitSignature::BitSignature(unsigned width) : width_(width), words_(word_count(width), 0) {
  if (!is_supported_width(width)) {
    throw ConfigError("unsupported fingerprint width " + std::to_string(width) +
                      " (expected 32, 64, 128 or 256)");
  }
}

BitSignature::BitSignature(unsigned width, std::vector<std::uint64_t> words)
    : BitSignature(width) {
  if (words.size() != words_.size()) {
    throw ConfigError("expected " + std::to_string(words_.size()) + " words for width " +
                      std::to_string(width));
  }
  if (width == 32 && (words[0] >> 32) != 0) {
    throw ConfigError("32-bit signature has bits set above position 31");
  }
  words_ = std::move(words);
}

void BitSignature::set_bit(unsigned i, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (i % 64);
  if (value) {
    words_[i / 64] |= mask;
  } else {
    words_[i / 64] &= ~mask;
  }
}

std::string BitSignature::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const unsigned digits_per_word = width_ == 32 ? 8 : 16;
  std::string text;
  text.reserve(width_ / 4);
  for (std::uint64_t w : words_) {
    for (int d = static_cast<int>(digits_per_word) - 1; d >= 0; --d) {
      text.push_back(kDigits[(w >> (4 * d)) & 0xF]);
    }
  }
  return text;
}

BitSignature BitSignature::from_hex(std::string_view hex) {
  const auto width = static_cast<unsigned>(hex.size() * 4);
  if (!is_supported_width(width)) {
    throw InputError("fingerprint hex has " + std::to_string(hex.size()) + " digits");
  }
  const unsigned digits_per_word = width == 32 ? 8 : 16;
  std::vector<std::uint64_t> words(word_count(width), 0);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    int v = hex_value(hex[i]);
    if (v < 0) throw InputError("invalid hex digit in fingerprint '" + std::string(hex) + "'");
    auto& w = words[i / digits_per_word];
    w = (w << 4) | static_cast<std::uint64_t>(v);
  }
  return BitSignature(width, std::move(words));
}

void HashConfig::validate() const {
  if (!BitSignature::is_supported_width(bits)) {
    throw ConfigError("unsupported fingerprint width " + std::to_string(bits) +
                      " (expected 32, 64, 128 or 256)");
  }
}

UnfingerprintableError::UnfingerprintableError(const UserId& owner)
    : std::runtime_error("user " + owner + " is unfingerprintable (empty feature map)"),
      owner_(owner) {}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t state) {
  for (std::uint8_t b : bytes) {
    state ^= b;
    state *= kFnvPrime;
  }
  return state;
}

std::vector<std::uint8_t> token_encoding(const FeatureToken& token) {
  const auto len = static_cast<std::uint32_t>(token.neighbor.size());
  std::vector<std::uint8_t> bytes;
  bytes.reserve(5 + len);
  bytes.push_back(static_cast<std::uint8_t>(token.direction));
  for (int shift = 24; shift >= 0; shift -= 8) {
    bytes.push_back(static_cast<std::uint8_t>(len >> shift));
  }
  bytes.insert(bytes.end(), token.neighbor.begin(), token.neighbor.end());
  return bytes;
}

BitSignature hash_token(const FeatureToken& token, const HashConfig& cfg) {
  cfg.validate();
  auto bytes = token_encoding(token);
  for (int shift = 56; shift >= 0; shift -= 8) {
    bytes.push_back(static_cast<std::uint8_t>(cfg.seed >> shift));
  }
  const std::uint64_t prefix = fnv1a64(bytes);
  std::vector<std::uint64_t> words(word_count(cfg.bits));
  for (unsigned j = 0; j < words.size(); ++j) {
    const std::uint8_t index = static_cast<std::uint8_t>(j);
    words[j] = fnv1a64(std::span(&index, 1), prefix);
  }
  if (cfg.bits == 32) words[0] &= 0xFFFFFFFFULL;
  return BitSignature(cfg.bits, std::move(words));
}

Fingerprint simhash(const FeatureMap& features, const HashConfig& cfg, Weighting weighting) {
  cfg.validate();
  if (features.empty()) throw UnfingerprintableError(features.owner);

  std::vector<double> votes(cfg.bits, 0.0);
  for (const auto& [token, weight] : features.entries) {
    const double w = weighting == Weighting::binary ? 1.0 : weight;
    const auto h = hash_token(token, cfg);
    for (unsigned i = 0; i < cfg.bits; ++i) {
      votes[i] += h.bit(i) ? w : -w;
    }
  }
  Fingerprint fp{features.owner, BitSignature(cfg.bits)};
  for (unsigned i = 0; i < cfg.bits; ++i) {
    if (votes[i] > 0.0) fp.bits.set_bit(i, true);
  }
  return fp;
}

unsigned hamming(const BitSignature& a, const BitSignature& b) {
  if (a.width() != b.width()) {
    throw ConfigError("fingerprint width mismatch: " + std::to_string(a.width()) + " vs " +
                      std::to_string(b.width()));
  }
  unsigned distance = 0;
  for (std::size_t i = 0; i < a.words().size(); ++i) {
    distance += static_cast<unsigned>(std::popcount(a.words()[i] ^ b.words()[i]));
  }
  return distance;
}

unsigned hamming(const Fingerprint& a, const Fingerprint& b) { return hamming(a.bits, b.bits); }

FingerprintSet fingerprint_all(const std::map<UserId, FeatureMap>& features,
                               const HashConfig& cfg, Weighting weighting) {
  cfg.validate();
  FingerprintSet result;
  for (const auto& [user, fmap] : features) {
    if (fmap.empty()) {
      result.unfingerprintable.push_back(user);
      continue;
    }
    auto fp = simhash(fmap, cfg, weighting);
    fp.owner = user;
    result.fingerprints.emplace(user, std::move(fp));
  }
  return result;
}

void write_fingerprints_tsv(std::ostream& out, const HashConfig& cfg,
                            const std::map<UserId, Fingerprint>& fingerprints) {
  out << "# bits=" << cfg.bits << " seed=" << cfg.seed << '\n';
  for (const auto& [user, fp] : fingerprints) {
    out << user << '\t' << fp.bits.to_hex() << '\n';
  }
}

std::map<UserId, Fingerprint> read_fingerprints_tsv(std::istream& in, HashConfig* cfg) {
  std::map<UserId, Fingerprint> result;
  std::string line;
  std::size_t line_no = 0;
  std::optional<unsigned> declared_bits;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      unsigned bits = 0;
      std::uint64_t seed = 0;
      if (std::sscanf(line.c_str(), "# bits=%u seed=%" SCNu64, &bits, &seed) == 2) {
        declared_bits = bits;
        if (cfg) *cfg = HashConfig{bits, seed};
      }
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw InputError("expected user<TAB>hex at line " + std::to_string(line_no));
    }
    Fingerprint fp{line.substr(0, tab), BitSignature::from_hex(std::string_view(line).substr(tab + 1))};
    if (declared_bits && fp.bits.width() != *declared_bits) {
      throw InputError("fingerprint width disagrees with header at line " + std::to_string(line_no));
    }
    auto owner = fp.owner;
    if (!result.emplace(owner, std::move(fp)).second) {
      throw InputError("duplicate user " + owner + " at line " + std::to_string(line_no));
    }
  }
  return result;
}

}  // namespace sockpuppet

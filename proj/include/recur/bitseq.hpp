#pragma once
// Finite binary words, infinite sequence sources and the shift operator.
//
// Bits are indexed from 0. The tail Z_n of a sequence Z is what remains after
// dropping indices 0..n-1, so bit j of Z_n is bit n+j of Z.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "recur/error.hpp"

namespace recur {

/// A finite bit string. Storage is packed, but every operation is defined
/// positionally; nothing depends on the block layout.
class Word {
 public:
  Word() = default;

  /// Parses a string of '0'/'1' characters. The token "-" denotes the empty
  /// word in text formats and is accepted here as well.
  explicit Word(std::string_view bits) {
    if (bits == "-") return;
    blocks_.reserve((bits.size() + 63) / 64);
    for (char c : bits) {
      if (c != '0' && c != '1') {
        throw ParseError("invalid bit character '" + std::string(1, c) + "' in word");
      }
      push_back(c == '1');
    }
  }

  /// The `length` low bits of `value`, most significant first, so that
  /// numeric order of values matches lexicographic order of the words.
  static Word from_bits(std::uint64_t value, std::size_t length) {
    Word w;
    for (std::size_t i = 0; i < length; ++i) {
      const std::size_t pos = length - 1 - i;
      w.push_back(pos < 64 && ((value >> pos) & 1U) != 0);
    }
    return w;
  }

  static Word repeated(bool bit, std::size_t length) {
    Word w;
    for (std::size_t i = 0; i < length; ++i) w.push_back(bit);
    return w;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const noexcept { return ((blocks_[i / 64] >> (i % 64)) & 1U) != 0; }

  bool at(std::size_t i) const {
    if (i >= size_) throw OutOfRange("bit index " + std::to_string(i) + " out of range for word of length " + std::to_string(size_));
    return (*this)[i];
  }

  void push_back(bool bit) {
    if (size_ % 64 == 0) blocks_.push_back(0);
    if (bit) blocks_.back() |= std::uint64_t{1} << (size_ % 64);
    ++size_;
  }

  void append(const Word& other) {
    for (std::size_t i = 0; i < other.size(); ++i) push_back(other[i]);
  }

  /// Bits [from, to).
  Word slice(std::size_t from, std::size_t to) const {
    if (from > to || to > size_) {
      throw OutOfRange("slice [" + std::to_string(from) + "," + std::to_string(to) + ") out of range for word of length " +
                       std::to_string(size_));
    }
    Word w;
    w.blocks_.reserve((to - from + 63) / 64);
    for (std::size_t i = from; i < to; ++i) w.push_back((*this)[i]);
    return w;
  }

  Word prefix(std::size_t m) const { return slice(0, m); }

  /// True when *this is a (not necessarily proper) prefix of `other`.
  bool is_prefix_of(const Word& other) const noexcept { return is_prefix_of_at(other, 0); }

  /// True when *this occurs in `other` starting at `offset`.
  bool is_prefix_of_at(const Word& other, std::size_t offset) const noexcept {
    if (offset > other.size() || size_ > other.size() - offset) return false;
    if (offset == 0) {
      std::size_t full = size_ / 64;
      for (std::size_t b = 0; b < full; ++b) {
        if (blocks_[b] != other.blocks_[b]) return false;
      }
      std::size_t rest = size_ % 64;
      if (rest == 0) return true;
      std::uint64_t mask = (std::uint64_t{1} << rest) - 1;
      return (blocks_[full] & mask) == (other.blocks_[full] & mask);
    }
    for (std::size_t i = 0; i < size_; ++i) {
      if ((*this)[i] != other[offset + i]) return false;
    }
    return true;
  }

  std::size_t count_ones() const noexcept {
    std::size_t n = 0;
    for (auto b : blocks_) n += static_cast<std::size_t>(std::popcount(b));
    return n;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) s.push_back((*this)[i] ? '1' : '0');
    return s;
  }

  /// Text-format token: the bits, or "-" for the empty word.
  std::string token() const { return empty() ? std::string("-") : to_string(); }

  std::size_t hash() const noexcept {
    std::size_t h = std::hash<std::size_t>{}(size_);
    for (auto b : blocks_) h ^= std::hash<std::uint64_t>{}(b) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

  friend bool operator==(const Word& a, const Word& b) noexcept {
    return a.size_ == b.size_ && std::equal(a.blocks_.begin(), a.blocks_.end(), b.blocks_.begin(), b.blocks_.end());
  }

  /// Shortlex order: shorter words first, then lexicographic.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) noexcept {
    if (auto c = a.size_ <=> b.size_; c != 0) return c;
    return lex_compare(a, b);
  }

  /// Plain lexicographic order, in which a prefix precedes its extensions.
  static std::strong_ordering lex_compare(const Word& a, const Word& b) noexcept {
    std::size_t common = std::min(a.blocks_.size(), b.blocks_.size());
    for (std::size_t blk = 0; blk < common; ++blk) {
      std::uint64_t diff = a.blocks_[blk] ^ b.blocks_[blk];
      if (diff == 0) continue;
      std::size_t pos = blk * 64 + static_cast<std::size_t>(std::countr_zero(diff));
      if (pos >= a.size_ || pos >= b.size_) break;
      return a[pos] ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return a.size_ <=> b.size_;
  }

 private:
  boost::container::small_vector<std::uint64_t, 1> blocks_;
  std::size_t size_ = 0;
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept { return w.hash(); }
};

struct LexLess {
  bool operator()(const Word& a, const Word& b) const noexcept { return Word::lex_compare(a, b) < 0; }
};

inline Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.append(b);
  return w;
}

/// Drops the first n bits of w.
inline Word shift(const Word& w, std::size_t n) {
  if (n > w.size()) {
    throw OutOfRange("cannot shift word of length " + std::to_string(w.size()) + " by " + std::to_string(n));
  }
  return w.slice(n, w.size());
}

// SplitMix64 finaliser. The seeded source uses it as a counter-based
// generator: 64-bit block j of the sequence for seed s is
// mix(s + (j + 1) * 0x9E3779B97F4A7C15), i.e. the (j+1)-th output of
// SplitMix64 started at s; bit i is bit (i mod 64) of block i / 64.
inline std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t seeded_block(std::uint64_t seed, std::uint64_t j) noexcept {
  return splitmix64_mix(seed + (j + 1) * 0x9E3779B97F4A7C15ULL);
}

/// An infinite (or, when file-backed, finite) bit sequence with random
/// access. Every kind is deterministic: the same specification yields the same
/// bit at every index on every call.
class SequenceSource {
 public:
  struct Seeded {
    std::uint64_t seed;
  };
  struct EventuallyPeriodic {
    Word head;
    Word cycle;
  };
  struct ExplicitPrefix {
    Word word;
    bool fill;
  };
  struct FileBacked {
    std::shared_ptr<const Word> data;
    std::string path;
  };
  struct Computed {
    std::function<bool(std::size_t)> access;
    std::string label;
  };

  static SequenceSource seeded(std::uint64_t seed) { return SequenceSource(Seeded{seed}); }

  static SequenceSource eventually_periodic(Word head, Word cycle) {
    if (cycle.empty()) throw ParseError("eventually-periodic source needs a nonempty cycle");
    return SequenceSource(EventuallyPeriodic{std::move(head), std::move(cycle)});
  }

  static SequenceSource constant(bool bit) { return eventually_periodic(Word{}, Word::repeated(bit, 1)); }

  static SequenceSource explicit_prefix(Word word, bool fill) {
    return SequenceSource(ExplicitPrefix{std::move(word), fill});
  }

  /// Bits taken verbatim from `data`; reading past the end is an
  /// insufficient-data error.
  static SequenceSource from_word(Word data, std::string label = "inline") {
    return SequenceSource(FileBacked{std::make_shared<const Word>(std::move(data)), std::move(label)});
  }

  /// Reads a sequence file. If every byte is '0', '1' or ASCII whitespace the
  /// file is read as text (whitespace ignored); otherwise it is binary and
  /// each byte contributes 8 bits, most significant bit first.
  static SequenceSource from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open sequence file '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_word(decode_sequence_bytes(bytes), path);
  }

  static Word decode_sequence_bytes(std::string_view bytes) {
    auto is_text = std::all_of(bytes.begin(), bytes.end(), [](char c) {
      return c == '0' || c == '1' || c == ' ' || c == '\n' || c == '\r' || c == '\t';
    });
    Word w;
    if (is_text) {
      for (char c : bytes) {
        if (c == '0' || c == '1') w.push_back(c == '1');
      }
    } else {
      for (char c : bytes) {
        auto byte = static_cast<unsigned char>(c);
        for (int b = 7; b >= 0; --b) w.push_back(((byte >> b) & 1U) != 0);
      }
    }
    return w;
  }

  static SequenceSource computed(std::function<bool(std::size_t)> access, std::string label) {
    return SequenceSource(Computed{std::move(access), std::move(label)});
  }

  bool bit(std::size_t i) const {
    return std::visit(
        [i](const auto& s) -> bool {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Seeded>) {
            return ((seeded_block(s.seed, i / 64) >> (i % 64)) & 1U) != 0;
          } else if constexpr (std::is_same_v<T, EventuallyPeriodic>) {
            if (i < s.head.size()) return s.head[i];
            return s.cycle[(i - s.head.size()) % s.cycle.size()];
          } else if constexpr (std::is_same_v<T, ExplicitPrefix>) {
            return i < s.word.size() ? s.word[i] : s.fill;
          } else if constexpr (std::is_same_v<T, FileBacked>) {
            if (i >= s.data->size()) {
              throw InsufficientData("sequence '" + s.path + "' has " + std::to_string(s.data->size()) +
                                     " bits; bit " + std::to_string(i) + " requested");
            }
            return (*s.data)[i];
          } else {
            return s.access(i);
          }
        },
        kind_);
  }

  /// Number of available bits, or nullopt for an infinite source.
  std::optional<std::size_t> length() const {
    if (const auto* f = std::get_if<FileBacked>(&kind_)) return f->data->size();
    return std::nullopt;
  }

  /// Throws InsufficientData unless at least m bits are available.
  void require(std::size_t m) const {
    if (auto len = length(); len && *len < m) {
      throw InsufficientData("sequence '" + describe() + "' has " + std::to_string(*len) + " bits; " +
                             std::to_string(m) + " needed");
    }
  }

  /// Bits [from, from + len).
  Word window(std::size_t from, std::size_t len) const {
    require(from + len);
    Word w;
    for (std::size_t i = 0; i < len; ++i) w.push_back(bit(from + i));
    return w;
  }

  std::string describe() const {
    return std::visit(
        [](const auto& s) -> std::string {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Seeded>) {
            return "seed:" + std::to_string(s.seed);
          } else if constexpr (std::is_same_v<T, EventuallyPeriodic>) {
            return "periodic:" + s.head.token() + ":" + s.cycle.token();
          } else if constexpr (std::is_same_v<T, ExplicitPrefix>) {
            return "prefix:" + s.word.token() + ":" + (s.fill ? "1" : "0");
          } else if constexpr (std::is_same_v<T, FileBacked>) {
            return "file:" + s.path;
          } else {
            return s.label;
          }
        },
        kind_);
  }

 private:
  using Kind = std::variant<Seeded, EventuallyPeriodic, ExplicitPrefix, FileBacked, Computed>;
  explicit SequenceSource(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// The first m bits of S.
inline Word prefix(const SequenceSource& source, std::size_t m) { return source.window(0, m); }

/// Parses a source specification: `seed:<n>`, `periodic:<head>:<cycle>`,
/// `prefix:<word>:<fill>`, `file:<path>`, or `bits:<word>` (finite).
inline SequenceSource parse_source(std::string_view spec) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw ParseError("source spec '" + std::string(spec) + "' lacks a kind");
  auto kind = spec.substr(0, colon);
  auto rest = spec.substr(colon + 1);
  auto split2 = [&](std::string_view s) {
    auto c = s.find(':');
    if (c == std::string_view::npos) throw ParseError("source spec '" + std::string(spec) + "' needs two fields");
    return std::pair{s.substr(0, c), s.substr(c + 1)};
  };
  if (kind == "seed") {
    try {
      std::size_t used = 0;
      auto value = std::stoull(std::string(rest), &used);
      if (used != rest.size()) throw ParseError("bad seed");
      return SequenceSource::seeded(value);
    } catch (const std::logic_error&) {
      throw ParseError("bad seed in source spec '" + std::string(spec) + "'");
    }
  }
  if (kind == "periodic") {
    auto [head, cycle] = split2(rest);
    return SequenceSource::eventually_periodic(Word(head), Word(cycle));
  }
  if (kind == "prefix") {
    auto [word, fill] = split2(rest);
    if (fill != "0" && fill != "1") throw ParseError("fill bit must be 0 or 1");
    return SequenceSource::explicit_prefix(Word(word), fill == "1");
  }
  if (kind == "file") return SequenceSource::from_file(std::string(rest));
  if (kind == "bits") return SequenceSource::from_word(Word(rest));
  throw ParseError("unknown source kind '" + std::string(kind) + "'");
}

}  // namespace recur

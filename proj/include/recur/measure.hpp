#pragma once
// Exact uniform-measure computations on open and clopen subsets of Cantor
// space, and staged co-enumerations of effectively closed sets.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "recur/bitseq.hpp"
#include "recur/dyadic.hpp"
#include "recur/error.hpp"

namespace recur {

/// Binary trie over a word set, answering prefix queries against windows of
/// longer words.
class WordTrie {
 public:
  WordTrie() : nodes_(1) {}

  template <class Range>
  explicit WordTrie(const Range& words) : nodes_(1) {
    for (const auto& w : words) insert(w);
  }

  void insert(const Word& w) {
    std::size_t node = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      auto b = static_cast<std::size_t>(w[i]);
      if (nodes_[node].child[b] == 0) {
        nodes_[node].child[b] = nodes_.size();
        nodes_.emplace_back();
      }
      node = nodes_[node].child[b];
    }
    nodes_[node].terminal = true;
  }

  bool empty() const noexcept { return nodes_.size() == 1 && !nodes_[0].terminal; }

  /// Some member is a prefix of w[from, from + len).
  bool has_prefix_of(const Word& w, std::size_t from, std::size_t len) const {
    std::size_t node = 0;
    if (nodes_[0].terminal) return true;
    for (std::size_t i = 0; i < len; ++i) {
      node = nodes_[node].child[static_cast<std::size_t>(w[from + i])];
      if (node == 0) return false;
      if (nodes_[node].terminal) return true;
    }
    return false;
  }

  bool has_prefix_of(const Word& w) const { return has_prefix_of(w, 0, w.size()); }

  /// Some member is comparable with w[from, from + len) (one is a prefix of
  /// the other) and has length at most max_len.
  bool has_comparable(const Word& w, std::size_t from, std::size_t len, std::size_t max_len) const {
    std::size_t node = 0;
    for (std::size_t i = 0; i < len; ++i) {
      if (nodes_[node].terminal) return true;
      if (i >= max_len) return false;
      node = nodes_[node].child[static_cast<std::size_t>(w[from + i])];
      if (node == 0) return false;
    }
    return has_member_within(node, max_len - std::min(max_len, len));
  }

 private:
  struct Node {
    std::array<std::size_t, 2> child{0, 0};
    bool terminal = false;
  };

  bool has_member_within(std::size_t node, std::size_t depth) const {
    if (nodes_[node].terminal) return true;
    if (depth == 0) return false;
    for (auto c : nodes_[node].child) {
      if (c != 0 && has_member_within(c, depth - 1)) return true;
    }
    return false;
  }

  std::vector<Node> nodes_;
};

/// A word set in which no member is a proper prefix of another. Members are
/// kept in shortlex order.
class PrefixFreeWordSet {
 public:
  PrefixFreeWordSet() = default;

  /// Validates; throws Inapplicable when `words` is not prefix-free.
  explicit PrefixFreeWordSet(std::vector<Word> words) : words_(std::move(words)) {
    std::sort(words_.begin(), words_.end());
    words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
    if (!is_prefix_free(words_)) throw Inapplicable("word set is not prefix-free");
  }

  const std::vector<Word>& words() const noexcept { return words_; }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  auto begin() const noexcept { return words_.begin(); }
  auto end() const noexcept { return words_.end(); }

  /// Sorts a copy lexicographically; a word that is a prefix of some member
  /// is then a prefix of its immediate successor.
  static bool is_prefix_free(std::span<const Word> words) {
    std::vector<Word> sorted(words.begin(), words.end());
    std::sort(sorted.begin(), sorted.end(), LexLess{});
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      if (sorted[i].is_prefix_of(sorted[i + 1])) return false;
    }
    return true;
  }

  friend bool operator==(const PrefixFreeWordSet&, const PrefixFreeWordSet&) = default;

 private:
  struct Trusted {};
  PrefixFreeWordSet(std::vector<Word> sorted, Trusted) : words_(std::move(sorted)) {}
  friend PrefixFreeWordSet prefix_reduce(std::span<const Word> words);

  std::vector<Word> words_;
};

/// Keeps exactly the prefix-minimal members of `words`.
inline PrefixFreeWordSet prefix_reduce(std::span<const Word> words) {
  std::vector<Word> sorted(words.begin(), words.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  WordTrie kept;
  std::vector<Word> out;
  for (auto& w : sorted) {
    if (kept.has_prefix_of(w)) continue;
    kept.insert(w);
    out.push_back(std::move(w));
  }
  return PrefixFreeWordSet(std::move(out), PrefixFreeWordSet::Trusted{});
}

/// Sum of 2^-|w| over an already prefix-free set.
inline Dyadic measure_prefix_free(std::span<const Word> words) {
  if (words.empty()) return Dyadic(0);
  std::size_t longest = 0;
  for (const auto& w : words) longest = std::max(longest, w.size());
  BigInt total = 0;
  for (const auto& w : words) total += BigInt(1) << static_cast<unsigned>(longest - w.size());
  return Dyadic(total, longest);
}

/// Uniform measure of the open set generated by `words`.
inline Dyadic measure_open(std::span<const Word> words) { return measure_prefix_free(prefix_reduce(words).words()); }

inline Dyadic measure_open(const PrefixFreeWordSet& set) { return measure_prefix_free(set.words()); }

/// A clopen set: all sequences whose first `granularity` bits form a member
/// of `words`.
class ClopenSet {
 public:
  ClopenSet(std::size_t granularity, std::vector<Word> words) : granularity_(granularity), words_(std::move(words)) {
    if (granularity_ == 0) throw ParseError("clopen granularity must be positive");
    if (granularity_ > 62) throw BudgetExceeded("clopen granularity above 62 bits is not supported");
    for (const auto& w : words_) {
      if (w.size() != granularity_) {
        throw ParseError("clopen member '" + w.token() + "' does not have length " + std::to_string(granularity_));
      }
    }
    std::sort(words_.begin(), words_.end());
    words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
  }

  /// The whole space at the given granularity.
  static ClopenSet full(std::size_t granularity) {
    std::vector<Word> all;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << granularity); ++x) all.push_back(Word::from_bits(x, granularity));
    return ClopenSet(granularity, std::move(all));
  }

  std::size_t granularity() const noexcept { return granularity_; }
  const std::vector<Word>& words() const noexcept { return words_; }
  bool empty() const noexcept { return words_.empty(); }

  /// Decided by the first `granularity` bits; w must be at least that long.
  bool contains(const Word& w) const {
    if (w.size() < granularity_) throw OutOfRange("word shorter than clopen granularity");
    auto head = w.size() == granularity_ ? w : w.prefix(granularity_);
    return std::binary_search(words_.begin(), words_.end(), head);
  }

  /// Exact measure |F| / 2^granularity.
  Dyadic measure() const { return Dyadic(BigInt(words_.size()), granularity_); }

  // Recurrence-target interface.
  std::size_t window() const noexcept { return granularity_; }
  bool admits(const Word& w) const { return contains(w); }

  friend bool operator==(const ClopenSet&, const ClopenSet&) = default;

 private:
  std::size_t granularity_;
  std::vector<Word> words_;
};

/// Same granularity; the words of that length not in P.
inline ClopenSet complement_clopen(const ClopenSet& p) {
  std::vector<Word> rest;
  auto n = p.granularity();
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    auto w = Word::from_bits(x, n);
    if (!std::binary_search(p.words().begin(), p.words().end(), w)) rest.push_back(std::move(w));
  }
  return ClopenSet(n, std::move(rest));
}

/// Stage-indexed enumeration of a word set B whose open set is the
/// complement of an effectively closed class P. Every word delivered at stage
/// t has length t; B_t is the union of stages 0..t.
class StagedCoEnumeration {
 public:
  using Generator = std::function<std::vector<Word>(std::size_t)>;
  using Modulus = std::function<Dyadic(std::size_t)>;

  /// Bound used when searching stages of an infinite-support enumeration.
  static constexpr std::size_t kDefaultSearchLimit = 4096;

  StagedCoEnumeration() : StagedCoEnumeration(std::map<std::size_t, std::vector<Word>>{}) {}

  /// Finite support; the tail modulus is computed exactly.
  explicit StagedCoEnumeration(std::map<std::size_t, std::vector<Word>> stages) {
    std::size_t last = 0;
    for (auto& [t, ws] : stages) {
      for (const auto& w : ws) {
        if (w.size() != t) {
          throw ParseError("word '" + w.token() + "' enumerated at stage " + std::to_string(t) + " must have length " +
                           std::to_string(t));
        }
      }
      std::sort(ws.begin(), ws.end());
      ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
      if (!ws.empty()) last = std::max(last, t);
    }
    std::erase_if(stages, [](const auto& kv) { return kv.second.empty(); });
    finite_ = std::move(stages);
    support_bound_ = last;
    std::vector<Word> all;
    for (const auto& [t, ws] : *finite_) all.insert(all.end(), ws.begin(), ws.end());
    total_measure_ = measure_open(all);
  }

  /// Each word enters at the stage equal to its length.
  static StagedCoEnumeration from_words(std::span<const Word> words) {
    std::map<std::size_t, std::vector<Word>> stages;
    for (const auto& w : words) stages[w.size()].push_back(w);
    return StagedCoEnumeration(std::move(stages));
  }

  /// General (possibly infinite) support. `modulus(t)` must bound
  /// λ(⟦B⟧ − ⟦B_t⟧) from above.
  StagedCoEnumeration(Generator newly, Modulus modulus, std::optional<std::size_t> support_bound = std::nullopt)
      : generator_(std::move(newly)), modulus_(std::move(modulus)), support_bound_(support_bound) {}

  std::vector<Word> newly(std::size_t t) const {
    if (finite_) {
      auto it = finite_->find(t);
      return it == finite_->end() ? std::vector<Word>{} : it->second;
    }
    auto ws = generator_(t);
    for (const auto& w : ws) {
      if (w.size() != t) throw ParseError("generator delivered a word of the wrong length at stage " + std::to_string(t));
    }
    return ws;
  }

  /// B_t.
  std::vector<Word> cumulative(std::size_t t) const {
    std::vector<Word> out;
    if (finite_) {
      for (const auto& [s, ws] : *finite_) {
        if (s > t) break;
        out.insert(out.end(), ws.begin(), ws.end());
      }
      return out;
    }
    for (std::size_t s = 0; s <= t; ++s) {
      auto ws = newly(s);
      out.insert(out.end(), ws.begin(), ws.end());
    }
    return out;
  }

  bool is_finite() const noexcept { return finite_.has_value(); }
  const std::map<std::size_t, std::vector<Word>>& stages() const { return *finite_; }
  std::optional<std::size_t> support_bound() const noexcept { return support_bound_; }

  /// λ⟦B_t⟧.
  Dyadic measure_at(std::size_t t) const { return measure_open(cumulative(t)); }

  /// Upper bound on λ(⟦B⟧ − ⟦B_t⟧); exact for finite support.
  Dyadic tail_modulus(std::size_t t) const {
    if (finite_) return total_measure_ - measure_at(t);
    if (support_bound_ && t >= *support_bound_) return Dyadic(0);
    return modulus_(t);
  }

  /// λ⟦B⟧ when known exactly (finite support).
  std::optional<Dyadic> total_measure() const {
    if (finite_) return total_measure_;
    return std::nullopt;
  }

  /// Last stage worth scanning when searching for a certified tail.
  std::size_t search_limit() const noexcept { return support_bound_ ? *support_bound_ : kDefaultSearchLimit; }

  /// Restriction to stages ≤ t, as a finite enumeration.
  StagedCoEnumeration truncated(std::size_t t) const {
    std::map<std::size_t, std::vector<Word>> stages;
    for (std::size_t s = 0; s <= t; ++s) {
      if (finite_ && s > *support_bound_) break;
      auto ws = newly(s);
      if (!ws.empty()) stages[s] = std::move(ws);
    }
    return StagedCoEnumeration(std::move(stages));
  }

 private:
  std::optional<std::map<std::size_t, std::vector<Word>>> finite_;
  Generator generator_;
  Modulus modulus_;
  std::optional<std::size_t> support_bound_;
  Dyadic total_measure_;
};

/// P-membership at a finite stage budget: no prefix of `w` lies in B_budget.
/// This over-approximates true membership, and can only shrink as the budget
/// grows.
class ClosedTarget {
 public:
  ClosedTarget(const StagedCoEnumeration& b, std::size_t stage_budget)
      : stage_budget_(stage_budget), trie_(b.cumulative(stage_budget)) {}

  std::size_t stage_budget() const noexcept { return stage_budget_; }
  std::size_t window() const noexcept { return stage_budget_; }
  bool admits(const Word& w) const { return !trie_.has_prefix_of(w, 0, std::min(w.size(), stage_budget_)); }

 private:
  std::size_t stage_budget_;
  WordTrie trie_;
};

struct TailSplit {
  std::vector<Word> head;        // D = B_{stage}
  std::size_t max_length = 0;    // N
  std::size_t stage = 0;         // s*
  Dyadic residual_bound;         // tail_modulus(s*)
  StagedCoEnumeration residual;  // B̃: later words with no prefix in D
};

/// Least stage s* whose certified residual is below `threshold`; the head is
/// B_{s*} and the residual keeps later words not already covered by the head,
/// so ⟦B⟧ = ⟦D⟧ ∪ ⟦B̃⟧ with the two disjoint.
template <class Below>
TailSplit split_tail_when(const StagedCoEnumeration& b, Below&& below, const std::string& what) {
  for (std::size_t s = 0; s <= b.search_limit(); ++s) {
    auto tail = b.tail_modulus(s);
    if (!below(tail)) continue;
    TailSplit split;
    split.stage = s;
    split.residual_bound = tail;
    split.head = b.cumulative(s);
    std::sort(split.head.begin(), split.head.end());
    for (const auto& w : split.head) split.max_length = std::max(split.max_length, w.size());
    WordTrie head_trie(split.head);
    auto head_copy = std::make_shared<const WordTrie>(head_trie);
    if (b.is_finite()) {
      std::map<std::size_t, std::vector<Word>> rest;
      for (const auto& [t, ws] : b.stages()) {
        if (t <= s) continue;
        for (const auto& w : ws) {
          if (!head_trie.has_prefix_of(w)) rest[t].push_back(w);
        }
      }
      split.residual = StagedCoEnumeration(std::move(rest));
    } else {
      auto source = std::make_shared<const StagedCoEnumeration>(b);
      split.residual = StagedCoEnumeration(
          [source, head_copy, s](std::size_t t) {
            std::vector<Word> out;
            if (t <= s) return out;
            for (auto& w : source->newly(t)) {
              if (!head_copy->has_prefix_of(w)) out.push_back(std::move(w));
            }
            return out;
          },
          [source, s](std::size_t t) { return source->tail_modulus(std::max(t, s)); }, b.support_bound());
    }
    return split;
  }
  throw NoCertificate("tail modulus never drops below " + what + " within " + std::to_string(b.search_limit()) + " stages");
}

inline TailSplit split_tail(const StagedCoEnumeration& b, const Dyadic& threshold) {
  if (threshold <= Dyadic(0)) throw Inapplicable("split threshold must be positive");
  return split_tail_when(b, [&](const Dyadic& tail) { return tail < threshold; }, threshold.to_string());
}

/// Split at threshold 1/k, which is not dyadic in general: k λ(residual) < 1.
inline TailSplit split_tail_inverse(const StagedCoEnumeration& b, std::size_t k) {
  if (k == 0) throw OutOfRange("k must be at least 1");
  const Dyadic kk(static_cast<long long>(k));
  return split_tail_when(b, [&](const Dyadic& tail) { return kk * tail < Dyadic(1); }, "1/" + std::to_string(k));
}

enum class Verdict { inside, outside, undecided };

/// Builds a prefix-free word set for an open set by depth-first refinement.
/// `classify(w)` says whether the cylinder ⟦w⟧ lies inside the set, misses
/// it, or is not yet decided; it must decide every word of length
/// `max_length`. Throws BudgetExceeded after `node_budget` visited nodes.
template <class Classify>
std::vector<Word> carve_open_set(std::size_t max_length, Classify&& classify, std::size_t node_budget = std::size_t{1} << 24) {
  std::vector<Word> out;
  std::vector<Word> stack{Word{}};
  std::size_t visited = 0;
  while (!stack.empty()) {
    Word w = std::move(stack.back());
    stack.pop_back();
    if (++visited > node_budget) throw BudgetExceeded("open-set refinement exceeded its node budget");
    switch (classify(w)) {
      case Verdict::inside:
        out.push_back(std::move(w));
        break;
      case Verdict::outside:
        break;
      case Verdict::undecided:
        if (w.size() >= max_length) throw std::logic_error("classifier left a maximal-length word undecided");
        stack.push_back(concat(w, Word("1")));
        stack.push_back(concat(w, Word("0")));
        break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Text formats -------------------------------------------------------------

/// `granularity <n>` followed by one word per line.
inline void write_clopen(std::ostream& out, const ClopenSet& p) {
  out << "granularity " << p.granularity() << '\n';
  for (const auto& w : p.words()) out << w.token() << '\n';
}

inline ClopenSet read_clopen(std::istream& in) {
  std::string keyword;
  std::size_t n = 0;
  if (!(in >> keyword >> n) || keyword != "granularity") throw ParseError("clopen file must start with 'granularity <n>'");
  std::vector<Word> words;
  std::string token;
  while (in >> token) words.emplace_back(token);
  return ClopenSet(n, std::move(words));
}

/// One line per nonempty stage: `stage <t>: <word> <word> ...`.
inline void write_coenumeration(std::ostream& out, const StagedCoEnumeration& b) {
  if (!b.is_finite()) throw Inapplicable("only finite-support enumerations serialize");
  for (const auto& [t, ws] : b.stages()) {
    out << "stage " << t << ":";
    for (const auto& w : ws) out << ' ' << w.token();
    out << '\n';
  }
}

inline StagedCoEnumeration read_coenumeration(std::istream& in) {
  std::map<std::size_t, std::vector<Word>> stages;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string keyword;
    std::string stage_token;
    ls >> keyword >> stage_token;
    if (keyword != "stage" || stage_token.empty() || stage_token.back() != ':') {
      throw ParseError("expected 'stage <t>:' in line '" + line + "'");
    }
    stage_token.pop_back();
    std::size_t t = 0;
    try {
      t = std::stoul(stage_token);
    } catch (const std::exception&) {
      throw ParseError("bad stage number in line '" + line + "'");
    }
    std::string token;
    auto& ws = stages[t];
    while (ls >> token) ws.emplace_back(token);
  }
  return StagedCoEnumeration(std::move(stages));
}

}  // namespace recur

#pragma once
// Finite patterns (1-D words or k-D cubes) and the operations the test
// constructions need from them: restriction, extension, shifting and
// cylinder measure.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <map>
#include <span>
#include <unordered_set>
#include <vector>

#include "recur/bitseq.hpp"
#include "recur/dyadic.hpp"

namespace recur {

template <class G>
concept PatternGeometry = requires(const G& g, const typename G::Pattern& p, std::size_t n) {
  { g.size_of(p) } -> std::convertible_to<std::size_t>;
  { g.cells(n) } -> std::convertible_to<std::size_t>;
  { g.root() } -> std::same_as<typename G::Pattern>;
  { g.restrict(p, n) } -> std::same_as<typename G::Pattern>;
  { g.is_prefix(p, p) } -> std::same_as<bool>;
  { g.extensions(p) } -> std::same_as<std::vector<typename G::Pattern>>;
  // The pattern seen after applying shift number i (1-based) by amount n,
  // and how much shorter it is than the original.
  { g.shifted(p, n, n) } -> std::same_as<typename G::Pattern>;
  { g.shift_loss(n, n) } -> std::convertible_to<std::size_t>;
  // Number of shift operators and the least admissible child stage for a
  // parent of size s.
  { g.arity() } -> std::convertible_to<std::size_t>;
  { g.child_floor(n) } -> std::convertible_to<std::size_t>;
  { g.key(p) } -> std::same_as<Word>;
};

/// Cantor space under the powers T, T^2, ..., T^k of the shift: shift number
/// i by amount n drops the first n*i bits.
struct LineGeometry {
  using Pattern = Word;
  std::size_t k = 1;

  std::size_t size_of(const Word& w) const noexcept { return w.size(); }
  std::size_t cells(std::size_t n) const noexcept { return n; }
  Word root() const { return Word{}; }
  Word restrict(const Word& w, std::size_t n) const { return w.prefix(n); }
  bool is_prefix(const Word& a, const Word& b) const noexcept { return a.is_prefix_of(b); }
  std::vector<Word> extensions(const Word& w) const { return {concat(w, Word("0")), concat(w, Word("1"))}; }
  Word shifted(const Word& w, std::size_t i, std::size_t n) const { return shift(w, n * i); }
  std::size_t shift_loss(std::size_t i, std::size_t n) const noexcept { return n * i; }
  std::size_t arity() const noexcept { return k; }
  std::size_t child_floor(std::size_t s) const noexcept { return (k + 1) * s + 1; }
  Word key(const Word& w) const { return w; }
};

/// Prefix-minimal members, in ascending size.
template <PatternGeometry G>
std::vector<typename G::Pattern> prefix_minimal(const G& g, std::span<const typename G::Pattern> patterns) {
  std::map<std::size_t, std::vector<const typename G::Pattern*>> by_size;
  for (const auto& p : patterns) by_size[g.size_of(p)].push_back(&p);
  std::map<std::size_t, std::unordered_set<Word, WordHash>> kept_keys;
  std::vector<typename G::Pattern> out;
  for (const auto& [size, group] : by_size) {
    for (const auto* p : group) {
      bool covered = false;
      for (const auto& [m, keys] : kept_keys) {
        if (m > size) break;
        if (keys.contains(g.key(g.restrict(*p, m)))) {
          covered = true;
          break;
        }
      }
      if (covered) continue;
      kept_keys[size].insert(g.key(*p));
      out.push_back(*p);
    }
  }
  return out;
}

/// Pairwise-free check by restriction lookups: no member is a proper prefix
/// of another and there are no duplicates.
template <PatternGeometry G>
bool is_prefix_free(const G& g, std::span<const typename G::Pattern> patterns) {
  std::map<std::size_t, std::unordered_set<Word, WordHash>> keys;
  for (const auto& p : patterns) {
    if (!keys[g.size_of(p)].insert(g.key(p)).second) return false;
  }
  for (const auto& p : patterns) {
    auto size = g.size_of(p);
    for (const auto& [m, ks] : keys) {
      if (m >= size) break;
      if (ks.contains(g.key(g.restrict(p, m)))) return false;
    }
  }
  return true;
}

/// Σ 2^-cells(size) over a prefix-free family.
template <PatternGeometry G>
Dyadic measure_of_prefix_free(const G& g, std::span<const typename G::Pattern> patterns) {
  if (patterns.empty()) return Dyadic(0);
  std::size_t deepest = 0;
  for (const auto& p : patterns) deepest = std::max(deepest, g.cells(g.size_of(p)));
  BigInt total = 0;
  for (const auto& p : patterns) total += BigInt(1) << static_cast<unsigned>(deepest - g.cells(g.size_of(p)));
  return Dyadic(total, deepest);
}

/// Measure of the open set generated by an arbitrary family.
template <PatternGeometry G>
Dyadic pattern_measure(const G& g, std::span<const typename G::Pattern> patterns) {
  auto minimal = prefix_minimal(g, patterns);
  return measure_of_prefix_free<G>(g, minimal);
}

/// Some member of `set` is a prefix of p.
template <PatternGeometry G>
bool has_prefix_in(const G& g, const typename G::Pattern& p, std::span<const typename G::Pattern> set) {
  auto size = g.size_of(p);
  return std::any_of(set.begin(), set.end(), [&](const auto& q) { return g.size_of(q) <= size && g.is_prefix(q, p); });
}

}  // namespace recur

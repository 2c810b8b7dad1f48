#pragma once
// Martin-Löf test construction for an effectively closed target P whose
// complement is generated by a prefix-free, stage-normalised set B.
//
// C^0 = {root}. A member σ of C^{r-1} of size s spawns, at stages
// t >= child_floor(s), the minimal extensions η of σ such that some shifted
// copy of η (shift number i, amount max(s, 1)) begins with a member of B.
// These are exactly the places where a sequence extending σ fails
// k-recurrence at n = s, so a non-recurrent sequence lies in every ⟦C^r⟧.
// Everything here is generic over the pattern geometry (words or cubes).

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "recur/certificate.hpp"
#include "recur/geometry.hpp"
#include "recur/measure.hpp"

namespace recur {

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

/// Node budget for one enumeration.
inline constexpr std::size_t kMlNodeBudget = std::size_t{1} << 24;

template <class Pattern>
struct MlEntry {
  Pattern pattern;     // entered at stage = its size
  std::size_t parent;  // index into the previous level, kNoParent for the root
};

template <PatternGeometry G>
struct MlLevels {
  using Pattern = typename G::Pattern;
  G geometry;
  std::size_t stage_max = 0;
  std::vector<Pattern> b;  // prefix-minimal members of B with size <= stage_max
  std::vector<std::vector<MlEntry<Pattern>>> levels;

  Dyadic b_measure() const { return measure_of_prefix_free<G>(geometry, b); }
  /// q = k λ⟦B⟧, with k the number of shift operators.
  Dyadic q() const { return Dyadic(static_cast<long long>(geometry.arity())) * b_measure(); }

  std::vector<Pattern> patterns(std::size_t r) const {
    std::vector<Pattern> out;
    if (r < levels.size()) {
      for (const auto& e : levels[r]) out.push_back(e.pattern);
    }
    return out;
  }
};

namespace detail {

inline std::size_t shift_unit(std::size_t s) { return s == 0 ? 1 : s; }

// Some shifted copy of p (amount n) begins with a member of `set`.
template <PatternGeometry G>
bool shifted_hits(const G& g, const typename G::Pattern& p, std::size_t n, std::span<const typename G::Pattern> set) {
  const std::size_t size = g.size_of(p);
  for (std::size_t i = 1; i <= g.arity(); ++i) {
    if (g.shift_loss(i, n) > size) continue;
    if (has_prefix_in(g, g.shifted(p, i, n), set)) return true;
  }
  return false;
}

// Some extension of p of size <= stage_max could still satisfy shifted_hits.
template <PatternGeometry G>
bool can_still_hit(const G& g, const typename G::Pattern& p, std::size_t n, std::span<const typename G::Pattern> set,
                   std::size_t stage_max) {
  const std::size_t size = g.size_of(p);
  for (std::size_t i = 1; i <= g.arity(); ++i) {
    const std::size_t loss = g.shift_loss(i, n);
    if (loss > stage_max) continue;
    if (loss >= size) {
      for (const auto& b : set) {
        if (g.size_of(b) + loss <= stage_max) return true;
      }
      continue;
    }
    const auto tail = g.shifted(p, i, n);
    const std::size_t tail_size = g.size_of(tail);
    for (const auto& b : set) {
      const std::size_t bs = g.size_of(b);
      if (bs + loss > stage_max) continue;
      if (bs <= tail_size ? g.is_prefix(b, tail) : g.is_prefix(tail, b)) return true;
    }
  }
  return false;
}

// Minimal extensions of σ (size s) at stages in [child_floor(s), stage_max]
// whose shifted copies hit `set`.
template <PatternGeometry G>
std::vector<typename G::Pattern> children(const G& g, const typename G::Pattern& sigma, std::span<const typename G::Pattern> set,
                                          std::size_t stage_max, std::size_t& budget) {
  using Pattern = typename G::Pattern;
  const std::size_t s = g.size_of(sigma);
  const std::size_t n = shift_unit(s);
  const std::size_t floor = g.child_floor(s);
  std::vector<Pattern> out;
  if (floor > stage_max) return out;
  std::vector<Pattern> stack{sigma};
  while (!stack.empty()) {
    Pattern eta = std::move(stack.back());
    stack.pop_back();
    if (budget == 0) throw BudgetExceeded("Martin-Löf enumeration exceeded its node budget");
    --budget;
    const std::size_t size = g.size_of(eta);
    if (size >= floor && shifted_hits(g, eta, n, set)) {
      out.push_back(std::move(eta));
      continue;
    }
    if (size >= stage_max || !can_still_hit(g, eta, n, set, stage_max)) continue;
    for (auto& ext : g.extensions(eta)) stack.push_back(std::move(ext));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Enumerates C^0..C^{r_max} truncated at stage_max. `b_patterns` are the
/// members of B (each entered at the stage equal to its size).
template <PatternGeometry G>
MlLevels<G> ml_enumerate_levels(const G& g, std::span<const typename G::Pattern> b_patterns, std::size_t r_max,
                                std::size_t stage_max) {
  MlLevels<G> out;
  out.geometry = g;
  out.stage_max = stage_max;
  std::vector<typename G::Pattern> bounded;
  for (const auto& p : b_patterns) {
    if (g.size_of(p) <= stage_max) bounded.push_back(p);
  }
  out.b = prefix_minimal(g, std::span<const typename G::Pattern>(bounded));
  out.levels.push_back({{g.root(), kNoParent}});
  std::size_t budget = kMlNodeBudget;
  for (std::size_t r = 1; r <= r_max; ++r) {
    std::vector<MlEntry<typename G::Pattern>> level;
    const auto& prev = out.levels.back();
    for (std::size_t idx = 0; idx < prev.size(); ++idx) {
      for (auto& c : detail::children(g, prev[idx].pattern, std::span<const typename G::Pattern>(out.b), stage_max, budget)) {
        level.push_back({std::move(c), idx});
      }
    }
    out.levels.push_back(std::move(level));
  }
  return out;
}

namespace detail {
template <PatternGeometry G>
TestCertificate make_certificate(const G& g, CertificateKind kind, std::span<const typename G::Pattern> patterns) {
  TestCertificate cert;
  cert.kind = kind;
  if constexpr (requires { g.dim; }) cert.dimension = g.dim;
  for (const auto& p : patterns) cert.words.push_back(g.key(p));
  cert.exact_measure = measure_of_prefix_free<G>(g, patterns);
  return cert;
}
}  // namespace detail

/// Certificate for level r, with required bound q^r (1 when q >= 1).
template <PatternGeometry G>
TestCertificate ml_certificate(const MlLevels<G>& levels, std::size_t r) {
  auto pats = levels.patterns(r);
  auto cert = detail::make_certificate(levels.geometry, CertificateKind::ml_c, std::span<const typename G::Pattern>(pats));
  const Dyadic q = levels.q();
  cert.required_bound = q < Dyadic(1) ? q.pow(r) : Dyadic(1);
  cert.stage_budget = levels.stage_max;
  cert.parameters = Json{{"k", levels.geometry.arity()}, {"r", r}, {"q", q.to_string()}, {"b_measure", levels.b_measure().to_string()}};
  return cert;
}

/// λ⟦C^r⟧ <= q^r. Only meaningful for q < 1.
inline bool ml_measure_bound(const TestCertificate& cert, const Dyadic& q, std::size_t r) {
  if (q >= Dyadic(1)) throw Inapplicable("q = " + q.to_string() + " >= 1; use the split construction");
  return cert.exact_measure <= q.pow(r);
}

// --- Split construction (λ⟦B⟧ >= 1/k) ------------------------------------

/// Number of ancestors of size s > N whose shifted blocks (amount s) begin
/// with a member of D, for every entry of every level.
template <PatternGeometry G>
std::vector<std::vector<std::size_t>> ml_hit_counts(const MlLevels<G>& levels, std::span<const typename G::Pattern> d,
                                                    std::size_t n_bound) {
  const auto& g = levels.geometry;
  std::vector<std::vector<std::size_t>> counts(levels.levels.size());
  counts[0].assign(levels.levels[0].size(), 0);
  for (std::size_t r = 1; r < levels.levels.size(); ++r) {
    for (const auto& e : levels.levels[r]) {
      const auto& parent = levels.levels[r - 1][e.parent];
      const std::size_t s = g.size_of(parent.pattern);
      std::size_t c = counts[r - 1][e.parent];
      if (s > n_bound && s >= 1 && detail::shifted_hits(g, e.pattern, s, d)) ++c;
      counts[r].push_back(c);
    }
  }
  return counts;
}

/// G_m: prefix-minimal members of C = ∪ C^r with at least m D-hits along
/// their ancestry. Counts only grow along the tree, so the minimal ones are
/// those whose parent has fewer than m.
template <PatternGeometry G>
std::vector<typename G::Pattern> ml_g_patterns(const MlLevels<G>& levels, const std::vector<std::vector<std::size_t>>& counts,
                                               std::size_t m) {
  std::vector<typename G::Pattern> out;
  for (std::size_t r = 0; r < levels.levels.size(); ++r) {
    for (std::size_t idx = 0; idx < levels.levels[r].size(); ++idx) {
      if (counts[r][idx] < m) continue;
      const auto& e = levels.levels[r][idx];
      if (r > 0 && counts[r - 1][e.parent] >= m) continue;
      out.push_back(e.pattern);
    }
  }
  return out;
}

/// Certificate for G_m. For m >= 1 the required bound is the decay estimate
/// (1 - v^k) λ⟦G_{m-1}⟧ with v = 1 - λ⟦D⟧; G_0 is the root.
template <PatternGeometry G>
TestCertificate ml_enumerate_G(const MlLevels<G>& levels, std::span<const typename G::Pattern> d, std::size_t n_bound, std::size_t m) {
  const auto& g = levels.geometry;
  auto counts = ml_hit_counts(levels, d, n_bound);
  auto pats = ml_g_patterns(levels, counts, m);
  auto cert = detail::make_certificate(g, CertificateKind::ml_g, std::span<const typename G::Pattern>(pats));
  const Dyadic v = Dyadic(1) - pattern_measure<G>(g, d);
  const Dyadic decay = Dyadic(1) - v.pow(g.arity());
  if (m == 0) {
    cert.required_bound = Dyadic(1);
  } else {
    auto prev = ml_g_patterns(levels, counts, m - 1);
    cert.required_bound = decay * measure_of_prefix_free<G>(g, prev);
  }
  cert.stage_budget = levels.stage_max;
  cert.parameters = Json{{"k", g.arity()}, {"m", m}, {"N", n_bound}, {"v", v.to_string()}, {"decay", decay.to_string()}};
  return cert;
}

/// Refined levels C̃^u for u = base..u_max: C̃^base = C^base, and each later
/// member must extend a refined parent with a shifted copy that begins with a
/// member of the residual set B̃. Required bound λ⟦C^base⟧ q̃^{u-base}, which
/// is q̃^u when base = 0.
template <PatternGeometry G>
std::vector<TestCertificate> ml_enumerate_refined(const MlLevels<G>& levels, std::span<const typename G::Pattern> residual,
                                                  std::size_t base, std::size_t u_max) {
  using Pattern = typename G::Pattern;
  const auto& g = levels.geometry;
  std::vector<Pattern> bounded;
  for (const auto& p : residual) {
    if (g.size_of(p) <= levels.stage_max) bounded.push_back(p);
  }
  auto residual_min = prefix_minimal(g, std::span<const Pattern>(bounded));
  const Dyadic q_tilde = Dyadic(static_cast<long long>(g.arity())) * measure_of_prefix_free<G>(g, residual_min);

  std::vector<TestCertificate> out;
  if (base >= levels.levels.size()) return out;
  std::vector<bool> keep(levels.levels[base].size(), true);
  const Dyadic base_measure = measure_of_prefix_free<G>(g, levels.patterns(base));
  for (std::size_t u = base; u <= u_max && u < levels.levels.size(); ++u) {
    if (u > base) {
      std::vector<bool> next;
      for (const auto& e : levels.levels[u]) {
        const auto& parent = levels.levels[u - 1][e.parent];
        next.push_back(keep[e.parent] && detail::shifted_hits(g, e.pattern, detail::shift_unit(g.size_of(parent.pattern)),
                                                              std::span<const Pattern>(residual_min)));
      }
      keep = std::move(next);
    }
    std::vector<Pattern> pats;
    for (std::size_t idx = 0; idx < keep.size(); ++idx) {
      if (keep[idx]) pats.push_back(levels.levels[u][idx].pattern);
    }
    auto cert = detail::make_certificate(g, CertificateKind::ml_refined, std::span<const Pattern>(pats));
    cert.required_bound = base_measure * q_tilde.pow(u - base);
    cert.stage_budget = levels.stage_max;
    cert.parameters = Json{{"k", g.arity()}, {"base", base}, {"u", u}, {"q_tilde", q_tilde.to_string()}};
    out.push_back(std::move(cert));
  }
  return out;
}

struct MlTestLevel {
  std::size_t j;  // test level, bound 2^-j
  std::size_t u;  // source level
  TestCertificate cert;

  bool passes() const { return cert.passes(); }
};

/// Level j of the final test uses u_j = least u with q^u <= 2^-j, taken from
/// `certs` (certs[idx] is level first_u + idx). Levels whose u_j is not
/// available are omitted.
inline std::vector<MlTestLevel> ml_test_refinement(std::span<const TestCertificate> certs, std::size_t first_u, const Dyadic& q,
                                                   std::size_t j_max) {
  if (q >= Dyadic(1)) throw Inapplicable("refinement needs q < 1");
  std::vector<MlTestLevel> out;
  for (std::size_t j = 0; j <= j_max; ++j) {
    const Dyadic target = Dyadic::half_pow(j);
    std::optional<std::size_t> uj;
    for (std::size_t u = 0; u <= 4096; ++u) {
      if (q.pow(u) <= target) {
        uj = u;
        break;
      }
    }
    if (!uj || *uj < first_u || *uj - first_u >= certs.size()) continue;
    TestCertificate c = certs[*uj - first_u];
    c.required_bound = target;
    c.parameters["j"] = j;
    out.push_back({j, *uj, std::move(c)});
  }
  return out;
}

/// Least m with Z's prefix outside ⟦G_m⟧ (within the truncation), and the
/// member of G_{m*-1} below Z with its level. nullopt if Z never escapes the
/// computed G sets.
template <PatternGeometry G>
struct MlEscape {
  std::size_t m_star = 0;
  typename G::Pattern rho;
  std::size_t level = 0;
};

template <PatternGeometry G>
std::optional<MlEscape<G>> ml_escape(const MlLevels<G>& levels, std::span<const typename G::Pattern> d, std::size_t n_bound,
                                     const typename G::Pattern& z_prefix) {
  const auto& g = levels.geometry;
  auto counts = ml_hit_counts(levels, d, n_bound);
  std::size_t max_count = 0;
  for (const auto& lv : counts) {
    for (auto c : lv) max_count = std::max(max_count, c);
  }
  for (std::size_t m = 1; m <= max_count + 1; ++m) {
    auto gm = ml_g_patterns(levels, counts, m);
    if (has_prefix_in(g, z_prefix, std::span<const typename G::Pattern>(gm))) continue;
    // Z escapes G_m; find its node in G_{m-1}.
    for (std::size_t r = 0; r < levels.levels.size(); ++r) {
      for (std::size_t idx = 0; idx < levels.levels[r].size(); ++idx) {
        const auto& e = levels.levels[r][idx];
        if (counts[r][idx] < m - 1) continue;
        if (r > 0 && counts[r - 1][e.parent] >= m - 1) continue;
        if (g.size_of(e.pattern) <= g.size_of(z_prefix) && g.is_prefix(e.pattern, z_prefix)) {
          return MlEscape<G>{m, e.pattern, r};
        }
      }
    }
    return std::nullopt;
  }
  return std::nullopt;
}

// --- One-dimensional driver ------------------------------------------------

struct MlTestReport {
  bool split = false;
  Dyadic q;  // k λ⟦B⟧ on the direct path, k λ⟦B̃⟧ on the split path
  MlLevels<LineGeometry> levels;
  std::vector<TestCertificate> c_sets;  // C^0..C^r_max
  std::vector<Word> d;                  // split path only
  std::size_t n_bound = 0;
  std::vector<Word> residual;
  std::vector<TestCertificate> g_sets;   // G_0, G_1, ... up to the first empty one
  std::vector<TestCertificate> refined;  // C̃^0..C̃^r_max
  std::vector<MlTestLevel> test;

  bool passes() const {
    auto ok = [](const auto& cs) { return std::all_of(cs.begin(), cs.end(), [](const auto& c) { return c.passes(); }); };
    return ok(c_sets) && ok(g_sets) && ok(refined) && ok(test);
  }
};

/// Builds the test for B truncated at stage_max. When k λ⟦B⟧ < 1 the levels
/// C^r are the test; otherwise B is split at 1/k into a finite head D and a
/// residual B̃, and the test comes from the refined levels.
inline MlTestReport ml_test(const StagedCoEnumeration& b, std::size_t k, std::size_t r_max, std::size_t stage_max,
                            std::size_t j_max) {
  if (k == 0) throw OutOfRange("k must be at least 1");
  const LineGeometry g{k};
  const auto truncated = b.truncated(stage_max);
  const auto b_words = truncated.cumulative(stage_max);
  MlTestReport out;
  out.levels = ml_enumerate_levels(g, std::span<const Word>(b_words), r_max, stage_max);
  for (std::size_t r = 0; r <= r_max; ++r) out.c_sets.push_back(ml_certificate(out.levels, r));
  const Dyadic q = out.levels.q();
  if (q < Dyadic(1)) {
    out.q = q;
    out.test = ml_test_refinement(out.c_sets, 0, q, j_max);
    return out;
  }
  out.split = true;
  auto split = split_tail_inverse(truncated, k);
  out.d = split.head;
  out.n_bound = split.max_length;
  out.residual = split.residual.cumulative(stage_max);
  for (std::size_t m = 0;; ++m) {
    out.g_sets.push_back(ml_enumerate_G(out.levels, std::span<const Word>(out.d), out.n_bound, m));
    if (out.g_sets.back().words.empty() || m > r_max) break;
  }
  out.refined = ml_enumerate_refined(out.levels, std::span<const Word>(out.residual), 0, r_max);
  out.q = Dyadic(static_cast<long long>(k)) * measure_open(out.residual);
  out.test = ml_test_refinement(out.refined, 0, out.q, j_max);
  return out;
}

}  // namespace recur

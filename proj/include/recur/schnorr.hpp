#pragma once
// Schnorr test for an effectively closed target P = complement of ⟦B⟧ with
// computable measure. Level v uses a schedule n_0 = 1, n_t >= (k+1) n_{t-1}
// with certified tails λ(⟦B⟧ − ⟦B_{n_t}⟧) <= 2^{-t-v-k}; the error class at
// stage t collects sequences with some tail Y_{i n_t} in the late part.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "recur/certificate.hpp"
#include "recur/measure.hpp"

namespace recur {

struct SchnorrSchedule {
  std::size_t k = 1;
  std::size_t v = 0;
  std::vector<std::size_t> times;  // times[0] = 1

  std::size_t time(std::size_t t) const {
    if (t >= times.size()) throw OutOfRange("schedule has no stage " + std::to_string(t));
    return times[t];
  }
  std::size_t stages() const noexcept { return times.size(); }

  /// Tail bound 2^{-t-v-k} required at stage t >= 1.
  Dyadic tail_bound(std::size_t t) const { return Dyadic::half_pow(t + v + k); }
};

/// Least schedule meeting both the growth and the tail constraints for
/// stages 1..t_max.
inline SchnorrSchedule schnorr_schedule(const StagedCoEnumeration& b, std::size_t k, std::size_t v, std::size_t t_max) {
  if (k == 0) throw OutOfRange("k must be at least 1");
  SchnorrSchedule s{k, v, {1}};
  for (std::size_t t = 1; t <= t_max; ++t) {
    const std::size_t floor = (k + 1) * s.times.back();
    const Dyadic bound = s.tail_bound(t);
    std::size_t n = floor;
    // Past the support bound the tail is zero, so the growth floor wins.
    const std::size_t limit = std::max(floor, b.search_limit());
    while (n <= limit && b.tail_modulus(n) > bound) ++n;
    if (n > limit) {
      throw NoCertificate("no stage up to " + std::to_string(limit) + " certifies tail " + bound.to_string() +
                          " for t = " + std::to_string(t));
    }
    s.times.push_back(n);
  }
  return s;
}

/// Error class G_v^t = {Y : some Y_{i n_t} ∈ ⟦B⟧ − ⟦B_{n_t}⟧} as a
/// prefix-free word set, with required bound k 2^{-t-v-k}. Needs finite
/// support.
inline TestCertificate schnorr_error_set(const StagedCoEnumeration& b, const SchnorrSchedule& sched, std::size_t t) {
  if (t == 0) throw OutOfRange("error classes start at stage 1");
  if (!b.is_finite()) throw Inapplicable("exact error classes need a finite-support enumeration");
  const std::size_t n = sched.time(t);
  const std::size_t k = sched.k;

  // Late words: enumerated after stage n and not already covered by B_n.
  WordTrie early(b.cumulative(n));
  std::vector<Word> late;
  for (const auto& [stage, ws] : b.stages()) {
    if (stage <= n) continue;
    for (const auto& w : ws) {
      if (!early.has_prefix_of(w)) late.push_back(w);
    }
  }
  auto late_set = prefix_reduce(late);
  WordTrie late_trie(late_set.words());
  std::size_t longest = 0;
  for (const auto& w : late_set) longest = std::max(longest, w.size());

  TestCertificate cert;
  cert.kind = CertificateKind::schnorr_error;
  cert.stage_budget = b.support_bound().value_or(0);
  cert.parameters = Json{{"k", k}, {"v", sched.v}, {"t", t}, {"n_t", n}};
  cert.required_bound = Dyadic(static_cast<long long>(k)) * sched.tail_bound(t);
  if (!late_set.empty()) {
    const std::size_t max_length = k * n + longest;
    cert.words = carve_open_set(max_length, [&](const Word& w) {
      bool open = false;
      for (std::size_t i = 1; i <= k; ++i) {
        const std::size_t off = i * n;
        const std::size_t avail = w.size() > off ? w.size() - off : 0;
        if (late_trie.has_prefix_of(w, off, avail)) return Verdict::inside;
        if (late_trie.has_comparable(w, off, avail, longest)) open = true;
      }
      return open ? Verdict::undecided : Verdict::outside;
    });
  }
  cert.exact_measure = measure_prefix_free(cert.words);
  return cert;
}

struct SchnorrUnion {
  Dyadic union_measure;  // λ of the union of the stage sets
  Dyadic sum_of_measures;
  Dyadic sum_of_bounds;
  Dyadic level_bound;    // 2^{-v}

  bool holds() const { return union_measure <= sum_of_measures && sum_of_bounds <= level_bound && union_measure <= level_bound; }
};

/// Exact measure of the union of stage certificates sharing one level v.
inline SchnorrUnion schnorr_union_bound(std::span<const TestCertificate> certs) {
  SchnorrUnion u;
  std::size_t v = 0;
  std::vector<Word> all;
  for (std::size_t idx = 0; idx < certs.size(); ++idx) {
    const auto& c = certs[idx];
    auto cv = c.parameters.at("v").get<std::size_t>();
    if (idx == 0) v = cv;
    if (cv != v) throw Inapplicable("union bound needs certificates of a single level v");
    all.insert(all.end(), c.words.begin(), c.words.end());
    u.sum_of_measures += c.exact_measure;
    u.sum_of_bounds += c.required_bound;
  }
  u.union_measure = measure_open(all);
  u.level_bound = Dyadic::half_pow(v);
  return u;
}

}  // namespace recur

#pragma once
// Kurtz null class for a clopen target P of granularity n0 and order k:
// a sequence survives stage t when some tail Y_{i n_t} (1 <= i <= k) misses P,
// with the geometric schedule n_t = n0 (k+1)^t.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "recur/bitseq.hpp"
#include "recur/certificate.hpp"
#include "recur/measure.hpp"

namespace recur {

/// Exhaustive word enumerations stop at 2^24 candidates.
inline constexpr std::size_t kEnumerationBudgetBits = 24;

struct KurtzSchedule {
  std::size_t n0 = 1;
  std::size_t k = 1;

  /// n_t = n0 (k+1)^t; stage 0 uses n0 itself.
  std::size_t time(std::size_t t) const {
    std::size_t n = n0;
    for (std::size_t s = 0; s < t; ++s) {
      if (n > (std::size_t{1} << 48) / (k + 1)) throw BudgetExceeded("Kurtz schedule overflow");
      n *= k + 1;
    }
    return n;
  }

  /// Length of the words deciding stages 0..t: k n_t + n0.
  std::size_t granularity(std::size_t t) const { return k * time(t) + n0; }

  /// Half-open bit intervals [i n_t, i n_t + n0) examined at stage t.
  std::vector<std::pair<std::size_t, std::size_t>> blocks(std::size_t t) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    auto n = time(t);
    for (std::size_t i = 1; i <= k; ++i) out.emplace_back(i * n, i * n + n0);
    return out;
  }
};

namespace detail {
// Stage t is passed (the sequence stays in the null class) iff some block
// word misses P.
inline bool survives_stage(const Word& w, const ClopenSet& p, const KurtzSchedule& sched, std::size_t t) {
  for (auto [lo, hi] : sched.blocks(t)) {
    if (!p.contains(w.slice(lo, hi))) return true;
  }
  return false;
}
}  // namespace detail

/// Words of length k n_t + n0 that survive stages 0..t. The certificate
/// asserts equality with (1 - p^k)^(t+1).
inline TestCertificate kurtz_stage_set(const ClopenSet& p, std::size_t k, std::size_t t) {
  if (p.empty()) throw Inapplicable("Kurtz construction needs a nonempty clopen set");
  if (k == 0) throw OutOfRange("k must be at least 1");
  KurtzSchedule sched{p.granularity(), k};
  const std::size_t length = sched.granularity(t);
  if (length > kEnumerationBudgetBits) {
    throw BudgetExceeded("Kurtz stage " + std::to_string(t) + " needs words of length " + std::to_string(length) +
                         "; the enumeration budget is " + std::to_string(kEnumerationBudgetBits) + " bits");
  }
  TestCertificate cert;
  cert.kind = CertificateKind::kurtz_stage;
  cert.relation = BoundRelation::equal;
  cert.stage_budget = t;
  cert.parameters = Json{{"n0", p.granularity()}, {"k", k}, {"t", t}, {"n_t", sched.time(t)}, {"granularity", length},
                         {"p", p.measure().to_string()}};
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << length); ++x) {
    auto w = Word::from_bits(x, length);
    bool alive = true;
    for (std::size_t s = 0; s <= t && alive; ++s) alive = detail::survives_stage(w, p, sched, s);
    if (alive) cert.words.push_back(std::move(w));
  }
  cert.exact_measure = Dyadic(BigInt(cert.words.size()), length);
  cert.required_bound = (Dyadic(1) - p.measure().pow(k)).pow(t + 1);
  return cert;
}

struct KurtzCapture {
  bool captured = true;
  std::optional<std::size_t> escape_stage;  // first stage at which all k tails land in P
  std::size_t stages_checked = 0;
};

/// Whether Z stays in the stage sets 0..t_max. Escaping at stage t means
/// n_t is a k-recurrence witness.
inline KurtzCapture kurtz_capture(const SequenceSource& z, const ClopenSet& p, std::size_t k, std::size_t t_max) {
  KurtzSchedule sched{p.granularity(), k};
  z.require(sched.granularity(t_max));
  KurtzCapture out;
  for (std::size_t t = 0; t <= t_max; ++t) {
    out.stages_checked = t + 1;
    bool all_in = true;
    for (auto [lo, hi] : sched.blocks(t)) {
      if (!p.contains(z.window(lo, hi - lo))) {
        all_in = false;
        break;
      }
    }
    if (all_in) {
      out.captured = false;
      out.escape_stage = t;
      return out;
    }
  }
  return out;
}

}  // namespace recur

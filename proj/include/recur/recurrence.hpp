#pragma once
// Witness search for k-recurrence: a least n ≥ 1 such that the tails
// Z_n, Z_2n, ..., Z_kn all lie in the target.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "recur/bitseq.hpp"
#include "recur/measure.hpp"

namespace recur {

/// A set of sequences whose membership is decided by the first `window()`
/// bits. ClopenSet and ClosedTarget model it.
template <class T>
concept RecurrenceTarget = requires(const T& t, const Word& w) {
  { t.window() } -> std::convertible_to<std::size_t>;
  { t.admits(w) } -> std::same_as<bool>;
};

struct MembershipCheck {
  std::size_t i;       // multiple of n checked
  std::size_t offset;  // n * i
  Word window;
  bool admitted;
};

struct WitnessReport {
  std::optional<std::size_t> witness;
  std::size_t checked_range = 0;            // n = 1..checked_range were examined
  std::vector<MembershipCheck> evidence;    // the k checks for the witness
  std::optional<std::size_t> stage_budget;  // set for effectively closed targets
};

template <RecurrenceTarget Target>
struct RecurrenceQuery {
  SequenceSource source;
  Target target;
  std::size_t k = 1;
  std::size_t n_max = 1;
};

namespace detail {
template <class T>
std::optional<std::size_t> budget_of(const T& t) {
  if constexpr (requires { t.stage_budget(); }) {
    return t.stage_budget();
  } else {
    return std::nullopt;
  }
}
}  // namespace detail

/// True iff Z_{n i} is admitted by the target for every i in 1..k.
template <RecurrenceTarget Target>
bool is_witness(const SequenceSource& z, const Target& target, std::size_t k, std::size_t n) {
  if (n == 0) throw OutOfRange("recurrence witnesses start at n = 1");
  const std::size_t width = target.window();
  z.require(k * n + width);
  for (std::size_t i = 1; i <= k; ++i) {
    if (!target.admits(z.window(n * i, width))) return false;
  }
  return true;
}

/// Linear scan n = 1..n_max for the least witness.
template <RecurrenceTarget Target>
WitnessReport find_witness(const RecurrenceQuery<Target>& q) {
  if (q.k == 0 || q.n_max == 0) throw OutOfRange("k and n_max must be at least 1");
  const std::size_t width = q.target.window();
  q.source.require(q.k * q.n_max + width);
  // Materialise the prefix once; every check reads inside it.
  const Word bits = prefix(q.source, q.k * q.n_max + width);
  WitnessReport report;
  report.stage_budget = detail::budget_of(q.target);
  for (std::size_t n = 1; n <= q.n_max; ++n) {
    report.checked_range = n;
    bool all = true;
    for (std::size_t i = 1; i <= q.k && all; ++i) all = q.target.admits(bits.slice(n * i, n * i + width));
    if (!all) continue;
    report.witness = n;
    for (std::size_t i = 1; i <= q.k; ++i) {
      auto w = bits.slice(n * i, n * i + width);
      bool ok = q.target.admits(w);
      report.evidence.push_back({i, n * i, std::move(w), ok});
    }
    break;
  }
  return report;
}

/// Re-checks a report's witness and its minimality against the source.
template <RecurrenceTarget Target>
bool recheck(const RecurrenceQuery<Target>& q, const WitnessReport& report) {
  if (!report.witness) {
    for (std::size_t n = 1; n <= report.checked_range; ++n) {
      if (is_witness(q.source, q.target, q.k, n)) return false;
    }
    return true;
  }
  if (!is_witness(q.source, q.target, q.k, *report.witness)) return false;
  for (std::size_t n = 1; n < *report.witness; ++n) {
    if (is_witness(q.source, q.target, q.k, n)) return false;
  }
  return true;
}

struct ProfileEntry {
  std::size_t k;
  std::optional<std::size_t> witness;
};

/// Least witness for each k = 1..k_max. Witnesses need not be monotone in k.
template <RecurrenceTarget Target>
std::vector<ProfileEntry> recurrence_profile(const SequenceSource& z, const Target& target, std::size_t k_max,
                                             std::size_t n_max) {
  if (k_max == 0) throw OutOfRange("k_max must be at least 1");
  std::vector<ProfileEntry> out;
  for (std::size_t k = 1; k <= k_max; ++k) {
    out.push_back({k, find_witness(RecurrenceQuery<Target>{z, target, k, n_max}).witness});
  }
  return out;
}

struct BatchRow {
  std::uint64_t seed;
  std::optional<std::size_t> witness;
};

struct BatchSummary {
  std::size_t k = 0;
  std::size_t n_max = 0;
  std::vector<BatchRow> rows;                    // in seed-list order
  std::map<std::size_t, std::size_t> histogram;  // least witness -> count
  std::size_t with_witness = 0;

  double fraction() const { return rows.empty() ? 0.0 : static_cast<double>(with_witness) / static_cast<double>(rows.size()); }
  double mean_witness() const {
    if (with_witness == 0) return 0.0;
    double sum = 0;
    for (auto [n, c] : histogram) sum += static_cast<double>(n) * static_cast<double>(c);
    return sum / static_cast<double>(with_witness);
  }
};

/// Least witnesses for seeded pseudorandom sources, one per seed.
template <RecurrenceTarget Target>
BatchSummary batch_statistics(std::span<const std::uint64_t> seeds, const Target& target, std::size_t k,
                              std::size_t n_max) {
  if (seeds.empty()) throw OutOfRange("batch needs at least one seed");
  BatchSummary summary;
  summary.k = k;
  summary.n_max = n_max;
  for (auto seed : seeds) {
    auto report = find_witness(RecurrenceQuery<Target>{SequenceSource::seeded(seed), target, k, n_max});
    summary.rows.push_back({seed, report.witness});
    if (report.witness) {
      ++summary.with_witness;
      ++summary.histogram[*report.witness];
    }
  }
  return summary;
}

}  // namespace recur

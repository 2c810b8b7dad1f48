#pragma once
// Circle rotations x -> x + α mod 1 and simultaneous return times: the least
// n with ‖n i α‖ < ε for i = 1..k. Irrational α is handled in fixed point
// with a tracked error bound; rational α is exact.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "recur/dyadic.hpp"
#include "recur/error.hpp"

namespace recur {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kDefaultPrecision = 128;
inline constexpr std::size_t kMaxPrecision = 1 << 16;

/// x ≈ value / 2^prec with |x − value / 2^prec| <= error / 2^prec.
struct FixedPoint {
  BigInt value;
  std::size_t prec = 0;
  BigInt error;
};

inline Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    BigInt num = Dyadic::parse_int(text.substr(0, slash));
    BigInt den = Dyadic::parse_int(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(Dyadic::parse_int(text));
  std::string digits = std::string(text.substr(0, dot)) + std::string(text.substr(dot + 1));
  if (digits.empty() || digits == "-") throw ParseError("malformed decimal '" + std::string(text) + "'");
  BigInt den = 1;
  for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
  return Rational(Dyadic::parse_int(digits), den);
}

/// The rotation number. Golden is (√5 − 1)/2 = [0; 1, 1, 1, ...]; every other
/// accepted form is rational and handled exactly.
class Alpha {
 public:
  static Alpha golden() {
    Alpha a;
    a.label_ = "golden";
    return a;
  }

  static Alpha rational(Rational r) {
    if (r < 0 || r >= 1) throw ParseError("alpha must lie in [0, 1)");
    Alpha a;
    a.exact_ = r;
    a.label_ = boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
    return a;
  }

  /// Finite continued fraction [a0; a1, ..., an].
  static Alpha from_cf(const std::vector<BigInt>& terms) {
    if (terms.empty()) throw ParseError("empty continued fraction");
    Rational x(terms.back());
    for (std::size_t i = terms.size() - 1; i-- > 0;) {
      if (x == 0) throw ParseError("continued fraction terms after the first must be positive");
      x = Rational(terms[i]) + 1 / x;
    }
    return rational(x);
  }

  /// `golden`, `p/q`, a decimal literal, or `cf:a0,a1,...`.
  static Alpha parse(std::string_view text) {
    if (text == "golden") return golden();
    if (text.starts_with("cf:")) {
      std::vector<BigInt> terms;
      auto rest = text.substr(3);
      while (!rest.empty()) {
        auto comma = rest.find(',');
        terms.push_back(Dyadic::parse_int(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
      return from_cf(terms);
    }
    return rational(parse_rational(text));
  }

  bool is_exact() const noexcept { return exact_.has_value(); }
  const std::optional<Rational>& exact() const noexcept { return exact_; }
  const std::string& label() const noexcept { return label_; }

  /// α in fixed point: exact rationals are floored (1 ulp), golden uses an
  /// integer square root (2 ulps).
  FixedPoint fixed(std::size_t prec) const {
    const BigInt one = BigInt(1) << static_cast<unsigned>(prec);
    if (exact_) {
      BigInt num = boost::multiprecision::numerator(*exact_) * one;
      return {num / boost::multiprecision::denominator(*exact_), prec, 1};
    }
    BigInt s = boost::multiprecision::sqrt(BigInt(5) * one * one);
    return {(s - one) >> 1, prec, 2};
  }

  /// Partial quotients a0..a_{depth-1}; shorter when the expansion ends.
  std::vector<BigInt> cf_terms(std::size_t depth) const {
    std::vector<BigInt> out;
    if (!exact_) {
      for (std::size_t i = 0; i < depth; ++i) out.push_back(i == 0 ? 0 : 1);
      return out;
    }
    BigInt p = boost::multiprecision::numerator(*exact_);
    BigInt q = boost::multiprecision::denominator(*exact_);
    while (q != 0 && out.size() < depth) {
      out.push_back(p / q);
      BigInt r = p % q;
      p = q;
      q = r;
    }
    return out;
  }

 private:
  std::optional<Rational> exact_;
  std::string label_;
};

inline double circle_norm(double x) {
  double f = x - std::floor(x);
  return std::min(f, 1.0 - f);
}

/// ‖x‖ for x given in fixed point; the error carries over unchanged.
inline FixedPoint circle_norm(const FixedPoint& x) {
  const BigInt one = BigInt(1) << static_cast<unsigned>(x.prec);
  BigInt r = x.value % one;
  if (r < 0) r += one;
  return {r < one - r ? r : one - r, x.prec, x.error};
}

/// ‖m α‖ exactly, for rational α.
inline Rational circle_norm_exact(const Rational& alpha, const BigInt& m) {
  const BigInt q = boost::multiprecision::denominator(alpha);
  BigInt r = (boost::multiprecision::numerator(alpha) * m) % q;
  if (r < 0) r += q;
  return Rational(r < q - r ? r : q - r, q);
}

/// Decides ‖m α‖ < ε. Throws PrecisionError when the fixed-point error
/// interval straddles ε.
inline bool norm_below(const Alpha& alpha, const BigInt& m, const Rational& eps, std::size_t prec, const FixedPoint* a_fixed = nullptr) {
  if (alpha.is_exact()) return circle_norm_exact(*alpha.exact(), m) < eps;
  FixedPoint a = a_fixed ? *a_fixed : alpha.fixed(prec);
  FixedPoint d = circle_norm(FixedPoint{a.value * m, a.prec, a.error * m});
  const BigInt scaled_num = boost::multiprecision::numerator(eps) << static_cast<unsigned>(a.prec);
  const BigInt den = boost::multiprecision::denominator(eps);
  if ((d.value + d.error) * den < scaled_num) return true;
  if ((d.value - d.error) * den >= scaled_num) return false;
  throw PrecisionError("cannot decide ||" + m.str() + " alpha|| < epsilon at " + std::to_string(prec) + " bits");
}

inline double norm_value(const Alpha& alpha, const BigInt& m, std::size_t prec) {
  if (alpha.is_exact()) return static_cast<double>(circle_norm_exact(*alpha.exact(), m));
  FixedPoint a = alpha.fixed(prec);
  FixedPoint d = circle_norm(FixedPoint{a.value * m, a.prec, a.error * m});
  return Dyadic(d.value, d.prec).to_double();
}

struct ReturnReport {
  std::uint64_t n = 0;
  std::vector<double> distances;  // ‖n i α‖, i = 1..k
  Rational epsilon;
  std::uint64_t bound_used = 0;  // search ceiling
  std::size_t precision = 0;
};

namespace detail {
inline ReturnReport make_report(const Alpha& alpha, std::uint64_t n, std::size_t k, const Rational& eps, std::uint64_t bound,
                                std::size_t prec) {
  ReturnReport r{n, {}, eps, bound, prec};
  for (std::size_t i = 1; i <= k; ++i) r.distances.push_back(norm_value(alpha, BigInt(n) * i, prec));
  return r;
}
}  // namespace detail

/// Least n in [1, n_max] with ‖n i α‖ < ε for all i <= k.
inline std::optional<ReturnReport> find_multi_return(const Alpha& alpha, std::size_t k, const Rational& eps, std::uint64_t n_max,
                                                     std::size_t prec = kDefaultPrecision) {
  if (eps <= 0) throw OutOfRange("epsilon must be positive");
  if (k == 0) throw OutOfRange("k must be at least 1");
  const FixedPoint a = alpha.is_exact() ? FixedPoint{} : alpha.fixed(prec);
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    bool all = true;
    for (std::size_t i = 1; i <= k && all; ++i) all = norm_below(alpha, BigInt(n) * i, eps, prec, &a);
    if (all) return detail::make_report(alpha, n, k, eps, n_max, prec);
  }
  return std::nullopt;
}

/// find_multi_return, doubling the precision on undecidable comparisons.
inline std::optional<ReturnReport> find_multi_return_escalating(const Alpha& alpha, std::size_t k, const Rational& eps,
                                                                std::uint64_t n_max, std::size_t prec = kDefaultPrecision) {
  for (;;) {
    try {
      return find_multi_return(alpha, k, eps, n_max, prec);
    } catch (const PrecisionError&) {
      if (prec >= kMaxPrecision) throw;
      prec *= 2;
    }
  }
}

/// Re-checks every distance of the report at `prec` bits.
inline bool verify_return(const Alpha& alpha, const ReturnReport& report, std::size_t k, std::size_t prec) {
  if (report.n == 0) return false;
  for (std::size_t i = 1; i <= k; ++i) {
    if (!norm_below(alpha, BigInt(report.n) * i, report.epsilon, prec)) return false;
  }
  return true;
}

/// Denominators q_0, q_1, ... of the convergents from the given terms.
inline std::vector<BigInt> convergent_denominators(const std::vector<BigInt>& terms) {
  std::vector<BigInt> q;
  BigInt prev = 1;  // q_{-2}
  BigInt cur = 0;   // q_{-1}
  for (const auto& a : terms) {
    BigInt next = a * cur + prev;
    q.push_back(next);
    prev = cur;
    cur = next;
  }
  return q;
}

/// Tries j q_m for convergent denominators q_m (m < depth) and 1 <= j <=
/// multiples; the first admissible n is returned, not necessarily the least.
inline ReturnReport cf_accelerated_return(const Alpha& alpha, std::size_t k, const Rational& eps, std::size_t depth = 96,
                                          std::size_t multiples = 64, std::size_t prec = kDefaultPrecision) {
  if (eps <= 0) throw OutOfRange("epsilon must be positive");
  if (k == 0) throw OutOfRange("k must be at least 1");
  auto qs = convergent_denominators(alpha.cf_terms(depth));
  for (const auto& q : qs) {
    for (std::size_t j = 1; j <= multiples; ++j) {
      const BigInt n = q * j;
      if (n > BigInt(std::numeric_limits<std::uint64_t>::max() / (k + 1))) {
        throw DepthExhausted("convergent denominators outgrew 64 bits");
      }
      bool all = true;
      std::size_t p = prec;
      for (std::size_t i = 1; i <= k && all;) {
        try {
          all = norm_below(alpha, n * i, eps, p);
          ++i;
        } catch (const PrecisionError&) {
          if (p >= kMaxPrecision) throw;
          p *= 2;
        }
      }
      if (all) {
        const auto nn = static_cast<std::uint64_t>(n);
        return detail::make_report(alpha, nn, k, eps, nn, p);
      }
    }
  }
  throw DepthExhausted("no admissible multiple of the first " + std::to_string(qs.size()) + " convergent denominators");
}

/// Q^k with Q = ceil(1/ε): some n <= Q^k has ‖n i α‖ < 1/Q <= ε for all i.
inline std::uint64_t dirichlet_ceiling(std::size_t k, const Rational& eps) {
  if (eps <= 0) throw OutOfRange("epsilon must be positive");
  const Rational inv = 1 / eps;
  BigInt q = boost::multiprecision::numerator(inv) / boost::multiprecision::denominator(inv);
  if (Rational(q) < inv) q += 1;
  BigInt total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= q;
  if (total > BigInt(std::numeric_limits<std::uint64_t>::max())) throw BudgetExceeded("Dirichlet ceiling exceeds 64 bits");
  return static_cast<std::uint64_t>(total);
}

}  // namespace recur

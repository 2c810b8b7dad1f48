#pragma once
// k commuting coordinate shifts on {0,1}^{N^k}: grid sources, witness search,
// the array Kurtz stage sets and the array C^r sets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "recur/array.hpp"
#include "recur/bitseq.hpp"
#include "recur/certificate.hpp"
#include "recur/kurtz.hpp"
#include "recur/martin_lof.hpp"

namespace recur {

namespace detail {
inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > UINT64_MAX - b) throw BudgetExceeded("diagonal index overflow");
  return a + b;
}
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) throw BudgetExceeded("diagonal index overflow");
  return a * b;
}

inline std::uint64_t cantor_pair(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = checked_add(a, b);
  const std::uint64_t tri = s % 2 == 0 ? checked_mul(s / 2, s + 1) : checked_mul(s, (s + 1) / 2);
  return checked_add(tri, b);
}

inline std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t z) {
  // Largest w with w(w+1)/2 <= z, by integer square root and correction.
  auto w = static_cast<std::uint64_t>((std::sqrt(8.0L * static_cast<long double>(z) + 1.0L) - 1.0L) / 2.0L);
  auto tri = [](std::uint64_t x) { return x % 2 == 0 ? (x / 2) * (x + 1) : x * ((x + 1) / 2); };
  while (tri(w) > z) --w;
  while (tri(w + 1) <= z) ++w;
  const std::uint64_t b = z - tri(w);
  return {w - b, b};
}
}  // namespace detail

/// Iterated Cantor pairing N^k -> N, a bijection:
/// index(u1) = u1, index(u1..uk) = pair(index(u1..u_{k-1}), uk).
inline std::uint64_t diagonal_index(std::span<const std::size_t> u) {
  if (u.empty()) throw OutOfRange("diagonal index needs at least one coordinate");
  std::uint64_t z = u[0];
  for (std::size_t d = 1; d < u.size(); ++d) z = detail::cantor_pair(z, u[d]);
  return z;
}

inline std::vector<std::size_t> diagonal_coords(std::uint64_t z, std::size_t dim) {
  if (dim == 0) throw OutOfRange("dimension must be positive");
  std::vector<std::size_t> u(dim, 0);
  for (std::size_t d = dim; d-- > 1;) {
    auto [a, b] = detail::cantor_unpair(z);
    u[d] = static_cast<std::size_t>(b);
    z = a;
  }
  u[0] = static_cast<std::size_t>(z);
  return u;
}

/// A point of {0,1}^{N^k} with pointwise access.
class GridSource {
 public:
  struct Seeded {
    std::uint64_t seed;
  };
  struct Explicit {
    std::shared_ptr<const ArraySample> data;
    bool fill;
  };
  struct Constant {
    bool bit;
  };

  /// Bit at u is bit diagonal_index(u) of the seeded 1-D source.
  static GridSource seeded(std::size_t dim, std::uint64_t seed) { return GridSource(dim, Seeded{seed}); }
  /// `data` inside its cube, `fill` outside.
  static GridSource explicit_data(ArraySample data, bool fill) {
    const auto dim = data.dim();
    return GridSource(dim, Explicit{std::make_shared<const ArraySample>(std::move(data)), fill});
  }
  static GridSource constant(std::size_t dim, bool bit) { return GridSource(dim, Constant{bit}); }

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::size_t>& offsets() const noexcept { return offset_; }

  bool bit(std::span<const std::size_t> u) const {
    if (u.size() != dim_) throw OutOfRange("coordinate count does not match the grid dimension");
    std::vector<std::size_t> v(u.begin(), u.end());
    for (std::size_t d = 0; d < dim_; ++d) v[d] += offset_[d];
    if (const auto* s = std::get_if<Seeded>(&kind_)) {
      const auto j = diagonal_index(v);
      return ((seeded_block(s->seed, j / 64) >> (j % 64)) & 1U) != 0;
    }
    if (const auto* e = std::get_if<Explicit>(&kind_)) {
      for (auto c : v) {
        if (c >= e->data->size()) return e->fill;
      }
      return e->data->at(v);
    }
    return std::get<Constant>(kind_).bit;
  }

  /// T_i^s: coordinate i (1-based) advanced by s.
  GridSource face_shift(std::size_t i, std::size_t s) const {
    if (i == 0 || i > dim_) throw OutOfRange("direction " + std::to_string(i) + " out of range");
    GridSource g = *this;
    g.offset_[i - 1] += s;
    return g;
  }

  /// The size-n cube at the origin.
  ArraySample sample(std::size_t n) const {
    const std::size_t cells = cube_cells(dim_, n);
    Word bits;
    std::vector<std::size_t> u(dim_, 0);
    const ArraySample shape(dim_, 0, Word{});
    for (std::size_t idx = 0; idx < cells; ++idx) {
      shape.coords_of(idx, n, u);
      bits.push_back(bit(u));
    }
    return ArraySample(dim_, n, std::move(bits));
  }

  /// The 1-D sequence j -> bit(diagonal_coords(j)).
  SequenceSource linearize() const {
    auto self = std::make_shared<const GridSource>(*this);
    return SequenceSource::computed([self](std::size_t j) { return self->bit(diagonal_coords(j, self->dim())); },
                                    "diagonal(" + describe() + ")");
  }

  std::string describe() const {
    std::string base;
    if (const auto* s = std::get_if<Seeded>(&kind_)) {
      base = "grid-seed:" + std::to_string(s->seed);
    } else if (const auto* e = std::get_if<Explicit>(&kind_)) {
      base = "grid-explicit:n=" + std::to_string(e->data->size()) + ":fill=" + (e->fill ? "1" : "0");
    } else {
      base = std::string("grid-constant:") + (std::get<Constant>(kind_).bit ? "1" : "0");
    }
    base += ":k=" + std::to_string(dim_);
    return base;
  }

 private:
  using Kind = std::variant<Seeded, Explicit, Constant>;
  GridSource(std::size_t dim, Kind kind) : dim_(dim), offset_(dim, 0), kind_(std::move(kind)) {
    if (dim == 0) throw OutOfRange("grid dimension must be positive");
  }

  std::size_t dim_;
  std::vector<std::size_t> offset_;
  Kind kind_;
};

/// A clopen subset of {0,1}^{N^k}: the cylinders above a set of size-n1 arrays.
class ClopenArraySet {
 public:
  ClopenArraySet(std::size_t dim, std::size_t granularity, std::vector<ArraySample> members)
      : dim_(dim), granularity_(granularity), members_(std::move(members)) {
    if (granularity_ == 0) throw ParseError("array clopen set needs positive granularity");
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    for (const auto& m : members_) {
      if (m.dim() != dim_ || m.size() != granularity_) throw ParseError("array clopen members must share dimension and size");
      keys_.insert(m.bits());
    }
  }

  static ClopenArraySet full(std::size_t dim, std::size_t granularity) {
    const std::size_t cells = cube_cells(dim, granularity);
    if (cells > kEnumerationBudgetBits) throw BudgetExceeded("full array set too large to list");
    std::vector<ArraySample> all;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << cells); ++x) all.emplace_back(dim, granularity, Word::from_bits(x, cells));
    return ClopenArraySet(dim, granularity, std::move(all));
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t granularity() const noexcept { return granularity_; }
  const std::vector<ArraySample>& members() const noexcept { return members_; }
  bool empty() const noexcept { return members_.empty(); }

  /// Decided by the size-n1 sub-cube.
  bool contains(const ArraySample& a) const {
    if (a.dim() != dim_ || a.size() < granularity_) throw InsufficientData("array too small for the clopen set");
    return keys_.contains(a.size() == granularity_ ? a.bits() : a.restrict(granularity_).bits());
  }

  Dyadic measure() const { return Dyadic(BigInt(members_.size()), cube_cells(dim_, granularity_)); }

 private:
  std::size_t dim_;
  std::size_t granularity_;
  std::vector<ArraySample> members_;
  std::unordered_set<Word, WordHash> keys_;
};

struct GridWitnessReport {
  std::optional<std::size_t> witness;
  std::size_t checked_range = 0;
};

/// Least n <= n_max with T_i^n(G) in P for every direction i.
inline GridWitnessReport grid_find_witness(const GridSource& g, const ClopenArraySet& p, std::size_t k, std::size_t n_max) {
  if (k != g.dim() || k != p.dim()) throw Inapplicable("k must equal the grid dimension for the coordinate shifts");
  if (n_max == 0) throw OutOfRange("n_max must be at least 1");
  GridWitnessReport out;
  for (std::size_t n = 1; n <= n_max; ++n) {
    out.checked_range = n;
    bool all = true;
    for (std::size_t i = 1; i <= k && all; ++i) all = p.contains(g.face_shift(i, n).sample(p.granularity()));
    if (all) {
      out.witness = n;
      break;
    }
  }
  return out;
}

/// Arrays of size (r+1) n1 surviving stages 1..r, where stage r' asks that
/// some T_i^{r' n1}(Y) miss P. The stage windows are pairwise disjoint, so
/// the certificate claims the product value (1 - p^k)^r and checks it by
/// exhaustive enumeration.
inline TestCertificate grid_kurtz_stage_set(const ClopenArraySet& p, std::size_t r) {
  if (p.empty()) throw Inapplicable("Kurtz construction needs a nonempty clopen set");
  if (r == 0) throw OutOfRange("grid Kurtz stages start at r = 1");
  const std::size_t k = p.dim();
  const std::size_t n1 = p.granularity();
  const std::size_t side = (r + 1) * n1;
  const std::size_t cells = cube_cells(k, side);
  if (cells > kEnumerationBudgetBits) {
    throw BudgetExceeded("grid Kurtz stage " + std::to_string(r) + " needs cubes of " + std::to_string(cells) +
                         " cells; the enumeration budget is " + std::to_string(kEnumerationBudgetBits));
  }
  TestCertificate cert;
  cert.kind = CertificateKind::kurtz_stage;
  cert.relation = BoundRelation::equal;
  cert.dimension = k;
  cert.stage_budget = r;
  cert.parameters = Json{{"n1", n1}, {"k", k}, {"r", r}, {"side", side}, {"p", p.measure().to_string()}};
  std::uint64_t survivors = 0;
  std::vector<std::size_t> u(k, 0);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << cells); ++x) {
    const ArraySample y(k, side, Word::from_bits(x, cells));
    bool alive = true;
    for (std::size_t stage = 1; stage <= r && alive; ++stage) {
      bool misses = false;
      for (std::size_t i = 1; i <= k && !misses; ++i) {
        Word window;
        const ArraySample shape(k, 0, Word{});
        for (std::size_t idx = 0, total = cube_cells(k, n1); idx < total; ++idx) {
          shape.coords_of(idx, n1, u);
          u[i - 1] += stage * n1;
          window.push_back(y.at(u));
        }
        misses = !p.contains(ArraySample(k, n1, std::move(window)));
      }
      alive = misses;
    }
    if (alive) {
      ++survivors;
      cert.words.push_back(y.bits());
    }
  }
  cert.exact_measure = Dyadic(BigInt(survivors), cells);
  cert.required_bound = (Dyadic(1) - p.measure().pow(k)).pow(r);
  return cert;
}

/// Array C^r sets; members of B enter at the stage equal to their size.
inline TestCertificate grid_ml_enumerate_C(std::span<const ArraySample> b, std::size_t k, std::size_t r, std::size_t stage_max) {
  for (const auto& a : b) {
    if (a.dim() != k) throw ParseError("co-enumerated arrays must have dimension k");
  }
  auto levels = ml_enumerate_levels(CubeGeometry{k}, b, r, stage_max);
  return ml_certificate(levels, r);
}

}  // namespace recur

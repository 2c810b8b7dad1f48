#pragma once
// Finite cubes of bits in {0,1}^{N^k}.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "recur/bitseq.hpp"
#include "recur/error.hpp"
#include "recur/geometry.hpp"

namespace recur {

/// Number of cells in a cube of the given size; throws BudgetExceeded beyond 2^32.
inline std::size_t cube_cells(std::size_t dim, std::size_t size) {
  std::size_t cells = 1;
  for (std::size_t d = 0; d < dim; ++d) {
    if (size != 0 && cells > (std::size_t{1} << 32) / size) throw BudgetExceeded("cube too large");
    cells *= size;
  }
  return cells;
}

/// A map {0..n-1}^k -> {0,1}, stored row-major with the first coordinate
/// varying slowest. Coordinates are 0-based; directions i are 1-based.
class ArraySample {
 public:
  ArraySample() = default;

  ArraySample(std::size_t dim, std::size_t size, Word bits) : dim_(dim), size_(size), bits_(std::move(bits)) {
    if (dim_ == 0) throw ParseError("array dimension must be positive");
    if (bits_.size() != cube_cells(dim_, size_)) {
      throw ParseError("array of dimension " + std::to_string(dim_) + " and size " + std::to_string(size_) + " needs " +
                       std::to_string(cube_cells(dim_, size_)) + " bits, got " + std::to_string(bits_.size()));
    }
  }

  static ArraySample filled(std::size_t dim, std::size_t size, bool bit) {
    return ArraySample(dim, size, Word::repeated(bit, cube_cells(dim, size)));
  }

  /// Recovers the size from a flattened word of n^dim bits.
  static ArraySample from_flat(std::size_t dim, Word bits) {
    std::size_t n = 0;
    while (cube_cells(dim, n) < bits.size()) ++n;
    return ArraySample(dim, n, std::move(bits));
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t cell_count() const noexcept { return bits_.size(); }
  const Word& bits() const noexcept { return bits_; }

  std::size_t index(std::span<const std::size_t> u) const noexcept {
    std::size_t idx = 0;
    for (std::size_t d = 0; d < dim_; ++d) idx = idx * size_ + u[d];
    return idx;
  }

  bool at(std::span<const std::size_t> u) const noexcept { return bits_[index(u)]; }

  /// Removes s faces in direction i and trims the other directions so the
  /// result is a cube of size n - s: τ(u) = σ(u + s e_i).
  ArraySample crop(std::size_t i, std::size_t s) const {
    if (i == 0 || i > dim_) throw OutOfRange("direction " + std::to_string(i) + " out of range");
    if (s > size_) throw OutOfRange("cannot remove " + std::to_string(s) + " faces from a cube of size " + std::to_string(size_));
    const std::size_t m = size_ - s;
    Word out;
    std::vector<std::size_t> u(dim_, 0);
    for (std::size_t idx = 0, total = cube_cells(dim_, m); idx < total; ++idx) {
      coords_of(idx, m, u);
      u[i - 1] += s;
      out.push_back(at(u));
    }
    return ArraySample(dim_, m, std::move(out));
  }

  /// The sub-cube {0..m-1}^k.
  ArraySample restrict(std::size_t m) const {
    if (m > size_) throw OutOfRange("restriction larger than the array");
    Word out;
    std::vector<std::size_t> u(dim_, 0);
    for (std::size_t idx = 0, total = cube_cells(dim_, m); idx < total; ++idx) {
      coords_of(idx, m, u);
      out.push_back(at(u));
    }
    return ArraySample(dim_, m, std::move(out));
  }

  bool is_prefix_of(const ArraySample& other) const {
    if (dim_ != other.dim_ || size_ > other.size_) return false;
    if (size_ == other.size_) return bits_ == other.bits_;
    std::vector<std::size_t> u(dim_, 0);
    for (std::size_t idx = 0; idx < bits_.size(); ++idx) {
      coords_of(idx, size_, u);
      if (bits_[idx] != other.at(u)) return false;
    }
    return true;
  }

  /// Row-major coordinates of a flat index in a cube of side `side`.
  void coords_of(std::size_t idx, std::size_t side, std::vector<std::size_t>& u) const {
    for (std::size_t d = dim_; d-- > 0;) {
      u[d] = side == 0 ? 0 : idx % side;
      idx = side == 0 ? 0 : idx / side;
    }
  }

  friend bool operator==(const ArraySample&, const ArraySample&) = default;
  friend std::strong_ordering operator<=>(const ArraySample& a, const ArraySample& b) {
    if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
    if (auto c = a.size_ <=> b.size_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }

 private:
  std::size_t dim_ = 1;
  std::size_t size_ = 0;
  Word bits_;
};

/// Header `k <k> n <n>` then the bits row-major, n per line.
inline void write_array(std::ostream& out, const ArraySample& a) {
  out << "k " << a.dim() << " n " << a.size() << '\n';
  if (a.size() == 0) return;
  for (std::size_t start = 0; start < a.cell_count(); start += a.size()) {
    out << a.bits().slice(start, start + a.size()).to_string() << '\n';
  }
}

/// Reads one array; returns false at clean end of input.
inline bool read_array(std::istream& in, ArraySample& out) {
  std::string kw1;
  std::string kw2;
  std::size_t k = 0;
  std::size_t n = 0;
  if (!(in >> kw1)) return false;
  if (kw1 != "k" || !(in >> k >> kw2 >> n) || kw2 != "n") throw ParseError("array must start with 'k <k> n <n>'");
  const std::size_t cells = cube_cells(k, n);
  Word bits;
  std::string token;
  while (bits.size() < cells && in >> token) bits.append(Word(token));
  if (bits.size() != cells) throw ParseError("array body has the wrong number of bits");
  out = ArraySample(k, n, std::move(bits));
  return true;
}

/// The k coordinate shifts on {0,1}^{N^k}: shift number i by amount n removes
/// n faces in direction i.
struct CubeGeometry {
  using Pattern = ArraySample;
  std::size_t dim = 1;

  /// Largest number of new cells enumerated when growing a cube by one.
  static constexpr std::size_t kMaxShellCells = 24;

  std::size_t size_of(const ArraySample& a) const noexcept { return a.size(); }
  std::size_t cells(std::size_t n) const { return cube_cells(dim, n); }
  ArraySample root() const { return ArraySample(dim, 0, Word{}); }
  ArraySample restrict(const ArraySample& a, std::size_t n) const { return a.restrict(n); }
  bool is_prefix(const ArraySample& a, const ArraySample& b) const { return a.is_prefix_of(b); }
  ArraySample shifted(const ArraySample& a, std::size_t i, std::size_t n) const { return a.crop(i, n); }
  std::size_t shift_loss(std::size_t /*i*/, std::size_t n) const noexcept { return n; }
  std::size_t arity() const noexcept { return dim; }
  std::size_t child_floor(std::size_t s) const noexcept { return 2 * s + 1; }
  Word key(const ArraySample& a) const { return a.bits(); }

  /// All arrays of size n+1 extending a.
  std::vector<ArraySample> extensions(const ArraySample& a) const {
    const std::size_t n = a.size();
    const std::size_t big = cells(n + 1);
    const std::size_t shell = big - cells(n);
    if (shell > kMaxShellCells) throw BudgetExceeded("cube shell of " + std::to_string(shell) + " cells is too large to enumerate");
    std::vector<std::size_t> u(dim, 0);
    std::vector<std::size_t> shell_index;
    std::vector<int> inner_source(big, -1);
    for (std::size_t idx = 0; idx < big; ++idx) {
      a.coords_of(idx, n + 1, u);
      bool inside = std::all_of(u.begin(), u.end(), [n](std::size_t c) { return c < n; });
      if (inside) {
        inner_source[idx] = static_cast<int>(a.index(u));
      } else {
        shell_index.push_back(idx);
      }
    }
    std::vector<ArraySample> out;
    out.reserve(std::size_t{1} << shell);
    for (std::uint64_t assign = 0; assign < (std::uint64_t{1} << shell); ++assign) {
      Word bits;
      std::size_t next_shell = 0;
      for (std::size_t idx = 0; idx < big; ++idx) {
        if (inner_source[idx] >= 0) {
          bits.push_back(a.bits()[static_cast<std::size_t>(inner_source[idx])]);
        } else {
          bits.push_back(((assign >> next_shell) & 1U) != 0);
          ++next_shell;
        }
      }
      out.emplace_back(dim, n + 1, std::move(bits));
    }
    return out;
  }
};

}  // namespace recur

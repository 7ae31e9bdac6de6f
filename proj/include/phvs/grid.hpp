#pragma once

// Row-wise evaluation of a polynomial over the full grid (Z/N)^n.
//
// Grid points are numbered lexicographically with x1 most significant, so
// index = sum_i x_i N^{n-i}. A row fixes x1..x_{n-1} and runs x_n over [0, N).

#include <cstdint>
#include <vector>

#include "phvs/multipoly.hpp"

namespace phvs {

/// N^n, or throws Errc::BudgetExceeded when it exceeds `limit`.
std::uint64_t grid_size(std::uint64_t modulus, std::size_t nvars, std::uint64_t limit);

/// Splits a grid index into coordinates.
void decode_point(std::uint64_t index, std::uint64_t modulus, std::vector<std::uint64_t>& out);

class PolyGrid {
 public:
  PolyGrid(const MultiPoly& f, std::uint64_t modulus);

  std::uint64_t modulus() const noexcept { return modulus_; }
  std::size_t nvars() const noexcept { return nvars_; }
  /// Number of values per row: N, or 1 for a constant in zero variables.
  std::uint64_t row_length() const noexcept { return nvars_ == 0 ? 1 : modulus_; }
  std::uint64_t row_count() const noexcept { return rows_; }
  std::uint64_t size() const noexcept { return rows_ * row_length(); }

  /// Writes f(prefix(r), t) for t in [0, row_length()) to out.
  void row(std::uint64_t r, std::uint32_t* out) const;

  /// All N^n values in grid order.
  std::vector<std::uint32_t> table() const;

 private:
  struct Term {
    std::uint64_t coeff;
    std::vector<std::uint32_t> exps;  // exponents of x1..x_{n-1}
    std::uint32_t last;               // exponent of x_n
  };

  std::uint64_t modulus_;
  std::size_t nvars_;
  std::uint64_t rows_;
  unsigned inner_degree_;
  std::vector<Term> terms_;
};

}  // namespace phvs

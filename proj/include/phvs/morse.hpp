#pragma once

// Nondegenerate critical points mod p^m: Newton lifting, the diagonalizing
// change of variables f(x) = f(c) + sum a_i T_i(x)^2 on the residue disc of a
// critical point, and critical-point evaluation of character sums on affine
// space and on hyperplane charts.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phvs/characters.hpp"
#include "phvs/charsums.hpp"
#include "phvs/multipoly.hpp"
#include "phvs/residue.hpp"

namespace phvs {

struct CriticalPointCert {
  std::vector<ResidueElem> point;
  /// Valuation of each partial derivative at the point (m means "at least m").
  std::vector<unsigned> grad_valuations;
  /// Discriminant class of the Hessian at the point, over F_p.
  SquareClass hess_disc = SquareClass::Zero;
  ResidueElem value;  // f at the point
  /// Newton steps taken.
  unsigned iterations = 0;
};

/// ceil(log2 m) + 1.
unsigned newton_iteration_bound(unsigned m) noexcept;

/// Lifts a critical residue c mod p to the critical point of f mod p^m in its
/// residue disc. Throws Errc::InvalidArgument if grad f(c) is not 0 mod p and
/// Errc::DegenerateCritical if the Hessian is singular mod p.
CriticalPointCert lift_critical_point(const MultiPoly& f, std::span<const std::int64_t> residue,
                                      const ResidueRing& ring);

/// Number of x = c mod p in (Z/p^k)^n with grad f(x) = 0 mod p^k.
std::uint64_t count_disc_critical_points(const MultiPoly& f, std::span<const std::int64_t> residue,
                                         std::uint64_t p, unsigned k = 2);

struct MorseNormalForm {
  CriticalPointCert cert;
  /// Unit diagonal coefficients.
  std::vector<ResidueElem> a;
  /// T_i as polynomials in u = x - c, coefficients in [0, p^m), terms of total
  /// degree >= m dropped. Valid for u in (pZ)^n.
  std::vector<MultiPoly> transform;
};

MorseNormalForm morse_normal_form(const MultiPoly& f, std::span<const std::int64_t> residue,
                                  const ResidueRing& ring);

/// f(x) - f(c) - sum a_i T_i(x - c)^2 mod p^m, for x in the disc of c.
std::uint64_t normal_form_residual(const MultiPoly& f, const MorseNormalForm& nf, std::span<const std::uint64_t> x);

struct Chart {
  enum class Kind { AffineSpace, Hyperplane };
  Kind kind = Kind::AffineSpace;
  /// Hyperplane charts: the set L.x = 1.
  std::vector<std::uint64_t> L;
  /// Coordinate solved for; defaults to the first unit coefficient of L.
  std::optional<std::size_t> coordinate;

  static Chart affine() { return {}; }
  static Chart hyperplane(std::vector<std::uint64_t> L, std::optional<std::size_t> coordinate = std::nullopt) {
    return {Kind::Hyperplane, std::move(L), coordinate};
  }
};

struct ChartPolynomial {
  /// f in the chart's free coordinates, coefficients reduced mod p^m.
  MultiPoly g;
  /// The eliminated coordinate of a hyperplane chart.
  std::optional<std::size_t> solved;
  /// x_solved = offset + sum coeff_i y_i over the free coordinates, mod p^m.
  std::uint64_t offset = 0;
  std::vector<std::uint64_t> coeffs;
};

/// Throws Errc::NoUnitCoefficient when a hyperplane has no unit coefficient.
ChartPolynomial restrict_to_chart(const MultiPoly& f, const Chart& chart, const ResidueRing& ring);

struct ChartCriticalResidue {
  std::vector<std::int64_t> residue;
  bool unit_value = false;
  bool degenerate = false;
};

/// Every y mod p with grad g(y) = 0 mod p.
std::vector<ChartCriticalResidue> scan_critical_residues(const MultiPoly& g, std::uint64_t p);

/// The sum of chi(f) over the chart evaluated through its critical points:
/// sum_i chi(f(c_i)) legendre(f(c_i)^d H_i)^m alpha~(chi,m)^d with
/// H_i = 2^{-d} Delta(Hess f(c_i)) and d the chart dimension. Throws
/// Errc::DegenerateCriticalFound if a critical residue with unit value is
/// degenerate mod p.
SumValue critical_points_sum(const MultiPoly& f, const MultChar& chi, const Chart& chart);

}  // namespace phvs

#pragma once

// Character sums over (Z/p^m)^n: brute force, critical-point filtering,
// quadratic closed forms, the Fourier transform S(L), its factorization for
// homogeneous f, Parseval, and composite moduli via CRT.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "phvs/characters.hpp"
#include "phvs/multipoly.hpp"

namespace phvs {

enum class SumMethod { BruteForce, Filtered, ClosedForm, Factorized, CRTProduct };
std::string_view method_name(SumMethod m) noexcept;

struct SumValue {
  Complex value;
  std::uint64_t terms_counted = 0;
  SumMethod method = SumMethod::BruteForce;
};

struct SumOptions {
  /// Maximum number of points any single enumeration may visit.
  std::uint64_t budget = 100'000'000;
  /// 0 means worker_count().
  unsigned threads = 0;
};

/// Sum of chi(f(x)) over (Z/p^m)^n.
SumValue brute_sum(const MultiPoly& f, const MultChar& chi, const SumOptions& opts = {});
/// Sum of psi(f(x)) over (Z/p^m)^n.
SumValue brute_sum_additive(const MultiPoly& f, const AddChar& psi, const SumOptions& opts = {});

/// ceil((m-1)/2): the gradient valuation a point needs to survive the filter.
unsigned critical_threshold(unsigned m) noexcept;

/// Same sums restricted to points whose gradient has valuation at least
/// critical_threshold(m) in every coordinate. Requires m >= 2.
SumValue filtered_sum(const MultiPoly& f, const MultChar& chi, const SumOptions& opts = {});
SumValue filtered_sum_additive(const MultiPoly& f, const AddChar& psi, const SumOptions& opts = {});

/// All four of the above from a single pass over the grid.
struct FilterScan {
  SumValue brute_mult;
  SumValue filtered_mult;
  SumValue brute_add;
  SumValue filtered_add;
  std::uint64_t kept = 0;
};
FilterScan filter_scan(const MultiPoly& f, const MultChar& chi, const AddChar& psi, const SumOptions& opts = {});

/// chi(a0) legendre(a0^n a1...an)^m alpha~(chi,m)^n, the value of the sum of
/// chi(a0 + sum a_i x_i^2). All a_i must be units of the same ring.
SumValue quadratic_closed_form(std::span<const ResidueElem> a, const MultChar& chi);

/// S(L) = sum of chi(f(x)) psi(L.x) by enumeration. chi and psi primitive on one ring.
SumValue fourier_sum(const MultiPoly& f, const MultChar& chi, const AddChar& psi,
                     std::span<const std::uint64_t> L, const SumOptions& opts = {});

/// T_L(a) = sum of psi(L.x) over x with f(x) = a, for every a in Z/p^m.
/// S(L) for any chi is then the sum of chi(a) T_L(a).
std::vector<Complex> fiber_transform(const MultiPoly& f, const AddChar& psi, std::span<const std::uint64_t> L,
                                     const SumOptions& opts = {});

/// Given T on Z/p^m, returns sum_a chi_k(a) T(a) for every index k in [0, phi).
std::vector<Complex> all_character_sums(const CharacterTables& tables, std::span<const Complex> t);

/// Sum of chi^d(y) psi(y) over y mod p^m.
Complex twisted_gauss_sum(const MultChar& chi, unsigned d, const AddChar& psi);

/// Sum of chi(f(x)) over the solutions of L.x = 1, enumerated by solving for
/// one coordinate with a unit coefficient (the smallest such index unless
/// `coordinate` is given). Throws Errc::NoUnitCoefficient.
SumValue hyperplane_sum(const MultiPoly& f, const MultChar& chi, std::span<const std::uint64_t> L,
                        std::optional<std::size_t> coordinate = std::nullopt, const SumOptions& opts = {});

/// Splitting of S(L) for f homogeneous of degree d with p not dividing d.
struct Factorization {
  /// min_i v(L_i); the product is 0 when this is nonzero.
  unsigned k = 0;
  Complex gauss_like;
  Complex hyperplane;
  SumValue product;
};
Factorization factorize_homogeneous(const MultiPoly& f, const MultChar& chi, const AddChar& psi,
                                    std::span<const std::uint64_t> L, const SumOptions& opts = {});

struct ParsevalResult {
  double lhs = 0;
  double rhs = 0;
  std::uint64_t n1 = 0;
};
/// lhs = sum over all L of |S(L)|^2, rhs = q^{mn} #{x : f(x) unit}.
ParsevalResult parseval_check(const MultiPoly& f, const MultChar& chi, const AddChar& psi,
                              const SumOptions& opts = {});

/// A character of (Z/N)^x together with an additive character of Z/N, built
/// from local components by CRT.
class CompositeChar {
 public:
  struct Local {
    std::uint64_t p;
    unsigned m;
    std::uint64_t chi_index;
    std::uint64_t psi_twist;
  };

  /// Local components must have distinct primes; each must be primitive.
  explicit CompositeChar(const std::vector<Local>& locals);
  /// Factors N and uses chi index 1 and psi twist 1 at every prime.
  static CompositeChar with_defaults(std::uint64_t modulus);

  std::uint64_t modulus() const noexcept { return modulus_; }
  std::size_t size() const noexcept { return chis_.size(); }
  const MultChar& local_chi(std::size_t i) const { return chis_.at(i); }
  const AddChar& local_psi(std::size_t i) const { return psis_.at(i); }

  Complex chi(std::uint64_t x) const;
  Complex psi(std::uint64_t x) const;

 private:
  std::uint64_t modulus_ = 1;
  std::vector<MultChar> chis_;
  std::vector<AddChar> psis_;
};

struct CrtResult {
  SumValue direct;
  SumValue product;
};
/// The composite-modulus S(L) computed over (Z/N)^n and as the product of its
/// local factors. Throws Errc::EvenModulus for even N.
CrtResult crt_composite_sum(const MultiPoly& f, const CompositeChar& g, std::span<const std::uint64_t> L,
                            const SumOptions& opts = {});

}  // namespace phvs

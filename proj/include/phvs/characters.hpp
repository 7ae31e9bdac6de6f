#pragma once

// Multiplicative and additive characters of Z/p^m, Gauss sums and the
// quadratic constants built from them.

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "phvs/residue.hpp"

namespace phvs {

using Complex = std::complex<double>;

/// Smallest g in [2, p^m) generating the cyclic group (Z/p^m)^x.
std::uint64_t find_generator(const ResidueRing& ring);

/// Precomputed discrete logarithms and root-of-unity tables for one ring.
/// Immutable once built; shared by every character on the ring.
class CharacterTables {
 public:
  static constexpr std::uint64_t kMaxTableSize = std::uint64_t{1} << 24;

  /// Process-wide cache keyed by (p, m).
  static std::shared_ptr<const CharacterTables> get(const ResidueRing& ring);

  explicit CharacterTables(const ResidueRing& ring);

  const ResidueRing& ring() const noexcept { return ring_; }
  std::uint64_t generator() const noexcept { return generator_; }
  std::uint64_t unit_count() const noexcept { return phi_; }

  /// log_g(x) for units, -1 otherwise.
  std::int64_t log(std::uint64_t x) const noexcept { return log_[x]; }
  /// g^e for 0 <= e < phi.
  std::uint64_t exp(std::uint64_t e) const noexcept { return exp_[e]; }
  /// exp(2 pi i j / phi).
  const Complex& unit_root(std::uint64_t j) const noexcept { return unit_roots_[j]; }
  /// exp(2 pi i j / p^m).
  const Complex& additive_root(std::uint64_t j) const noexcept { return additive_roots_[j]; }

  const std::vector<std::int32_t>& log_table() const noexcept { return log_; }
  const std::vector<Complex>& unit_roots() const noexcept { return unit_roots_; }
  const std::vector<Complex>& additive_roots() const noexcept { return additive_roots_; }

 private:
  ResidueRing ring_;
  std::uint64_t generator_;
  std::uint64_t phi_;
  std::vector<std::int32_t> log_;
  std::vector<std::uint32_t> exp_;
  std::vector<Complex> unit_roots_;
  std::vector<Complex> additive_roots_;
};

/// chi(x) = exp(2 pi i k log_g(x) / phi) on units, 0 on non-units.
class MultChar {
 public:
  MultChar(const ResidueRing& ring, std::uint64_t index);
  MultChar(std::shared_ptr<const CharacterTables> tables, std::uint64_t index);

  const ResidueRing& ring() const noexcept { return tables_->ring(); }
  std::uint64_t index() const noexcept { return index_; }
  const CharacterTables& tables() const noexcept { return *tables_; }
  const std::shared_ptr<const CharacterTables>& tables_ptr() const noexcept { return tables_; }

  Complex operator()(std::uint64_t x) const noexcept {
    const std::int64_t e = tables_->log(x % tables_->ring().modulus());
    if (e < 0) return {0.0, 0.0};
    return tables_->unit_root(static_cast<std::uint64_t>(e) * index_ % tables_->unit_count());
  }
  Complex operator()(const ResidueElem& x) const;

  /// chi^e, itself a character of the same ring.
  MultChar pow(std::uint64_t e) const;
  bool is_trivial() const noexcept { return index_ == 0; }

 private:
  std::shared_ptr<const CharacterTables> tables_;
  std::uint64_t index_;
};

/// psi(x) = exp(2 pi i t x / p^m).
class AddChar {
 public:
  AddChar(const ResidueRing& ring, std::uint64_t twist);
  AddChar(std::shared_ptr<const CharacterTables> tables, std::uint64_t twist);

  const ResidueRing& ring() const noexcept { return tables_->ring(); }
  std::uint64_t twist() const noexcept { return twist_; }
  const CharacterTables& tables() const noexcept { return *tables_; }

  Complex operator()(std::uint64_t x) const noexcept {
    const std::uint64_t n = tables_->ring().modulus();
    return tables_->additive_root(twist_ * (x % n) % n);
  }
  Complex operator()(const ResidueElem& x) const;

 private:
  std::shared_ptr<const CharacterTables> tables_;
  std::uint64_t twist_;
};

/// Not induced from any modulus p^n with n < m.
bool is_primitive(const MultChar& chi) noexcept;
bool is_primitive(const AddChar& psi) noexcept;

/// Indices of all primitive characters, in increasing order.
std::vector<std::uint64_t> primitive_indices(const ResidueRing& ring);

/// The Legendre symbol mod p as a character of Z/p.
MultChar legendre_character(std::uint64_t p);

/// Classical Gauss sum over Z/p. Both characters must live on Z/p.
Complex gauss_sum(const MultChar& chi, const AddChar& psi);

/// y -> chi(1 + p^{m-1} y) as an additive character of Z/p. Requires m >= 2
/// and chi primitive.
AddChar derived_psi_prime(const MultChar& chi);

/// Brute-force sum over x mod p^m of chi(1 + x^2). Also evaluates the
/// closed form and throws Errc::Internal if the two disagree.
Complex alpha_tilde_mult(const MultChar& chi);
/// q^{m/2} for even m, q^{(m-1)/2} G(chi_{1/2}, psi') for odd m.
Complex alpha_tilde_mult_closed(const MultChar& chi);

/// Brute-force sum over x mod p^m of psi(x^2).
Complex alpha_tilde_add(const AddChar& psi);

/// The unit-modulus phase constant alpha(chi, m): 1 for even m and
/// G(chi_{1/2}, psi')/sqrt(q) for odd m. The value is a fourth root of unity
/// (+-1 when p = 1 mod 4); anything else throws Errc::Internal.
Complex alpha_factor(const MultChar& chi);

}  // namespace phvs

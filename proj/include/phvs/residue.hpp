#pragma once

// Exact arithmetic in Z/p^m for odd primes p.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace phvs {

bool is_prime(std::uint64_t n) noexcept;

/// Prime factors of n in increasing order, without multiplicity.
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

class ResidueElem;

/// The ring Z/p^m for odd p with p^m <= 2^31.
class ResidueRing {
 public:
  static constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 31;

  ResidueRing(std::uint64_t p, unsigned m);

  std::uint64_t p() const noexcept { return p_; }
  unsigned m() const noexcept { return m_; }
  std::uint64_t modulus() const noexcept { return modulus_; }
  /// Order of the unit group, p^{m-1}(p-1).
  std::uint64_t unit_count() const noexcept { return modulus_ / p_ * (p_ - 1); }
  /// p^k for 0 <= k <= m.
  std::uint64_t p_power(unsigned k) const;

  std::uint64_t reduce(std::int64_t v) const noexcept;
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const noexcept {
    const std::uint64_t s = a + b;
    return s >= modulus_ ? s - modulus_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const noexcept {
    return a >= b ? a - b : a + modulus_ - b;
  }
  std::uint64_t neg(std::uint64_t a) const noexcept { return a == 0 ? 0 : modulus_ - a; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const noexcept { return a * b % modulus_; }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const noexcept;
  /// Throws Errc::NonUnit when p divides a.
  std::uint64_t inv(std::uint64_t a) const;

  /// Largest k <= m with p^k | a. Zero reports m, read as "at least m".
  unsigned valuation(std::uint64_t a) const noexcept;
  bool is_unit(std::uint64_t a) const noexcept { return a % p_ != 0; }

  ResidueElem elem(std::int64_t v) const;
  ResidueRing residue_field() const { return ResidueRing(p_, 1); }

  friend bool operator==(const ResidueRing&, const ResidueRing&) = default;

 private:
  std::uint64_t p_;
  unsigned m_;
  std::uint64_t modulus_;
};

class ResidueElem {
 public:
  ResidueElem(const ResidueRing& ring, std::int64_t v) : ring_(ring), value_(ring.reduce(v)) {}

  std::uint64_t value() const noexcept { return value_; }
  const ResidueRing& ring() const noexcept { return ring_; }

  unsigned valuation() const noexcept { return ring_.valuation(value_); }
  bool is_unit() const noexcept { return ring_.is_unit(value_); }
  bool is_zero() const noexcept { return value_ == 0; }
  ResidueElem inverse() const;
  ResidueElem pow(std::uint64_t e) const;

  ResidueElem operator-() const;
  ResidueElem& operator+=(const ResidueElem& o);
  ResidueElem& operator-=(const ResidueElem& o);
  ResidueElem& operator*=(const ResidueElem& o);
  friend ResidueElem operator+(ResidueElem a, const ResidueElem& b) { return a += b; }
  friend ResidueElem operator-(ResidueElem a, const ResidueElem& b) { return a -= b; }
  friend ResidueElem operator*(ResidueElem a, const ResidueElem& b) { return a *= b; }

  friend bool operator==(const ResidueElem& a, const ResidueElem& b) {
    return a.ring_ == b.ring_ && a.value_ == b.value_;
  }

 private:
  void check_same_ring(const ResidueElem& o) const;

  ResidueRing ring_;
  std::uint64_t value_;
};

/// Legendre class of a residue mod p: +1 square, -1 nonsquare, 0 divisible by p.
enum class SquareClass : int { NonSquare = -1, Zero = 0, Square = 1 };

inline int sign(SquareClass c) noexcept { return static_cast<int>(c); }
SquareClass operator*(SquareClass a, SquareClass b) noexcept;
SquareClass power(SquareClass c, unsigned e) noexcept;

SquareClass legendre(std::int64_t a, std::uint64_t p);

/// The unique r with r^2 = x mod p^m and r = base_root mod p.
/// Throws Errc::NotASquare if base_root^2 != x mod p, Errc::NonUnit if p | x.
ResidueElem hensel_sqrt(const ResidueElem& x, std::uint64_t base_root);

/// Dense square matrix over Z/modulus.
class ModMatrix {
 public:
  ModMatrix(std::size_t n, std::uint64_t modulus);
  static ModMatrix identity(std::size_t n, std::uint64_t modulus);

  std::size_t size() const noexcept { return n_; }
  std::uint64_t modulus() const noexcept { return modulus_; }

  std::uint64_t& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::uint64_t operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  ModMatrix transpose() const;
  friend ModMatrix operator*(const ModMatrix& a, const ModMatrix& b);
  bool is_symmetric() const noexcept;
  bool is_diagonal() const noexcept;

  friend bool operator==(const ModMatrix&, const ModMatrix&) = default;

 private:
  std::size_t n_;
  std::uint64_t modulus_;
  std::vector<std::uint64_t> data_;
};

struct Diagonalization {
  /// Nonzero diagonal entries a_1..a_r, r = rank.
  std::vector<std::uint64_t> entries;
  SquareClass discriminant;
  /// X with X^t A X diagonal (entries first, then zeros).
  ModMatrix transform;
};

/// Congruence diagonalization of a symmetric matrix over F_p.
/// The matrix modulus must be p.
Diagonalization diagonalize_symmetric(const ModMatrix& a);

/// Solves A z = b over Z/p^m for A invertible mod p. Throws Errc::NonUnit
/// when A is singular mod p.
std::vector<std::uint64_t> solve_linear(const ModMatrix& a, std::span<const std::uint64_t> b,
                                        const ResidueRing& ring);

}  // namespace phvs

#include "phvs/residue.hpp"

#include <string>
#include <utility>

#include "phvs/error.hpp"

namespace phvs {

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

ResidueRing::ResidueRing(std::uint64_t p, unsigned m) : p_(p), m_(m), modulus_(1) {
  if (p == 2) throw Error(Errc::InvalidArgument, "residue characteristic 2 is not supported");
  if (!is_prime(p)) throw Error(Errc::InvalidArgument, std::to_string(p) + " is not prime");
  if (m < 1) throw Error(Errc::InvalidArgument, "exponent m must be at least 1");
  for (unsigned i = 0; i < m; ++i) {
    modulus_ *= p;
    if (modulus_ > kMaxModulus) {
      throw Error(Errc::Overflow, "p^m exceeds 2^31");
    }
  }
}

std::uint64_t ResidueRing::p_power(unsigned k) const {
  if (k > m_) throw Error(Errc::InvalidArgument, "p_power exponent above m");
  std::uint64_t r = 1;
  for (unsigned i = 0; i < k; ++i) r *= p_;
  return r;
}

std::uint64_t ResidueRing::reduce(std::int64_t v) const noexcept {
  const auto n = static_cast<std::int64_t>(modulus_);
  std::int64_t r = v % n;
  if (r < 0) r += n;
  return static_cast<std::uint64_t>(r);
}

std::uint64_t ResidueRing::pow(std::uint64_t a, std::uint64_t e) const noexcept {
  std::uint64_t result = 1 % modulus_;
  a %= modulus_;
  while (e > 0) {
    if (e & 1) result = mul(result, a);
    a = mul(a, a);
    e >>= 1;
  }
  return result;
}

std::uint64_t ResidueRing::inv(std::uint64_t a) const {
  a %= modulus_;
  if (a % p_ == 0) {
    throw Error(Errc::NonUnit, std::to_string(a) + " is not a unit mod " + std::to_string(modulus_));
  }
  // Extended Euclid on signed 64-bit values; all magnitudes stay below 2^31.
  std::int64_t r0 = static_cast<std::int64_t>(modulus_), r1 = static_cast<std::int64_t>(a);
  std::int64_t t0 = 0, t1 = 1;
  while (r1 != 0) {
    const std::int64_t q = r0 / r1;
    r0 = std::exchange(r1, r0 - q * r1);
    t0 = std::exchange(t1, t0 - q * t1);
  }
  return reduce(t0);
}

unsigned ResidueRing::valuation(std::uint64_t a) const noexcept {
  a %= modulus_;
  if (a == 0) return m_;
  unsigned k = 0;
  while (a % p_ == 0) {
    a /= p_;
    ++k;
  }
  return k;
}

ResidueElem ResidueRing::elem(std::int64_t v) const { return ResidueElem(*this, v); }

void ResidueElem::check_same_ring(const ResidueElem& o) const {
  if (!(ring_ == o.ring_)) throw Error(Errc::RingMismatch, "operands live in different residue rings");
}

ResidueElem ResidueElem::inverse() const {
  ResidueElem r = *this;
  r.value_ = ring_.inv(value_);
  return r;
}

ResidueElem ResidueElem::pow(std::uint64_t e) const {
  ResidueElem r = *this;
  r.value_ = ring_.pow(value_, e);
  return r;
}

ResidueElem ResidueElem::operator-() const {
  ResidueElem r = *this;
  r.value_ = ring_.neg(value_);
  return r;
}

ResidueElem& ResidueElem::operator+=(const ResidueElem& o) {
  check_same_ring(o);
  value_ = ring_.add(value_, o.value_);
  return *this;
}

ResidueElem& ResidueElem::operator-=(const ResidueElem& o) {
  check_same_ring(o);
  value_ = ring_.sub(value_, o.value_);
  return *this;
}

ResidueElem& ResidueElem::operator*=(const ResidueElem& o) {
  check_same_ring(o);
  value_ = ring_.mul(value_, o.value_);
  return *this;
}

SquareClass operator*(SquareClass a, SquareClass b) noexcept {
  return static_cast<SquareClass>(sign(a) * sign(b));
}

SquareClass power(SquareClass c, unsigned e) noexcept {
  if (e == 0) return SquareClass::Square;
  if (c == SquareClass::NonSquare) return (e % 2 == 0) ? SquareClass::Square : SquareClass::NonSquare;
  return c;
}

SquareClass legendre(std::int64_t a, std::uint64_t p) {
  const ResidueRing field(p, 1);
  const std::uint64_t r = field.reduce(a);
  if (r == 0) return SquareClass::Zero;
  return field.pow(r, (p - 1) / 2) == 1 ? SquareClass::Square : SquareClass::NonSquare;
}

ResidueElem hensel_sqrt(const ResidueElem& x, std::uint64_t base_root) {
  const ResidueRing& ring = x.ring();
  const std::uint64_t p = ring.p();
  if (!x.is_unit()) throw Error(Errc::NonUnit, "hensel_sqrt needs a unit argument");
  base_root %= p;
  if (base_root * base_root % p != x.value() % p) {
    throw Error(Errc::NotASquare, "base root does not square to x mod p");
  }
  // Newton iteration r <- (r + x/r)/2 doubles the p-adic precision each step.
  std::uint64_t r = base_root;
  const std::uint64_t half = ring.inv(2);
  for (std::uint64_t precision = p; precision < ring.modulus(); precision *= precision) {
    r = ring.mul(ring.add(r, ring.mul(x.value(), ring.inv(r))), half);
  }
  r = ring.mul(ring.add(r, ring.mul(x.value(), ring.inv(r))), half);
  return ring.elem(static_cast<std::int64_t>(r));
}

ModMatrix::ModMatrix(std::size_t n, std::uint64_t modulus)
    : n_(n), modulus_(modulus), data_(n * n, 0) {}

ModMatrix ModMatrix::identity(std::size_t n, std::uint64_t modulus) {
  ModMatrix m(n, modulus);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1 % modulus;
  return m;
}

ModMatrix ModMatrix::transpose() const {
  ModMatrix t(n_, modulus_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

ModMatrix operator*(const ModMatrix& a, const ModMatrix& b) {
  if (a.n_ != b.n_ || a.modulus_ != b.modulus_) {
    throw Error(Errc::RingMismatch, "matrix shapes or moduli differ");
  }
  ModMatrix c(a.n_, a.modulus_);
  for (std::size_t i = 0; i < a.n_; ++i)
    for (std::size_t k = 0; k < a.n_; ++k) {
      const std::uint64_t aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < a.n_; ++j) c(i, j) = (c(i, j) + aik * b(k, j)) % a.modulus_;
    }
  return c;
}

bool ModMatrix::is_symmetric() const noexcept {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

bool ModMatrix::is_diagonal() const noexcept {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j && (*this)(i, j) != 0) return false;
  return true;
}

namespace {

// Simultaneous row/column operation: row_dst += c * row_src, col_dst += c * col_src.
void add_multiple(ModMatrix& a, ModMatrix& x, std::size_t dst, std::size_t src, std::uint64_t c,
                  const ResidueRing& f) {
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) a(dst, j) = f.add(a(dst, j), f.mul(c, a(src, j)));
  for (std::size_t i = 0; i < n; ++i) a(i, dst) = f.add(a(i, dst), f.mul(c, a(i, src)));
  for (std::size_t i = 0; i < n; ++i) x(i, dst) = f.add(x(i, dst), f.mul(c, x(i, src)));
}

void swap_index(ModMatrix& a, ModMatrix& x, std::size_t i, std::size_t j) {
  if (i == j) return;
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) std::swap(a(i, k), a(j, k));
  for (std::size_t k = 0; k < n; ++k) std::swap(a(k, i), a(k, j));
  for (std::size_t k = 0; k < n; ++k) std::swap(x(k, i), x(k, j));
}

}  // namespace

Diagonalization diagonalize_symmetric(const ModMatrix& input) {
  const std::uint64_t p = input.modulus();
  const ResidueRing f(p, 1);
  if (!input.is_symmetric()) throw Error(Errc::InvalidArgument, "matrix is not symmetric");
  const std::size_t n = input.size();
  ModMatrix a = input;
  ModMatrix x = ModMatrix::identity(n, p);
  std::vector<std::uint64_t> entries;

  std::size_t k = 0;
  for (; k < n; ++k) {
    std::size_t pivot = n;
    for (std::size_t i = k; i < n; ++i)
      if (a(i, i) != 0) {
        pivot = i;
        break;
      }
    if (pivot == n) {
      // No usable diagonal entry: x_i <- x_i + x_j turns a(i,j) != 0 into a(i,i) = 2a(i,j).
      std::size_t pi = n, pj = n;
      for (std::size_t i = k; i < n && pi == n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (a(i, j) != 0) {
            pi = i;
            pj = j;
            break;
          }
      if (pi == n) break;  // remaining block is zero
      add_multiple(a, x, pi, pj, 1, f);
      pivot = pi;
    }
    swap_index(a, x, k, pivot);
    const std::uint64_t inv_pivot = f.inv(a(k, k));
    for (std::size_t j = k + 1; j < n; ++j) {
      if (a(j, k) == 0) continue;
      add_multiple(a, x, j, k, f.neg(f.mul(a(j, k), inv_pivot)), f);
    }
    entries.push_back(a(k, k));
  }

  std::uint64_t product = 1;
  for (const std::uint64_t e : entries) product = f.mul(product, e);
  return Diagonalization{std::move(entries), legendre(static_cast<std::int64_t>(product), p), std::move(x)};
}

std::vector<std::uint64_t> solve_linear(const ModMatrix& input, std::span<const std::uint64_t> b,
                                        const ResidueRing& ring) {
  const std::size_t n = input.size();
  if (b.size() != n) throw Error(Errc::ArityMismatch, "right-hand side length differs from matrix size");
  ModMatrix a(n, ring.modulus());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = input(i, j) % ring.modulus();
  std::vector<std::uint64_t> rhs(b.begin(), b.end());
  for (auto& v : rhs) v %= ring.modulus();

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    for (std::size_t r = col; r < n; ++r)
      if (ring.is_unit(a(r, col))) {
        pivot = r;
        break;
      }
    if (pivot == n) throw Error(Errc::NonUnit, "matrix is singular mod p");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
      std::swap(rhs[pivot], rhs[col]);
    }
    const std::uint64_t inv = ring.inv(a(col, col));
    for (std::size_t j = 0; j < n; ++j) a(col, j) = ring.mul(a(col, j), inv);
    rhs[col] = ring.mul(rhs[col], inv);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col) == 0) continue;
      const std::uint64_t factor = a(r, col);
      for (std::size_t j = 0; j < n; ++j) a(r, j) = ring.sub(a(r, j), ring.mul(factor, a(col, j)));
      rhs[r] = ring.sub(rhs[r], ring.mul(factor, rhs[col]));
    }
  }
  return rhs;
}

}  // namespace phvs

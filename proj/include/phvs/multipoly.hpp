#pragma once

// Sparse multivariate polynomials with integer coefficients.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phvs/error.hpp"
#include "phvs/residue.hpp"

namespace phvs {

using BigInt = boost::multiprecision::cpp_int;
using Exponent = std::vector<std::uint32_t>;

namespace detail {

inline std::int64_t coeff_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(Errc::Overflow, "polynomial coefficient overflow");
  return r;
}
inline std::int64_t coeff_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(Errc::Overflow, "polynomial coefficient overflow");
  return r;
}
inline BigInt coeff_add(const BigInt& a, const BigInt& b) { return a + b; }
inline BigInt coeff_mul(const BigInt& a, const BigInt& b) { return a * b; }

}  // namespace detail

/// Polynomial in nvars variables stored as exponent vector -> nonzero coefficient.
template <class Coeff>
class BasicPoly {
 public:
  using Terms = std::map<Exponent, Coeff>;

  explicit BasicPoly(std::size_t nvars = 0) : nvars_(nvars) {}

  static BasicPoly constant(std::size_t nvars, const Coeff& c) {
    BasicPoly r(nvars);
    r.add_term(Exponent(nvars, 0), c);
    return r;
  }
  static BasicPoly variable(std::size_t nvars, std::size_t i) {
    if (i >= nvars) throw Error(Errc::ArityMismatch, "variable index out of range");
    Exponent e(nvars, 0);
    e[i] = 1;
    BasicPoly r(nvars);
    r.add_term(e, Coeff(1));
    return r;
  }

  std::size_t nvars() const noexcept { return nvars_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Max total degree; -1 for the zero polynomial.
  int degree() const noexcept {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(total_degree(e)));
    return d;
  }

  /// Common total degree of all terms; absent for mixed degrees or zero.
  std::optional<unsigned> homogeneous_degree() const noexcept {
    std::optional<unsigned> d;
    for (const auto& [e, c] : terms_) {
      const unsigned t = total_degree(e);
      if (d && *d != t) return std::nullopt;
      d = t;
    }
    return d;
  }

  Coeff coefficient(const Exponent& e) const {
    const auto it = terms_.find(e);
    return it == terms_.end() ? Coeff(0) : it->second;
  }

  void add_term(const Exponent& e, const Coeff& c) {
    if (e.size() != nvars_) throw Error(Errc::ArityMismatch, "exponent length differs from nvars");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second = detail::coeff_add(it->second, c);
      if (it->second == 0) terms_.erase(it);
    }
  }

  BasicPoly operator-() const {
    BasicPoly r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, detail::coeff_mul(c, Coeff(-1)));
    return r;
  }

  BasicPoly& operator+=(const BasicPoly& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  BasicPoly& operator-=(const BasicPoly& o) { return *this += -o; }

  friend BasicPoly operator+(BasicPoly a, const BasicPoly& b) { return a += b; }
  friend BasicPoly operator-(BasicPoly a, const BasicPoly& b) { return a -= b; }
  friend BasicPoly operator*(const BasicPoly& a, const BasicPoly& b) {
    a.check_arity(b);
    BasicPoly r(a.nvars_);
    Exponent e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, detail::coeff_mul(ca, cb));
      }
    return r;
  }
  friend BasicPoly operator*(const Coeff& s, const BasicPoly& a) {
    BasicPoly r(a.nvars_);
    for (const auto& [e, c] : a.terms_) r.add_term(e, detail::coeff_mul(s, c));
    return r;
  }

  BasicPoly pow(unsigned k) const {
    BasicPoly result = constant(nvars_, Coeff(1));
    BasicPoly base = *this;
    while (k > 0) {
      if (k & 1) result = result * base;
      k >>= 1;
      if (k > 0) base = base * base;
    }
    return result;
  }

  /// Formal partial derivative with respect to variable i.
  BasicPoly derivative(std::size_t i) const {
    if (i >= nvars_) throw Error(Errc::ArityMismatch, "derivative variable out of range");
    BasicPoly r(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Exponent d = e;
      d[i] -= 1;
      r.add_term(d, detail::coeff_mul(c, Coeff(e[i])));
    }
    return r;
  }

  friend bool operator==(const BasicPoly& a, const BasicPoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  static unsigned total_degree(const Exponent& e) noexcept {
    unsigned t = 0;
    for (const auto v : e) t += v;
    return t;
  }

 private:
  void check_arity(const BasicPoly& o) const {
    if (o.nvars_ != nvars_) throw Error(Errc::ArityMismatch, "polynomials have different variable counts");
  }

  std::size_t nvars_;
  Terms terms_;
};

using MultiPoly = BasicPoly<std::int64_t>;
using BigPoly = BasicPoly<BigInt>;

BigPoly to_big(const MultiPoly& f);

std::vector<MultiPoly> gradient(const MultiPoly& f);
/// Matrix of second partials, row-major [i][j].
std::vector<std::vector<MultiPoly>> hessian(const MultiPoly& f);

/// f(x) mod the ring modulus.
ResidueElem eval(const MultiPoly& f, std::span<const ResidueElem> x, const ResidueRing& ring);
/// f(x) mod an arbitrary modulus below 2^31 (x given as residues).
std::uint64_t eval_mod(const MultiPoly& f, std::span<const std::uint64_t> x, std::uint64_t modulus);
std::uint64_t reduce_coeff(std::int64_t c, std::uint64_t modulus) noexcept;

/// Substitutes y_i -> d/dx_i in g and applies the operator to h, exactly.
BigPoly apply_diff_operator(const MultiPoly& g, const BigPoly& h);
MultiPoly apply_diff_operator(const MultiPoly& g, const MultiPoly& h);

/// Square class of the discriminant of the Hessian of log f at L, over F_p.
/// Throws Errc::NonUnitValue if p | f(L), Errc::SingularHessian if the
/// log-Hessian is singular mod p.
SquareClass loghessian_disc(const MultiPoly& f, std::span<const std::int64_t> point, std::uint64_t p);

/// Log-Hessian matrix (f H - grad grad^t) / f^2 over F_p.
ModMatrix loghessian_matrix(const MultiPoly& f, std::span<const std::int64_t> point, std::uint64_t p);

/// Parses integer-coefficient polynomials in variables x1..xN or y1..yN
/// ("x"/"y" alone mean index 1) with + - * ^ and parentheses. The result has
/// max(min_nvars, highest index) variables.
MultiPoly parse_poly(std::string_view text, std::size_t min_nvars = 0);

/// Renders f as e.g. "x1^2 + 3*x1*x2 - x2^2"; parse_poly round-trips it.
std::string to_string(const MultiPoly& f, char var = 'x');

}  // namespace phvs

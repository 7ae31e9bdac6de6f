#include "phvs/multipoly.hpp"

#include <limits>
#include <sstream>

namespace phvs {

BigPoly to_big(const MultiPoly& f) {
  BigPoly r(f.nvars());
  for (const auto& [e, c] : f.terms()) r.add_term(e, BigInt(c));
  return r;
}

std::vector<MultiPoly> gradient(const MultiPoly& f) {
  std::vector<MultiPoly> g;
  g.reserve(f.nvars());
  for (std::size_t i = 0; i < f.nvars(); ++i) g.push_back(f.derivative(i));
  return g;
}

std::vector<std::vector<MultiPoly>> hessian(const MultiPoly& f) {
  const auto g = gradient(f);
  std::vector<std::vector<MultiPoly>> h(f.nvars());
  for (std::size_t i = 0; i < f.nvars(); ++i) {
    h[i].reserve(f.nvars());
    for (std::size_t j = 0; j < f.nvars(); ++j) h[i].push_back(g[i].derivative(j));
  }
  return h;
}

std::uint64_t reduce_coeff(std::int64_t c, std::uint64_t modulus) noexcept {
  const auto n = static_cast<std::int64_t>(modulus);
  std::int64_t r = c % n;
  if (r < 0) r += n;
  return static_cast<std::uint64_t>(r);
}

std::uint64_t eval_mod(const MultiPoly& f, std::span<const std::uint64_t> x, std::uint64_t modulus) {
  if (x.size() != f.nvars()) throw Error(Errc::ArityMismatch, "point length differs from nvars");
  std::uint64_t total = 0;
  for (const auto& [e, c] : f.terms()) {
    std::uint64_t term = reduce_coeff(c, modulus);
    for (std::size_t i = 0; i < e.size() && term != 0; ++i) {
      const std::uint64_t base = x[i] % modulus;
      for (std::uint32_t k = 0; k < e[i]; ++k) term = term * base % modulus;
    }
    total = (total + term) % modulus;
  }
  return total;
}

ResidueElem eval(const MultiPoly& f, std::span<const ResidueElem> x, const ResidueRing& ring) {
  if (x.size() != f.nvars()) throw Error(Errc::ArityMismatch, "point length differs from nvars");
  std::vector<std::uint64_t> raw;
  raw.reserve(x.size());
  for (const auto& v : x) {
    if (!(v.ring() == ring)) throw Error(Errc::RingMismatch, "point coordinate from another ring");
    raw.push_back(v.value());
  }
  return ring.elem(static_cast<std::int64_t>(eval_mod(f, raw, ring.modulus())));
}

BigPoly apply_diff_operator(const MultiPoly& g, const BigPoly& h) {
  if (g.nvars() != h.nvars()) throw Error(Errc::ArityMismatch, "operator and operand variable counts differ");
  BigPoly result(h.nvars());
  for (const auto& [e, c] : g.terms()) {
    BigPoly term = h;
    for (std::size_t i = 0; i < e.size(); ++i)
      for (std::uint32_t k = 0; k < e[i] && !term.is_zero(); ++k) term = term.derivative(i);
    result += BigInt(c) * term;
  }
  return result;
}

MultiPoly apply_diff_operator(const MultiPoly& g, const MultiPoly& h) {
  const BigPoly big = apply_diff_operator(g, to_big(h));
  MultiPoly r(big.nvars());
  for (const auto& [e, c] : big.terms()) {
    if (c > std::numeric_limits<std::int64_t>::max() || c < std::numeric_limits<std::int64_t>::min()) {
      throw Error(Errc::Overflow, "operator result does not fit 64-bit coefficients");
    }
    r.add_term(e, static_cast<std::int64_t>(c));
  }
  return r;
}

ModMatrix loghessian_matrix(const MultiPoly& f, std::span<const std::int64_t> point, std::uint64_t p) {
  if (point.size() != f.nvars()) throw Error(Errc::ArityMismatch, "point length differs from nvars");
  const ResidueRing field(p, 1);
  std::vector<std::uint64_t> x;
  x.reserve(point.size());
  for (const auto v : point) x.push_back(field.reduce(v));

  const std::uint64_t value = eval_mod(f, x, p);
  if (value == 0) throw Error(Errc::NonUnitValue, "f vanishes mod p at the point");
  const std::size_t n = f.nvars();
  const auto grad = gradient(f);
  const auto hess = hessian(f);
  std::vector<std::uint64_t> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = eval_mod(grad[i], x, p);

  const std::uint64_t inv_sq = field.inv(field.mul(value, value));
  ModMatrix m(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint64_t hij = eval_mod(hess[i][j], x, p);
      m(i, j) = field.mul(field.sub(field.mul(value, hij), field.mul(g[i], g[j])), inv_sq);
    }
  return m;
}

SquareClass loghessian_disc(const MultiPoly& f, std::span<const std::int64_t> point, std::uint64_t p) {
  const ModMatrix m = loghessian_matrix(f, point, p);
  const Diagonalization diag = diagonalize_symmetric(m);
  if (diag.entries.size() < m.size()) throw Error(Errc::SingularHessian, "log-Hessian is singular mod p");
  return diag.discriminant;
}

std::string to_string(const MultiPoly& f, char var) {
  if (f.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  // Highest total degree first, then the map's exponent order reversed.
  for (int deg = f.degree(); deg >= 0; --deg) {
    for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it) {
      const auto& [e, c] = *it;
      if (static_cast<int>(MultiPoly::total_degree(e)) != deg) continue;
      const std::int64_t mag = c < 0 ? -c : c;
      if (first) {
        if (c < 0) out << "-";
      } else {
        out << (c < 0 ? " - " : " + ");
      }
      first = false;
      bool wrote = false;
      if (mag != 1 || deg == 0) {
        out << mag;
        wrote = true;
      }
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (wrote) out << "*";
        out << var << (i + 1);
        if (e[i] > 1) out << "^" << e[i];
        wrote = true;
      }
    }
  }
  return out.str();
}

}  // namespace phvs

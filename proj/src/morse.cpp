#include "phvs/morse.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "phvs/error.hpp"
#include "phvs/grid.hpp"

namespace phvs {

namespace {

using ModTerms = std::map<Exponent, std::uint64_t>;

void add_into(ModTerms& acc, const Exponent& e, std::uint64_t c, std::uint64_t N) {
  if (c == 0) return;
  auto [it, inserted] = acc.try_emplace(e, c);
  if (!inserted) {
    it->second = (it->second + c) % N;
    if (it->second == 0) acc.erase(it);
  }
}

ModTerms mul_mod(const ModTerms& a, const ModTerms& b, std::size_t nvars, std::uint64_t N) {
  ModTerms r;
  Exponent e(nvars);
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      for (std::size_t i = 0; i < nvars; ++i) e[i] = ea[i] + eb[i];
      add_into(r, e, ca * cb % N, N);
    }
  return r;
}

MultiPoly to_poly(const ModTerms& t, std::size_t nvars) {
  MultiPoly r(nvars);
  for (const auto& [e, c] : t) r.add_term(e, static_cast<std::int64_t>(c));
  return r;
}

std::string describe(std::span<const std::int64_t> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

ModMatrix hessian_at(const std::vector<std::vector<MultiPoly>>& hess, std::span<const std::uint64_t> x,
                     std::uint64_t modulus) {
  const std::size_t n = hess.size();
  ModMatrix h(n, modulus);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = eval_mod(hess[i][j], x, modulus);
  return h;
}

/// Z/N[u_1..u_n] modulo all monomials of total degree >= m. Evaluation at
/// u in (pZ)^n factors through this quotient when N = p^m.
class TruncRing {
 public:
  using Elem = std::vector<std::uint64_t>;

  TruncRing(std::size_t n, unsigned m, std::uint64_t N) : n_(n), N_(N) {
    Exponent e(n, 0);
    enumerate(e, 0, m == 0 ? 0 : m - 1);
    std::sort(monos_.begin(), monos_.end(), [](const Exponent& a, const Exponent& b) {
      const auto da = MultiPoly::total_degree(a), db = MultiPoly::total_degree(b);
      return da != db ? da < db : a > b;
    });
    for (std::size_t i = 0; i < monos_.size(); ++i) index_.emplace(monos_[i], i);
    table_.assign(monos_.size() * monos_.size(), -1);
    Exponent s(n);
    for (std::size_t a = 0; a < monos_.size(); ++a)
      for (std::size_t b = 0; b < monos_.size(); ++b) {
        for (std::size_t i = 0; i < n; ++i) s[i] = monos_[a][i] + monos_[b][i];
        const auto it = index_.find(s);
        if (it != index_.end()) table_[a * monos_.size() + b] = static_cast<int>(it->second);
      }
  }

  std::size_t size() const noexcept { return monos_.size(); }
  const Exponent& monomial(std::size_t i) const { return monos_[i]; }
  std::uint64_t modulus() const noexcept { return N_; }

  Elem zero() const { return Elem(size(), 0); }
  Elem constant(std::uint64_t c) const {
    Elem r = zero();
    if (!r.empty()) r[0] = c % N_;
    return r;
  }
  Elem variable(std::size_t i) const {
    Elem r = zero();
    Exponent e(n_, 0);
    e[i] = 1;
    const auto it = index_.find(e);
    if (it != index_.end()) r[it->second] = 1;
    return r;
  }
  std::optional<std::size_t> find(const Exponent& e) const {
    const auto it = index_.find(e);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Elem add(const Elem& a, const Elem& b) const {
    Elem r(size());
    for (std::size_t i = 0; i < size(); ++i) r[i] = (a[i] + b[i]) % N_;
    return r;
  }
  Elem sub(const Elem& a, const Elem& b) const {
    Elem r(size());
    for (std::size_t i = 0; i < size(); ++i) r[i] = (a[i] + N_ - b[i]) % N_;
    return r;
  }
  Elem scale(const Elem& a, std::uint64_t c) const {
    Elem r(size());
    for (std::size_t i = 0; i < size(); ++i) r[i] = a[i] * (c % N_) % N_;
    return r;
  }
  Elem mul(const Elem& a, const Elem& b) const {
    Elem r = zero();
    const std::size_t s = size();
    for (std::size_t i = 0; i < s; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < s; ++j) {
        const int k = table_[i * s + j];
        if (k < 0 || b[j] == 0) continue;
        r[static_cast<std::size_t>(k)] = (r[static_cast<std::size_t>(k)] + a[i] * b[j]) % N_;
      }
    }
    return r;
  }

  /// sum_k c_k z^k for a series z without constant term.
  Elem series(const Elem& z, const std::vector<std::uint64_t>& c) const {
    Elem result = zero();
    Elem power = constant(1);
    for (std::size_t k = 0; k < c.size(); ++k) {
      result = add(result, scale(power, c[k]));
      power = mul(power, z);
    }
    return result;
  }

  MultiPoly to_poly(const Elem& a) const {
    MultiPoly r(n_);
    for (std::size_t i = 0; i < size(); ++i)
      if (a[i] != 0) r.add_term(monos_[i], static_cast<std::int64_t>(a[i]));
    return r;
  }

 private:
  void enumerate(Exponent& e, std::size_t var, unsigned budget) {
    if (var == n_) {
      monos_.push_back(e);
      return;
    }
    for (unsigned k = 0; k <= budget; ++k) {
      e[var] = k;
      enumerate(e, var + 1, budget - k);
    }
    e[var] = 0;
  }

  std::size_t n_;
  std::uint64_t N_;
  std::vector<Exponent> monos_;
  std::map<Exponent, std::size_t> index_;
  std::vector<int> table_;
};

/// Coefficients of 1/(1+z) and sqrt(1+z) up to z^{terms-1}, mod N.
std::vector<std::uint64_t> inverse_coefficients(std::size_t terms, std::uint64_t N) {
  std::vector<std::uint64_t> c(terms);
  for (std::size_t k = 0; k < terms; ++k) c[k] = k % 2 == 0 ? 1 % N : N - 1;
  return c;
}

std::vector<std::uint64_t> sqrt_coefficients(std::size_t terms, const ResidueRing& ring) {
  // binom(1/2, k) = (-1)^{k-1} 2 Catalan(k-1) / 4^k for k >= 1.
  std::vector<std::uint64_t> c(terms);
  const std::uint64_t inv4 = ring.inv(4);
  BigInt catalan = 1;
  for (std::size_t k = 0; k < terms; ++k) {
    if (k == 0) {
      c[k] = 1;
      continue;
    }
    if (k >= 2) catalan = catalan * 2 * (2 * (k - 1) - 1) / k;  // Catalan(k-1) from Catalan(k-2)
    const auto cat = static_cast<std::uint64_t>(catalan % ring.modulus());
    std::uint64_t v = ring.mul(ring.mul(2, cat), ring.pow(inv4, k));
    if (k % 2 == 0) v = ring.neg(v);
    c[k] = v;
  }
  return c;
}

}  // namespace

unsigned newton_iteration_bound(unsigned m) noexcept {
  unsigned bits = 0;
  while ((1u << bits) < m) ++bits;
  return bits + 1;
}

CriticalPointCert lift_critical_point(const MultiPoly& f, std::span<const std::int64_t> residue,
                                      const ResidueRing& ring) {
  const std::size_t n = f.nvars();
  if (residue.size() != n) throw Error(Errc::ArityMismatch, "residue length differs from nvars");
  const std::uint64_t p = ring.p();
  const std::uint64_t N = ring.modulus();
  const ResidueRing field = ring.residue_field();

  std::vector<std::uint64_t> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = field.reduce(residue[i]);
  const auto grad = gradient(f);
  const auto hess = hessian(f);
  for (const auto& g : grad) {
    if (eval_mod(g, c, p) != 0) {
      throw Error(Errc::InvalidArgument, "gradient does not vanish mod p at " + describe(residue));
    }
  }
  const Diagonalization diag = diagonalize_symmetric(hessian_at(hess, c, p));
  if (diag.entries.size() < n) {
    throw Error(Errc::DegenerateCritical, "Hessian is singular mod p at " + describe(residue));
  }

  unsigned iterations = 0;
  std::vector<std::uint64_t> gv(n);
  for (;;) {
    bool zero = true;
    for (std::size_t i = 0; i < n; ++i) {
      gv[i] = eval_mod(grad[i], c, N);
      zero = zero && gv[i] == 0;
    }
    if (zero) break;
    if (iterations >= 64) throw Error(Errc::Internal, "Newton iteration failed to converge");
    const auto z = solve_linear(hessian_at(hess, c, N), gv, ring);
    for (std::size_t i = 0; i < n; ++i) c[i] = ring.sub(c[i], z[i]);
    ++iterations;
  }

  std::vector<ResidueElem> point;
  std::vector<unsigned> valuations;
  for (std::size_t i = 0; i < n; ++i) {
    point.push_back(ring.elem(static_cast<std::int64_t>(c[i])));
    valuations.push_back(ring.valuation(eval_mod(grad[i], c, N)));
  }
  return {std::move(point), std::move(valuations), diag.discriminant,
          ring.elem(static_cast<std::int64_t>(eval_mod(f, c, N))), iterations};
}

std::uint64_t count_disc_critical_points(const MultiPoly& f, std::span<const std::int64_t> residue,
                                         std::uint64_t p, unsigned k) {
  const std::size_t n = f.nvars();
  if (residue.size() != n) throw Error(Errc::ArityMismatch, "residue length differs from nvars");
  if (k < 1) throw Error(Errc::InvalidArgument, "precision must be at least 1");
  const ResidueRing ring(p, k);
  const std::uint64_t N = ring.modulus();
  const std::uint64_t lifts = grid_size(N / p, n, std::uint64_t{1} << 32);
  const auto grad = gradient(f);
  std::vector<std::uint64_t> y(n), x(n);
  std::uint64_t count = 0;
  for (std::uint64_t idx = 0; idx < lifts; ++idx) {
    decode_point(idx, N / p, y);
    for (std::size_t i = 0; i < n; ++i) x[i] = ring.add(ring.reduce(residue[i] % static_cast<std::int64_t>(p)), ring.mul(p, y[i]));
    bool critical = true;
    for (const auto& g : grad) {
      if (eval_mod(g, x, N) != 0) {
        critical = false;
        break;
      }
    }
    if (critical) ++count;
  }
  return count;
}

MorseNormalForm morse_normal_form(const MultiPoly& f, std::span<const std::int64_t> residue,
                                  const ResidueRing& ring) {
  MorseNormalForm nf{lift_critical_point(f, residue, ring), {}, {}};
  const std::size_t n = f.nvars();
  const std::uint64_t N = ring.modulus();
  const unsigned m = ring.m();
  // The quadratic part must survive even for m = 2.
  const TruncRing R(n, std::max(m, 3u), N);
  using Elem = TruncRing::Elem;

  // g(u) = f(c + u) in the truncated ring.
  std::vector<Elem> shifted(n);
  for (std::size_t i = 0; i < n; ++i) shifted[i] = R.add(R.constant(nf.cert.point[i].value()), R.variable(i));
  Elem g = R.zero();
  for (const auto& [e, coef] : f.terms()) {
    Elem term = R.constant(reduce_coeff(coef, N));
    for (std::size_t i = 0; i < n; ++i)
      for (std::uint32_t k = 0; k < e[i]; ++k) term = R.mul(term, shifted[i]);
    g = R.add(g, term);
  }

  // Symmetric H(u) with g(u) - g(0) = sum_{i,j} u_i u_j H_ij(u): each monomial
  // is split at its first two variable occurrences.
  const std::uint64_t inv2 = ring.inv(2);
  std::vector<std::vector<Elem>> H(n, std::vector<Elem>(n, R.zero()));
  for (std::size_t idx = 0; idx < R.size(); ++idx) {
    const std::uint64_t coef = g[idx];
    if (coef == 0) continue;
    const Exponent& e = R.monomial(idx);
    const unsigned deg = MultiPoly::total_degree(e);
    if (deg == 0) continue;
    if (deg == 1) throw Error(Errc::Internal, "linear term survived at a lifted critical point");
    Exponent rest = e;
    std::size_t i = 0;
    while (rest[i] == 0) ++i;
    --rest[i];
    std::size_t j = 0;
    while (rest[j] == 0) ++j;
    --rest[j];
    const auto slot = R.find(rest);
    if (!slot) throw Error(Errc::Internal, "truncated monomial lookup failed");
    if (i == j) {
      H[i][i][*slot] = (H[i][i][*slot] + coef) % N;
    } else {
      const std::uint64_t half = ring.mul(coef, inv2);
      H[i][j][*slot] = (H[i][j][*slot] + half) % N;
      H[j][i][*slot] = (H[j][i][*slot] + half) % N;
    }
  }

  std::vector<Elem> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = R.variable(i);
  auto at0 = [&](const Elem& e) { return e.empty() ? std::uint64_t{0} : e[0]; };
  auto swap_index = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap(w[a], w[b]);
    std::swap(H[a], H[b]);
    for (auto& row : H) std::swap(row[a], row[b]);
  };

  const std::size_t terms = m;  // z has no constant term, so z^m and beyond vanish
  const auto inv_c = inverse_coefficients(terms, N);
  const auto sqrt_c = sqrt_coefficients(terms, ring);

  for (std::size_t r = 0; r < n; ++r) {
    if (!ring.is_unit(at0(H[r][r]))) {
      std::optional<std::size_t> diag;
      for (std::size_t j = r + 1; j < n && !diag; ++j)
        if (ring.is_unit(at0(H[j][j]))) diag = j;
      if (diag) {
        swap_index(r, *diag);
      } else {
        std::optional<std::pair<std::size_t, std::size_t>> off;
        for (std::size_t i = r; i < n && !off; ++i)
          for (std::size_t j = i + 1; j < n && !off; ++j)
            if (ring.is_unit(at0(H[i][j]))) off = std::make_pair(i, j);
        if (!off) throw Error(Errc::DegenerateCritical, "no unit pivot in the remaining quadratic block");
        const auto [i, j] = *off;
        // w_j = w'_j + w'_i: H' = M^t H M with column i of M equal to e_i + e_j.
        const Elem corner = R.add(R.add(H[i][i], H[j][j]), R.scale(H[i][j], 2));
        for (std::size_t b = 0; b < n; ++b) {
          if (b == i) continue;
          H[i][b] = R.add(H[i][b], H[j][b]);
          H[b][i] = H[i][b];
        }
        H[i][i] = corner;
        w[j] = R.sub(w[j], w[i]);
        swap_index(r, i);
      }
    }

    const std::uint64_t a = at0(H[r][r]);
    const std::uint64_t a_inv = ring.inv(a);
    const Elem z = R.sub(R.scale(H[r][r], a_inv), R.constant(1));
    const Elem h_inv = R.scale(R.series(z, inv_c), a_inv);
    const Elem root = R.series(z, sqrt_c);

    Elem inner = w[r];
    std::vector<Elem> ratio(n);
    for (std::size_t i = r + 1; i < n; ++i) {
      ratio[i] = R.mul(H[i][r], h_inv);
      inner = R.add(inner, R.mul(w[i], ratio[i]));
    }
    nf.a.push_back(ring.elem(static_cast<std::int64_t>(a)));
    const MultiPoly t = R.to_poly(R.mul(root, inner));
    MultiPoly kept(n);
    for (const auto& [e, c] : t.terms())
      if (MultiPoly::total_degree(e) < m) kept.add_term(e, c);
    nf.transform.push_back(std::move(kept));
    for (std::size_t i = r + 1; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        H[i][j] = R.sub(H[i][j], R.mul(ratio[i], H[j][r]));
        H[j][i] = H[i][j];
      }
  }
  return nf;
}

std::uint64_t normal_form_residual(const MultiPoly& f, const MorseNormalForm& nf, std::span<const std::uint64_t> x) {
  const std::size_t n = f.nvars();
  if (x.size() != n) throw Error(Errc::ArityMismatch, "point length differs from nvars");
  const ResidueRing& ring = nf.cert.value.ring();
  const std::uint64_t N = ring.modulus();
  std::vector<std::uint64_t> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = ring.sub(x[i] % N, nf.cert.point[i].value());
  std::uint64_t r = ring.sub(eval_mod(f, x, N), nf.cert.value.value());
  for (std::size_t i = 0; i < nf.a.size(); ++i) {
    const std::uint64_t t = eval_mod(nf.transform[i], u, N);
    r = ring.sub(r, ring.mul(nf.a[i].value(), ring.mul(t, t)));
  }
  return r;
}

ChartPolynomial restrict_to_chart(const MultiPoly& f, const Chart& chart, const ResidueRing& ring) {
  const std::uint64_t N = ring.modulus();
  ChartPolynomial out;
  const std::size_t n = f.nvars();
  if (chart.kind == Chart::Kind::AffineSpace) {
    out.g = MultiPoly(n);
    for (const auto& [e, c] : f.terms()) out.g.add_term(e, static_cast<std::int64_t>(reduce_coeff(c, N)));
    return out;
  }
  if (chart.L.size() != n) throw Error(Errc::ArityMismatch, "hyperplane has the wrong number of coefficients");
  std::size_t j = n;
  if (chart.coordinate) {
    j = *chart.coordinate;
    if (j >= n) throw Error(Errc::InvalidArgument, "chart coordinate out of range");
    if (!ring.is_unit(chart.L[j] % N)) throw Error(Errc::NoUnitCoefficient, "chosen chart coefficient is not a unit");
  } else {
    for (std::size_t i = 0; i < n && j == n; ++i)
      if (ring.is_unit(chart.L[i] % N)) j = i;
    if (j == n) throw Error(Errc::NoUnitCoefficient, "L has no unit coefficient");
  }
  out.solved = j;
  const std::size_t d = n - 1;
  const std::uint64_t inv = ring.inv(chart.L[j] % N);
  out.offset = inv;

  // x_j = L_j^{-1} (1 - sum_{i != j} L_i y_i) as a polynomial in the free coordinates.
  ModTerms solved;
  add_into(solved, Exponent(d, 0), inv, N);
  for (std::size_t i = 0, k = 0; i < n; ++i) {
    if (i == j) continue;
    const std::uint64_t c = ring.neg(ring.mul(inv, chart.L[i] % N));
    out.coeffs.push_back(c);
    Exponent e(d, 0);
    e[k++] = 1;
    add_into(solved, e, c, N);
  }
  std::vector<ModTerms> powers{ModTerms{{Exponent(d, 0), 1 % N}}};
  ModTerms acc;
  for (const auto& [e, c] : f.terms()) {
    while (powers.size() <= e[j]) powers.push_back(mul_mod(powers.back(), solved, d, N));
    Exponent rest(d);
    for (std::size_t i = 0, k = 0; i < n; ++i)
      if (i != j) rest[k++] = e[i];
    const std::uint64_t cr = reduce_coeff(c, N);
    for (const auto& [pe, pc] : powers[e[j]]) {
      Exponent sum(d);
      for (std::size_t k = 0; k < d; ++k) sum[k] = rest[k] + pe[k];
      add_into(acc, sum, cr * pc % N, N);
    }
  }
  out.g = to_poly(acc, d);
  return out;
}

std::vector<ChartCriticalResidue> scan_critical_residues(const MultiPoly& g, std::uint64_t p) {
  const std::size_t d = g.nvars();
  std::vector<ChartCriticalResidue> out;
  if (d == 0) {
    ChartCriticalResidue only;
    only.unit_value = PolyGrid(g, p).table()[0] != 0;
    out.push_back(only);
    return out;
  }
  const auto values = PolyGrid(g, p).table();
  std::vector<std::vector<std::uint32_t>> partials;
  for (const auto& dg : gradient(g)) partials.push_back(PolyGrid(dg, p).table());
  const auto hess = hessian(g);
  std::vector<std::uint64_t> x(d);
  for (std::uint64_t idx = 0; idx < values.size(); ++idx) {
    bool critical = true;
    for (const auto& t : partials) {
      if (t[idx] != 0) {
        critical = false;
        break;
      }
    }
    if (!critical) continue;
    decode_point(idx, p, x);
    ChartCriticalResidue c;
    c.residue.assign(x.begin(), x.end());
    c.unit_value = values[idx] != 0;
    c.degenerate = diagonalize_symmetric(hessian_at(hess, x, p)).entries.size() < d;
    out.push_back(std::move(c));
  }
  return out;
}

SumValue critical_points_sum(const MultiPoly& f, const MultChar& chi, const Chart& chart) {
  const ResidueRing& ring = chi.ring();
  if (ring.m() < 2) throw Error(Errc::InvalidArgument, "critical_points_sum needs m >= 2");
  if (!is_primitive(chi)) throw Error(Errc::NotPrimitive, "critical_points_sum needs a primitive character");
  const std::uint64_t p = ring.p();
  const std::uint64_t N = ring.modulus();
  const ChartPolynomial cp = restrict_to_chart(f, chart, ring);
  const MultiPoly& g = cp.g;
  const std::size_t d = g.nvars();

  const Complex at = d > 0 ? alpha_tilde_mult(chi) : Complex{1.0, 0.0};
  Complex at_d{1.0, 0.0};
  for (std::size_t i = 0; i < d; ++i) at_d *= at;
  const SquareClass two_inv_d = power(legendre(2, p), static_cast<unsigned>(d));

  Complex total{0.0, 0.0};
  std::uint64_t scanned = 1;
  for (std::size_t i = 0; i < d; ++i) scanned *= p;
  for (const auto& c : scan_critical_residues(g, p)) {
    if (!c.unit_value) continue;
    if (c.degenerate) {
      throw Error(Errc::DegenerateCriticalFound, "degenerate critical residue " + describe(c.residue) +
                                                     " with unit value at p = " + std::to_string(p));
    }
    std::uint64_t fc;
    SquareClass h = SquareClass::Square;
    if (d == 0) {
      fc = PolyGrid(g, N).table()[0];
    } else {
      const CriticalPointCert cert = lift_critical_point(g, c.residue, ring);
      fc = cert.value.value();
      h = two_inv_d * cert.hess_disc;
    }
    const SquareClass cls = power(power(legendre(static_cast<std::int64_t>(fc), p), static_cast<unsigned>(d)) * h,
                                  ring.m());
    total += chi(fc) * static_cast<double>(sign(cls)) * at_d;
  }
  return {total, scanned, SumMethod::ClosedForm};
}

}  // namespace phvs

#include "phvs/charsums.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "phvs/error.hpp"
#include "phvs/grid.hpp"
#include "phvs/parallel.hpp"

namespace phvs {

namespace {

void require_same_ring(const ResidueRing& a, const ResidueRing& b, const char* what) {
  if (!(a == b)) throw Error(Errc::RingMismatch, std::string(what) + ": characters live on different rings");
}

void require_primitive(const MultChar& chi, const char* what) {
  if (!is_primitive(chi)) {
    throw Error(Errc::NotPrimitive, std::string(what) + ": character index " + std::to_string(chi.index()) +
                                        " is not primitive");
  }
}

void require_primitive(const AddChar& psi, const char* what) {
  if (!is_primitive(psi)) {
    throw Error(Errc::NotPrimitive, std::string(what) + ": additive twist " + std::to_string(psi.twist()) +
                                        " is not primitive");
  }
}

void require_arity(const MultiPoly& f, std::size_t len) {
  if (f.nvars() != len) {
    throw Error(Errc::ArityMismatch, "linear form has " + std::to_string(len) + " coefficients, f has " +
                                         std::to_string(f.nvars()) + " variables");
  }
}

struct ComplexAcc {
  Complex v{0.0, 0.0};
  ComplexAcc& operator+=(const ComplexAcc& o) {
    v += o.v;
    return *this;
  }
};

struct ValueCounts {
  std::vector<std::uint64_t> all;
  std::vector<std::uint64_t> kept;
  ValueCounts& operator+=(const ValueCounts& o) {
    if (all.empty()) {
      all = o.all;
      kept = o.kept;
      return *this;
    }
    for (std::size_t i = 0; i < all.size(); ++i) all[i] += o.all[i];
    for (std::size_t i = 0; i < kept.size(); ++i) kept[i] += o.kept[i];
    return *this;
  }
};

struct VectorAcc {
  std::vector<Complex> v;
  VectorAcc& operator+=(const VectorAcc& o) {
    if (v.empty()) {
      v = o.v;
    } else {
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    }
    return *this;
  }
};

/// Points of (Z/P)^n, P = p^t, at which every partial of f vanishes mod P.
std::vector<std::uint8_t> critical_mask(const MultiPoly& f, std::uint64_t P) {
  const std::size_t n = f.nvars();
  std::uint64_t size = 1;
  for (std::size_t i = 0; i < n; ++i) size *= P;
  std::vector<std::uint8_t> mask(size, 1);
  for (const auto& g : gradient(f)) {
    const auto values = PolyGrid(g, P).table();
    for (std::uint64_t i = 0; i < size; ++i)
      if (values[i] != 0) mask[i] = 0;
  }
  return mask;
}

/// Histogram of f over the grid and, when `filter_modulus` is nonzero, over
/// the points kept by the gradient filter.
ValueCounts value_counts(const MultiPoly& f, std::uint64_t modulus, std::uint64_t filter_modulus,
                         const SumOptions& opts) {
  const std::uint64_t total = grid_size(modulus, f.nvars(), opts.budget);
  const PolyGrid grid(f, modulus);
  const std::uint64_t len = grid.row_length();
  const std::size_t n = f.nvars();
  std::vector<std::uint8_t> mask;
  if (filter_modulus > 1) mask = critical_mask(f, filter_modulus);
  const std::uint64_t P = filter_modulus;

  return deterministic_sum<ValueCounts>(total, opts.threads, [&](std::uint64_t lo, std::uint64_t hi) {
    ValueCounts acc;
    acc.all.assign(modulus, 0);
    if (filter_modulus != 0) acc.kept.assign(modulus, 0);
    std::vector<std::uint32_t> row(len);
    std::vector<std::uint64_t> prefix(n > 0 ? n - 1 : 0);
    for (std::uint64_t r = lo / len; r * len < hi; ++r) {
      grid.row(r, row.data());
      const std::uint64_t start = std::max(lo, r * len) - r * len;
      const std::uint64_t stop = std::min(hi, (r + 1) * len) - r * len;
      for (std::uint64_t t = start; t < stop; ++t) ++acc.all[row[t]];
      if (filter_modulus == 0) continue;
      if (filter_modulus == 1 || n == 0) {
        for (std::uint64_t t = start; t < stop; ++t) ++acc.kept[row[t]];
        continue;
      }
      decode_point(r, modulus, prefix);
      std::uint64_t base = 0;
      for (const auto x : prefix) base = base * P + x % P;
      base *= P;
      std::uint64_t tm = start % P;
      for (std::uint64_t t = start; t < stop; ++t) {
        if (mask[base + tm]) ++acc.kept[row[t]];
        if (++tm == P) tm = 0;
      }
    }
    return acc;
  });
}

Complex combine(const std::vector<std::uint64_t>& counts, const MultChar& chi) {
  Complex total{0.0, 0.0};
  for (std::uint64_t a = 0; a < counts.size(); ++a)
    if (counts[a] != 0) total += static_cast<double>(counts[a]) * chi(a);
  return total;
}

Complex combine(const std::vector<std::uint64_t>& counts, const AddChar& psi) {
  Complex total{0.0, 0.0};
  for (std::uint64_t a = 0; a < counts.size(); ++a)
    if (counts[a] != 0) total += static_cast<double>(counts[a]) * psi(a);
  return total;
}

std::uint64_t filter_modulus(const ResidueRing& ring) {
  if (ring.m() < 2) throw Error(Errc::InvalidArgument, "the gradient filter needs m >= 2");
  const unsigned t = critical_threshold(ring.m());
  return t == 0 ? 1 : ring.p_power(t);
}

std::size_t pick_unit_coordinate(const ResidueRing& ring, std::span<const std::uint64_t> L,
                                 std::optional<std::size_t> coordinate) {
  if (coordinate) {
    if (*coordinate >= L.size()) throw Error(Errc::InvalidArgument, "chart coordinate out of range");
    if (!ring.is_unit(L[*coordinate])) {
      throw Error(Errc::NoUnitCoefficient, "coefficient " + std::to_string(*coordinate + 1) + " of L is not a unit");
    }
    return *coordinate;
  }
  for (std::size_t i = 0; i < L.size(); ++i)
    if (ring.is_unit(L[i])) return i;
  throw Error(Errc::NoUnitCoefficient, "L has no unit coefficient");
}

/// Sum of chi(f(x)) psi(L.x) without primitivity checks.
Complex raw_fourier(const MultiPoly& f, const MultChar& chi, const AddChar& psi, std::span<const std::uint64_t> L,
                    const SumOptions& opts) {
  const auto t = fiber_transform(f, psi, L, opts);
  Complex total{0.0, 0.0};
  for (std::uint64_t a = 0; a < t.size(); ++a) total += chi(a) * t[a];
  return total;
}

}  // namespace

std::string_view method_name(SumMethod m) noexcept {
  switch (m) {
    case SumMethod::BruteForce: return "BruteForce";
    case SumMethod::Filtered: return "Filtered";
    case SumMethod::ClosedForm: return "ClosedForm";
    case SumMethod::Factorized: return "Factorized";
    case SumMethod::CRTProduct: return "CRTProduct";
  }
  return "Unknown";
}

unsigned critical_threshold(unsigned m) noexcept { return m / 2; }

SumValue brute_sum(const MultiPoly& f, const MultChar& chi, const SumOptions& opts) {
  const auto& ring = chi.ring();
  const auto counts = value_counts(f, ring.modulus(), 0, opts);
  return {combine(counts.all, chi), grid_size(ring.modulus(), f.nvars(), opts.budget), SumMethod::BruteForce};
}

SumValue brute_sum_additive(const MultiPoly& f, const AddChar& psi, const SumOptions& opts) {
  const auto& ring = psi.ring();
  const auto counts = value_counts(f, ring.modulus(), 0, opts);
  return {combine(counts.all, psi), grid_size(ring.modulus(), f.nvars(), opts.budget), SumMethod::BruteForce};
}

SumValue filtered_sum(const MultiPoly& f, const MultChar& chi, const SumOptions& opts) {
  require_primitive(chi, "filtered_sum");
  const auto counts = value_counts(f, chi.ring().modulus(), filter_modulus(chi.ring()), opts);
  std::uint64_t kept = 0;
  for (const auto c : counts.kept) kept += c;
  return {combine(counts.kept, chi), kept, SumMethod::Filtered};
}

SumValue filtered_sum_additive(const MultiPoly& f, const AddChar& psi, const SumOptions& opts) {
  require_primitive(psi, "filtered_sum_additive");
  const auto counts = value_counts(f, psi.ring().modulus(), filter_modulus(psi.ring()), opts);
  std::uint64_t kept = 0;
  for (const auto c : counts.kept) kept += c;
  return {combine(counts.kept, psi), kept, SumMethod::Filtered};
}

FilterScan filter_scan(const MultiPoly& f, const MultChar& chi, const AddChar& psi, const SumOptions& opts) {
  require_same_ring(chi.ring(), psi.ring(), "filter_scan");
  require_primitive(chi, "filter_scan");
  require_primitive(psi, "filter_scan");
  const auto& ring = chi.ring();
  const auto counts = value_counts(f, ring.modulus(), filter_modulus(ring), opts);
  const std::uint64_t total = grid_size(ring.modulus(), f.nvars(), opts.budget);
  FilterScan out;
  for (const auto c : counts.kept) out.kept += c;
  out.brute_mult = {combine(counts.all, chi), total, SumMethod::BruteForce};
  out.filtered_mult = {combine(counts.kept, chi), out.kept, SumMethod::Filtered};
  out.brute_add = {combine(counts.all, psi), total, SumMethod::BruteForce};
  out.filtered_add = {combine(counts.kept, psi), out.kept, SumMethod::Filtered};
  return out;
}

SumValue quadratic_closed_form(std::span<const ResidueElem> a, const MultChar& chi) {
  if (a.empty()) throw Error(Errc::InvalidArgument, "quadratic_closed_form needs at least a0");
  const auto& ring = chi.ring();
  require_primitive(chi, "quadratic_closed_form");
  if (ring.m() < 2) throw Error(Errc::InvalidArgument, "quadratic_closed_form needs m >= 2");
  for (const auto& x : a) {
    if (!(x.ring() == ring)) throw Error(Errc::RingMismatch, "coefficient from another ring");
    if (!x.is_unit()) throw Error(Errc::NonUnit, "coefficient " + std::to_string(x.value()) + " is not a unit");
  }
  const std::size_t n = a.size() - 1;
  ResidueElem prod = a[0].pow(n);
  for (std::size_t i = 1; i < a.size(); ++i) prod *= a[i];
  const int leg = sign(power(legendre(static_cast<std::int64_t>(prod.value()), ring.p()), ring.m()));
  const Complex at = alpha_tilde_mult(chi);
  Complex value = chi(a[0]) * static_cast<double>(leg);
  for (std::size_t i = 0; i < n; ++i) value *= at;
  return {value, 0, SumMethod::ClosedForm};
}

std::vector<Complex> fiber_transform(const MultiPoly& f, const AddChar& psi, std::span<const std::uint64_t> L,
                                     const SumOptions& opts) {
  require_arity(f, L.size());
  const auto& ring = psi.ring();
  const std::uint64_t N = ring.modulus();
  const std::uint64_t total = grid_size(N, f.nvars(), opts.budget);
  const std::size_t n = f.nvars();
  // Twist folded into L.
  std::vector<std::uint64_t> lt(n);
  for (std::size_t i = 0; i < n; ++i) lt[i] = ring.mul(L[i] % N, psi.twist());
  const auto& roots = psi.tables().additive_roots();
  const PolyGrid grid(f, N);
  const std::uint64_t len = grid.row_length();

  auto result = deterministic_sum<VectorAcc>(total, opts.threads, [&](std::uint64_t lo, std::uint64_t hi) {
    VectorAcc acc;
    acc.v.assign(N, Complex{0.0, 0.0});
    std::vector<std::uint32_t> row(len);
    std::vector<std::uint64_t> prefix(n > 0 ? n - 1 : 0);
    for (std::uint64_t r = lo / len; r * len < hi; ++r) {
      grid.row(r, row.data());
      const std::uint64_t start = std::max(lo, r * len) - r * len;
      const std::uint64_t stop = std::min(hi, (r + 1) * len) - r * len;
      if (n == 0) {
        acc.v[row[0]] += roots[0];
        continue;
      }
      decode_point(r, N, prefix);
      std::uint64_t l = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) l = (l + lt[i] * prefix[i]) % N;
      const std::uint64_t step = lt[n - 1];
      l = (l + step * start) % N;
      for (std::uint64_t t = start; t < stop; ++t) {
        acc.v[row[t]] += roots[l];
        l += step;
        if (l >= N) l -= N;
      }
    }
    return acc;
  });
  if (result.v.empty()) result.v.assign(N, Complex{0.0, 0.0});
  return std::move(result.v);
}

std::vector<Complex> all_character_sums(const CharacterTables& tables, std::span<const Complex> t) {
  const std::uint64_t phi = tables.unit_count();
  if (t.size() != tables.ring().modulus()) throw Error(Errc::ArityMismatch, "table length differs from p^m");

  static std::mutex plan_mutex;
  static std::map<std::uint64_t, fftw_plan> plans;

  auto* in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * phi));
  auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * phi));
  if (in == nullptr || out == nullptr) {
    fftw_free(in);
    fftw_free(out);
    throw std::bad_alloc();
  }
  fftw_plan plan;
  {
    const std::lock_guard lock(plan_mutex);
    auto it = plans.find(phi);
    if (it == plans.end()) {
      plan = fftw_plan_dft_1d(static_cast<int>(phi), in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
      plans.emplace(phi, plan);
    } else {
      plan = it->second;
    }
  }
  // Index the unit group by discrete log: chi_k(g^e) = exp(2 pi i k e / phi),
  // which is exactly the backward transform.
  for (std::uint64_t e = 0; e < phi; ++e) {
    const Complex v = t[tables.exp(e)];
    in[e][0] = v.real();
    in[e][1] = v.imag();
  }
  fftw_execute_dft(plan, in, out);
  std::vector<Complex> result(phi);
  for (std::uint64_t k = 0; k < phi; ++k) result[k] = {out[k][0], out[k][1]};
  fftw_free(in);
  fftw_free(out);
  return result;
}

SumValue fourier_sum(const MultiPoly& f, const MultChar& chi, const AddChar& psi, std::span<const std::uint64_t> L,
                     const SumOptions& opts) {
  require_same_ring(chi.ring(), psi.ring(), "fourier_sum");
  require_primitive(chi, "fourier_sum");
  require_primitive(psi, "fourier_sum");
  const Complex v = raw_fourier(f, chi, psi, L, opts);
  return {v, grid_size(chi.ring().modulus(), f.nvars(), opts.budget), SumMethod::BruteForce};
}

Complex twisted_gauss_sum(const MultChar& chi, unsigned d, const AddChar& psi) {
  require_same_ring(chi.ring(), psi.ring(), "twisted_gauss_sum");
  const MultChar chid = chi.pow(d);
  Complex total{0.0, 0.0};
  for (std::uint64_t y = 0; y < chi.ring().modulus(); ++y) total += chid(y) * psi(y);
  return total;
}

SumValue hyperplane_sum(const MultiPoly& f, const MultChar& chi, std::span<const std::uint64_t> L,
                        std::optional<std::size_t> coordinate, const SumOptions& opts) {
  require_arity(f, L.size());
  const auto& ring = chi.ring();
  const std::uint64_t N = ring.modulus();
  const std::size_t n = f.nvars();
  if (n == 0) throw Error(Errc::InvalidArgument, "hyperplane_sum needs at least one variable");
  const std::size_t j = pick_unit_coordinate(ring, L, coordinate);
  const std::uint64_t inv_lj = ring.inv(L[j] % N);
  const std::uint64_t total = grid_size(N, n - 1, opts.budget);

  const auto acc = deterministic_sum<ComplexAcc>(total, opts.threads, [&](std::uint64_t lo, std::uint64_t hi) {
    ComplexAcc part;
    std::vector<std::uint64_t> free(n - 1);
    std::vector<std::uint64_t> x(n);
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      decode_point(idx, N, free);
      std::uint64_t rest = 0;
      for (std::size_t i = 0, k = 0; i < n; ++i) {
        if (i == j) continue;
        x[i] = free[k++];
        rest = ring.add(rest, ring.mul(L[i] % N, x[i]));
      }
      x[j] = ring.mul(inv_lj, ring.sub(1, rest));
      part.v += chi(eval_mod(f, x, N));
    }
    return part;
  });
  return {acc.v, total, SumMethod::BruteForce};
}

Factorization factorize_homogeneous(const MultiPoly& f, const MultChar& chi, const AddChar& psi,
                                    std::span<const std::uint64_t> L, const SumOptions& opts) {
  require_same_ring(chi.ring(), psi.ring(), "factorize_homogeneous");
  require_primitive(chi, "factorize_homogeneous");
  require_primitive(psi, "factorize_homogeneous");
  require_arity(f, L.size());
  const auto d = f.homogeneous_degree();
  if (!d) throw Error(Errc::InvalidArgument, "factorize_homogeneous needs a homogeneous polynomial");
  const auto& ring = chi.ring();
  if (*d % ring.p() == 0) {
    throw Error(Errc::DegreeDivisible, "p = " + std::to_string(ring.p()) + " divides the degree " + std::to_string(*d));
  }

  Factorization out;
  out.k = ring.m();
  for (const auto c : L) out.k = std::min(out.k, ring.valuation(c % ring.modulus()));
  if (out.k != 0) {
    out.product = {Complex{0.0, 0.0}, 0, SumMethod::Factorized};
    return out;
  }
  out.gauss_like = twisted_gauss_sum(chi, *d, psi);
  const SumValue h = hyperplane_sum(f, chi, L, std::nullopt, opts);
  out.hyperplane = h.value;
  out.product = {out.gauss_like * out.hyperplane, h.terms_counted + ring.modulus(), SumMethod::Factorized};
  return out;
}

ParsevalResult parseval_check(const MultiPoly& f, const MultChar& chi, const AddChar& psi, const SumOptions& opts) {
  require_same_ring(chi.ring(), psi.ring(), "parseval_check");
  require_primitive(psi, "parseval_check");
  const auto& ring = chi.ring();
  const std::uint64_t N = ring.modulus();
  const std::size_t n = f.nvars();
  const std::uint64_t points = grid_size(N, n, opts.budget);
  grid_size(N, 2 * n, opts.budget);

  ParsevalResult out;
  const auto counts = value_counts(f, N, 0, opts);
  for (std::uint64_t a = 0; a < N; ++a)
    if (ring.is_unit(a)) out.n1 += counts.all[a];
  out.rhs = static_cast<double>(points) * static_cast<double>(out.n1);

  std::vector<double> norms(points);
  SumOptions inner = opts;
  inner.threads = 1;
  parallel_for(points, opts.threads, [&](std::uint64_t idx) {
    std::vector<std::uint64_t> L(n);
    decode_point(idx, N, L);
    norms[idx] = std::norm(raw_fourier(f, chi, psi, L, inner));
  });
  for (const double v : norms) out.lhs += v;
  return out;
}

CompositeChar::CompositeChar(const std::vector<Local>& locals) {
  if (locals.empty()) throw Error(Errc::InvalidArgument, "composite character needs at least one prime");
  for (const auto& loc : locals) {
    if (loc.p == 2) throw Error(Errc::EvenModulus, "composite modulus must be odd");
    for (const auto& c : chis_)
      if (c.ring().p() == loc.p) throw Error(Errc::InvalidArgument, "repeated prime " + std::to_string(loc.p));
    const ResidueRing ring(loc.p, loc.m);
    MultChar chi(ring, loc.chi_index);
    AddChar psi(ring, loc.psi_twist);
    require_primitive(chi, "CompositeChar");
    require_primitive(psi, "CompositeChar");
    if (modulus_ > ResidueRing::kMaxModulus / ring.modulus()) throw Error(Errc::Overflow, "composite modulus too large");
    modulus_ *= ring.modulus();
    chis_.push_back(std::move(chi));
    psis_.push_back(std::move(psi));
  }
}

CompositeChar CompositeChar::with_defaults(std::uint64_t modulus) {
  if (modulus < 3) throw Error(Errc::InvalidArgument, "composite modulus must exceed 2");
  if (modulus % 2 == 0) throw Error(Errc::EvenModulus, "composite modulus " + std::to_string(modulus) + " is even");
  std::vector<Local> locals;
  std::uint64_t rest = modulus;
  for (const auto p : prime_factors(modulus)) {
    unsigned m = 0;
    while (rest % p == 0) {
      rest /= p;
      ++m;
    }
    locals.push_back({p, m, 1, 1});
  }
  return CompositeChar(locals);
}

Complex CompositeChar::chi(std::uint64_t x) const {
  Complex v{1.0, 0.0};
  for (const auto& c : chis_) v *= c(x);
  return v;
}

Complex CompositeChar::psi(std::uint64_t x) const {
  Complex v{1.0, 0.0};
  for (const auto& c : psis_) v *= c(x);
  return v;
}

CrtResult crt_composite_sum(const MultiPoly& f, const CompositeChar& g, std::span<const std::uint64_t> L,
                            const SumOptions& opts) {
  require_arity(f, L.size());
  const std::uint64_t N = g.modulus();
  if (N % 2 == 0) throw Error(Errc::EvenModulus, "composite modulus must be odd");
  const std::size_t n = f.nvars();
  const std::uint64_t total = grid_size(N, n, opts.budget);

  // Character values mod N, tabulated once.
  std::vector<Complex> chi_table(N), psi_table(N);
  for (std::uint64_t a = 0; a < N; ++a) {
    chi_table[a] = g.chi(a);
    psi_table[a] = g.psi(a);
  }
  const PolyGrid grid(f, N);
  const std::uint64_t len = grid.row_length();
  const auto acc = deterministic_sum<ComplexAcc>(total, opts.threads, [&](std::uint64_t lo, std::uint64_t hi) {
    ComplexAcc part;
    std::vector<std::uint32_t> row(len);
    std::vector<std::uint64_t> prefix(n > 0 ? n - 1 : 0);
    for (std::uint64_t r = lo / len; r * len < hi; ++r) {
      grid.row(r, row.data());
      const std::uint64_t start = std::max(lo, r * len) - r * len;
      const std::uint64_t stop = std::min(hi, (r + 1) * len) - r * len;
      if (n == 0) {
        part.v += chi_table[row[0]];
        continue;
      }
      decode_point(r, N, prefix);
      std::uint64_t l = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) l = (l + L[i] % N * prefix[i]) % N;
      const std::uint64_t step = L[n - 1] % N;
      l = (l + step * start) % N;
      for (std::uint64_t t = start; t < stop; ++t) {
        part.v += chi_table[row[t]] * psi_table[l];
        l += step;
        if (l >= N) l -= N;
      }
    }
    return part;
  });

  CrtResult out;
  out.direct = {acc.v, total, SumMethod::BruteForce};
  Complex prod{1.0, 0.0};
  std::uint64_t terms = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& chi = g.local_chi(i);
    const std::uint64_t q = chi.ring().modulus();
    std::vector<std::uint64_t> local_L(n);
    for (std::size_t j = 0; j < n; ++j) local_L[j] = L[j] % q;
    prod *= raw_fourier(f, chi, g.local_psi(i), local_L, opts);
    terms += grid_size(q, n, opts.budget);
  }
  out.product = {prod, terms, SumMethod::CRTProduct};
  return out;
}

}  // namespace phvs

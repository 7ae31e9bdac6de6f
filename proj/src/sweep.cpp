#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <random>

#include "phvs/error.hpp"
#include "phvs/grid.hpp"
#include "phvs/parallel.hpp"
#include "phvs/verifier.hpp"

namespace phvs {

namespace {

constexpr std::uint64_t kSweepGridLimit = std::uint64_t{1} << 26;

struct OrbitStats {
  std::uint64_t pairs = 0;
  std::uint64_t match = 0;
  std::uint64_t vanish_match = 0;
  std::uint64_t mismatch = 0;
  std::uint64_t skipped = 0;
  std::uint64_t explicit_points = 0;
  double max_err2 = 0;
  double max_vanish = 0;
  double max_sin_phase = 0;
  double max_magnitude_dev = 0;

  void merge(const OrbitStats& o) {
    pairs += o.pairs;
    match += o.match;
    vanish_match += o.vanish_match;
    mismatch += o.mismatch;
    skipped += o.skipped;
    explicit_points += o.explicit_points;
    max_err2 = std::max(max_err2, o.max_err2);
    max_vanish = std::max(max_vanish, o.max_vanish);
    max_sin_phase = std::max(max_sin_phase, o.max_sin_phase);
    max_magnitude_dev = std::max(max_magnitude_dev, o.max_magnitude_dev);
  }
};

std::uint64_t encode_point(std::span<const std::uint64_t> x, std::uint64_t N) {
  std::uint64_t idx = 0;
  for (const auto v : x) idx = idx * N + v;
  return idx;
}

/// T_L(a) = sum over f(x) = a of psi(L.x), from a precomputed value table.
/// With real_only the imaginary parts are skipped: for even degree x and -x
/// land in the same fiber with conjugate phases, so T_L is real.
template <bool real_only>
void fiber_from_table(std::span<const std::uint32_t> values, std::span<const std::uint64_t> L, std::uint64_t N,
                      const std::vector<Complex>& roots, const std::vector<double>& cosines, std::vector<Complex>& t,
                      std::vector<double>& re) {
  std::fill(t.begin(), t.end(), Complex{0.0, 0.0});
  std::fill(re.begin(), re.end(), 0.0);
  const std::size_t n = L.size();
  const std::uint64_t rows = values.size() / N;
  std::vector<std::uint64_t> prefix(n - 1, 0);
  const std::uint64_t step = L[n - 1];
  std::uint64_t base = 0;
  for (std::uint64_t r = 0; r < rows; ++r) {
    const std::uint32_t* row = values.data() + r * N;
    std::uint64_t l = base;
    for (std::uint64_t x = 0; x < N; ++x) {
      if constexpr (real_only)
        re[row[x]] += cosines[l];
      else
        t[row[x]] += roots[l];
      l += step;
      if (l >= N) l -= N;
    }
    // Advance the prefix odometer; a wrap adds N * L[i], which is 0 mod N.
    for (std::size_t i = n - 1; i-- > 0;) {
      base += L[i];
      if (base >= N) base -= N;
      if (++prefix[i] < N) break;
      prefix[i] = 0;
    }
  }
  if constexpr (real_only)
    for (std::uint64_t a = 0; a < N; ++a) t[a] = {re[a], 0.0};
}

}  // namespace

SweepSummary sweep_all(const PvsInstance& inst, const SweepConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (config.m < 2) throw Error(Errc::InvalidArgument, "the sweep needs m >= 2");
  const ResidueRing ring(config.p, config.m);
  const std::uint64_t N = ring.modulus();
  const std::uint64_t p = ring.p();
  const std::uint64_t phi = ring.unit_count();
  const std::size_t n = inst.n;
  if (n == 0) throw Error(Errc::InvalidArgument, "the sweep needs at least one variable");
  const unsigned d = inst.d;
  const auto tables = CharacterTables::get(ring);
  const AddChar psi(tables, config.psi_twist);
  if (!is_primitive(psi)) throw Error(Errc::NotPrimitive, "psi must be primitive");

  SweepSummary sum;
  sum.instance = inst.name;
  sum.p = p;
  sum.m = config.m;
  sum.n = n;
  const auto prim = primitive_indices(ring);
  sum.chars = prim.size();
  sum.L_count = grid_size(N, n, kSweepGridLimit);

  const BadPrimeReport bad = bad_prime_report(inst, p);
  sum.bad_prime = bad.bad;
  if (bad.bad) {
    sum.skipped = sum.L_count * sum.chars;
    sum.pairs = sum.skipped;
    sum.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return sum;
  }

  const ClosedFormEvaluator ev(inst, ring, psi);
  const double scale = ev.scale();
  const double tol_abs = config.tol * scale;
  const double tol2 = tol_abs * tol_abs;
  const std::uint64_t base_log = ev.base_log();
  const std::uint64_t g = tables->generator();

  // A_k = scale * G_d / q^{m/2} * alpha^{n-1}, the L-independent part of the closed form.
  std::vector<Complex> A(phi, Complex{0.0, 0.0});
  std::vector<char> primitive(phi, 0);
  for (const auto k : prim) {
    primitive[k] = 1;
    A[k] = ev.char_data(MultChar(tables, k)).prefactor;
  }

  const std::vector<std::uint32_t> f_values = PolyGrid(inst.f, N).table();
  const std::vector<std::uint32_t> dual_values = PolyGrid(inst.f_dual, N).table();
  std::vector<Complex> roots = tables->additive_roots();
  if (psi.twist() != 1) {
    for (std::uint64_t j = 0; j < N; ++j) roots[j] = tables->additive_root(ring.mul(j, psi.twist()));
  }
  std::vector<double> cosines(N);
  for (std::uint64_t j = 0; j < N; ++j) cosines[j] = roots[j].real();
  const auto& unit_roots = tables->unit_roots();

  // Orbits of L under scaling by units; the representative is the smallest index.
  std::vector<std::uint64_t> reps;
  {
    std::vector<bool> visited(sum.L_count, false);
    std::vector<std::uint64_t> L(n), M(n);
    for (std::uint64_t idx = 0; idx < sum.L_count; ++idx) {
      if (visited[idx]) continue;
      reps.push_back(idx);
      decode_point(idx, N, L);
      M = L;
      for (std::uint64_t e = 0; e < phi; ++e) {
        visited[encode_point(M, N)] = true;
        for (std::size_t i = 0; i < n; ++i) M[i] = ring.mul(M[i], g);
      }
    }
  }
  sum.orbits = reps.size();

  std::vector<OrbitStats> stats(reps.size());
  parallel_for(reps.size(), config.threads, [&](std::uint64_t ri) {
    OrbitStats& st = stats[ri];
    std::vector<std::uint64_t> L(n), M(n);
    decode_point(reps[ri], N, L);
    std::vector<Complex> t(N);
    std::vector<double> re(N);
    if (d % 2 == 0)
      fiber_from_table<true>(f_values, L, N, roots, cosines, t, re);
    else
      fiber_from_table<false>(f_values, L, N, roots, cosines, t, re);
    const std::vector<Complex> S = all_character_sums(*tables, t);

    const std::uint64_t fv = dual_values[reps[ri]];
    const bool vanishing = !ring.is_unit(fv);
    std::vector<double> inv_mag(phi, 0.0);
    std::uint64_t vanish_ok = 0;
    for (std::uint64_t k = 0; k < phi; ++k) {
      if (!primitive[k]) continue;
      const double mag = std::abs(S[k]);
      if (vanishing) {
        st.max_vanish = std::max(st.max_vanish, mag / scale);
        if (mag <= tol_abs) ++vanish_ok;
      } else {
        st.max_magnitude_dev = std::max(st.max_magnitude_dev, std::abs(mag / scale - 1.0));
        inv_mag[k] = mag > 0 ? 1.0 / (mag * std::abs(A[k])) : 0.0;
      }
    }

    // Explicit comparison at L' = g^e L for every primitive chi; returns the mismatch count.
    auto compare = [&](std::uint64_t e, std::uint64_t lc, double kappa) {
      std::uint64_t mism = 0;
      // chi_k(g^e)^{-d} = root[-d k e]
      const std::uint64_t back = (phi - (static_cast<std::uint64_t>(d) * e) % phi) % phi;
      std::uint64_t i_back = 0;
      std::uint64_t i_arg = 0;
      for (std::uint64_t k = 0; k < phi; ++k) {
        const std::uint64_t ib = i_back;
        const std::uint64_t ia = i_arg;
        i_back += back;
        if (i_back >= phi) i_back -= phi;
        i_arg += lc;
        if (i_arg >= phi) i_arg -= phi;
        if (!primitive[k]) continue;
        const double ur = unit_roots[ib].real(), ui = unit_roots[ib].imag();
        const double br = S[k].real() * ur - S[k].imag() * ui;
        const double bi = S[k].real() * ui + S[k].imag() * ur;
        const double vr = unit_roots[ia].real() * kappa, vi = unit_roots[ia].imag() * kappa;
        const double cr = A[k].real() * vr - A[k].imag() * vi;
        const double ci = A[k].real() * vi + A[k].imag() * vr;
        const double er = br - cr, ei = bi - ci;
        const double err2 = er * er + ei * ei;
        st.max_err2 = std::max(st.max_err2, err2);
        if (err2 > tol2) {
          ++mism;
          continue;
        }
        // brute * conj(closed)
        const double xr = br * cr + bi * ci;
        const double xi = bi * cr - br * ci;
        const double s = xr > 0 ? std::abs(xi) * inv_mag[k] : 1.0;
        st.max_sin_phase = std::max(st.max_sin_phase, s);
      }
      return mism;
    };
    bool have_rep = false;
    double rep_kappa = 0;
    std::uint64_t rep_lc = 0;
    std::uint64_t rep_mism = 0;

    // The orbit is g^e L for e below the orbit size; the walk stops on returning to L.
    M = L;
    for (std::uint64_t e = 0; e < phi; ++e) {
      if (e > 0)
        for (std::size_t i = 0; i < n; ++i) M[i] = ring.mul(M[i], g);
      const std::uint64_t idx = encode_point(M, N);
      if (e > 0 && idx == reps[ri]) break;
      const std::uint64_t count = prim.size();
      st.pairs += count;

      if (vanishing) {
        // Transport by a root of unity leaves |S| unchanged.
        st.vanish_match += vanish_ok;
        st.mismatch += count - vanish_ok;
        continue;
      }
      double kappa = 0;
      try {
        kappa = ev.kappa(M);
      } catch (const Error& err) {
        if (err.code() != Errc::SingularHessian) throw;
        st.skipped += count;
        continue;
      }
      const std::uint64_t fvm = dual_values[idx];
      const std::uint64_t lc = (base_log + phi - static_cast<std::uint64_t>(tables->log(fvm))) % phi;
      const std::uint64_t de = static_cast<std::uint64_t>(d) * e % phi;
      std::uint64_t mism = 0;
      if (e > 0 && have_rep && kappa == rep_kappa && (lc + de) % phi == rep_lc) {
        // closed(L', k) = closed(L, k) chi_k(g^e)^{-d} with the same root-of-unity
        // factor as the transported brute value, so every chi agrees as at L.
        mism = rep_mism;
      } else {
        mism = compare(e, lc, kappa);
        ++st.explicit_points;
        if (e == 0) {
          have_rep = true;
          rep_kappa = kappa;
          rep_lc = lc;
          rep_mism = mism;
        }
      }
      st.mismatch += mism;
      st.match += count - mism;
    }
  });

  OrbitStats total;
  for (const auto& s : stats) total.merge(s);
  sum.pairs = total.pairs;
  sum.match = total.match;
  sum.vanish_match = total.vanish_match;
  sum.mismatch = total.mismatch;
  sum.skipped = total.skipped;
  sum.explicit_points = total.explicit_points;
  sum.max_err = std::sqrt(total.max_err2) / scale;
  sum.max_vanish = total.max_vanish;
  sum.max_phase_residual = std::asin(std::min(1.0, total.max_sin_phase));
  sum.max_magnitude_dev = total.max_magnitude_dev;

  // Recompute S(L) from scratch at random L and compare with the closed form.
  std::mt19937_64 rng(config.seed);
  SumOptions opts;
  opts.threads = 1;
  opts.budget = kSweepGridLimit;
  for (unsigned c = 0; c < config.crosschecks; ++c) {
    std::vector<std::uint64_t> L(n);
    for (auto& v : L) v = rng() % N;
    const auto t = fiber_transform(inst.f, psi, L, opts);
    const auto S = all_character_sums(*tables, t);
    for (const auto k : prim) {
      const MultChar chi(tables, k);
      ClosedForm cf;
      try {
        cf = ev.evaluate(chi, L);
      } catch (const Error& err) {
        if (err.code() != Errc::SingularHessian) throw;
        continue;
      }
      const Complex predicted =
          std::holds_alternative<Vanishing>(cf) ? Complex{0.0, 0.0} : std::get<ClosedFormResult>(cf).value;
      sum.crosscheck_max_err = std::max(sum.crosscheck_max_err, std::abs(S[k] - predicted) / scale);
    }
    ++sum.crosscheck_points;
  }

  sum.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return sum;
}

}  // namespace phvs

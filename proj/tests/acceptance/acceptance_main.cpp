// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "phvs/catalogue.hpp"
#include "phvs/characters.hpp"
#include "phvs/charsums.hpp"
#include "phvs/error.hpp"
#include "phvs/morse.hpp"
#include "phvs/report.hpp"
#include "phvs/verifier.hpp"

using namespace phvs;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Shared between criteria 2, 3 and 10.
struct LargeRun {
  std::string name;
  std::uint64_t p;
  VerifyReport report;
  std::string json;
};

std::vector<LargeRun> run_large(bool keep_json) {
  std::vector<LargeRun> out;
  for (const char* name : {"quadric-2", "quadric-3", "det2"})
    for (const std::uint64_t p : {3u, 5u}) {
      VerifyConfig cfg;
      cfg.p = p;
      cfg.m = 2;
      cfg.L = LPolicy::parse("sample:50");
      cfg.chi = ChiPolicy::parse("sample:8");
      LargeRun r{name, p, verify_instance(builtin_instance(name), cfg), {}};
      if (keep_json) r.json = to_json(r.report, false);
      out.push_back(std::move(r));
    }
  return out;
}

std::vector<SweepSummary> sweeps;
std::vector<LargeRun> large;

Outcome criterion1() {
  const auto t0 = Clock::now();
  Outcome o;
  std::uint64_t pairs = 0;
  double max_err = 0, max_vanish = 0, max_cross = 0;
  for (const char* name : {"linear", "square", "hyperbola"})
    for (const std::uint64_t p : {5u, 7u, 13u})
      for (const unsigned m : {2u, 3u}) {
        SweepConfig cfg;
        cfg.p = p;
        cfg.m = m;
        const SweepSummary s = sweep_all(builtin_instance(name), cfg);
        pairs += s.pairs;
        max_err = std::max(max_err, s.max_err);
        max_vanish = std::max(max_vanish, s.max_vanish);
        max_cross = std::max(max_cross, s.crosscheck_max_err);
        const bool ok = s.mismatch == 0 && s.skipped == 0 && !s.bad_prime && s.match + s.vanish_match == s.pairs &&
                        s.pairs == s.L_count * s.chars && s.max_err <= 1e-9 && s.max_vanish <= 1e-9 &&
                        s.crosscheck_max_err <= 1e-9;
        if (!ok) {
          o.pass = false;
          o.detail += std::string(" [") + name + " p=" + std::to_string(p) + " m=" + std::to_string(m) +
                      " mismatch=" + std::to_string(s.mismatch) + " skipped=" + std::to_string(s.skipped) + "]";
        }
        sweeps.push_back(s);
      }
  const double secs = seconds_since(t0);
  if (secs > 120) o.pass = false;
  o.detail = std::to_string(pairs) + " (chi, L) pairs over 18 configurations, max |err|/q^{mn/2} = " + fmt(max_err) +
             ", max vanishing |S|/q^{mn/2} = " + fmt(max_vanish) + ", direct re-enumeration max err = " +
             fmt(max_cross) + ", " + fmt(secs) + " s" + o.detail;
  return o;
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  large = run_large(true);
  Outcome o;
  std::size_t records = 0, match = 0, vanish = 0;
  for (const auto& r : large) {
    records += r.report.records.size();
    match += r.report.count(Status::Match);
    vanish += r.report.count(Status::VanishMatch);
    const bool clean = !r.report.has_mismatch() && r.report.count(Status::SkippedBadPrime) == 0;
    const bool flagged = r.p == 3 && (r.report.candidate_bad_prime || r.report.bad_prime);
    if (!clean && !flagged) {
      o.pass = false;
      o.detail += " [" + r.name + " p=" + std::to_string(r.p) + " has unflagged failures]";
    } else if (!clean) {
      o.detail += " [" + r.name + " p=3 reported as candidate bad prime]";
    }
    if (r.report.records.size() != 50 * r.report.chis.size()) o.pass = false;
  }
  const double secs = seconds_since(t0);
  if (secs > 600) o.pass = false;
  o.detail = std::to_string(records) + " records over 6 configurations, " + std::to_string(match) + " MATCH, " +
             std::to_string(vanish) + " VANISH_MATCH, " + fmt(secs) + " s" + o.detail;
  return o;
}

Outcome criterion3() {
  Outcome o;
  double worst = 0;
  for (const auto& s : sweeps) worst = std::max(worst, s.max_phase_residual);
  std::size_t checked = 0;
  for (const auto& r : large)
    for (const auto& rec : r.report.records) {
      if (rec.status != Status::Match) continue;
      ++checked;
      worst = std::max(worst, rec.phase_residual);
      const bool kappa_ok = rec.kappa == 1 || rec.kappa == -1;
      const bool alpha_ok = (std::abs(rec.alpha.real()) == 1.0 && rec.alpha.imag() == 0.0) ||
                            (rec.alpha.real() == 0.0 && std::abs(rec.alpha.imag()) == 1.0);
      if (!kappa_ok || !alpha_ok) o.pass = false;
    }
  if (worst > 1e-8) o.pass = false;
  o.detail = "max phase residual " + fmt(worst) + " rad over all sweep MATCH pairs and " + std::to_string(checked) +
             " sampled MATCH records; kappa in {+1,-1}, alpha a fourth root of unity";
  return o;
}

MultiPoly random_poly(std::mt19937_64& rng, std::size_t n) {
  MultiPoly f(n);
  const int terms = 1 + static_cast<int>(rng() % 6);
  for (int t = 0; t < terms; ++t) {
    Exponent e(n, 0);
    const unsigned deg = static_cast<unsigned>(rng() % 5);
    for (unsigned k = 0; k < deg; ++k) ++e[rng() % n];
    const std::int64_t c = static_cast<std::int64_t>(rng() % 19) - 9;
    f.add_term(e, c);
  }
  return f;
}

Outcome criterion4() {
  const auto t0 = Clock::now();
  Outcome o;
  std::mt19937_64 rng(4);
  const std::pair<std::uint64_t, unsigned> configs[] = {{5, 2}, {5, 3}, {7, 2}, {7, 3}};
  double worst = 0;
  std::uint64_t kept = 0, total = 0;
  for (int i = 0; i < 100; ++i) {
    const auto [p, m] = configs[i % 4];
    const std::size_t n = 1 + static_cast<std::size_t>((i / 4) % 3);
    const MultiPoly f = random_poly(rng, n);
    const ResidueRing ring(p, m);
    const auto prim = primitive_indices(ring);
    const MultChar chi(ring, prim[rng() % prim.size()]);
    std::uint64_t t = 0;
    while (t % p == 0) t = rng() % ring.modulus();
    const AddChar psi(ring, t);
    const auto scan = filter_scan(f, chi, psi);
    const double scale = std::pow(static_cast<double>(p), m * static_cast<double>(n) / 2.0);
    const double e1 = std::abs(scan.brute_mult.value - scan.filtered_mult.value) / scale;
    const double e2 = std::abs(scan.brute_add.value - scan.filtered_add.value) / scale;
    worst = std::max({worst, e1, e2});
    kept += scan.kept;
    total += scan.brute_mult.terms_counted;
  }
  const double secs = seconds_since(t0);
  o.pass = worst <= 1e-9 && secs <= 120;
  o.detail = "100 polynomials, multiplicative and additive, max |brute - filtered|/q^{mn/2} = " + fmt(worst) +
             ", filter kept " + std::to_string(kept) + " of " + std::to_string(total) + " points, " + fmt(secs) + " s";
  return o;
}

Outcome criterion5() {
  Outcome o;
  double worst = 0;
  std::size_t chars = 0;
  for (const std::uint64_t p : {5u, 7u, 13u})
    for (const unsigned m : {2u, 3u, 4u}) {
      const ResidueRing ring(p, m);
      const double scale = std::pow(static_cast<double>(p), m / 2.0);
      for (const auto k : primitive_indices(ring)) {
        const MultChar chi(ring, k);
        Complex brute{0.0, 0.0};
        for (std::uint64_t x = 0; x < ring.modulus(); ++x) brute += chi(ring.add(1, ring.mul(x, x)));
        worst = std::max(worst, std::abs(brute - alpha_tilde_mult_closed(chi)) / scale);
        ++chars;
      }
    }
  std::mt19937_64 rng(5);
  double worst_q = 0;
  const std::pair<std::uint64_t, unsigned> configs[] = {{5, 2}, {5, 3}, {7, 2}, {7, 3}, {13, 2}};
  for (int i = 0; i < 200; ++i) {
    const auto [p, m] = configs[i % 5];
    const ResidueRing ring(p, m);
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 2);
    std::vector<ResidueElem> a;
    MultiPoly f(n);
    for (std::size_t j = 0; j <= n; ++j) {
      std::uint64_t v = 0;
      while (v % p == 0) v = rng() % ring.modulus();
      a.push_back(ring.elem(static_cast<std::int64_t>(v)));
      Exponent e(n, 0);
      if (j > 0) e[j - 1] = 2;
      f.add_term(e, static_cast<std::int64_t>(v));
    }
    const auto prim = primitive_indices(ring);
    const MultChar chi(ring, prim[rng() % prim.size()]);
    const double scale = std::pow(static_cast<double>(p), m * static_cast<double>(n) / 2.0);
    worst_q = std::max(worst_q, std::abs(quadratic_closed_form(a, chi).value - brute_sum(f, chi).value) / scale);
  }
  o.pass = worst <= 1e-10 && worst_q <= 1e-9;
  o.detail = std::to_string(chars) + " primitive characters, max |brute - closed|/q^{m/2} = " + fmt(worst) +
             "; 200 quadratic tuples, max err/q^{mn/2} = " + fmt(worst_q);
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::size_t forms = 0, points = 0, nonzero = 0, disc_fail = 0, newton_fail = 0;
  const std::uint64_t p = 7;
  const unsigned m = 3;
  const ResidueRing ring(p, m);
  const ResidueRing field(p, 1);
  std::vector<MultiPoly> polys;
  for (const char* name : {"hyperbola", "quadric-2", "quadric-3", "quadric-4", "det2"}) {
    const auto& inst = builtin_instance(name);
    // f restricted to a few hyperplanes L.x = 1.
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<std::uint64_t> L(inst.n);
      for (auto& v : L) v = rng() % ring.modulus();
      L[0] = 1 + rng() % (p - 1);
      polys.push_back(restrict_to_chart(inst.f, Chart::hyperplane(L), ring).g);
    }
  }
  polys.push_back(parse_poly("x1^2 + 3*x1*x2 + 5*x2^2 + x1^3 - 2*x2^4 + 4"));
  polys.push_back(parse_poly("x1*x2 + x1^3 + 2"));
  for (const auto& g : polys) {
    if (g.nvars() == 0) continue;
    for (const auto& c : scan_critical_residues(g, p)) {
      if (c.degenerate) continue;
      const auto nf = morse_normal_form(g, c.residue, ring);
      ++forms;
      if (nf.cert.iterations > newton_iteration_bound(m)) ++newton_fail;
      for (const auto v : nf.cert.grad_valuations)
        if (v < m) ++newton_fail;
      std::uint64_t prod = 1;
      for (const auto& a : nf.a) prod = field.mul(prod, a.value() % p);
      const std::uint64_t two_n = field.inv(field.pow(2, g.nvars()));
      if (legendre(static_cast<std::int64_t>(prod), p) != legendre(static_cast<std::int64_t>(two_n), p) * nf.cert.hess_disc)
        ++disc_fail;
      std::vector<std::uint64_t> x(g.nvars());
      for (int s = 0; s < 500; ++s) {
        for (std::size_t j = 0; j < x.size(); ++j)
          x[j] = ring.add(nf.cert.point[j].value(), ring.mul(p, rng() % (ring.modulus() / p)));
        ++points;
        if (normal_form_residual(g, nf, x) != 0) ++nonzero;
      }
    }
  }
  o.pass = forms > 0 && nonzero == 0 && disc_fail == 0 && newton_fail == 0;
  o.detail = std::to_string(forms) + " normal forms mod 7^3, " + std::to_string(points) + " sampled points, " +
             std::to_string(nonzero) + " nonzero residuals, " + std::to_string(disc_fail) +
             " discriminant disagreements, " + std::to_string(newton_fail) + " Newton bound violations";
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(7);
  double worst_fac = 0, worst_trace = 0;
  std::size_t traces = 0;
  for (const char* name : {"hyperbola", "quadric-2"})
    for (const std::uint64_t p : {5u, 7u}) {
      const auto& inst = builtin_instance(name);
      const ResidueRing ring(p, 2);
      const double scale = std::pow(static_cast<double>(p), inst.n * 1.0);
      const AddChar psi(ring, 1);
      const auto prim = primitive_indices(ring);
      for (int trial = 0; trial < 12; ++trial) {
        std::vector<std::uint64_t> L(inst.n);
        for (auto& v : L) v = rng() % ring.modulus();
        const MultChar chi(ring, prim[rng() % prim.size()]);
        const auto fac = factorize_homogeneous(inst.f, chi, psi, L);
        worst_fac = std::max(worst_fac, std::abs(fac.product.value - fourier_sum(inst.f, chi, psi, L).value) / scale);
        if (!ring.is_unit(eval_mod(inst.f_dual, L, ring.modulus()))) continue;
        const auto tr = pipeline_trace(inst, chi, psi, L);
        worst_trace = std::max({worst_trace, tr.max_pairwise_delta / scale, tr.max_brute_delta / scale});
        if (!tr.critical_value_identity) o.pass = false;
        ++traces;
      }
    }
  if (worst_fac > 1e-9 || worst_trace > 1e-9 || traces == 0) o.pass = false;
  o.detail = "48 factorizations, max |product - S|/q^{mn/2} = " + fmt(worst_fac) + "; " + std::to_string(traces) +
             " traces, max stage delta/q^{mn/2} = " + fmt(worst_trace);
  return o;
}

Outcome criterion8() {
  const auto t0 = Clock::now();
  Outcome o;
  double worst = 0;
  for (const char* name : {"linear", "hyperbola"}) {
    const auto& inst = builtin_instance(name);
    const ResidueRing ring(5, 2);
    const auto res = parseval_check(inst.f, MultChar(ring, 1), AddChar(ring, 1));
    worst = std::max(worst, std::abs(res.lhs - res.rhs) / res.rhs);
    o.detail += std::string(name) + ": lhs " + fmt(res.lhs) + " rhs " + fmt(res.rhs) + "; ";
  }
  const double secs = seconds_since(t0);
  o.pass = worst <= 1e-6 && secs < 60;
  o.detail += "max rel err " + fmt(worst) + ", " + fmt(secs) + " s";
  return o;
}

Outcome criterion9() {
  Outcome o;
  double worst = 0;
  std::size_t cases = 0;
  for (const std::uint64_t N : {15u, 45u, 175u}) {
    const auto g = CompositeChar::with_defaults(N);
    const std::pair<const char*, std::vector<std::uint64_t>> polys[] = {
        {"x1", {1}}, {"x1", {7}}, {"x1^2", {1}}, {"x1^2", {4}}, {"x1*x2", {1, 2}}, {"x1*x2", {3, 1}}};
    for (const auto& [text, L] : polys) {
      const auto res = crt_composite_sum(parse_poly(text), g, L);
      worst = std::max(worst, std::abs(res.direct.value - res.product.value) /
                                  std::pow(static_cast<double>(N), static_cast<double>(L.size())));
      ++cases;
    }
  }
  o.pass = worst <= 1e-10;
  o.detail = std::to_string(cases) + " composite sums, max |direct - product|/N^n = " + fmt(worst);
  return o;
}

Outcome criterion10() {
  Outcome o;
  std::vector<std::vector<std::string>> runs;
  for (const char* threads : {"1", "4", "8"}) {
    setenv("PHVS_THREADS", threads, 1);
    std::vector<std::string> jsons;
    for (const auto& r : run_large(true)) jsons.push_back(r.json);
    runs.push_back(std::move(jsons));
  }
  unsetenv("PHVS_THREADS");
  std::size_t differing = 0;
  for (std::size_t i = 0; i < runs[0].size(); ++i)
    if (runs[1][i] != runs[0][i] || runs[2][i] != runs[0][i]) ++differing;
  // The default-thread run from criterion 2 must agree too.
  for (std::size_t i = 0; i < large.size(); ++i)
    if (large[i].json != runs[0][i]) ++differing;
  o.pass = differing == 0;
  o.detail = std::to_string(runs[0].size()) + " reports at 1, 4 and 8 workers, " + std::to_string(differing) +
             " differing (timing excluded)";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"full closed-form sweep, n <= 2", criterion1},
      {"sampled closed-form sweep, n >= 2", criterion2},
      {"phase constants kappa and alpha", criterion3},
      {"critical-point filter", criterion4},
      {"quadratic constant and closed form", criterion5},
      {"Morse normal form", criterion6},
      {"factorization and proof pipeline", criterion7},
      {"Parseval identity", criterion8},
      {"composite modulus by CRT", criterion9},
      {"determinism across worker counts", criterion10},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}

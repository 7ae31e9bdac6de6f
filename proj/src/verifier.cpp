#include "phvs/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "phvs/error.hpp"
#include "phvs/grid.hpp"
#include "phvs/morse.hpp"
#include "phvs/parallel.hpp"

namespace phvs {

namespace {

constexpr std::uint64_t kKappaTableLimit = std::uint64_t{1} << 22;

std::vector<std::uint64_t> parse_list(const std::string& text, const char* what) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::uint64_t>(v));
    } catch (const std::exception&) {
      throw Error(Errc::Parse, std::string(what) + ": bad integer \"" + item + "\"");
    }
  }
  if (out.empty()) throw Error(Errc::Parse, std::string(what) + ": empty list");
  return out;
}

std::uint64_t parse_count(const std::string& text, const char* what) {
  const auto v = parse_list(text, what);
  if (v.size() != 1) throw Error(Errc::Parse, std::string(what) + ": expected one integer");
  return v[0];
}

std::string join(std::span<const std::uint64_t> v, char sep = ',') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

std::uint64_t index_mod_p(std::span<const std::uint64_t> L, std::uint64_t p) {
  std::uint64_t idx = 0;
  for (const auto v : L) idx = idx * p + v % p;
  return idx;
}

int kappa_at(const PvsInstance& inst, std::span<const std::uint64_t> L, std::uint64_t p, unsigned m, int base_sign) {
  std::vector<std::uint64_t> lp(L.begin(), L.end());
  for (auto& v : lp) v %= p;
  if (eval_mod(inst.f_dual, lp, p) == 0) return 0;
  std::vector<std::int64_t> signed_L(lp.begin(), lp.end());
  const SquareClass h = loghessian_disc(inst.f_dual, signed_L, p);
  const SquareClass base = base_sign > 0 ? SquareClass::Square : SquareClass::NonSquare;
  return sign(power(base * h, m));
}

/// k distinct entries of `pool`, chosen by a partial Fisher-Yates pass, sorted.
std::vector<std::uint64_t> sample_without_replacement(std::vector<std::uint64_t> pool, std::uint64_t k,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  k = std::min<std::uint64_t>(k, pool.size());
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t j = i + rng() % (pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

ClosedFormEvaluator::ClosedFormEvaluator(const PvsInstance& inst, const ResidueRing& ring, const AddChar& psi)
    : inst_(inst), ring_(ring), psi_(psi), tables_(CharacterTables::get(ring)), scale_(0), base_(0), base_log_(0),
      kappa_sign_(1) {
  if (ring.m() < 2) throw Error(Errc::InvalidArgument, "the closed form needs m >= 2");
  if (!(psi.ring() == ring)) throw Error(Errc::RingMismatch, "psi lives on another ring");
  if (!is_primitive(psi)) throw Error(Errc::NotPrimitive, "psi must be primitive");
  const std::uint64_t p = ring.p();
  if (arithmetic_bad_prime(inst, p)) {
    throw Error(Errc::BadPrime, "p = " + std::to_string(p) + " divides 2 d num(b0) den(b0) for " + inst.name);
  }
  const std::size_t n = inst.n;
  scale_ = std::pow(static_cast<double>(p), ring.m() * static_cast<double>(n) / 2.0);
  const std::uint64_t dinv = ring.inv(inst.d % ring.modulus());
  base_ = ring.mul(inst.b0.reduce(ring), ring.pow(dinv, inst.d));
  base_log_ = static_cast<std::uint64_t>(tables_->log(base_));

  const std::int64_t s = -static_cast<std::int64_t>(inst.d) * static_cast<std::int64_t>(ring.pow(2, n - 1) % p);
  kappa_sign_ = sign(legendre(s, p));

  std::uint64_t cells = 1;
  bool tabulate = true;
  for (std::size_t i = 0; i < n; ++i) {
    cells *= p;
    if (cells > kKappaTableLimit) {
      tabulate = false;
      break;
    }
  }
  if (tabulate) {
    kappa_table_.resize(cells);
    std::vector<std::uint64_t> L(n);
    for (std::uint64_t idx = 0; idx < cells; ++idx) {
      decode_point(idx, p, L);
      try {
        kappa_table_[idx] = static_cast<std::int8_t>(kappa_at(inst, L, p, ring.m(), kappa_sign_));
      } catch (const Error& e) {
        if (e.code() != Errc::SingularHessian) throw;
        kappa_table_[idx] = 2;
      }
    }
  }
}

ClosedFormEvaluator::CharData ClosedFormEvaluator::char_data(const MultChar& chi) const {
  if (!(chi.ring() == ring_)) throw Error(Errc::RingMismatch, "chi lives on another ring");
  if (!is_primitive(chi)) throw Error(Errc::NotPrimitive, "chi index " + std::to_string(chi.index()) + " is not primitive");
  const std::lock_guard lock(mutex_);
  const auto it = chars_.find(chi.index());
  if (it != chars_.end()) return it->second;
  CharData data;
  const Complex g = twisted_gauss_sum(chi, inst_.d, psi_);
  data.gauss_like_normalized = g / std::pow(static_cast<double>(ring_.p()), ring_.m() / 2.0);
  data.alpha = alpha_factor(chi);
  Complex a{1.0, 0.0};
  for (std::size_t i = 1; i < inst_.n; ++i) a *= data.alpha;
  data.prefactor = scale_ * data.gauss_like_normalized * a;
  chars_.emplace(chi.index(), data);
  return data;
}

int ClosedFormEvaluator::kappa(std::span<const std::uint64_t> L) const {
  if (L.size() != inst_.n) throw Error(Errc::ArityMismatch, "L has the wrong length");
  if (!kappa_table_.empty()) {
    const int k = kappa_table_[index_mod_p(L, ring_.p())];
    if (k == 2) throw Error(Errc::SingularHessian, "log-Hessian of f_dual is singular mod p at L = (" + join(L) + ")");
    return k;
  }
  return kappa_at(inst_, L, ring_.p(), ring_.m(), kappa_sign_);
}

ClosedForm ClosedFormEvaluator::evaluate(const MultChar& chi, std::span<const std::uint64_t> L) const {
  const CharData data = char_data(chi);
  if (L.size() != inst_.n) throw Error(Errc::ArityMismatch, "L has the wrong length");
  const std::uint64_t N = ring_.modulus();
  std::vector<std::uint64_t> l(L.begin(), L.end());
  for (auto& v : l) v %= N;
  const std::uint64_t fv = eval_mod(inst_.f_dual, l, N);
  if (!ring_.is_unit(fv)) return Vanishing{};
  const int k = kappa(l);
  const ResidueElem arg = ring_.elem(static_cast<std::int64_t>(ring_.mul(base_, ring_.inv(fv))));
  ClosedFormResult r{data.prefactor * chi(arg) * static_cast<double>(k),
                     ClosedFormParts{data.gauss_like_normalized, arg, data.alpha, k, scale_}};
  return r;
}

ClosedForm closed_form_S(const PvsInstance& inst, const MultChar& chi, const AddChar& psi,
                         std::span<const std::uint64_t> L) {
  const ClosedFormEvaluator ev(inst, chi.ring(), psi);
  try {
    return ev.evaluate(chi, L);
  } catch (const Error& e) {
    if (e.code() == Errc::SingularHessian) throw Error(Errc::BadPrime, e.what());
    throw;
  }
}

LPolicy LPolicy::parse(const std::string& text) {
  LPolicy out;
  if (text == "all") return out;
  if (text.rfind("sample:", 0) == 0) {
    out.kind = Kind::Sample;
    out.count = parse_count(text.substr(7), "L-policy sample");
    return out;
  }
  if (text.rfind("list:", 0) == 0) {
    out.kind = Kind::List;
    std::stringstream ss(text.substr(5));
    std::string item;
    while (std::getline(ss, item, ';')) out.list.push_back(parse_list(item, "L-policy list"));
    if (out.list.empty()) throw Error(Errc::Parse, "L-policy list is empty");
    return out;
  }
  throw Error(Errc::Parse, "L-policy must be all, sample:<k> or list:<a,b,..>;..., got \"" + text + "\"");
}

std::string LPolicy::to_string() const {
  switch (kind) {
    case Kind::All: return "all";
    case Kind::Sample: return "sample:" + std::to_string(count);
    case Kind::List: {
      std::string s = "list:";
      for (std::size_t i = 0; i < list.size(); ++i) s += (i ? ";" : "") + join(list[i]);
      return s;
    }
  }
  return "";
}

ChiPolicy ChiPolicy::parse(const std::string& text) {
  ChiPolicy out;
  if (text == "all") return out;
  if (text.rfind("sample:", 0) == 0) {
    out.kind = Kind::Sample;
    out.value = parse_count(text.substr(7), "chi sample");
    return out;
  }
  out.kind = Kind::Index;
  out.value = parse_count(text, "chi index");
  return out;
}

std::string ChiPolicy::to_string() const {
  switch (kind) {
    case Kind::All: return "all";
    case Kind::Index: return std::to_string(value);
    case Kind::Sample: return "sample:" + std::to_string(value);
  }
  return "";
}

std::string_view status_name(Status s) noexcept {
  switch (s) {
    case Status::Match: return "MATCH";
    case Status::VanishMatch: return "VANISH_MATCH";
    case Status::Mismatch: return "MISMATCH";
    case Status::SkippedBadPrime: return "SKIPPED_BAD_PRIME";
  }
  return "UNKNOWN";
}

std::size_t VerifyReport::count(Status s) const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [s](const Record& r) { return r.status == s; }));
}

std::string replay_command(const std::string& instance, std::uint64_t p, unsigned m, std::uint64_t chi,
                           std::uint64_t psi, std::span<const std::uint64_t> L) {
  return "phvs verify --instance " + instance + " --p " + std::to_string(p) + " --m " + std::to_string(m) +
         " --chi " + std::to_string(chi) + " --psi " + std::to_string(psi) + " --L-policy list:" + join(L);
}

VerifyReport verify_instance(const PvsInstance& inst, const VerifyConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const ResidueRing ring(config.p, config.m);
  if (config.m < 2) throw Error(Errc::InvalidArgument, "verification needs m >= 2");
  const std::uint64_t N = ring.modulus();
  const std::size_t n = inst.n;
  const auto tables = CharacterTables::get(ring);
  const AddChar psi(tables, config.psi_twist);
  if (!is_primitive(psi)) throw Error(Errc::NotPrimitive, "psi twist " + std::to_string(config.psi_twist) + " is not primitive");

  VerifyReport rep;
  rep.instance = inst.name;
  rep.n = n;
  rep.d = inst.d;
  rep.p = config.p;
  rep.m = config.m;
  rep.psi_twist = psi.twist();
  rep.chi_policy = config.chi.to_string();
  rep.L_policy = config.L.to_string();
  rep.seed = config.seed;
  rep.tol = config.tol;
  rep.scale = std::pow(static_cast<double>(config.p), config.m * static_cast<double>(n) / 2.0);

  // Characters.
  const auto primitive = primitive_indices(ring);
  switch (config.chi.kind) {
    case ChiPolicy::Kind::All: rep.chis = primitive; break;
    case ChiPolicy::Kind::Index: {
      const MultChar chi(tables, config.chi.value);
      if (!is_primitive(chi)) {
        throw Error(Errc::NotPrimitive, "chi index " + std::to_string(config.chi.value) + " is not primitive");
      }
      rep.chis = {chi.index()};
      break;
    }
    case ChiPolicy::Kind::Sample:
      rep.chis = sample_without_replacement(primitive, config.chi.value, config.seed ^ 0x9e3779b97f4a7c15ULL);
      break;
  }

  // Linear forms.
  std::vector<std::vector<std::uint64_t>> Ls;
  switch (config.L.kind) {
    case LPolicy::Kind::All: {
      const std::uint64_t count = grid_size(N, n, config.budget);
      Ls.resize(count, std::vector<std::uint64_t>(n));
      for (std::uint64_t i = 0; i < count; ++i) decode_point(i, N, Ls[i]);
      break;
    }
    case LPolicy::Kind::Sample: {
      std::mt19937_64 rng(config.seed);
      for (std::uint64_t i = 0; i < config.L.count; ++i) {
        std::vector<std::uint64_t> L(n);
        for (auto& v : L) v = rng() % N;
        Ls.push_back(std::move(L));
      }
      break;
    }
    case LPolicy::Kind::List:
      for (const auto& L : config.L.list) {
        if (L.size() != n) throw Error(Errc::ArityMismatch, "listed L has " + std::to_string(L.size()) + " entries, expected " + std::to_string(n));
        std::vector<std::uint64_t> r(L);
        for (auto& v : r) v %= N;
        Ls.push_back(std::move(r));
      }
      break;
  }

  const BadPrimeReport bad = bad_prime_report(inst, config.p);
  rep.bad_prime = bad.bad;
  rep.bad_prime_reason = bad.reason;
  std::unique_ptr<ClosedFormEvaluator> ev;
  if (!bad.bad) ev = std::make_unique<ClosedFormEvaluator>(inst, ring, psi);

  // Budget: each L costs a full enumeration.
  const std::uint64_t per_L = grid_size(N, n, config.budget);
  std::uint64_t affordable = Ls.size();
  if (per_L > 0 && Ls.size() > config.budget / per_L) {
    affordable = config.budget / per_L;
    rep.error = "BudgetExceeded: " + std::to_string(Ls.size()) + " linear forms of " + std::to_string(per_L) +
                " terms exceed the budget of " + std::to_string(config.budget) + "; verified the first " +
                std::to_string(affordable);
  }

  std::vector<MultChar> chars;
  for (const auto k : rep.chis) chars.emplace_back(tables, k);
  const bool use_fft = chars.size() > 32;
  const double tol_abs = config.tol * rep.scale;
  SumOptions inner;
  inner.budget = config.budget;
  inner.threads = 1;

  std::vector<std::vector<Record>> slots(affordable);
  parallel_for(affordable, config.threads, [&](std::uint64_t li) {
    const auto& L = Ls[li];
    const auto t = fiber_transform(inst.f, psi, L, inner);
    std::vector<Complex> all;
    if (use_fft) all = all_character_sums(*tables, t);
    const unsigned fval = ring.valuation(eval_mod(inst.f_dual, L, N));
    auto& out = slots[li];
    out.reserve(chars.size());
    for (const auto& chi : chars) {
      Record r;
      r.chi = chi.index();
      r.L = L;
      r.fdual_valuation = fval;
      if (use_fft) {
        r.brute = all[chi.index()];
      } else {
        for (std::uint64_t a = 0; a < N; ++a) r.brute += chi(a) * t[a];
      }
      if (!ev) {
        r.status = Status::SkippedBadPrime;
        out.push_back(std::move(r));
        continue;
      }
      ClosedForm cf;
      try {
        cf = ev->evaluate(chi, L);
      } catch (const Error& e) {
        if (e.code() != Errc::SingularHessian) throw;
        r.status = Status::SkippedBadPrime;
        out.push_back(std::move(r));
        continue;
      }
      if (std::holds_alternative<Vanishing>(cf)) {
        r.abs_err = std::abs(r.brute);
        r.status = r.abs_err <= tol_abs ? Status::VanishMatch : Status::Mismatch;
      } else {
        const auto& res = std::get<ClosedFormResult>(cf);
        r.closed = res.value;
        r.kappa = res.parts.kappa;
        r.alpha = res.parts.alpha;
        r.abs_err = std::abs(r.brute - res.value);
        r.status = r.abs_err <= tol_abs ? Status::Match : Status::Mismatch;
        r.phase_residual = std::abs(std::arg(r.brute * std::conj(res.value)));
      }
      out.push_back(std::move(r));
    }
  });

  for (auto& s : slots)
    for (auto& r : s) {
      if (r.status == Status::Mismatch) {
        rep.candidate_bad_prime = true;
        rep.replay.push_back(replay_command(inst.name, config.p, config.m, r.chi, rep.psi_twist, r.L));
      }
      if (r.status == Status::SkippedBadPrime && !rep.bad_prime) rep.candidate_bad_prime = true;
      if (r.status == Status::Match || r.status == Status::Mismatch) {
        if (r.closed) rep.max_err_normalized = std::max(rep.max_err_normalized, r.abs_err / rep.scale);
        if (r.status == Status::Match) rep.max_phase_residual = std::max(rep.max_phase_residual, r.phase_residual);
      }
      rep.records.push_back(std::move(r));
    }

  if (config.parseval && !rep.chis.empty()) {
    ParsevalRecord pr;
    pr.chi = rep.chis.front();
    try {
      SumOptions popts;
      popts.budget = config.budget;
      popts.threads = config.threads;
      const auto res = parseval_check(inst.f, MultChar(tables, pr.chi), psi, popts);
      pr.lhs = res.lhs;
      pr.rhs = res.rhs;
      pr.n1 = res.n1;
      pr.rel_err = res.rhs > 0 ? std::abs(res.lhs - res.rhs) / res.rhs : std::abs(res.lhs);
      pr.status = pr.rel_err <= 1e-6 ? "OK" : "FAIL";
    } catch (const Error& e) {
      if (e.code() != Errc::BudgetExceeded) throw;
      pr.status = "SKIPPED_BUDGET";
    }
    rep.parseval = pr;
  }

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rep;
}

PipelineTrace pipeline_trace(const PvsInstance& inst, const MultChar& chi, const AddChar& psi,
                             std::span<const std::uint64_t> L, const SumOptions& opts) {
  const ResidueRing& ring = chi.ring();
  const ClosedFormEvaluator ev(inst, ring, psi);
  PipelineTrace tr;
  tr.scale = ev.scale();

  const Factorization fac = factorize_homogeneous(inst.f, chi, psi, L, opts);
  if (fac.k != 0) throw Error(Errc::NonUnitValue, "L is divisible by p; the trace needs f_dual(L) to be a unit");
  const ClosedForm cf = ev.evaluate(chi, L);
  if (std::holds_alternative<Vanishing>(cf)) throw Error(Errc::NonUnitValue, "f_dual(L) is not a unit");

  std::vector<std::uint64_t> l(L.begin(), L.end());
  const SumValue crit = critical_points_sum(inst.f, chi, Chart::hyperplane(l));
  tr.stages.push_back({"factorized", fac.product.value});
  tr.stages.push_back({"critical_points", fac.gauss_like * crit.value});
  tr.stages.push_back({"closed_form", std::get<ClosedFormResult>(cf).value});
  tr.brute = fourier_sum(inst.f, chi, psi, L, opts).value;

  for (std::size_t i = 0; i < tr.stages.size(); ++i) {
    tr.max_brute_delta = std::max(tr.max_brute_delta, std::abs(tr.stages[i].value - tr.brute));
    for (std::size_t j = i + 1; j < tr.stages.size(); ++j)
      tr.max_pairwise_delta = std::max(tr.max_pairwise_delta, std::abs(tr.stages[i].value - tr.stages[j].value));
  }
  tr.critical_point = dual_gradient_point(inst, L, ring);
  tr.critical_value_identity = critical_value_identity_check(inst, L, ring);
  return tr;
}

}  // namespace phvs

#include "phvs/report.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace phvs {

namespace {

using Json = nlohmann::ordered_json;

Json num(double x) { return format_number(x); }

Json complex_json(const Complex& z) {
  Json j;
  j["re"] = num(z.real());
  j["im"] = num(z.imag());
  return j;
}

std::string join_L(const std::vector<std::uint64_t>& L) {
  std::string s;
  for (std::size_t i = 0; i < L.size(); ++i) s += (i ? " " : "") + std::to_string(L[i]);
  return s;
}

Json residues(const std::vector<ResidueElem>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x.value());
  return a;
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

std::string to_json(const VerifyReport& r, bool include_timing) {
  Json j;
  j["instance"] = r.instance;
  j["n"] = r.n;
  j["d"] = r.d;
  j["p"] = r.p;
  j["m"] = r.m;
  j["psi_twist"] = r.psi_twist;
  j["chi_policy"] = r.chi_policy;
  j["L_policy"] = r.L_policy;
  j["seed"] = r.seed;
  j["tol"] = num(r.tol);
  j["scale"] = num(r.scale);
  j["bad_prime"] = r.bad_prime;
  j["bad_prime_reason"] = r.bad_prime_reason;
  j["candidate_bad_prime"] = r.candidate_bad_prime;
  j["chis"] = r.chis;
  Json counts;
  for (const auto s : {Status::Match, Status::VanishMatch, Status::Mismatch, Status::SkippedBadPrime})
    counts[std::string(status_name(s))] = r.count(s);
  j["counts"] = counts;
  j["max_err_normalized"] = num(r.max_err_normalized);
  j["max_phase_residual"] = num(r.max_phase_residual);
  Json recs = Json::array();
  for (const auto& rec : r.records) {
    Json e;
    e["chi"] = rec.chi;
    e["L"] = rec.L;
    e["fdual_valuation"] = rec.fdual_valuation;
    e["brute"] = complex_json(rec.brute);
    if (rec.status == Status::SkippedBadPrime)
      e["closed"] = nullptr;
    else if (rec.closed)
      e["closed"] = complex_json(*rec.closed);
    else
      e["closed"] = "vanishing";
    e["abs_err"] = num(rec.abs_err);
    e["status"] = std::string(status_name(rec.status));
    if (rec.closed) {
      e["kappa"] = rec.kappa;
      e["alpha"] = complex_json(rec.alpha);
      e["phase_residual"] = num(rec.phase_residual);
    }
    recs.push_back(std::move(e));
  }
  j["records"] = std::move(recs);
  if (r.parseval) {
    Json pj;
    pj["status"] = r.parseval->status;
    pj["chi"] = r.parseval->chi;
    pj["lhs"] = num(r.parseval->lhs);
    pj["rhs"] = num(r.parseval->rhs);
    pj["n1"] = r.parseval->n1;
    pj["rel_err"] = num(r.parseval->rel_err);
    j["parseval"] = std::move(pj);
  } else {
    j["parseval"] = nullptr;
  }
  j["replay"] = r.replay;
  j["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
  if (include_timing) j["seconds"] = num(r.seconds);
  return j.dump(2) + "\n";
}

std::string to_json(const SweepSummary& s, bool include_timing) {
  Json j;
  j["instance"] = s.instance;
  j["p"] = s.p;
  j["m"] = s.m;
  j["n"] = s.n;
  j["chars"] = s.chars;
  j["L_count"] = s.L_count;
  j["orbits"] = s.orbits;
  j["pairs"] = s.pairs;
  j["match"] = s.match;
  j["vanish_match"] = s.vanish_match;
  j["mismatch"] = s.mismatch;
  j["skipped"] = s.skipped;
  j["explicit_points"] = s.explicit_points;
  j["bad_prime"] = s.bad_prime;
  j["max_err"] = num(s.max_err);
  j["max_vanish"] = num(s.max_vanish);
  j["max_phase_residual"] = num(s.max_phase_residual);
  j["max_magnitude_dev"] = num(s.max_magnitude_dev);
  j["crosscheck_points"] = s.crosscheck_points;
  j["crosscheck_max_err"] = num(s.crosscheck_max_err);
  if (include_timing) j["seconds"] = num(s.seconds);
  return j.dump(2) + "\n";
}

std::string to_json(const PipelineTrace& t) {
  Json j;
  Json stages = Json::array();
  for (const auto& s : t.stages) {
    Json e;
    e["name"] = s.name;
    e["value"] = complex_json(s.value);
    stages.push_back(std::move(e));
  }
  j["stages"] = std::move(stages);
  j["brute"] = complex_json(t.brute);
  j["scale"] = num(t.scale);
  j["max_pairwise_delta"] = num(t.max_pairwise_delta);
  j["max_brute_delta"] = num(t.max_brute_delta);
  j["critical_point"] = residues(t.critical_point);
  j["critical_value_identity"] = t.critical_value_identity;
  return j.dump(2) + "\n";
}

std::string to_json(const MorseNormalForm& nf) {
  Json j;
  j["point"] = residues(nf.cert.point);
  j["grad_valuations"] = nf.cert.grad_valuations;
  j["hess_disc"] = sign(nf.cert.hess_disc);
  j["value"] = nf.cert.value.value();
  j["iterations"] = nf.cert.iterations;
  j["a"] = residues(nf.a);
  Json tr = Json::array();
  for (const auto& t : nf.transform) tr.push_back(to_string(t, 'u'));
  j["transform"] = std::move(tr);
  return j.dump(2) + "\n";
}

std::string to_json(const SumValue& v) {
  Json j;
  j["value"] = complex_json(v.value);
  j["abs"] = num(std::abs(v.value));
  j["terms_counted"] = v.terms_counted;
  j["method"] = std::string(method_name(v.method));
  return j.dump(2) + "\n";
}

std::string to_json(const CrtResult& r) {
  Json j;
  j["direct"] = complex_json(r.direct.value);
  j["product"] = complex_json(r.product.value);
  j["abs_diff"] = num(std::abs(r.direct.value - r.product.value));
  j["terms_counted"] = r.direct.terms_counted;
  return j.dump(2) + "\n";
}

std::string to_csv(const VerifyReport& r) {
  std::ostringstream out;
  out << "chi,L,fdual_valuation,brute_re,brute_im,closed_re,closed_im,abs_err,status\n";
  for (const auto& rec : r.records) {
    out << rec.chi << ',' << join_L(rec.L) << ',' << rec.fdual_valuation << ',' << format_number(rec.brute.real())
        << ',' << format_number(rec.brute.imag()) << ',';
    if (rec.closed)
      out << format_number(rec.closed->real()) << ',' << format_number(rec.closed->imag());
    else
      out << (rec.status == Status::SkippedBadPrime ? "," : "vanishing,vanishing");
    out << ',' << format_number(rec.abs_err) << ',' << status_name(rec.status) << '\n';
  }
  return out.str();
}

}  // namespace phvs

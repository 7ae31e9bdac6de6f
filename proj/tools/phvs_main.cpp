// Command-line front end: sum, verify, sweep, morse, catalogue, crt, trace.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "phvs/catalogue.hpp"
#include "phvs/charsums.hpp"
#include "phvs/error.hpp"
#include "phvs/morse.hpp"
#include "phvs/report.hpp"
#include "phvs/verifier.hpp"

namespace {

using namespace phvs;

std::vector<std::uint64_t> parse_point(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw Error(Errc::Parse, "bad coordinate \"" + item + "\"");
    }
  }
  return out;
}

std::vector<std::int64_t> parse_signed_point(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw Error(Errc::Parse, "bad coordinate \"" + item + "\"");
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Character sums over Z/p^m and closed-form verification for prehomogeneous vector spaces"};
  app.require_subcommand(1);

  // sum
  auto* sum = app.add_subcommand("sum", "Evaluate one character sum by brute force");
  std::string f_text;
  std::uint64_t p = 5, chi = 1, psi = 1, N = 15;
  unsigned m = 2;
  std::string L_text, filter;
  sum->add_option("--f", f_text, "Polynomial, e.g. x1*x2")->required();
  sum->add_option("--p", p, "Odd prime")->required();
  sum->add_option("--m", m, "Exponent")->required();
  sum->add_option("--chi", chi, "Character index")->required();
  sum->add_option("--psi", psi, "Additive twist");
  sum->add_option("--L", L_text, "Linear form c1,..,cn; omit for the plain multiplicative sum");
  sum->add_flag("--filtered", "Use the critical-point filter (plain sum only)");

  // verify
  auto* verify = app.add_subcommand("verify", "Compare brute-force S(L) with the closed form");
  std::string instance = "hyperbola", L_policy = "all", chi_policy = "all", json_path, csv_path;
  std::uint64_t seed = 0, budget = 100'000'000;
  verify->add_option("--instance", instance, "Builtin name, catalogue file, or file:name");
  verify->add_option("--p", p, "Odd prime")->required();
  verify->add_option("--m", m, "Exponent (>= 2)")->required();
  verify->add_option("--L-policy", L_policy, "all | sample:<k> | list:<a,b>;<c,d>");
  verify->add_option("--chi", chi_policy, "all | <k> | sample:<k>");
  verify->add_option("--psi", psi, "Additive twist");
  verify->add_option("--json", json_path, "Write the JSON report here");
  verify->add_option("--csv", csv_path, "Write the per-record CSV here");
  verify->add_option("--seed", seed, "Seed for sampled policies");
  verify->add_option("--budget", budget, "Term budget");
  verify->add_flag("--no-timing", "Leave the timing field out of the JSON");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Every primitive chi against every L, via orbits of L");
  sweep->add_option("--instance", instance, "Builtin name, catalogue file, or file:name");
  sweep->add_option("--p", p, "Odd prime")->required();
  sweep->add_option("--m", m, "Exponent (>= 2)")->required();
  sweep->add_option("--psi", psi, "Additive twist");
  sweep->add_option("--seed", seed, "Seed for the cross-check points");

  // morse
  auto* morse = app.add_subcommand("morse", "Lift a critical point and print its normal form");
  std::string at_text;
  morse->add_option("--f", f_text, "Polynomial")->required();
  morse->add_option("--p", p, "Odd prime")->required();
  morse->add_option("--m", m, "Exponent")->required();
  morse->add_option("--at", at_text, "Critical residue mod p, c1,..,cn")->required();

  // catalogue
  auto* cat = app.add_subcommand("catalogue", "Builtin and file catalogue");
  cat->require_subcommand(1);
  auto* cat_list = cat->add_subcommand("list", "Print the builtin catalogue");
  auto* cat_check = cat->add_subcommand("check", "Re-derive b0 for every instance of a catalogue file");
  std::string cat_path;
  cat_check->add_option("path", cat_path, "Catalogue file (default: the bundled one)");

  // crt
  auto* crt = app.add_subcommand("crt", "Composite-modulus sum, direct and as a product of local factors");
  crt->add_option("--N", N, "Odd modulus")->required();
  crt->add_option("--f", f_text, "Polynomial")->required();
  crt->add_option("--L", L_text, "Linear form c1,..,cn")->required();

  // trace
  auto* trace = app.add_subcommand("trace", "Intermediate representations of S(L)");
  trace->add_option("--instance", instance, "Builtin name, catalogue file, or file:name");
  trace->add_option("--p", p, "Odd prime")->required();
  trace->add_option("--m", m, "Exponent (>= 2)")->required();
  trace->add_option("--chi", chi, "Character index")->required();
  trace->add_option("--psi", psi, "Additive twist");
  trace->add_option("--L", L_text, "Linear form c1,..,cn")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sum) {
      const ResidueRing ring(p, m);
      const MultiPoly f = parse_poly(f_text);
      const MultChar c(ring, chi);
      SumValue v;
      if (!L_text.empty()) {
        v = fourier_sum(f, c, AddChar(ring, psi), parse_point(L_text));
      } else if (sum->count("--filtered") > 0) {
        v = filtered_sum(f, c);
      } else {
        v = brute_sum(f, c);
      }
      std::cout << to_json(v);
      return EXIT_SUCCESS;
    }
    if (*verify) {
      VerifyConfig cfg;
      cfg.p = p;
      cfg.m = m;
      cfg.L = LPolicy::parse(L_policy);
      cfg.chi = ChiPolicy::parse(chi_policy);
      cfg.psi_twist = psi;
      cfg.seed = seed;
      cfg.budget = budget;
      const VerifyReport rep = verify_instance(resolve_instance(instance), cfg);
      const std::string json = to_json(rep, verify->count("--no-timing") == 0);
      if (!json_path.empty()) write_file(json_path, json);
      if (!csv_path.empty()) write_file(csv_path, to_csv(rep));
      std::cout << rep.instance << " p=" << rep.p << " m=" << rep.m << ": " << rep.records.size() << " records, "
                << rep.count(Status::Match) << " MATCH, " << rep.count(Status::VanishMatch) << " VANISH_MATCH, "
                << rep.count(Status::Mismatch) << " MISMATCH, " << rep.count(Status::SkippedBadPrime)
                << " SKIPPED_BAD_PRIME\n";
      if (rep.parseval) std::cout << "parseval: " << rep.parseval->status << "\n";
      if (!rep.error.empty()) std::cerr << rep.error << "\n";
      for (const auto& r : rep.replay) std::cerr << "replay: " << r << "\n";
      return rep.has_mismatch() ? EXIT_FAILURE : EXIT_SUCCESS;
    }
    if (*sweep) {
      SweepConfig cfg;
      cfg.p = p;
      cfg.m = m;
      cfg.psi_twist = psi;
      cfg.seed = seed;
      const SweepSummary s = sweep_all(resolve_instance(instance), cfg);
      std::cout << to_json(s);
      return s.mismatch > 0 ? EXIT_FAILURE : EXIT_SUCCESS;
    }
    if (*morse) {
      const MultiPoly f = parse_poly(f_text);
      const auto at = parse_signed_point(at_text);
      std::cout << to_json(morse_normal_form(f, at, ResidueRing(p, m)));
      return EXIT_SUCCESS;
    }
    if (*cat_list) {
      std::cout << format_catalogue(builtin_instances());
      return EXIT_SUCCESS;
    }
    if (*cat_check) {
      const auto path = cat_path.empty() ? default_catalogue_path() : std::filesystem::path(cat_path);
      const auto insts = load_catalogue(path);
      for (const auto& inst : insts) std::cout << inst.name << ": b0 = " << inst.b0.to_string() << " ok\n";
      return EXIT_SUCCESS;
    }
    if (*crt) {
      const MultiPoly f = parse_poly(f_text);
      std::cout << to_json(crt_composite_sum(f, CompositeChar::with_defaults(N), parse_point(L_text)));
      return EXIT_SUCCESS;
    }
    if (*trace) {
      const PvsInstance inst = resolve_instance(instance);
      const ResidueRing ring(p, m);
      std::cout << to_json(pipeline_trace(inst, MultChar(ring, chi), AddChar(ring, psi), parse_point(L_text)));
      return EXIT_SUCCESS;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return EXIT_SUCCESS;
}

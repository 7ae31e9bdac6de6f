#include "phvs/catalogue.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>

#include "phvs/error.hpp"
#include "phvs/grid.hpp"
#include "phvs/morse.hpp"

#ifndef PHVS_DATA_DIR
#define PHVS_DATA_DIR "data"
#endif

namespace phvs {

namespace {

using BigRational = boost::multiprecision::cpp_rational;

std::int64_t narrow(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw Error(Errc::Overflow, "rational component does not fit 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

/// Rational with the sign carried by the numerator.
BigRational make_rational(BigInt num, BigInt den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return BigRational(num, den);
}

Rational from_big(const BigRational& r) {
  return {narrow(boost::multiprecision::numerator(r)), narrow(boost::multiprecision::denominator(r))};
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_uint(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::Parse, "field " + field + " expects a non-negative integer, got \"" + text + "\"");
  }
}

PvsInstance make_instance(std::string name, std::size_t n, unsigned d, std::string_view f, std::string_view fd,
                          Rational b0) {
  PvsInstance inst;
  inst.name = std::move(name);
  inst.n = n;
  inst.d = d;
  inst.f = parse_poly(f, n);
  inst.f_dual = parse_poly(fd, n);
  inst.b0 = b0;
  return inst;
}

void validate(const PvsInstance& inst) {
  const std::string where = "instance '" + inst.name + "': ";
  if (inst.n == 0) throw Error(Errc::InvalidArgument, where + "n must be positive");
  if (inst.f.nvars() != inst.n || inst.f_dual.nvars() != inst.n) {
    throw Error(Errc::ArityMismatch, where + "polynomials use more than n variables");
  }
  if (inst.f.homogeneous_degree() != inst.d || inst.f_dual.homogeneous_degree() != inst.d) {
    throw Error(Errc::NotBernsteinPair, where + "f and fdual must be homogeneous of degree d");
  }
  const Rational derived = compute_b0(inst.f, inst.f_dual, inst.d);
  if (!(derived == inst.b0)) {
    throw Error(Errc::NotBernsteinPair,
                where + "stored b0 = " + inst.b0.to_string() + " but the operator identity gives " + derived.to_string());
  }
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  const std::string s = trim(text);
  const auto slash = s.find('/');
  try {
    std::size_t used = 0;
    const std::string a = trim(s.substr(0, slash));
    const long long num = std::stoll(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    long long den = 1;
    if (slash != std::string::npos) {
      const std::string b = trim(s.substr(slash + 1));
      den = std::stoll(b, &used);
      if (used != b.size()) throw std::invalid_argument(s);
    }
    if (den == 0) throw Error(Errc::Parse, "zero denominator in \"" + s + "\"");
    return from_big(make_rational(BigInt(num), BigInt(den)));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(Errc::Parse, "cannot parse rational \"" + s + "\"");
  }
}

std::string Rational::to_string() const { return std::to_string(num) + "/" + std::to_string(den); }

std::uint64_t Rational::reduce(const ResidueRing& ring) const {
  const std::uint64_t d = ring.reduce(den);
  if (!ring.is_unit(d)) throw Error(Errc::BadPrime, "p divides the denominator of " + to_string());
  return ring.mul(ring.reduce(num), ring.inv(d));
}

std::vector<Rational> bernstein_values(const MultiPoly& f, const MultiPoly& f_dual, unsigned d) {
  if (f.nvars() != f_dual.nvars()) throw Error(Errc::NotBernsteinPair, "f and fdual have different variable counts");
  if (f.homogeneous_degree() != d || f_dual.homogeneous_degree() != d) {
    throw Error(Errc::NotBernsteinPair, "f and fdual must be homogeneous of degree " + std::to_string(d));
  }
  const BigPoly big_f = to_big(f);
  BigPoly f_s = BigPoly::constant(f.nvars(), BigInt(1));
  std::vector<Rational> values;
  for (unsigned s = 0; s <= d; ++s) {
    const BigPoly f_next = f_s * big_f;
    const BigPoly g = apply_diff_operator(f_dual, f_next);
    BigRational c(0);
    if (!g.is_zero()) {
      const auto& [e, lead] = *f_s.terms().begin();
      c = make_rational(g.coefficient(e), lead);
    }
    const BigInt num = boost::multiprecision::numerator(c);
    const BigInt den = boost::multiprecision::denominator(c);
    if (!(den * g == num * f_s)) {
      throw Error(Errc::NotBernsteinPair, "fdual(d/dx) f^" + std::to_string(s + 1) + " is not a constant multiple of f^" +
                                              std::to_string(s));
    }
    values.push_back(from_big(c));
    f_s = f_next;
  }
  return values;
}

Rational compute_b0(const MultiPoly& f, const MultiPoly& f_dual, unsigned d) {
  const auto values = bernstein_values(f, f_dual, d);
  BigRational lead(0);
  for (unsigned s = 0; s <= d; ++s) {
    BigInt denom = 1;
    for (unsigned j = 0; j <= d; ++j)
      if (j != s) denom *= BigInt(static_cast<int>(s) - static_cast<int>(j));
    const BigInt den = BigInt(values[s].den) * denom;
    lead += make_rational(BigInt(values[s].num), den);
  }
  if (lead == 0) throw Error(Errc::NotBernsteinPair, "b(s) has vanishing leading coefficient");
  return from_big(lead);
}

const std::vector<PvsInstance>& builtin_instances() {
  static const std::vector<PvsInstance> instances = [] {
    std::vector<PvsInstance> v;
    v.push_back(make_instance("linear", 1, 1, "x1", "y1", {1, 1}));
    v.push_back(make_instance("square", 1, 2, "x1^2", "y1^2", {4, 1}));
    v.push_back(make_instance("hyperbola", 2, 2, "x1*x2", "y1*y2", {1, 1}));
    v.push_back(make_instance("quadric-2", 2, 2, "x1^2 + x2^2", "y1^2 + y2^2", {4, 1}));
    v.push_back(make_instance("quadric-3", 3, 2, "x1^2 + x2^2 + x3^2", "y1^2 + y2^2 + y3^2", {4, 1}));
    v.push_back(make_instance("quadric-4", 4, 2, "x1^2 + x2^2 + x3^2 + x4^2", "y1^2 + y2^2 + y3^2 + y4^2", {4, 1}));
    // 2x2 matrices (x11, x12, x21, x22) = (x1, x2, x3, x4).
    v.push_back(make_instance("det2", 4, 2, "x1*x4 - x2*x3", "y1*y4 - y2*y3", {1, 1}));
    for (const auto& inst : v) validate(inst);
    return v;
  }();
  return instances;
}

const PvsInstance& builtin_instance(std::string_view name) {
  for (const auto& inst : builtin_instances())
    if (inst.name == name) return inst;
  throw Error(Errc::InvalidArgument, "unknown instance '" + std::string(name) + "'");
}

std::vector<PvsInstance> parse_catalogue(std::string_view text) {
  std::vector<PvsInstance> out;
  std::map<std::string, std::string> fields;
  std::size_t line_no = 0;
  std::size_t block_start = 0;

  auto flush = [&] {
    if (fields.empty()) return;
    for (const char* key : {"name", "n", "d", "f", "fdual", "b0"}) {
      if (!fields.count(key)) {
        throw Error(Errc::Parse, "block at line " + std::to_string(block_start) + " lacks field '" + key + "'");
      }
    }
    const auto n = static_cast<std::size_t>(parse_uint(fields["n"], "n"));
    const auto d = static_cast<unsigned>(parse_uint(fields["d"], "d"));
    PvsInstance inst = make_instance(fields["name"], n, d, fields["f"], fields["fdual"], Rational::parse(fields["b0"]));
    validate(inst);
    for (const auto& other : out)
      if (other.name == inst.name) throw Error(Errc::Parse, "duplicate instance name '" + inst.name + "'");
    out.push_back(std::move(inst));
    fields.clear();
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) {
      // Comment-only lines do not end a block.
      if (trim(raw).empty()) flush();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key != "name" && key != "n" && key != "d" && key != "f" && key != "fdual" && key != "b0") {
      throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": unknown field '" + key + "'");
    }
    if (fields.empty()) block_start = line_no;
    if (!fields.emplace(key, value).second) {
      throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": repeated field '" + key + "'");
    }
  }
  flush();
  return out;
}

std::vector<PvsInstance> load_catalogue(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open catalogue " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_catalogue(buf.str());
}

std::string format_catalogue(const std::vector<PvsInstance>& instances) {
  std::string out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    if (i) out += "\n";
    out += "name=" + inst.name + "\n";
    out += "n=" + std::to_string(inst.n) + "\n";
    out += "d=" + std::to_string(inst.d) + "\n";
    out += "f=" + to_string(inst.f, 'x') + "\n";
    out += "fdual=" + to_string(inst.f_dual, 'y') + "\n";
    out += "b0=" + inst.b0.to_string() + "\n";
  }
  return out;
}

std::filesystem::path default_catalogue_path() {
  if (const char* env = std::getenv("PHVS_CATALOGUE")) return env;
  return std::filesystem::path(PHVS_DATA_DIR) / "catalogue.txt";
}

PvsInstance resolve_instance(std::string_view ref) {
  for (const auto& inst : builtin_instances())
    if (inst.name == ref) return inst;
  std::string path(ref);
  std::string name;
  if (!std::filesystem::exists(path)) {
    const auto colon = path.rfind(':');
    if (colon != std::string::npos) {
      name = path.substr(colon + 1);
      path.erase(colon);
    }
  }
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::InvalidArgument, "'" + std::string(ref) + "' is neither a builtin instance nor a file");
  }
  const auto instances = load_catalogue(path);
  if (instances.empty()) throw Error(Errc::InvalidArgument, "catalogue " + path + " is empty");
  if (name.empty()) return instances.front();
  for (const auto& inst : instances)
    if (inst.name == name) return inst;
  throw Error(Errc::InvalidArgument, "catalogue " + path + " has no instance '" + name + "'");
}

std::vector<ResidueElem> dual_gradient_point(const PvsInstance& inst, std::span<const std::uint64_t> L,
                                             const ResidueRing& ring) {
  if (L.size() != inst.n) throw Error(Errc::ArityMismatch, "L has the wrong length");
  if (inst.d % ring.p() == 0) throw Error(Errc::DegreeDivisible, "p divides the degree");
  const std::uint64_t N = ring.modulus();
  std::vector<std::uint64_t> l(L.begin(), L.end());
  for (auto& v : l) v %= N;
  const std::uint64_t fv = eval_mod(inst.f_dual, l, N);
  if (!ring.is_unit(fv)) throw Error(Errc::NonUnitValue, "f_dual(L) is not a unit");
  const std::uint64_t scale = ring.mul(ring.inv(inst.d % N), ring.inv(fv));
  std::vector<ResidueElem> c;
  for (const auto& g : gradient(inst.f_dual)) c.push_back(ring.elem(static_cast<std::int64_t>(ring.mul(scale, eval_mod(g, l, N)))));
  return c;
}

bool critical_value_identity_check(const PvsInstance& inst, std::span<const std::uint64_t> L,
                                   const ResidueRing& ring) {
  if (arithmetic_bad_prime(inst, ring.p())) {
    throw Error(Errc::BadPrime, "p = " + std::to_string(ring.p()) + " divides 2 d num(b0) den(b0) for " + inst.name);
  }
  const auto c = dual_gradient_point(inst, L, ring);
  const std::uint64_t N = ring.modulus();
  std::vector<std::uint64_t> x;
  for (const auto& e : c) x.push_back(e.value());
  std::vector<std::uint64_t> l(L.begin(), L.end());
  for (auto& v : l) v %= N;
  const std::uint64_t lhs = eval_mod(inst.f, x, N);
  const std::uint64_t dinv = ring.inv(inst.d % N);
  const std::uint64_t rhs =
      ring.mul(ring.mul(ring.pow(dinv, inst.d), inst.b0.reduce(ring)), ring.inv(eval_mod(inst.f_dual, l, N)));
  return lhs == rhs;
}

bool arithmetic_bad_prime(const PvsInstance& inst, std::uint64_t p) {
  if (p == 2) return true;
  const auto divides = [p](std::int64_t v) { return v % static_cast<std::int64_t>(p) == 0; };
  return divides(static_cast<std::int64_t>(inst.d)) || divides(inst.b0.num) || divides(inst.b0.den);
}

BadPrimeReport bad_prime_report(const PvsInstance& inst, std::uint64_t p) {
  if (arithmetic_bad_prime(inst, p)) {
    return {true, "p divides 2 d num(b0) den(b0)"};
  }
  const ResidueRing field(p, 1);
  const std::size_t n = inst.n;
  std::vector<std::vector<std::uint64_t>> points;
  std::uint64_t total = 1;
  bool exhaustive = true;
  for (std::size_t i = 0; i < n; ++i) {
    total *= p;
    if (total > 4096) {
      exhaustive = false;
      break;
    }
  }
  if (exhaustive) {
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::vector<std::uint64_t> L(n);
      decode_point(idx, p, L);
      points.push_back(std::move(L));
    }
  } else {
    std::mt19937_64 rng(0);
    for (int s = 0; s < 256; ++s) {
      std::vector<std::uint64_t> L(n);
      for (auto& v : L) v = rng() % p;
      points.push_back(std::move(L));
    }
  }

  for (const auto& L : points) {
    if (eval_mod(inst.f_dual, L, p) == 0) continue;
    std::vector<std::int64_t> signed_L(L.begin(), L.end());
    try {
      loghessian_disc(inst.f_dual, signed_L, p);
    } catch (const Error& e) {
      if (e.code() != Errc::SingularHessian) throw;
      return {true, "log-Hessian of f_dual is singular mod p at L = (" + join(L) + ")"};
    }
    const ChartPolynomial cp = restrict_to_chart(inst.f, Chart::hyperplane(L), field);
    for (const auto& c : scan_critical_residues(cp.g, p)) {
      if (c.unit_value && c.degenerate) {
        return {true, "degenerate critical point of f on the chart L.x = 1 at L = (" + join(L) + ")"};
      }
    }
  }
  return {false, ""};
}

bool is_bad_prime(const PvsInstance& inst, std::uint64_t p) { return bad_prime_report(inst, p).bad; }

}  // namespace phvs

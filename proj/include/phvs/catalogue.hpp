#pragma once

// Regular prehomogeneous vector spaces given as polynomial data
// (n, d, f, f dual, b0), with the Bernstein-Sato leading coefficient
// re-derived from the operator identity f_dual(d/dx) f^{s+1} = b(s) f^s.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phvs/multipoly.hpp"
#include "phvs/residue.hpp"

namespace phvs {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  /// Parses "a/b" or "a"; the result is reduced with den > 0.
  static Rational parse(std::string_view text);
  std::string to_string() const;
  /// num * den^{-1} in the ring. Throws Errc::BadPrime if p divides den.
  std::uint64_t reduce(const ResidueRing& ring) const;

  friend bool operator==(const Rational&, const Rational&) = default;
};

struct PvsInstance {
  std::string name;
  std::size_t n = 0;
  unsigned d = 0;
  MultiPoly f;
  MultiPoly f_dual;
  Rational b0;
};

/// c_s with f_dual(d/dx) f^{s+1} = c_s f^s, for s = 0..d.
/// Throws Errc::NotBernsteinPair if some left side is not a constant multiple of f^s.
std::vector<Rational> bernstein_values(const MultiPoly& f, const MultiPoly& f_dual, unsigned d);
/// Leading coefficient of the degree-d polynomial through (s, c_s).
Rational compute_b0(const MultiPoly& f, const MultiPoly& f_dual, unsigned d);

/// linear, square, hyperbola, quadric-2, quadric-3, quadric-4, det2.
const std::vector<PvsInstance>& builtin_instances();
/// Throws Errc::InvalidArgument for unknown names.
const PvsInstance& builtin_instance(std::string_view name);

/// Parses blank-line separated blocks of name=, n=, d=, f=, fdual=, b0= lines
/// (# starts a comment). Every stored b0 is re-derived; a mismatch throws
/// Errc::NotBernsteinPair.
std::vector<PvsInstance> parse_catalogue(std::string_view text);
std::vector<PvsInstance> load_catalogue(const std::filesystem::path& path);
std::string format_catalogue(const std::vector<PvsInstance>& instances);
std::filesystem::path default_catalogue_path();

/// A builtin name, a catalogue file (first block) or "file:name".
PvsInstance resolve_instance(std::string_view ref);

/// d^{-1} grad f_dual(L) / f_dual(L) mod p^m. Throws Errc::NonUnitValue if
/// f_dual(L) is not a unit, Errc::DegreeDivisible if p | d.
std::vector<ResidueElem> dual_gradient_point(const PvsInstance& inst, std::span<const std::uint64_t> L,
                                             const ResidueRing& ring);

/// f(c) == d^{-d} b0 f_dual(L)^{-1} mod p^m at the dual gradient point c.
/// Throws Errc::BadPrime when p | 2 d num(b0) den(b0).
bool critical_value_identity_check(const PvsInstance& inst, std::span<const std::uint64_t> L,
                                   const ResidueRing& ring);

/// p | 2 d num(b0) den(b0).
bool arithmetic_bad_prime(const PvsInstance& inst, std::uint64_t p);

struct BadPrimeReport {
  bool bad = false;
  std::string reason;
};
/// Arithmetic test, then a structural scan over L mod p with f_dual(L) a unit
/// (all of them when p^n <= 4096, otherwise 256 seeded samples): singular
/// log-Hessian of f_dual, or a degenerate unit-valued critical residue of f
/// on the chart L.x = 1. Flags primes; never certifies one as good.
BadPrimeReport bad_prime_report(const PvsInstance& inst, std::uint64_t p);
bool is_bad_prime(const PvsInstance& inst, std::uint64_t p);

}  // namespace phvs

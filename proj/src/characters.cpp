#include "phvs/characters.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "phvs/error.hpp"

namespace phvs {

namespace {

void require_primitive(const MultChar& chi, const char* what) {
  if (!is_primitive(chi)) {
    throw Error(Errc::NotPrimitive, std::string(what) + ": character index " +
                                        std::to_string(chi.index()) + " is not primitive");
  }
}

Complex root_of_unity(std::uint64_t j, std::uint64_t order) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(order);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

std::uint64_t find_generator(const ResidueRing& ring) {
  const std::uint64_t phi = ring.unit_count();
  const std::vector<std::uint64_t> ells = prime_factors(phi);
  for (std::uint64_t g = 2; g < ring.modulus(); ++g) {
    if (!ring.is_unit(g)) continue;
    bool generates = true;
    for (const std::uint64_t ell : ells) {
      if (ring.pow(g, phi / ell) == 1) {
        generates = false;
        break;
      }
    }
    if (generates) return g;
  }
  // p = 3, m = 1: the unit group {1, 2} is generated by 2, found above.
  throw Error(Errc::Internal, "no generator found");
}

std::shared_ptr<const CharacterTables> CharacterTables::get(const ResidueRing& ring) {
  static std::mutex mutex;
  static std::map<std::pair<std::uint64_t, unsigned>, std::shared_ptr<const CharacterTables>> cache;
  const std::lock_guard lock(mutex);
  auto& slot = cache[{ring.p(), ring.m()}];
  if (!slot) slot = std::make_shared<const CharacterTables>(ring);
  return slot;
}

CharacterTables::CharacterTables(const ResidueRing& ring)
    : ring_(ring), generator_(0), phi_(ring.unit_count()) {
  const std::uint64_t n = ring.modulus();
  if (n > kMaxTableSize) throw Error(Errc::BudgetExceeded, "character tables limited to p^m <= 2^24");
  generator_ = find_generator(ring);
  log_.assign(n, -1);
  exp_.resize(phi_);
  std::uint64_t x = 1;
  for (std::uint64_t e = 0; e < phi_; ++e) {
    log_[x] = static_cast<std::int32_t>(e);
    exp_[e] = static_cast<std::uint32_t>(x);
    x = ring.mul(x, generator_);
  }
  unit_roots_.resize(phi_);
  for (std::uint64_t j = 0; j < phi_; ++j) unit_roots_[j] = root_of_unity(j, phi_);
  additive_roots_.resize(n);
  for (std::uint64_t j = 0; j < n; ++j) additive_roots_[j] = root_of_unity(j, n);
}

MultChar::MultChar(const ResidueRing& ring, std::uint64_t index)
    : MultChar(CharacterTables::get(ring), index) {}

MultChar::MultChar(std::shared_ptr<const CharacterTables> tables, std::uint64_t index)
    : tables_(std::move(tables)), index_(index % tables_->unit_count()) {}

Complex MultChar::operator()(const ResidueElem& x) const {
  if (!(x.ring() == ring())) throw Error(Errc::RingMismatch, "character and argument rings differ");
  return (*this)(x.value());
}

MultChar MultChar::pow(std::uint64_t e) const {
  const std::uint64_t phi = tables_->unit_count();
  return MultChar(tables_, index_ * (e % phi) % phi);
}

AddChar::AddChar(const ResidueRing& ring, std::uint64_t twist) : AddChar(CharacterTables::get(ring), twist) {}

AddChar::AddChar(std::shared_ptr<const CharacterTables> tables, std::uint64_t twist)
    : tables_(std::move(tables)), twist_(twist % tables_->ring().modulus()) {}

Complex AddChar::operator()(const ResidueElem& x) const {
  if (!(x.ring() == ring())) throw Error(Errc::RingMismatch, "character and argument rings differ");
  return (*this)(x.value());
}

bool is_primitive(const MultChar& chi) noexcept {
  if (chi.ring().m() == 1) return chi.index() != 0;
  return chi.index() % chi.ring().p() != 0;
}

bool is_primitive(const AddChar& psi) noexcept { return psi.twist() % psi.ring().p() != 0; }

std::vector<std::uint64_t> primitive_indices(const ResidueRing& ring) {
  std::vector<std::uint64_t> out;
  const auto tables = CharacterTables::get(ring);
  for (std::uint64_t k = 0; k < ring.unit_count(); ++k) {
    if (is_primitive(MultChar(tables, k))) out.push_back(k);
  }
  return out;
}

MultChar legendre_character(std::uint64_t p) {
  const ResidueRing field(p, 1);
  return MultChar(field, (p - 1) / 2);
}

Complex gauss_sum(const MultChar& chi, const AddChar& psi) {
  if (chi.ring().m() != 1 || !(chi.ring() == psi.ring())) {
    throw Error(Errc::RingMismatch, "gauss_sum needs both characters on the same Z/p");
  }
  Complex total{0.0, 0.0};
  for (std::uint64_t x = 0; x < chi.ring().p(); ++x) total += chi(x) * psi(x);
  return total;
}

AddChar derived_psi_prime(const MultChar& chi) {
  const ResidueRing& ring = chi.ring();
  if (ring.m() < 2) throw Error(Errc::InvalidArgument, "derived_psi_prime needs m >= 2");
  require_primitive(chi, "derived_psi_prime");
  const std::uint64_t p = ring.p();
  const std::uint64_t phi = ring.unit_count();
  const std::uint64_t step = ring.p_power(ring.m() - 1);
  // 1 + p^{m-1} has order p, so chi of it is a p-th root of unity exp(2 pi i t'/p).
  const auto e = static_cast<std::uint64_t>(chi.tables().log(1 + step));
  const std::uint64_t exponent = e % phi * chi.index() % phi;
  if (exponent % (phi / p) != 0) throw Error(Errc::Internal, "1 + p^{m-1} does not have order p");
  const std::uint64_t twist = exponent / (phi / p);
  if (twist == 0) throw Error(Errc::Internal, "derived character is trivial for a primitive chi");
  return AddChar(ring.residue_field(), twist);
}

Complex alpha_tilde_mult(const MultChar& chi) {
  const ResidueRing& ring = chi.ring();
  if (ring.m() < 2) throw Error(Errc::InvalidArgument, "alpha_tilde_mult needs m >= 2");
  require_primitive(chi, "alpha_tilde_mult");
  Complex total{0.0, 0.0};
  for (std::uint64_t x = 0; x < ring.modulus(); ++x) total += chi(ring.add(1, ring.mul(x, x)));

  const Complex closed = alpha_tilde_mult_closed(chi);
  const double scale = std::pow(static_cast<double>(ring.p()), ring.m() / 2.0);
  if (std::abs(total - closed) > 1e-9 * scale) {
    throw Error(Errc::Internal, "alpha_tilde brute force disagrees with its closed form for index " +
                                    std::to_string(chi.index()));
  }
  return total;
}

Complex alpha_tilde_mult_closed(const MultChar& chi) {
  const ResidueRing& ring = chi.ring();
  if (ring.m() < 2) throw Error(Errc::InvalidArgument, "alpha_tilde_mult_closed needs m >= 2");
  require_primitive(chi, "alpha_tilde_mult_closed");
  const auto q = static_cast<double>(ring.p());
  const unsigned m = ring.m();
  if (m % 2 == 0) return {std::pow(q, m / 2), 0.0};
  return std::pow(q, (m - 1) / 2) * gauss_sum(legendre_character(ring.p()), derived_psi_prime(chi));
}

Complex alpha_tilde_add(const AddChar& psi) {
  const ResidueRing& ring = psi.ring();
  if (ring.m() < 2) throw Error(Errc::InvalidArgument, "alpha_tilde_add needs m >= 2");
  if (!is_primitive(psi)) throw Error(Errc::NotPrimitive, "alpha_tilde_add needs a primitive additive character");
  Complex total{0.0, 0.0};
  for (std::uint64_t x = 0; x < ring.modulus(); ++x) total += psi(ring.mul(x, x));
  return total;
}

Complex alpha_factor(const MultChar& chi) {
  const ResidueRing& ring = chi.ring();
  if (ring.m() < 2) throw Error(Errc::InvalidArgument, "alpha_factor needs m >= 2");
  require_primitive(chi, "alpha_factor");
  if (ring.m() % 2 == 0) return {1.0, 0.0};
  const Complex g = gauss_sum(legendre_character(ring.p()), derived_psi_prime(chi));
  const Complex alpha = g / std::sqrt(static_cast<double>(ring.p()));

  constexpr double kTol = 1e-10;
  if (std::abs(std::abs(alpha) - 1.0) > kTol) {
    throw Error(Errc::Internal, "alpha(chi, m) does not have modulus 1");
  }
  const bool real_unit = std::abs(alpha.imag()) <= kTol && std::abs(std::abs(alpha.real()) - 1.0) <= kTol;
  const bool imag_unit = std::abs(alpha.real()) <= kTol && std::abs(std::abs(alpha.imag()) - 1.0) <= kTol;
  if (!real_unit && !imag_unit) throw Error(Errc::Internal, "alpha(chi, m) is not a fourth root of unity");
  if (ring.p() % 4 == 1 && !real_unit) throw Error(Errc::Internal, "alpha(chi, m) not real for p = 1 mod 4");
  // Snap to the exact root so downstream phases carry no rounding from the Gauss sum.
  if (real_unit) return {alpha.real() > 0 ? 1.0 : -1.0, 0.0};
  return {0.0, alpha.imag() > 0 ? 1.0 : -1.0};
}

}  // namespace phvs

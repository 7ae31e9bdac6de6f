#pragma once

// End-to-end verification of the closed form of S(L) for catalogue instances.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "phvs/catalogue.hpp"
#include "phvs/characters.hpp"
#include "phvs/charsums.hpp"

namespace phvs {

struct Vanishing {};

struct ClosedFormParts {
  /// G_d / q^{m/2} with G_d the sum of chi^d(y) psi(y).
  Complex gauss_like_normalized;
  /// b0 f_dual(L)^{-1} d^{-d}.
  ResidueElem chi_arg;
  Complex alpha;
  int kappa = 1;
  /// q^{mn/2}.
  double scale = 0;
};

struct ClosedFormResult {
  Complex value;
  ClosedFormParts parts;
};

using ClosedForm = std::variant<Vanishing, ClosedFormResult>;

/// Cached ingredients of the closed form for one instance, ring and psi.
/// Thread-safe after construction.
class ClosedFormEvaluator {
 public:
  /// Throws Errc::BadPrime when p | 2 d num(b0) den(b0), Errc::NotPrimitive
  /// for a non-primitive psi, Errc::InvalidArgument when m < 2.
  ClosedFormEvaluator(const PvsInstance& inst, const ResidueRing& ring, const AddChar& psi);

  const PvsInstance& instance() const noexcept { return inst_; }
  const ResidueRing& ring() const noexcept { return ring_; }
  double scale() const noexcept { return scale_; }

  struct CharData {
    Complex gauss_like_normalized;
    Complex alpha;
    /// scale * gauss_like_normalized * alpha^{n-1}.
    Complex prefactor;
  };
  /// Computed on first use and cached.
  CharData char_data(const MultChar& chi) const;

  /// legendre(-d 2^{n-1} h(L))^m as +-1, or 0 when p | f_dual(L). Throws
  /// Errc::SingularHessian when the log-Hessian at L is singular mod p.
  int kappa(std::span<const std::uint64_t> L) const;

  /// log_g(b0 d^{-d}); chi_arg(L) has log this minus log f_dual(L).
  std::uint64_t base_log() const noexcept { return base_log_; }

  ClosedForm evaluate(const MultChar& chi, std::span<const std::uint64_t> L) const;

 private:
  PvsInstance inst_;
  ResidueRing ring_;
  AddChar psi_;
  std::shared_ptr<const CharacterTables> tables_;
  double scale_;
  std::uint64_t base_;
  std::uint64_t base_log_;
  int kappa_sign_;  // legendre(-d 2^{n-1})
  /// kappa by L mod p: 0 vanishing, +-1, 2 for a singular log-Hessian.
  std::vector<std::int8_t> kappa_table_;
  mutable std::mutex mutex_;
  mutable std::map<std::uint64_t, CharData> chars_;
};

/// The closed-form prediction for S(L). Vanishing when p | f_dual(L).
ClosedForm closed_form_S(const PvsInstance& inst, const MultChar& chi, const AddChar& psi,
                         std::span<const std::uint64_t> L);

struct LPolicy {
  enum class Kind { All, Sample, List };
  Kind kind = Kind::All;
  std::uint64_t count = 0;
  std::vector<std::vector<std::uint64_t>> list;

  /// "all", "sample:<k>" or "list:<a,b,..>;<a,b,..>".
  static LPolicy parse(const std::string& text);
  std::string to_string() const;
};

struct ChiPolicy {
  enum class Kind { All, Index, Sample };
  Kind kind = Kind::All;
  std::uint64_t value = 0;

  /// "all", "<k>" or "sample:<k>".
  static ChiPolicy parse(const std::string& text);
  std::string to_string() const;
};

struct VerifyConfig {
  std::uint64_t p = 5;
  unsigned m = 2;
  LPolicy L;
  ChiPolicy chi;
  std::uint64_t psi_twist = 1;
  std::uint64_t seed = 0;
  /// Per enumeration and for the whole run (number of L times p^{mn}).
  std::uint64_t budget = 100'000'000;
  double tol = 1e-9;
  unsigned threads = 0;
  bool parseval = true;
};

enum class Status { Match, VanishMatch, Mismatch, SkippedBadPrime };
std::string_view status_name(Status s) noexcept;

struct Record {
  std::uint64_t chi = 0;
  std::vector<std::uint64_t> L;
  unsigned fdual_valuation = 0;
  Complex brute;
  /// Empty when the prediction is "vanishing" or was not evaluated.
  std::optional<Complex> closed;
  double abs_err = 0;
  Status status = Status::Match;
  int kappa = 0;
  Complex alpha;
  /// |arg(brute / closed)| for non-vanishing predictions.
  double phase_residual = 0;
};

struct ParsevalRecord {
  std::string status;  // OK, FAIL, SKIPPED_BUDGET
  std::uint64_t chi = 0;
  double lhs = 0;
  double rhs = 0;
  std::uint64_t n1 = 0;
  double rel_err = 0;
};

struct VerifyReport {
  std::string instance;
  std::size_t n = 0;
  unsigned d = 0;
  std::uint64_t p = 0;
  unsigned m = 0;
  std::uint64_t psi_twist = 1;
  std::string chi_policy;
  std::string L_policy;
  std::uint64_t seed = 0;
  double tol = 0;
  double scale = 0;
  bool bad_prime = false;
  std::string bad_prime_reason;
  bool candidate_bad_prime = false;
  std::vector<std::uint64_t> chis;
  std::vector<Record> records;
  std::optional<ParsevalRecord> parseval;
  std::vector<std::string> replay;
  /// Set when the run stopped early (budget); records hold the finished part.
  std::string error;
  double max_err_normalized = 0;
  double max_phase_residual = 0;
  double seconds = 0;

  std::size_t count(Status s) const;
  bool has_mismatch() const { return count(Status::Mismatch) > 0; }
};

VerifyReport verify_instance(const PvsInstance& inst, const VerifyConfig& config);

/// Replay command line for one (chi, psi, L) triple.
std::string replay_command(const std::string& instance, std::uint64_t p, unsigned m, std::uint64_t chi,
                           std::uint64_t psi, std::span<const std::uint64_t> L);

struct TraceStage {
  std::string name;
  Complex value;
};

struct PipelineTrace {
  std::vector<TraceStage> stages;  // factorized, critical_points, closed_form
  Complex brute;
  /// max |stage_i - stage_j| over pairs, and max |stage_i - brute|.
  double max_pairwise_delta = 0;
  double max_brute_delta = 0;
  std::vector<ResidueElem> critical_point;
  bool critical_value_identity = false;
  double scale = 0;
};

/// Three successive representations of S(L): factorized, summed over critical points, closed form.
/// Requires f_dual(L) to be a unit.
PipelineTrace pipeline_trace(const PvsInstance& inst, const MultChar& chi, const AddChar& psi,
                             std::span<const std::uint64_t> L, const SumOptions& opts = {});

struct SweepConfig {
  std::uint64_t p = 5;
  unsigned m = 2;
  std::uint64_t psi_twist = 1;
  double tol = 1e-9;
  /// Random L at which orbit-derived values are recomputed from scratch.
  unsigned crosschecks = 8;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct SweepSummary {
  std::string instance;
  std::uint64_t p = 0;
  unsigned m = 0;
  std::size_t n = 0;
  std::uint64_t chars = 0;
  std::uint64_t L_count = 0;
  std::uint64_t orbits = 0;
  std::uint64_t pairs = 0;
  std::uint64_t match = 0;
  std::uint64_t vanish_match = 0;
  std::uint64_t mismatch = 0;
  std::uint64_t skipped = 0;
  /// L at which every chi was compared numerically; at the others the closed
  /// form's ingredients were checked to be the orbit representative's shifted
  /// by the transport exponent, which makes each comparison the representative's.
  std::uint64_t explicit_points = 0;
  bool bad_prime = false;
  /// max |brute - closed| / q^{mn/2} over unit f_dual(L).
  double max_err = 0;
  /// max |brute| / q^{mn/2} where f_dual(L) = 0 mod p.
  double max_vanish = 0;
  double max_phase_residual = 0;
  /// max | |brute| / q^{mn/2} - 1 | over unit f_dual(L).
  double max_magnitude_dev = 0;
  std::uint64_t crosscheck_points = 0;
  double crosscheck_max_err = 0;
  double seconds = 0;
};

/// Every primitive chi against every L in (Z/p^m)^n. S(L) is enumerated once
/// per orbit of L under scaling by units and transported with
/// S(uL) = chi(u)^{-d} S(L); the closed form is evaluated at every pair.
SweepSummary sweep_all(const PvsInstance& inst, const SweepConfig& config);

}  // namespace phvs

#pragma once

// JSON and CSV rendering of verification results.
//
// Numbers are decimal strings with 15 significant digits. Field order is
// fixed; see docs/report_schema.md.

#include <string>

#include "phvs/charsums.hpp"
#include "phvs/morse.hpp"
#include "phvs/verifier.hpp"

namespace phvs {

/// "%.15g" with negative zero printed as "0".
std::string format_number(double x);

/// Two-space indented JSON. The "seconds" field is omitted when include_timing is false.
std::string to_json(const VerifyReport& report, bool include_timing = true);
std::string to_json(const SweepSummary& summary, bool include_timing = true);
std::string to_json(const PipelineTrace& trace);
std::string to_json(const MorseNormalForm& nf);
std::string to_json(const SumValue& value);
std::string to_json(const CrtResult& result);

/// One row per record: chi, L, fdual_valuation, brute/closed parts, abs_err, status.
std::string to_csv(const VerifyReport& report);

}  // namespace phvs

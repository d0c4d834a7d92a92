#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "superopt/canonical.hpp"
#include "superopt/verify.hpp"
#include "superopt/wiener_hopf.hpp"

namespace superopt {

using Json = nlohmann::ordered_json;

// Input problem: a Laurent polynomial plus run options.
struct ProblemSpec {
  Index m = 0;
  Index n = 0;
  std::vector<std::pair<int, CMatrix>> coeffs;  // distinct k, in file order
  Options options;
  // Optional expectations checked by the verify command, e.g.
  // {"superoptimal_values": [1, 0.5], "tol": 1e-8}.
  Json expect;

  MatFun symbol() const { return MatFun::from_coeffs(m, n, coeffs); }
};

// Throws Error(Parse) with line and column, or Error(Schema) naming the field.
ProblemSpec parse_problem(const std::string& text);
ProblemSpec parse_problem_file(const std::string& path);
Json problem_to_json(const ProblemSpec& spec);

// [{ "k": int, "re": [[...]], "im": [[...]] }, ...] in increasing k.
Json coeffs_to_json(const MatFun& f);
MatFun coeffs_from_json(const Json& j, Index m, Index n);

Json check_to_json(const CheckRecord& c);
Json report_to_json(const VerificationReport& r);
VerificationReport report_from_json(const Json& j);

Json factorization_to_json(const CanonicalFactorization& cf, bool with_factors);
Json nehari_to_json(const NehariResult& r);
Json wh_to_json(const WienerHopfIndices& w);
Json classification_to_json(const VeryBadlyApproximable& c);

// Checks for the expectations block of a problem; empty when none are given.
std::vector<CheckRecord> expectation_checks(const Json& expect, const CanonicalFactorization* cf,
                                            const WienerHopfIndices* wh);

// Deterministic text: keys in insertion order, two-space indent, every
// floating-point number with 17 significant digits.
std::string dump_json(const Json& j);

}  // namespace superopt

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "quiverstair/linalg.hpp"
#include "serialization.hpp"

namespace quiverstair::cli {

enum ExitCode : int { kSuccess = 0, kMismatch = 1, kInputError = 2, kNumericError = 3 };

/// Environment variables read for tolerance defaults; flags take precedence.
inline constexpr const char* kTolAbsEnv = "QUIVERSTAIR_TOL_ABS";
inline constexpr const char* kTolRelEnv = "QUIVERSTAIR_TOL_REL";

/// Defaults overridden by the environment variables above. Throws
/// std::invalid_argument for an unparsable or nonpositive value.
TolerancePolicy default_tolerance();

struct ReportOptions {
  TolerancePolicy tol;
  bool json = false;
  std::string output;  // empty: standard output
};

struct GenOptions {
  std::string spec_path;
  std::string kind = "cycle";
  std::string orientations;
  std::vector<std::string> labels;
  std::vector<std::string> eigs;  // "re" or "re,im"
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string output;
  std::string truth_output;  // empty: <output>.truth.json
  double noise = 0.0;
  bool general_invertible = false;
  double max_condition = 1e3;
};

io::Json canon_report(const Representation& a, const TolerancePolicy& tol);
io::Json regularize_report(const Representation& a, const TolerancePolicy& tol);
/// Report plus the overall verdict under "pass".
io::Json verify_report(const Representation& a, const PlantSpec& truth, const TolerancePolicy& tol);

std::string render_text(const io::Json& report);

/// Each command returns its exit code; exceptions are left to the caller.
int run_canon(const std::string& input, const ReportOptions& options, std::ostream& out);
int run_regularize(const std::string& input, const ReportOptions& options, std::ostream& out);
int run_gen(const GenOptions& options, std::ostream& out);
int run_verify(const std::string& input, const std::string& truth, const ReportOptions& options, std::ostream& out);

/// Runs `body` and maps exceptions onto exit codes, printing the diagnostic
/// to `err`.
int guarded(const std::function<int()>& body, std::ostream& err);

cplx parse_eigenvalue(const std::string& text);

}  // namespace quiverstair::cli

#pragma once

// Command implementations behind the rhcli executable. Each command takes a
// loaded configuration and returns its document; run_cli adds argument
// parsing, file output and exit codes.

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rh/certifier.hpp"
#include "rh/config.hpp"
#include "rh/solver.hpp"

namespace rh {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitHypothesis = 3,
  kExitEmptyCertificate = 4,
  kExitNoConvergence = 5,
};

using Json = nlohmann::ordered_json;

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

struct RunContext {
  std::string config_hash;
  bool timestamp = true;
};

/// Rectangular grid dump "t,s,k" with density^2 rows (density 1 gives t = s = 0).
void write_kernel_csv(const ProblemConfig& cfg, int density, std::ostream& out);

Json bounds_report(const ProblemConfig& cfg, const RunContext& ctx);

CertifyRequest certify_request(const ProblemConfig& cfg);
Json certificate_json(const Certificate& cert, const RunContext& ctx);

struct SolveOutcome {
  DiscreteSolution solution;
  VerificationReport verification;
  std::optional<double> cone_margin;
  std::optional<double> c;
  double u0{0};
};

SolveOutcome run_solve(const ProblemConfig& cfg);
Json solve_report(const ProblemConfig& cfg, const SolveOutcome& out, const RunContext& ctx);
void write_solution_csv(const DiscreteSolution& sol, std::ostream& out);

/// Full command line: rhcli <kernel|bounds|certify|solve> --config PATH ...
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rh

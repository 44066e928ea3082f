#pragma once

// Problem configuration: a flat key/value file with sections.
//
//   # comment            ; comment
//   [problem]
//   T = 1
//   omega = 1.5
//   h = "1/(2+(t-1)^2)+u^2/5+2*u+1/(1+7*v^2)+7"
//
// Expressions must be quoted. Every key is checked at load and errors carry
// the 1-based line number.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rh/bounds.hpp"
#include "rh/certifier.hpp"
#include "rh/params.hpp"
#include "rh/solver.hpp"

namespace rh {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  int line_;
  std::string detail_;
};

struct SolverSettings {
  int nodes = 401;
  double theta = 0.5;
  double tol = 1e-10;
  int max_iter = 5000;
  double divergence_ceiling = 1e12;
  double verify_threshold = 1e-3;
  NystromRule rule = NystromRule::ProductLinear;
  std::optional<double> u0;
};

struct ReferenceValues {
  std::optional<double> m;
  std::optional<double> M;
  std::vector<std::pair<double, double>> f_bounds;  // (rho, value)
};

struct ProblemConfig {
  double T = 1.0;
  double omega = 1.0;
  std::optional<std::string> h;
  std::string g = "1";
  std::optional<double> a;

  ConeVariant cone = ConeVariant::ChangingSign;
  std::vector<RadiusSpec> radii;
  ThresholdSource threshold_source = ThresholdSource::ClosedForm;
  std::optional<double> manual_m;
  std::optional<double> manual_M;
  double margin = 0.0;

  SolverSettings solver;
  ReferenceValues reference;

  std::map<std::string, int> key_lines;  // "section.key" -> line

  ProblemParams<double> params() const { return ProblemParams<double>{T, omega}; }
  StripInterval<double> strip() const;  // throws ConfigError when [strip] a is absent
  const std::string& h_source() const;  // throws ConfigError when h is absent
  int line_of(const std::string& key) const;

  /// Re-checks every cross-key precondition (after command-line overrides).
  void validate() const;
};

ProblemConfig parse_config(std::string_view text);
ProblemConfig load_config(const std::string& path);

/// "1:index1, 2:index0"
std::vector<RadiusSpec> parse_radii(std::string_view text);

}  // namespace rh

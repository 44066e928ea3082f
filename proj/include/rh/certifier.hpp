#pragma once

// Fixed-point-index conditions on cone radii and the multiplicity ladders
// built from them.
//
//   Index1 at rho:  sup f / rho over the cone's index-1 box  <  m
//   Index0 at rho:  inf f / rho over the cone's index-0 box  >  M(a, b)
//
// A ladder is an alternating chain of satisfied conditions with increasing
// radii; after an Index0 radius rho the next radius must exceed rho / c,
// after an Index1 radius it must exceed rho. Chains of length 2, 3, 4
// guarantee 1, 2, 3 nonzero solutions.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rh/bounds.hpp"
#include "rh/expr.hpp"
#include "rh/params.hpp"
#include "rh/solver.hpp"

namespace rh {

/// A structural hypothesis on the data fails (negative weight, non-positive
/// integral constant, non-finite f on a certification box).
class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConeVariant { ChangingSign, NonNegative, StrictlyPositive };
enum class ConditionKind { Index1, Index0 };
enum class ThresholdSource { ClosedForm, QuadratureOracle, ManualOverride };
enum class Ladder { S1, S2, S3, S4, S5, S6 };

std::string to_string(ConeVariant v);
std::string to_string(ConditionKind k);
std::string to_string(ThresholdSource s);
std::string to_string(Ladder l);
ConeVariant cone_variant_from_string(const std::string& s);
ConditionKind condition_kind_from_string(const std::string& s);
ThresholdSource threshold_source_from_string(const std::string& s);

struct ThresholdValue {
  double value{0};
  ThresholdSource source{ThresholdSource::ClosedForm};
};

struct Thresholds {
  ThresholdValue m;
  ThresholdValue M;

  /// Single label when both agree, else "mixed".
  std::string source_label() const;
};

/// Throws HypothesisViolation if g < 0 anywhere on `points` equispaced nodes of [-T, T].
void check_weight_nonnegative(const ProblemParams<double>& p, const expr::Expr& g, int points = 2001);

/// m = 1 / sup_t \int |k(t,s)| g(s) ds. The closed form is used only for
/// g == 1 and `preferred` == ClosedForm; otherwise the quadrature oracle.
ThresholdValue threshold_m(const ProblemParams<double>& p, const expr::Expr& g,
                           ThresholdSource preferred = ThresholdSource::ClosedForm);

/// M = 1 / inf_{t in [aT,bT]} \int_{aT}^{bT} k(t,s) g(s) ds.
ThresholdValue threshold_M(const ProblemParams<double>& p, const StripInterval<double>& strip, const expr::Expr& g,
                           ThresholdSource preferred = ThresholdSource::ClosedForm);

Thresholds compute_thresholds(const ProblemParams<double>& p, const StripInterval<double>& strip,
                              const expr::Expr& g, ThresholdSource source,
                              std::optional<double> manual_m = std::nullopt,
                              std::optional<double> manual_M = std::nullopt);

struct RadiusSpec {
  double rho{1};
  ConditionKind kind{ConditionKind::Index1};
};

/// u- and v-ranges of the box a condition is evaluated on.
struct ConditionBox {
  expr::Box3 box;
  std::string v_range_note;
};

ConditionBox condition_box(const ProblemParams<double>& p, const StripInterval<double>& strip, double c,
                           ConeVariant cone, double rho, ConditionKind kind);

struct RadiusCondition {
  double rho{0};
  ConditionKind kind{ConditionKind::Index1};
  double f_bound{0};
  double threshold{0};
  bool satisfied{false};
  bool marginal{false};
  Eigen::Vector3d attaining_point{Eigen::Vector3d::Zero()};
  expr::Box3 box;
};

struct CheckOptions {
  double margin = 0.0;
  expr::BoxSearchOptions search;
};

RadiusCondition check_condition(const ProblemParams<double>& p, const StripInterval<double>& strip, double c,
                                ConeVariant cone, const expr::Expr& f, double rho, ConditionKind kind,
                                const Thresholds& thresholds, const CheckOptions& opts = {});

/// Ordering constraints of a ladder, checked verbatim on its radii.
bool ladder_ordering_holds(Ladder l, const std::vector<double>& rhos, double c);

struct Verdict {
  std::optional<Ladder> ladder;
  int solution_count{0};
  std::vector<std::size_t> chain;  // indices into the condition list
};

/// Longest admissible chain among the satisfied conditions (sorted by rho).
Verdict multiplicity_verdict(const std::vector<RadiusCondition>& conditions, double c);

struct Discrepancy {
  std::string quantity;
  double reference{0};
  double computed{0};
  double relative_difference{0};
  std::string note;
};

struct Certificate {
  ProblemParams<double> params;
  StripInterval<double> strip;
  std::string h_source;
  std::string g_source;
  ConeVariant cone{ConeVariant::ChangingSign};
  double c{0};
  Thresholds thresholds;
  std::vector<RadiusCondition> conditions;
  Verdict verdict;
  std::vector<std::string> flags;
  std::vector<Discrepancy> discrepancies;
};

struct CertifyRequest {
  ProblemParams<double> params;
  StripInterval<double> strip;
  std::string h_source;
  std::string g_source{"1"};
  ConeVariant cone{ConeVariant::ChangingSign};
  std::vector<RadiusSpec> radii;
  ThresholdSource source{ThresholdSource::ClosedForm};
  std::optional<double> manual_m;
  std::optional<double> manual_M;
  CheckOptions check;
  // Reference values to compare against (m, M, per-radius f_bound).
  std::optional<double> reference_m;
  std::optional<double> reference_M;
  std::vector<std::pair<double, double>> reference_f_bounds;
};

Certificate certify(const CertifyRequest& req);

Discrepancy make_discrepancy(std::string quantity, double reference, double computed, std::string note);

struct ConeSanityReport {
  int samples{0};
  int violations{0};
  double worst_margin{0};  // smallest margin of F u over all samples
  double tolerance{1e-8};
};

/// Maps random piecewise-linear members u of {min_{[a,b]} u >= c |u|}
/// (amplitude <= 1) through the discrete operator and reports images that
/// leave the cone by more than tol.
ConeSanityReport cone_sanity_check(const DiscreteOperator& op, const StripInterval<double>& strip, double c,
                                   const expr::Expr& f, int samples = 100, std::uint64_t seed = 20240601,
                                   double tol = 1e-8);

}  // namespace rh

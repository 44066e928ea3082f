#include "rh/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "rh/oracles.hpp"

namespace rh {

std::string to_string(ConeVariant v) {
  switch (v) {
    case ConeVariant::ChangingSign: return "changing-sign";
    case ConeVariant::NonNegative: return "non-negative";
    case ConeVariant::StrictlyPositive: return "strictly-positive";
  }
  return "?";
}

std::string to_string(ConditionKind k) { return k == ConditionKind::Index1 ? "index1" : "index0"; }

std::string to_string(ThresholdSource s) {
  switch (s) {
    case ThresholdSource::ClosedForm: return "closed-form";
    case ThresholdSource::QuadratureOracle: return "oracle";
    case ThresholdSource::ManualOverride: return "manual";
  }
  return "?";
}

std::string to_string(Ladder l) { return "S" + std::to_string(static_cast<int>(l) + 1); }

ConeVariant cone_variant_from_string(const std::string& s) {
  if (s == "changing-sign") return ConeVariant::ChangingSign;
  if (s == "non-negative") return ConeVariant::NonNegative;
  if (s == "strictly-positive") return ConeVariant::StrictlyPositive;
  throw std::invalid_argument("unknown cone '" + s + "' (expected changing-sign, non-negative or strictly-positive)");
}

ConditionKind condition_kind_from_string(const std::string& s) {
  if (s == "index1" || s == "I1") return ConditionKind::Index1;
  if (s == "index0" || s == "I0") return ConditionKind::Index0;
  throw std::invalid_argument("unknown condition kind '" + s + "' (expected index1 or index0)");
}

ThresholdSource threshold_source_from_string(const std::string& s) {
  if (s == "closed-form") return ThresholdSource::ClosedForm;
  if (s == "oracle") return ThresholdSource::QuadratureOracle;
  if (s == "manual") return ThresholdSource::ManualOverride;
  throw std::invalid_argument("unknown threshold source '" + s + "' (expected closed-form, oracle or manual)");
}

std::string Thresholds::source_label() const {
  return m.source == M.source ? to_string(m.source) : "mixed";
}

void check_weight_nonnegative(const ProblemParams<double>& p, const expr::Expr& g, int points) {
  for (int i = 0; i < points; ++i) {
    const double s = points == 1 ? 0.0 : -p.T + 2.0 * p.T * double(i) / double(points - 1);
    const double v = expr::eval(g, s);
    if (v < 0.0) {
      std::ostringstream os;
      os.precision(17);
      os << "weight g is negative at s = " << s << " (g = " << v << ")";
      throw HypothesisViolation(os.str());
    }
  }
}

namespace {

bool uses_closed_form(const expr::Expr& g, ThresholdSource preferred) {
  return preferred == ThresholdSource::ClosedForm && expr::is_constant(g, 1.0);
}

double positive_or_throw(double integral, const char* what) {
  if (!(integral > 0.0) || !std::isfinite(integral))
    throw HypothesisViolation(std::string(what) + " is not positive; threshold undefined");
  return 1.0 / integral;
}

}  // namespace

ThresholdValue threshold_m(const ProblemParams<double>& p, const expr::Expr& g, ThresholdSource preferred) {
  check_weight_nonnegative(p, g);
  if (uses_closed_form(g, preferred))
    return {positive_or_throw(sup_abs_integral(p), "sup of the absolute kernel integral"), ThresholdSource::ClosedForm};
  auto weight = [&g](double s) { return expr::eval(g, s); };
  const auto r = oracle_sup_abs_integral(p, weight);
  return {positive_or_throw(r.value, "sup of the absolute kernel integral"), ThresholdSource::QuadratureOracle};
}

ThresholdValue threshold_M(const ProblemParams<double>& p, const StripInterval<double>& strip, const expr::Expr& g,
                           ThresholdSource preferred) {
  check_weight_nonnegative(p, g);
  if (uses_closed_form(g, preferred))
    return {positive_or_throw(inf_strip_integral(p, strip), "inf of the strip kernel integral"),
            ThresholdSource::ClosedForm};
  validate_strip(p, strip, true);
  auto weight = [&g](double s) { return expr::eval(g, s); };
  const auto r = oracle_inf_strip_integral(p, strip, weight);
  return {positive_or_throw(r.value, "inf of the strip kernel integral"), ThresholdSource::QuadratureOracle};
}

Thresholds compute_thresholds(const ProblemParams<double>& p, const StripInterval<double>& strip,
                              const expr::Expr& g, ThresholdSource source, std::optional<double> manual_m,
                              std::optional<double> manual_M) {
  if (source == ThresholdSource::ManualOverride) {
    if (!manual_m || !manual_M) throw std::invalid_argument("manual threshold source needs both manual m and M");
    if (!(*manual_m > 0.0) || !(*manual_M > 0.0)) throw std::invalid_argument("manual thresholds must be positive");
    return {{*manual_m, ThresholdSource::ManualOverride}, {*manual_M, ThresholdSource::ManualOverride}};
  }
  return {threshold_m(p, g, source), threshold_M(p, strip, g, source)};
}

ConditionBox condition_box(const ProblemParams<double>& p, const StripInterval<double>& strip, double c,
                           ConeVariant cone, double rho, ConditionKind kind) {
  using expr::Interval;
  if (!(rho > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!(c > 0.0 && c <= 1.0)) throw DomainError("cone constant must lie in (0, 1]");
  const double top = rho / c;
  if (kind == ConditionKind::Index1) {
    const Interval t = Interval::make(-p.T, p.T);
    switch (cone) {
      case ConeVariant::ChangingSign:
        return {expr::Box3::make(t, Interval::make(-rho, rho), Interval::make(-rho, rho)), "[-rho, rho]"};
      case ConeVariant::NonNegative:
        return {expr::Box3::make(t, Interval::make(0, rho), Interval::make(0, rho)), "[0, rho]"};
      case ConeVariant::StrictlyPositive:
        return {expr::Box3::make(t, Interval::make(c * rho, rho), Interval::make(c * rho, rho)), "[c rho, rho]"};
    }
  }
  const Interval t = Interval::make(strip.lo_time(p.T), strip.hi_time(p.T));
  const Interval u = Interval::make(rho, top);
  switch (cone) {
    case ConeVariant::ChangingSign:
      return {expr::Box3::make(t, u, Interval::make(-top, top)), "[-rho/c, rho/c]"};
    case ConeVariant::NonNegative:
      return {expr::Box3::make(t, u, Interval::make(0, top)), "[0, rho/c]"};
    case ConeVariant::StrictlyPositive:
      return {expr::Box3::make(t, u, Interval::make(rho, top)), "[rho, rho/c]"};
  }
  throw std::logic_error("unhandled cone variant");
}

RadiusCondition check_condition(const ProblemParams<double>& p, const StripInterval<double>& strip, double c,
                                ConeVariant cone, const expr::Expr& f, double rho, ConditionKind kind,
                                const Thresholds& thresholds, const CheckOptions& opts) {
  RadiusCondition out;
  out.rho = rho;
  out.kind = kind;
  out.box = condition_box(p, strip, c, cone, rho, kind).box;
  const expr::BoxExtremum ext =
      kind == ConditionKind::Index1 ? expr::box_sup(f, out.box, opts.search) : expr::box_inf(f, out.box, opts.search);
  out.f_bound = ext.value / rho;
  out.attaining_point = ext.point;
  if (kind == ConditionKind::Index1) {
    out.threshold = thresholds.m.value;
    out.satisfied = out.f_bound < out.threshold;
  } else {
    out.threshold = thresholds.M.value;
    out.satisfied = out.f_bound > out.threshold;
  }
  out.marginal = out.satisfied && std::abs(out.threshold - out.f_bound) < opts.margin;
  return out;
}

namespace {

// Smallest admissible radius after a link of the given kind.
double next_radius_floor(ConditionKind kind, double rho, double c) {
  return kind == ConditionKind::Index0 ? rho / c : rho;
}

Ladder ladder_for(ConditionKind first, std::size_t length) {
  const bool zero_first = first == ConditionKind::Index0;
  if (length == 2) return zero_first ? Ladder::S1 : Ladder::S2;
  if (length == 3) return zero_first ? Ladder::S3 : Ladder::S4;
  return zero_first ? Ladder::S5 : Ladder::S6;
}

}  // namespace

bool ladder_ordering_holds(Ladder l, const std::vector<double>& r, double c) {
  auto need = [&](std::size_t n) { return r.size() == n; };
  switch (l) {
    case Ladder::S1: return need(2) && r[0] / c < r[1];
    case Ladder::S2: return need(2) && r[0] < r[1];
    case Ladder::S3: return need(3) && r[0] / c < r[1] && r[1] < r[2];
    case Ladder::S4: return need(3) && r[0] < r[1] && r[1] / c < r[2];
    case Ladder::S5: return need(4) && r[0] / c < r[1] && r[1] < r[2] && r[2] / c < r[3];
    case Ladder::S6: return need(4) && r[0] < r[1] && r[1] / c < r[2] && r[2] < r[3];
  }
  return false;
}

Verdict multiplicity_verdict(const std::vector<RadiusCondition>& conditions, double c) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < conditions.size(); ++i)
    if (conditions[i].satisfied) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return conditions[x].rho < conditions[y].rho; });

  const std::size_t n = order.size();
  constexpr std::size_t kMaxChain = 4;
  std::vector<std::size_t> length(n, 1);
  std::vector<std::size_t> next(n, n);
  for (std::size_t i = n; i-- > 0;) {
    const auto& a = conditions[order[i]];
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b = conditions[order[j]];
      if (b.kind == a.kind || !(b.rho > next_radius_floor(a.kind, a.rho, c))) continue;
      const std::size_t len = std::min(kMaxChain, length[j] + 1);
      if (len > length[i]) {
        length[i] = len;
        next[i] = j;
      }
    }
  }

  Verdict v;
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i)
    if (length[i] >= 2 && (start == n || length[i] > length[start])) start = i;
  if (start == n) return v;

  std::vector<double> rhos;
  for (std::size_t i = start; i < n && v.chain.size() < length[start]; i = next[i]) {
    v.chain.push_back(order[i]);
    rhos.push_back(conditions[order[i]].rho);
  }
  const Ladder l = ladder_for(conditions[v.chain.front()].kind, v.chain.size());
  if (!ladder_ordering_holds(l, rhos, c)) throw std::logic_error("ladder chain violates its ordering constraints");
  v.ladder = l;
  v.solution_count = static_cast<int>(v.chain.size()) - 1;
  return v;
}

Discrepancy make_discrepancy(std::string quantity, double reference, double computed, std::string note) {
  Discrepancy d;
  d.quantity = std::move(quantity);
  d.reference = reference;
  d.computed = computed;
  d.relative_difference = reference != 0.0 ? std::abs(computed - reference) / std::abs(reference)
                                            : std::abs(computed - reference);
  d.note = std::move(note);
  return d;
}

namespace {

std::string agreement_note(double reference, double computed) {
  const double rel = reference != 0.0 ? std::abs(computed - reference) / std::abs(reference) : std::abs(computed);
  return rel <= 1e-6 ? "agrees" : "does not match";
}

}  // namespace

Certificate certify(const CertifyRequest& req) {
  req.params.validate();
  validate_strip(req.params, req.strip, true);
  if (req.radii.empty()) throw std::invalid_argument("no radii to certify");

  Certificate cert;
  cert.params = req.params;
  cert.strip = req.strip;
  cert.h_source = req.h_source;
  cert.g_source = req.g_source;
  cert.cone = req.cone;
  cert.c = cone_constant(req.params, req.strip);

  const expr::Expr h = expr::parse(req.h_source);
  const expr::Expr g = expr::parse(req.g_source, expr::Variables::Weight);
  const expr::Expr f = expr::shift_to_f(h, req.params.omega);

  cert.thresholds = compute_thresholds(req.params, req.strip, g, req.source, req.manual_m, req.manual_M);

  std::vector<RadiusSpec> radii = req.radii;
  std::stable_sort(radii.begin(), radii.end(), [](const RadiusSpec& a, const RadiusSpec& b) { return a.rho < b.rho; });
  for (const auto& r : radii)
    cert.conditions.push_back(
        check_condition(req.params, req.strip, cert.c, req.cone, f, r.rho, r.kind, cert.thresholds, req.check));
  cert.verdict = multiplicity_verdict(cert.conditions, cert.c);

  cert.flags.push_back("NON-RIGOROUS");
  if (req.source == ThresholdSource::ManualOverride) cert.flags.push_back("NOT-SELF-CONTAINED");
  if (std::any_of(cert.conditions.begin(), cert.conditions.end(), [](const auto& x) { return x.marginal; }))
    cert.flags.push_back("MARGINAL");

  if (req.source != ThresholdSource::ManualOverride) {
    if (req.reference_m)
      cert.discrepancies.push_back(make_discrepancy("m", *req.reference_m, cert.thresholds.m.value,
                                                    agreement_note(*req.reference_m, cert.thresholds.m.value)));
    if (req.reference_M)
      cert.discrepancies.push_back(make_discrepancy("M", *req.reference_M, cert.thresholds.M.value,
                                                    agreement_note(*req.reference_M, cert.thresholds.M.value)));
  }
  for (const auto& [rho, value] : req.reference_f_bounds) {
    for (const auto& cond : cert.conditions) {
      if (std::abs(cond.rho - rho) > 1e-12 * std::max(1.0, std::abs(rho))) continue;
      std::ostringstream q;
      q.precision(17);
      q << "f_bound(rho=" << rho << ", " << to_string(cond.kind) << ")";
      cert.discrepancies.push_back(make_discrepancy(q.str(), value, cond.f_bound, agreement_note(value, cond.f_bound)));
    }
  }
  return cert;
}

ConeSanityReport cone_sanity_check(const DiscreteOperator& op, const StripInterval<double>& strip, double c,
                                   const expr::Expr& f, int samples, std::uint64_t seed, double tol) {
  const auto& grid = op.grid();
  const double T = grid.T;
  const double lo = strip.lo_time(T);
  const double hi = strip.hi_time(T);
  const Eigen::Index n = grid.size();

  // Nodes whose values enter the interpolant on [aT, bT].
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool left_ok = i + 1 < n && grid.nodes[i + 1] > lo;
    const bool right_ok = i > 0 && grid.nodes[i - 1] < hi;
    if (left_ok && right_ok) support.push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> amplitude(0.0, 1.0);

  ConeSanityReport report;
  report.tolerance = tol;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXd u(n);
    if (k == 0) {
      u.setOnes();
    } else if (k == 1) {
      u.setZero();
    } else {
      const double amp = amplitude(rng);
      for (Eigen::Index i = 0; i < n; ++i) u[i] = amp * unit(rng);
      const double floor = c * u.lpNorm<Eigen::Infinity>();
      for (Eigen::Index i : support) u[i] = std::max(u[i], floor);
    }
    const double margin = cone_membership(grid.nodes, op.apply(f, u), T, strip, c);
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < -tol) ++report.violations;
    ++report.samples;
  }
  return report;
}

}  // namespace rh

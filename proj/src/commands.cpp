#include "rh/commands.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "rh/bounds.hpp"
#include "rh/expr.hpp"
#include "rh/kernel.hpp"
#include "rh/oracles.hpp"

namespace rh {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void stamp(Json& j, const RunContext& ctx) {
  if (ctx.timestamp) j["generated_at"] = utc_now();
}

Json problem_json(const ProblemConfig& cfg) {
  const auto p = cfg.params();
  Json j;
  j["T"] = p.T;
  j["omega"] = p.omega;
  j["zeta"] = p.zeta();
  j["regime"] = to_string(regime_of(p.zeta()));
  j["sign_class"] = to_string(sign_class(p.zeta()).tag);
  if (cfg.h) j["h"] = *cfg.h;
  j["g"] = cfg.g;
  if (cfg.a) j["strip"] = Json{{"a", *cfg.a}, {"b", 1.0 - *cfg.a}};
  return j;
}

Json discrepancy_json(const Discrepancy& d) {
  return Json{{"quantity", d.quantity},
              {"reference", d.reference},
              {"computed", d.computed},
              {"relative_difference", d.relative_difference},
              {"note", d.note}};
}

Json interval_json(const expr::Interval& i) { return Json::array({i.lo, i.hi}); }

std::string agreement(double reference, double computed) {
  return std::abs(computed - reference) <= 1e-6 * std::abs(reference) ? "agrees" : "does not match";
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

void write_kernel_csv(const ProblemConfig& cfg, int density, std::ostream& out) {
  if (density < 1) throw std::invalid_argument("grid density must be at least 1");
  const auto p = cfg.params();
  auto at = [&](int i) { return density == 1 ? 0.0 : -p.T + 2.0 * p.T * double(i) / double(density - 1); };
  out << "t,s,k\n";
  for (int i = 0; i < density; ++i) {
    const double t = i == density - 1 && density > 1 ? p.T : at(i);
    for (int j = 0; j < density; ++j) {
      const double s = j == density - 1 && density > 1 ? p.T : at(j);
      out << fmt17(t) << ',' << fmt17(s) << ',' << fmt17(kernel_eval(p, t, s)) << '\n';
    }
  }
}

Json bounds_report(const ProblemConfig& cfg, const RunContext& ctx) {
  const auto p = cfg.params();
  const auto strip = cfg.strip();
  const expr::Expr g = expr::parse(cfg.g, expr::Variables::Weight);
  const auto profile = make_bounds_profile(p, strip);
  const ThresholdSource preferred =
      cfg.threshold_source == ThresholdSource::QuadratureOracle ? ThresholdSource::QuadratureOracle
                                                                : ThresholdSource::ClosedForm;
  const auto m = threshold_m(p, g, preferred);
  const auto M = threshold_M(p, strip, g, preferred);

  auto weight = [&g](double s) { return expr::eval(g, s); };
  const auto sup_oracle = oracle_sup_abs_integral(p, weight);
  const auto inf_oracle = oracle_inf_strip_integral(p, strip, weight);

  Json j;
  j["command"] = "bounds";
  j["config_hash"] = ctx.config_hash;
  j["problem"] = problem_json(cfg);
  if (profile.beta) j["beta"] = *profile.beta;
  j["c"] = profile.c;
  j["m_source"] = to_string(m.source);
  j["m"] = m.value;
  j["M_source"] = to_string(M.source);
  j["M"] = M.value;
  j["threshold_source"] = to_string(preferred);
  j["sup_abs_integral"] = profile.sup_abs_int;
  j["inf_strip_integral"] = profile.inf_strip_int;
  j["oracle"] = Json{{"sup_abs_integral", sup_oracle.value},
                     {"sup_attained_at", sup_oracle.t},
                     {"inf_strip_integral", inf_oracle.value},
                     {"inf_attained_at", inf_oracle.t}};

  Json table = Json::array();
  constexpr int kRows = 41;
  for (int i = 0; i < kRows; ++i) {
    const double y = i == kRows - 1 ? 1.0 : -1.0 + 2.0 * double(i) / double(kRows - 1);
    table.push_back(Json{{"y", y}, {"phi", profile.phi(y)}, {"psi", profile.psi(y)}});
  }
  j["envelope_table"] = std::move(table);

  Json disc = Json::array();
  if (cfg.reference.m)
    disc.push_back(discrepancy_json(make_discrepancy("m", *cfg.reference.m, m.value, agreement(*cfg.reference.m, m.value))));
  if (cfg.reference.M)
    disc.push_back(discrepancy_json(make_discrepancy("M", *cfg.reference.M, M.value, agreement(*cfg.reference.M, M.value))));
  j["discrepancies"] = std::move(disc);
  stamp(j, ctx);
  return j;
}

CertifyRequest certify_request(const ProblemConfig& cfg) {
  CertifyRequest req;
  req.params = cfg.params();
  req.strip = cfg.strip();
  req.h_source = cfg.h_source();
  req.g_source = cfg.g;
  req.cone = cfg.cone;
  req.radii = cfg.radii;
  req.source = cfg.threshold_source;
  req.manual_m = cfg.manual_m;
  req.manual_M = cfg.manual_M;
  req.check.margin = cfg.margin;
  req.reference_m = cfg.reference.m;
  req.reference_M = cfg.reference.M;
  req.reference_f_bounds = cfg.reference.f_bounds;
  return req;
}

Json certificate_json(const Certificate& cert, const RunContext& ctx) {
  Json j;
  j["command"] = "certify";
  j["config_hash"] = ctx.config_hash;
  const expr::Expr f = expr::shift_to_f(expr::parse(cert.h_source), cert.params.omega);
  j["problem"] = Json{{"T", cert.params.T},
                      {"omega", cert.params.omega},
                      {"zeta", cert.params.zeta()},
                      {"h", cert.h_source},
                      {"g", cert.g_source},
                      {"f", expr::to_string(f)},
                      {"strip", Json{{"a", cert.strip.a}, {"b", cert.strip.b()}}}};
  j["cone"] = to_string(cert.cone);
  j["c"] = cert.c;
  j["thresholds"] = Json{{"source", cert.thresholds.source_label()},
                         {"m", cert.thresholds.m.value},
                         {"M", cert.thresholds.M.value},
                         {"m_source", to_string(cert.thresholds.m.source)},
                         {"M_source", to_string(cert.thresholds.M.source)}};
  Json conds = Json::array();
  for (const auto& c : cert.conditions) {
    conds.push_back(Json{
        {"rho", c.rho},
        {"kind", to_string(c.kind)},
        {"f_bound", c.f_bound},
        {"threshold", c.threshold},
        {"satisfied", c.satisfied},
        {"marginal", c.marginal},
        {"attaining_point", Json{{"t", c.attaining_point[0]}, {"u", c.attaining_point[1]}, {"v", c.attaining_point[2]}}},
        {"box", Json{{"t", interval_json(c.box.t)}, {"u", interval_json(c.box.u)}, {"v", interval_json(c.box.v)}}}});
  }
  j["conditions"] = std::move(conds);
  j["ladder"] = cert.verdict.ladder ? Json(to_string(*cert.verdict.ladder)) : Json(nullptr);
  Json chain = Json::array();
  for (auto i : cert.verdict.chain) chain.push_back(cert.conditions[i].rho);
  j["ladder_radii"] = std::move(chain);
  j["solution_count"] = cert.verdict.solution_count;
  j["flags"] = cert.flags;
  Json disc = Json::array();
  for (const auto& d : cert.discrepancies) disc.push_back(discrepancy_json(d));
  j["discrepancies"] = std::move(disc);
  stamp(j, ctx);
  return j;
}

SolveOutcome run_solve(const ProblemConfig& cfg) {
  const auto p = cfg.params();
  const expr::Expr h = expr::parse(cfg.h_source());
  const expr::Expr g = expr::parse(cfg.g, expr::Variables::Weight);
  const expr::Expr f = expr::shift_to_f(h, p.omega);
  check_weight_nonnegative(p, g);

  SolveOutcome out;
  if (cfg.solver.u0) out.u0 = *cfg.solver.u0;
  else if (!cfg.radii.empty()) out.u0 = cfg.radii.front().rho;
  else out.u0 = 1.0 / p.omega;

  DiscreteOperator op(p, SymmetricGrid::make(p.T, cfg.solver.nodes), g, cfg.solver.rule);
  PicardOptions opts;
  opts.theta = cfg.solver.theta;
  opts.tol = cfg.solver.tol;
  opts.max_iter = cfg.solver.max_iter;
  opts.divergence_ceiling = cfg.solver.divergence_ceiling;
  out.solution = picard_solve(op, f, Eigen::VectorXd::Constant(op.grid().size(), out.u0), opts);
  out.verification = verify_solution(h, out.solution.nodes, out.solution.values, cfg.solver.verify_threshold);
  if (cfg.a) {
    out.c = cone_constant(p, cfg.strip());
    out.cone_margin = cone_membership(out.solution.nodes, out.solution.values, p.T, cfg.strip(), *out.c);
  }
  return out;
}

Json solve_report(const ProblemConfig& cfg, const SolveOutcome& out, const RunContext& ctx) {
  const auto& s = out.solution;
  Json j;
  j["command"] = "solve";
  j["config_hash"] = ctx.config_hash;
  j["problem"] = problem_json(cfg);
  j["solver"] = Json{{"nodes", cfg.solver.nodes},
                     {"rule", to_string(cfg.solver.rule)},
                     {"theta", cfg.solver.theta},
                     {"tol", cfg.solver.tol},
                     {"max_iter", cfg.solver.max_iter},
                     {"u0", out.u0}};
  j["status"] = to_string(s.status);
  j["iterations"] = s.iterations;
  j["residual"] = s.residual;
  j["last_update"] = s.last_update;
  j["periodicity_gap"] = s.periodicity_gap;
  j["ode_defect"] = out.verification.ode_defect;
  j["ode_defect_worst_t"] = out.verification.worst_t;
  j["verification_threshold"] = out.verification.threshold;
  j["verification_passed"] = out.verification.passed;
  j["sup_norm"] = s.values.lpNorm<Eigen::Infinity>();
  if (out.c) j["c"] = *out.c;
  j["cone_margin"] = out.cone_margin ? Json(*out.cone_margin) : Json(nullptr);
  stamp(j, ctx);
  return j;
}

void write_solution_csv(const DiscreteSolution& sol, std::ostream& out) {
  out << "t,u\n";
  for (Eigen::Index i = 0; i < sol.nodes.size(); ++i) out << fmt17(sol.nodes[i]) << ',' << fmt17(sol.values[i]) << '\n';
}

namespace {

struct CliArgs {
  std::string config;
  std::string out;
  int grid = 101;
  std::optional<int> nodes;
  std::optional<std::string> threshold_source;
  std::optional<double> manual_m;
  std::optional<double> manual_M;
  bool no_timestamp = false;
};

void add_common_options(CLI::App* sub, CliArgs& a) {
  sub->add_option("--config", a.config, "problem configuration file")->required();
  sub->add_option("--out", a.out, "output file (default: standard output)");
  sub->add_option("--grid", a.grid, "kernel grid density per axis")->check(CLI::PositiveNumber);
  sub->add_option("--nodes", a.nodes, "solver node count (odd)");
  sub->add_option("--threshold-source", a.threshold_source, "closed-form | oracle | manual")
      ->check(CLI::IsMember({"closed-form", "oracle", "manual"}));
  sub->add_option("--manual-m", a.manual_m, "manual threshold m");
  sub->add_option("--manual-M", a.manual_M, "manual threshold M");
  sub->add_flag("--no-timestamp", a.no_timestamp, "omit generated_at for byte-identical output");
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message, int line = 0) {
  Json e{{"kind", kind}, {"message", message}};
  if (line > 0) e["line"] = line;
  err << Json{{"error", e}}.dump(2) << '\n';
}

template <typename Writer>
void write_output(const std::string& path, std::ostream& fallback, Writer&& writer) {
  if (path.empty()) {
    writer(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::ios_base::failure("cannot open output file '" + path + "'");
  writer(file);
  file.flush();
  if (!file) throw std::ios_base::failure("failed writing output file '" + path + "'");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Green's function bounds, fixed-point-index certificates and Nystrom solutions for "
               "u'(t) + omega u(-t) with periodic conditions"};
  app.require_subcommand(1);
  CliArgs args;
  auto* kernel = app.add_subcommand("kernel", "dump k(t, s) on a grid as CSV");
  auto* bounds = app.add_subcommand("bounds", "kernel bounds and thresholds as JSON");
  auto* cert = app.add_subcommand("certify", "fixed-point-index certificate as JSON");
  auto* solve = app.add_subcommand("solve", "Nystrom/Picard solution (CSV to --out, JSON to stdout)");
  for (auto* sub : {kernel, bounds, cert, solve}) add_common_options(sub, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::string text;
    {
      std::ifstream in(args.config, std::ios::binary);
      if (!in) throw ConfigError(0, "cannot open config file '" + args.config + "'");
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    ProblemConfig cfg = parse_config(text);
    if (args.nodes) cfg.solver.nodes = *args.nodes;
    if (args.threshold_source) cfg.threshold_source = threshold_source_from_string(*args.threshold_source);
    if (args.manual_m) cfg.manual_m = *args.manual_m;
    if (args.manual_M) cfg.manual_M = *args.manual_M;
    cfg.validate();

    RunContext ctx{sha256_hex(text), !args.no_timestamp};

    if (kernel->parsed()) {
      write_output(args.out, out, [&](std::ostream& o) { write_kernel_csv(cfg, args.grid, o); });
      return kExitOk;
    }
    if (bounds->parsed()) {
      const Json j = bounds_report(cfg, ctx);
      write_output(args.out, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
      return kExitOk;
    }
    if (cert->parsed()) {
      const Certificate c = certify(certify_request(cfg));
      const Json j = certificate_json(c, ctx);
      write_output(args.out, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
      return c.verdict.solution_count > 0 ? kExitOk : kExitEmptyCertificate;
    }
    const SolveOutcome res = run_solve(cfg);
    if (!args.out.empty()) write_output(args.out, out, [&](std::ostream& o) { write_solution_csv(res.solution, o); });
    Json j = solve_report(cfg, res, ctx);
    j["csv"] = args.out.empty() ? Json(nullptr) : Json(args.out);
    out << j.dump(2) << '\n';
    return res.solution.status == SolveStatus::Converged ? kExitOk : kExitNoConvergence;
  } catch (const ConfigError& e) {
    emit_error(err, "config", e.detail(), e.line());
    return kExitConfig;
  } catch (const HypothesisViolation& e) {
    emit_error(err, "hypothesis", e.what());
    return kExitHypothesis;
  } catch (const expr::EvalError& e) {
    emit_error(err, "hypothesis", std::string("nonlinearity evaluation failed: ") + e.what());
    return kExitHypothesis;
  } catch (const expr::ParseError& e) {
    emit_error(err, "config", e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    emit_error(err, "config", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    emit_error(err, "config", e.what());
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    emit_error(err, "io", e.what());
    return kExitUsage;
  }
}

}  // namespace rh

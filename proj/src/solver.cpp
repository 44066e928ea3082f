#include "rh/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rh/kernel.hpp"
#include "rh/quadrature.hpp"

namespace rh {

SymmetricGrid SymmetricGrid::make(double T, int n) {
  if (!(T > 0.0)) throw DomainError("grid requires T > 0");
  if (n < 3 || n % 2 == 0) throw DomainError("grid requires an odd node count >= 3");
  SymmetricGrid g;
  g.T = T;
  g.nodes.resize(n);
  const int half = (n - 1) / 2;
  for (int i = 0; i < half; ++i) {
    const double t = -T + 2.0 * T * double(i) / double(n - 1);
    g.nodes[i] = t;
    g.nodes[n - 1 - i] = -t;
  }
  g.nodes[half] = 0.0;
  const double h = g.spacing();
  g.weights = Eigen::VectorXd::Constant(n, h);
  g.weights[0] = g.weights[n - 1] = h / 2.0;
  return g;
}

std::string to_string(NystromRule r) {
  return r == NystromRule::ProductLinear ? "product-linear" : "trapezoid";
}

NystromRule nystrom_rule_from_string(const std::string& s) {
  if (s == "product-linear" || s == "product") return NystromRule::ProductLinear;
  if (s == "trapezoid") return NystromRule::Trapezoid;
  throw std::invalid_argument("unknown quadrature rule '" + s + "' (expected product-linear or trapezoid)");
}

Eigen::MatrixXd nystrom_matrix(const ProblemParams<double>& p, const SymmetricGrid& grid, NystromRule rule) {
  p.validate();
  const Eigen::Index n = grid.size();
  const auto& t = grid.nodes;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);

  if (rule == NystromRule::Trapezoid) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double hl = j > 0 ? t[j] - t[j - 1] : 0.0;
        const double hr = j + 1 < n ? t[j + 1] - t[j] : 0.0;
        if (i == j) {
          // left panel has s < t, right panel s > t
          const double below = kernel_diagonal_limit(p, t[j], DiagonalSide::TAboveS);
          const double above = kernel_diagonal_limit(p, t[j], DiagonalSide::TBelowS);
          A(i, j) = 0.5 * (hl * below + hr * above);
        } else {
          A(i, j) = 0.5 * (hl + hr) * kernel_eval(p, t[i], t[j]);
        }
      }
    }
    return A;
  }

  // Diagonals s = +/-t_i fall on nodes, so k(t_i, .) is smooth inside every
  // panel and a 16-point rule integrates it against the hats to round-off.
  const auto& gl = GaussLegendre<double>::rule16();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
      const double lo = t[j];
      const double hi = t[j + 1];
      const double half = (hi - lo) / 2.0;
      const double mid = (hi + lo) / 2.0;
      double left = 0.0;
      double right = 0.0;
      for (Eigen::Index q = 0; q < gl.nodes.size(); ++q) {
        const double x = gl.nodes[q];
        const double kw = gl.weights[q] * kernel_eval(p, t[i], mid + half * x);
        left += kw * (1.0 - x) / 2.0;
        right += kw * (1.0 + x) / 2.0;
      }
      A(i, j) += left * half;
      A(i, j + 1) += right * half;
    }
  }
  return A;
}

Eigen::VectorXd weight_values(const SymmetricGrid& grid, const expr::Expr& g) {
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) out[j] = expr::eval(g, grid.nodes[j]);
  return out;
}

DiscreteOperator::DiscreteOperator(const ProblemParams<double>& p, SymmetricGrid grid, const expr::Expr& g,
                                   NystromRule rule)
    : params_(p), grid_(std::move(grid)) {
  kg_ = nystrom_matrix(params_, grid_, rule) * weight_values(grid_, g).asDiagonal();
}

Eigen::VectorXd DiscreteOperator::source(const expr::Expr& f, const Eigen::VectorXd& u) const {
  if (u.size() != grid_.size()) throw std::invalid_argument("nodal vector size does not match the grid");
  Eigen::VectorXd out(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) out[j] = expr::eval(f, grid_.nodes[j], u[j], u[grid_.mirror(j)]);
  return out;
}

Eigen::VectorXd DiscreteOperator::apply(const expr::Expr& f, const Eigen::VectorXd& u) const {
  return kg_ * source(f, u);
}

Eigen::VectorXd apply_discrete_operator(const ProblemParams<double>& p, const SymmetricGrid& grid,
                                        const expr::Expr& g, const expr::Expr& f, const Eigen::VectorXd& u,
                                        NystromRule rule) {
  return DiscreteOperator(p, grid, g, rule).apply(f, u);
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::Diverged: return "diverged";
  }
  return "?";
}

DiscreteSolution picard_solve(const DiscreteOperator& op, const expr::Expr& f, const Eigen::VectorXd& u0,
                              const PicardOptions& opts) {
  if (!(opts.theta > 0.0 && opts.theta <= 1.0)) throw std::invalid_argument("damping theta must lie in (0, 1]");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (u0.size() != op.grid().size()) throw std::invalid_argument("initial iterate size does not match the grid");

  DiscreteSolution sol;
  sol.nodes = op.grid().nodes;
  Eigen::VectorXd u = u0;
  Eigen::VectorXd best = u0;
  double best_update = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= opts.max_iter; ++it) {
    Eigen::VectorXd next = (1.0 - opts.theta) * u + opts.theta * op.apply(f, u);
    const double norm = next.lpNorm<Eigen::Infinity>();
    sol.iterations = it;
    if (!std::isfinite(norm) || norm > opts.divergence_ceiling) {
      sol.status = SolveStatus::Diverged;
      break;
    }
    const double update = (next - u).lpNorm<Eigen::Infinity>();
    u = std::move(next);
    if (update < best_update) {
      best_update = update;
      best = u;
    }
    if (update < opts.tol) {
      sol.status = SolveStatus::Converged;
      break;
    }
  }

  sol.values = sol.status == SolveStatus::Converged ? u : best;
  sol.last_update = best_update;
  sol.residual = (sol.values - op.apply(f, sol.values)).lpNorm<Eigen::Infinity>();
  sol.periodicity_gap = std::abs(sol.values[0] - sol.values[sol.values.size() - 1]);
  return sol;
}

VerificationReport verify_solution(const expr::Expr& h, const Eigen::VectorXd& nodes, const Eigen::VectorXd& values,
                                   double threshold) {
  const Eigen::Index n = nodes.size();
  if (n < 3 || values.size() != n) throw std::invalid_argument("verification needs at least three nodes");
  VerificationReport r;
  r.threshold = threshold;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double du = (values[i + 1] - values[i - 1]) / (nodes[i + 1] - nodes[i - 1]);
    const double d = std::abs(du - expr::eval(h, nodes[i], values[i], values[n - 1 - i]));
    if (d > r.ode_defect) {
      r.ode_defect = d;
      r.worst_t = nodes[i];
    }
  }
  r.periodicity_gap = std::abs(values[0] - values[n - 1]);
  r.passed = r.ode_defect <= threshold && r.periodicity_gap <= threshold;
  return r;
}

namespace {

double interpolate(const Eigen::VectorXd& nodes, const Eigen::VectorXd& values, double x) {
  const Eigen::Index n = nodes.size();
  const auto* begin = nodes.data();
  const auto* it = std::upper_bound(begin, begin + n, x);
  Eigen::Index j = std::clamp<Eigen::Index>(it - begin - 1, 0, n - 2);
  const double w = (x - nodes[j]) / (nodes[j + 1] - nodes[j]);
  return (1.0 - w) * values[j] + w * values[j + 1];
}

}  // namespace

double cone_membership(const Eigen::VectorXd& nodes, const Eigen::VectorXd& values, double T,
                       const StripInterval<double>& strip, double c) {
  if (nodes.size() < 2 || values.size() != nodes.size()) throw std::invalid_argument("cone check needs a grid");
  const double lo = strip.lo_time(T);
  const double hi = strip.hi_time(T);
  if (lo < nodes[0] - 1e-12 || hi > nodes[nodes.size() - 1] + 1e-12)
    throw DomainError("strip lies outside the grid");
  double strip_min = std::min(interpolate(nodes, values, lo), interpolate(nodes, values, hi));
  for (Eigen::Index i = 0; i < nodes.size(); ++i)
    if (nodes[i] > lo && nodes[i] < hi) strip_min = std::min(strip_min, values[i]);
  return strip_min - c * values.lpNorm<Eigen::Infinity>();
}

}  // namespace rh

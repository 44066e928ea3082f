#pragma once

// Nystrom discretization of
//   u(t) = \int_{-T}^{T} k(t, s) g(s) f(s, u(s), u(-s)) ds
// on a symmetric grid, plus damped Picard iteration and a posteriori checks
// against u'(t) = h(t, u(t), u(-t)), u(-T) = u(T).

#include <optional>
#include <string>

#include <Eigen/Core>

#include "rh/bounds.hpp"
#include "rh/expr.hpp"
#include "rh/params.hpp"

namespace rh {

/// Equispaced odd-sized grid with t[N-1-i] == -t[i] exactly.
struct SymmetricGrid {
  double T{1};
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;  // composite trapezoid, sums to 2T

  Eigen::Index size() const { return nodes.size(); }
  Eigen::Index mirror(Eigen::Index i) const { return size() - 1 - i; }
  double spacing() const { return 2.0 * T / double(size() - 1); }

  static SymmetricGrid make(double T, int n);
};

enum class NystromRule {
  ProductLinear,  // exact integrals of k against hat functions
  Trapezoid,      // nodal weights, one-sided kernel values on the diagonal
};

std::string to_string(NystromRule r);
NystromRule nystrom_rule_from_string(const std::string& s);

/// A(i, j) such that (A x)_i approximates \int k(t_i, s) x(s) ds for the
/// piecewise-linear interpolant x of nodal values.
Eigen::MatrixXd nystrom_matrix(const ProblemParams<double>& p, const SymmetricGrid& grid,
                               NystromRule rule = NystromRule::ProductLinear);

/// Nodal values of the weight g.
Eigen::VectorXd weight_values(const SymmetricGrid& grid, const expr::Expr& g);

/// Discrete Hammerstein operator with the kernel and weight baked in.
class DiscreteOperator {
 public:
  DiscreteOperator(const ProblemParams<double>& p, SymmetricGrid grid, const expr::Expr& g,
                   NystromRule rule = NystromRule::ProductLinear);

  const SymmetricGrid& grid() const { return grid_; }
  const ProblemParams<double>& params() const { return params_; }
  const Eigen::MatrixXd& matrix() const { return kg_; }

  /// Nodal values f(t_j, u_j, u_{N-1-j}).
  Eigen::VectorXd source(const expr::Expr& f, const Eigen::VectorXd& u) const;
  Eigen::VectorXd apply(const expr::Expr& f, const Eigen::VectorXd& u) const;

 private:
  ProblemParams<double> params_;
  SymmetricGrid grid_;
  Eigen::MatrixXd kg_;  // nystrom_matrix * diag(g)
};

Eigen::VectorXd apply_discrete_operator(const ProblemParams<double>& p, const SymmetricGrid& grid,
                                        const expr::Expr& g, const expr::Expr& f, const Eigen::VectorXd& u,
                                        NystromRule rule = NystromRule::ProductLinear);

enum class SolveStatus { Converged, MaxIterations, Diverged };
std::string to_string(SolveStatus s);

struct PicardOptions {
  double theta = 0.5;
  double tol = 1e-10;
  int max_iter = 5000;
  double divergence_ceiling = 1e12;
};

struct DiscreteSolution {
  Eigen::VectorXd nodes;
  Eigen::VectorXd values;
  double residual{0};         // sup |u - F u|
  double last_update{0};      // sup norm of the final Picard step
  double periodicity_gap{0};  // |u_0 - u_{N-1}|
  int iterations{0};
  SolveStatus status{SolveStatus::MaxIterations};
};

DiscreteSolution picard_solve(const DiscreteOperator& op, const expr::Expr& f, const Eigen::VectorXd& u0,
                              const PicardOptions& opts = {});

struct VerificationReport {
  double ode_defect{0};  // sup over interior nodes of |central difference - h|
  double worst_t{0};
  double periodicity_gap{0};
  double threshold{1e-3};
  bool passed{false};
};

/// Checks u' = h(t, u, u(-t)) by central differences at interior nodes and
/// u(-T) = u(T).
VerificationReport verify_solution(const expr::Expr& h, const Eigen::VectorXd& nodes,
                                   const Eigen::VectorXd& values, double threshold = 1e-3);

/// min_{t in [aT, bT]} u(t) - c max|u|, using the piecewise-linear
/// interpolant of the nodal values.
double cone_membership(const Eigen::VectorXd& nodes, const Eigen::VectorXd& values, double T,
                       const StripInterval<double>& strip, double c);

}  // namespace rh

#pragma once

// Composite Gauss-Legendre quadrature with adaptive panel bisection.
//
// Panel boundaries can be forced at breakpoints where the integrand is
// discontinuous or kinked; nodes are strictly interior to each panel, so
// the integrand is never sampled on a breakpoint.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rh {

/// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
template <typename Scalar>
struct GaussLegendre {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector nodes;
  Vector weights;

  static GaussLegendre make(int n) {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Matrix J = Matrix::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      const Scalar b = Scalar(i) / std::sqrt(Scalar(4) * Scalar(i) * Scalar(i) - Scalar(1));
      J(i, i - 1) = b;
      J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(J);
    GaussLegendre rule;
    rule.nodes = eig.eigenvalues();
    rule.weights = Scalar(2) * eig.eigenvectors().row(0).transpose().array().square();
    return rule;
  }

  static const GaussLegendre& rule16() {
    static const GaussLegendre r = make(16);
    return r;
  }

  template <typename F>
  Scalar integrate(F&& f, Scalar lo, Scalar hi) const {
    const Scalar half = (hi - lo) / Scalar(2);
    const Scalar mid = (hi + lo) / Scalar(2);
    Scalar acc{0};
    for (Eigen::Index i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mid + half * nodes[i]);
    return acc * half;
  }
};

template <typename Scalar>
struct QuadratureResult {
  Scalar value{0};
  Scalar error_estimate{0};
  int panels{0};
  bool converged{true};
};

namespace detail {

template <typename Scalar, typename F>
void adaptive_panel(F& f, Scalar lo, Scalar hi, Scalar whole, Scalar tol, int depth,
                    QuadratureResult<Scalar>& out) {
  const auto& rule = GaussLegendre<Scalar>::rule16();
  const Scalar mid = (lo + hi) / Scalar(2);
  const Scalar left = rule.integrate(f, lo, mid);
  const Scalar right = rule.integrate(f, mid, hi);
  const Scalar err = std::abs(left + right - whole);
  if (err <= tol || depth <= 0) {
    if (err > tol) out.converged = false;
    out.value += left + right;
    out.error_estimate += err;
    out.panels += 2;
    return;
  }
  adaptive_panel(f, lo, mid, left, tol / Scalar(2), depth - 1, out);
  adaptive_panel(f, mid, hi, right, tol / Scalar(2), depth - 1, out);
}

}  // namespace detail

/// Adaptive 16-point Gauss-Legendre on [lo, hi] to absolute tolerance tol.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_adaptive(F&& f, Scalar lo, Scalar hi, Scalar tol = Scalar(1e-10),
                                            int max_depth = 40) {
  QuadratureResult<Scalar> out;
  if (!(hi > lo)) return out;
  const Scalar whole = GaussLegendre<Scalar>::rule16().integrate(f, lo, hi);
  detail::adaptive_panel(f, lo, hi, whole, tol, max_depth, out);
  return out;
}

/// Integrates over [lo, hi] with panel boundaries forced at every breakpoint
/// strictly inside the interval. The tolerance is shared in proportion to
/// panel length. Summation order is fixed (left to right).
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_piecewise(F&& f, Scalar lo, Scalar hi, std::span<const Scalar> breakpoints,
                                             Scalar tol = Scalar(1e-10)) {
  QuadratureResult<Scalar> out;
  if (!(hi > lo)) return out;
  std::vector<Scalar> cuts{lo};
  for (Scalar b : breakpoints)
    if (b > lo && b < hi) cuts.push_back(b);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const Scalar length = hi - lo;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Scalar a = cuts[i];
    const Scalar b = cuts[i + 1];
    if (!(b > a)) continue;
    const auto part = integrate_adaptive(f, a, b, tol * (b - a) / length);
    out.value += part.value;
    out.error_estimate += part.error_estimate;
    out.panels += part.panels;
    out.converged = out.converged && part.converged;
  }
  return out;
}

}  // namespace rh

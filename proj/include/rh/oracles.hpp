#pragma once

// Brute-force counterparts of the closed forms in bounds.hpp. They only use
// pointwise kernel values (quadrature over s, grid scans over z) and never
// call the closed-form bounds they are meant to check.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "rh/bounds.hpp"
#include "rh/kernel.hpp"
#include "rh/quadrature.hpp"
#include "rh/scalar_search.hpp"

namespace rh {

inline constexpr double kOracleQuadTolerance = 1e-12;

struct UnitWeight {
  template <typename Scalar>
  Scalar operator()(Scalar) const { return Scalar(1); }
};

/// Points in (-T, T) where s -> k(t, s) is not smooth or changes sign: the
/// diagonals s = +/-t and the zeros of the s-dependent cosine factors.
template <typename Scalar>
std::vector<Scalar> kernel_breakpoints(const ProblemParams<Scalar>& p, Scalar t) {
  using std::ceil;
  using std::floor;
  const Scalar T = p.T;
  const Scalar zeta = p.zeta();
  const Scalar pi = std::numbers::pi_v<Scalar>;
  std::vector<Scalar> out{t, -t};
  // cos(zeta*y + shift - pi/4) = 0  <=>  y = (3pi/4 - shift + n pi) / zeta
  for (Scalar shift : {Scalar(0), -zeta, zeta}) {
    const Scalar base = Scalar(3) * quarter_pi<Scalar> - shift;
    const Scalar lo = (-std::abs(zeta) - base) / pi;
    const Scalar hi = (std::abs(zeta) - base) / pi;
    for (Scalar n = floor(lo) - 1; n <= ceil(hi) + 1; n += 1) {
      const Scalar y = (base + n * pi) / zeta;
      if (y > Scalar(-1) && y < Scalar(1)) out.push_back(y * T);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// \int_lo^hi k(t, s) w(s) ds (or |k| w when `absolute`), split at breakpoints.
template <typename Scalar, typename Weight = UnitWeight>
QuadratureResult<Scalar> quad_kernel_integral(const ProblemParams<Scalar>& p, Scalar t, Scalar lo, Scalar hi,
                                              Weight&& weight = {}, bool absolute = false,
                                              Scalar tol = Scalar(kOracleQuadTolerance)) {
  const auto cuts = kernel_breakpoints(p, t);
  auto integrand = [&](Scalar s) {
    const Scalar k = kernel_eval(p, t, s);
    return (absolute ? std::abs(k) : k) * weight(s);
  };
  return integrate_piecewise(integrand, lo, hi, std::span<const Scalar>(cuts), tol);
}

/// \int_{aT}^{bT} k(t, s) ds by quadrature.
template <typename Scalar>
Scalar quad_strip_integral(const ProblemParams<Scalar>& p, const StripInterval<Scalar>& strip, Scalar t) {
  return quad_kernel_integral(p, t, strip.lo_time(p.T), strip.hi_time(p.T)).value;
}

template <typename Scalar>
struct OracleExtremum {
  Scalar value{};
  Scalar t{};  // time where the extremum is attained
};

/// sup_t \int_{-T}^{T} |k(t, s)| w(s) ds: grid scan over t, then golden
/// refinement between the neighbours of the best grid point.
template <typename Scalar, typename Weight = UnitWeight>
OracleExtremum<Scalar> oracle_sup_abs_integral(const ProblemParams<Scalar>& p, Weight&& weight = {},
                                               int n_t = 2001) {
  const Scalar T = p.T;
  auto F = [&](Scalar t) { return quad_kernel_integral(p, t, -T, T, weight, true).value; };
  const Scalar h = Scalar(2) * T / Scalar(n_t - 1);
  OracleExtremum<Scalar> best{F(-T), -T};
  int best_i = 0;
  for (int i = 1; i < n_t; ++i) {
    const Scalar t = i == n_t - 1 ? T : -T + h * Scalar(i);
    const Scalar v = F(t);
    if (v > best.value) best = {v, t}, best_i = i;
  }
  const Scalar lo = std::max(-T, best.t - (best_i > 0 ? h : Scalar(0)));
  const Scalar hi = std::min(T, best.t + (best_i < n_t - 1 ? h : Scalar(0)));
  if (hi > lo) {
    const auto r = golden_maximize(F, lo, hi, Scalar(1e-10) * T);
    if (r.value > best.value) best = {r.value, r.x};
  }
  return best;
}

/// inf_{t in [aT, bT]} \int_{aT}^{bT} k(t, s) w(s) ds by grid scan plus golden refinement.
template <typename Scalar, typename Weight = UnitWeight>
OracleExtremum<Scalar> oracle_inf_strip_integral(const ProblemParams<Scalar>& p, const StripInterval<Scalar>& strip,
                                                 Weight&& weight = {}, int n_t = 401) {
  const Scalar lo = strip.lo_time(p.T);
  const Scalar hi = strip.hi_time(p.T);
  auto F = [&](Scalar t) { return quad_kernel_integral(p, t, lo, hi, weight).value; };
  const Scalar h = (hi - lo) / Scalar(n_t - 1);
  OracleExtremum<Scalar> best{F(lo), lo};
  int best_i = 0;
  for (int i = 1; i < n_t; ++i) {
    const Scalar t = i == n_t - 1 ? hi : lo + h * Scalar(i);
    const Scalar v = F(t);
    if (v < best.value) best = {v, t}, best_i = i;
  }
  const Scalar a = std::max(lo, best.t - (best_i > 0 ? h : Scalar(0)));
  const Scalar b = std::min(hi, best.t + (best_i < n_t - 1 ? h : Scalar(0)));
  if (b > a) {
    const auto r = golden_minimize(F, a, b, Scalar(1e-10) * p.T);
    if (r.value < best.value) best = {r.value, r.x};
  }
  return best;
}

/// inf_t \int_{-T}^{T} k(t, s) ds over n_t grid points.
template <typename Scalar>
Scalar oracle_whole_interval_inf_integral(const ProblemParams<Scalar>& p, int n_t = 101) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < n_t; ++i) {
    const Scalar t = -p.T + Scalar(2) * p.T * Scalar(i) / Scalar(n_t - 1);
    best = std::min(best, quad_kernel_integral(p, t, -p.T, p.T).value);
  }
  return best;
}

enum class EnvelopeMode {
  Max,       // max_{z in [-1,1]} sin(zeta) k(z, y)
  MaxAbs,    // max_{z in [-1,1]} sin(zeta) |k(z, y)|
  StripMin,  // min_{z in [a,b]} sin(zeta) k(z, y)
};

/// Grid extremum over z of sin(zeta) k(z, y). The scan uses `density`
/// equispaced points plus both one-sided values at z = y and z = -y, so
/// suprema attained as limits on the diagonals are captured exactly.
template <typename Scalar>
Scalar grid_envelope_oracle(const ProblemParams<Scalar>& p, Scalar y, EnvelopeMode mode,
                            std::optional<StripInterval<Scalar>> strip = std::nullopt, int density = 4001) {
  using std::abs;
  const Scalar zeta = p.zeta();
  detail::check_resonance(zeta);
  const Scalar sz = std::sin(zeta);
  Scalar lo = Scalar(-1);
  Scalar hi = Scalar(1);
  if (mode == EnvelopeMode::StripMin) {
    if (!strip) throw DomainError("StripMin envelope requires a strip");
    lo = strip->a;
    hi = strip->b();
  }
  const bool minimize = mode == EnvelopeMode::StripMin;
  Scalar best = minimize ? std::numeric_limits<Scalar>::infinity() : -std::numeric_limits<Scalar>::infinity();
  auto consider = [&](Scalar v) {
    v *= sz;
    if (mode == EnvelopeMode::MaxAbs) v = abs(v);
    best = minimize ? std::min(best, v) : std::max(best, v);
  };
  for (int i = 0; i < density; ++i) {
    const Scalar z = density == 1 ? lo : (i == density - 1 ? hi : lo + (hi - lo) * Scalar(i) / Scalar(density - 1));
    consider(branch_value_normalized(zeta, region_of(z, y).tag, z, y));
  }
  if (y >= lo && y <= hi) {
    consider(branch_value_normalized(zeta, diagonal_region(y, DiagonalSide::TBelowS), y, y));
    consider(branch_value_normalized(zeta, diagonal_region(y, DiagonalSide::TAboveS), y, y));
  }
  if (-y >= lo && -y <= hi && y != Scalar(0)) {
    const Scalar z = -y;
    consider(branch_value_normalized(zeta, z > Scalar(0) ? Region::AboveDiagonals : Region::RightWedge, z, y));
    consider(branch_value_normalized(zeta, z > Scalar(0) ? Region::LeftWedge : Region::BelowDiagonals, z, y));
  }
  return best;
}

/// inf over a y grid of StripMin(y) / Max(y), both from grid_envelope_oracle.
/// The strip ends a, b, -b are added to the y grid.
template <typename Scalar>
Scalar oracle_cone_constant(const ProblemParams<Scalar>& p, const StripInterval<Scalar>& strip, int density = 4001) {
  std::vector<Scalar> ys;
  ys.reserve(density + 3);
  for (int i = 0; i < density; ++i) ys.push_back(Scalar(-1) + Scalar(2) * Scalar(i) / Scalar(density - 1));
  ys.push_back(strip.a);
  ys.push_back(strip.b());
  ys.push_back(-strip.b());
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Scalar y : ys) {
    const Scalar num = grid_envelope_oracle(p, y, EnvelopeMode::StripMin, std::optional(strip), density);
    const Scalar den = grid_envelope_oracle(p, y, EnvelopeMode::Max, std::optional<StripInterval<Scalar>>{}, density);
    best = std::min(best, num / den);
  }
  return best;
}

}  // namespace rh

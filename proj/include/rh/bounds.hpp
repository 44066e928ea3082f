#pragma once

// Closed-form kernel bounds in normalized coordinates z = t/T, y = s/T:
//
//   Phi(y)  >= sin(zeta) |k(z, y)|          for all z in [-1, 1]
//   Psi(y)  == sin(zeta) inf_{z in [a,b]} k(z, y)
//   c(a)    == inf_y Psi(y) / Phi(y)
//
// together with the integral constants sup_t \int |k| and
// inf_{t in strip} \int_strip k that define the thresholds m and M(a, b).
//
// Strips are always stored normalized (a + b = 1) and rescaled by T when a
// time-unit integral is required.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "rh/kernel.hpp"
#include "rh/params.hpp"
#include "rh/scalar_search.hpp"

namespace rh {

/// Symmetric strip [a, 1 - a] in normalized coordinates.
template <typename Scalar = double>
struct StripInterval {
  Scalar a{};

  Scalar b() const { return Scalar(1) - a; }
  Scalar lo_time(Scalar T) const { return a * T; }
  Scalar hi_time(Scalar T) const { return b() * T; }

  static StripInterval make(Scalar a) {
    if (!(a >= Scalar(0) && a <= Scalar(0.5)))
      throw DomainError("strip requires 0 <= a <= 1/2 (so that a <= b = 1 - a)");
    return StripInterval{a};
  }
};

namespace detail {

template <typename Scalar>
void require_supported(Scalar zeta) {
  if (regime_of(zeta) == Regime::Unsupported)
    throw DomainError("closed-form bounds require zeta = omega*T in (0, pi/2)");
}

template <typename Scalar>
std::string band_message(Scalar zeta, Scalar a) {
  std::ostringstream os;
  os.precision(17);
  os << "strip outside positivity band: need a > 1 - pi/(4 zeta) = "
     << Scalar(1) - quarter_pi<Scalar> / zeta << ", got a = " << a;
  return os.str();
}

}  // namespace detail

/// Throws DomainError unless the strip is admissible for zeta's regime.
/// With `strict_interior`, additionally requires 0 < a < 1/2.
template <typename Scalar>
void validate_strip(const ProblemParams<Scalar>& p, const StripInterval<Scalar>& strip,
                    bool strict_interior = false) {
  const Scalar zeta = p.zeta();
  detail::require_supported(zeta);
  if (!(strip.a >= Scalar(0) && strip.a <= Scalar(0.5))) throw DomainError("strip requires 0 <= a <= 1/2");
  if (strict_interior && !(strip.a > Scalar(0) && strip.a < Scalar(0.5)))
    throw DomainError("strip integral requires 0 < a < 1/2");
  if (regime_of(zeta) == Regime::LargeZeta && !(strip.a > Scalar(1) - quarter_pi<Scalar> / zeta))
    throw DomainError(detail::band_message(zeta, strip.a));
}

/// Residual whose unique zero on [1/2, 1] is beta.
template <typename Scalar>
Scalar beta_residual(Scalar zeta, Scalar y) {
  using std::cos;
  const Scalar q = quarter_pi<Scalar>;
  return cos(zeta * (y - Scalar(1)) + q) * cos(zeta * y - q) - cos(zeta * (y - Scalar(1)) - q);
}

/// Breakpoint beta of the large-zeta envelope. zeta = pi/4 is accepted as
/// the limiting case (beta = 1).
template <typename Scalar>
Scalar beta_root(Scalar zeta, Scalar tol = Scalar(1e-12)) {
  if (!(zeta >= quarter_pi<Scalar> && zeta < half_pi<Scalar>))
    throw DomainError("beta_root requires zeta in [pi/4, pi/2)");
  if (beta_residual(zeta, Scalar(1)) >= Scalar(0)) return Scalar(1);
  return bisect([zeta](Scalar y) { return beta_residual(zeta, y); }, Scalar(0.5), Scalar(1), tol);
}

/// Phi(y) = sin(zeta) max_z k(z, y), which dominates sin(zeta)|k(z, y)|.
/// Pass `beta` to skip the root solve when evaluating many points.
template <typename Scalar>
Scalar phi_upper(const ProblemParams<Scalar>& p, Scalar y, std::optional<Scalar> beta = std::nullopt) {
  using std::abs;
  using std::cos;
  const Scalar zeta = p.zeta();
  detail::require_supported(zeta);
  if (!(abs(y) <= Scalar(1))) throw DomainError("phi_upper requires |y| <= 1");
  const Scalar q = quarter_pi<Scalar>;
  const Scalar one{1};

  if (regime_of(zeta) == Regime::SmallZeta) {
    if (y >= Scalar(0)) return cos(zeta * (y - one) + q) * cos(zeta * y - q);
    return cos(zeta * y + q) * cos(zeta * (y + one) - q);
  }

  const Scalar bt = beta ? *beta : beta_root(zeta);
  const Scalar edge = q / zeta;  // pi / (4 zeta)
  if (y >= bt) return cos(zeta * (y - one) - q);
  if (y >= one - edge) return cos(zeta * (y - one) + q) * cos(zeta * y - q);
  if (y >= bt - one) return cos(zeta * y - q);
  if (y >= -edge) return cos(zeta * y + q) * cos(zeta * (y + one) - q);
  return cos(zeta * (y + one) - q);
}

/// Psi(y) = sin(zeta) inf_{z in [a, b]} k(z, y).
template <typename Scalar>
Scalar psi_lower(const ProblemParams<Scalar>& p, const StripInterval<Scalar>& strip, Scalar y) {
  using std::abs;
  using std::cos;
  validate_strip(p, strip);
  if (!(abs(y) <= Scalar(1))) throw DomainError("psi_lower requires |y| <= 1");
  const Scalar zeta = p.zeta();
  const Scalar q = quarter_pi<Scalar>;
  const Scalar one{1};
  const Scalar a = strip.a;
  const Scalar b = strip.b();
  if (y >= b) return cos(zeta * b + q) * cos(zeta * (y - one) - q);
  if (y >= a) return cos(zeta * y + q) * cos(zeta * (y - one) - q);
  if (y >= -b) return cos(zeta * (one - b) - q) * cos(zeta * y - q);
  return cos(zeta * b + q) * cos(zeta * (one + y) - q);
}

/// Cone constant c(a) = [1 - tan(zeta a)][1 - tan(zeta b)] / ([1 + tan(zeta a)][1 + tan(zeta b)]).
template <typename Scalar>
Scalar cone_constant(const ProblemParams<Scalar>& p, const StripInterval<Scalar>& strip) {
  using std::tan;
  validate_strip(p, strip);
  const Scalar zeta = p.zeta();
  const Scalar ta = tan(zeta * strip.a);
  const Scalar tb = tan(zeta * strip.b());
  return ((Scalar(1) - ta) * (Scalar(1) - tb)) / ((Scalar(1) + ta) * (Scalar(1) + tb));
}

/// sup_{t in [-T, T]} \int_{-T}^{T} |k(t, s)| ds, in time units.
///
/// For zeta in (pi/4, pi/2) the negative part of k contributes
/// 2 N(zeta) / (omega sin zeta), with N the value at the maximizing point
/// z = (pi/(4 zeta) - 1)/3 (verified against the quadrature oracle).
template <typename Scalar>
Scalar sup_abs_integral(const ProblemParams<Scalar>& p) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar zeta = p.zeta();
  detail::require_supported(zeta);
  const Scalar inv_omega = Scalar(1) / p.omega;
  if (regime_of(zeta) == Regime::SmallZeta) return inv_omega;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar s = sin((Scalar(2) * zeta + pi) / Scalar(3));
  const Scalar N = sqrt(Scalar(2)) * cos((Scalar(2) * zeta + pi) / Scalar(3)) * sin((pi - Scalar(4) * zeta) / Scalar(12)) +
                   cos((pi - zeta) / Scalar(3)) * (Scalar(1) - s);
  return inv_omega * (Scalar(1) + Scalar(2) * N / sin(zeta));
}

/// \int_{aT}^{bT} k(t, s) ds in closed form, valid for t in [aT, bT].
template <typename Scalar>
Scalar strip_integral_at(const ProblemParams<Scalar>& p, const StripInterval<Scalar>& strip, Scalar t) {
  using std::cos;
  using std::sin;
  const Scalar w = p.omega;
  const Scalar T = p.T;
  const Scalar a = strip.lo_time(T);
  if (!(t >= a && t <= strip.hi_time(T))) throw DomainError("strip_integral_at requires t in [aT, bT]");
  const Scalar num = sin(w * (T - a - t)) - sin(w * (a - t)) + cos(w * (T + a - t)) - cos(w * (a + t));
  return num / (Scalar(2) * w * sin(p.zeta()));
}

/// inf_{t in [aT, bT]} \int_{aT}^{bT} k(t, s) ds, in time units (attained at t = aT).
template <typename Scalar>
Scalar inf_strip_integral(const ProblemParams<Scalar>& p, const StripInterval<Scalar>& strip) {
  using std::cos;
  using std::sin;
  validate_strip(p, strip, true);
  const Scalar w = p.omega;
  const Scalar T = p.T;
  const Scalar zeta = p.zeta();
  const Scalar a = strip.lo_time(T);
  const Scalar num = sin(w * (T - Scalar(2) * a)) + cos(zeta) - cos(Scalar(2) * w * a);
  return num / (Scalar(2) * w * sin(zeta));
}

/// inf_{t in [-T, T]} \int_{-T}^{T} k(t, s) ds for zeta in (0, pi/4].
template <typename Scalar>
Scalar whole_interval_inf_integral(const ProblemParams<Scalar>& p) {
  if (regime_of(p.zeta()) != Regime::SmallZeta)
    throw DomainError("whole_interval_inf_integral requires zeta in (0, pi/4]");
  return Scalar(1) / p.omega;
}

/// Everything the certifier consumes for one (params, strip) pair.
template <typename Scalar = double>
struct BoundsProfile {
  ProblemParams<Scalar> params;
  StripInterval<Scalar> strip;
  Regime regime{Regime::Unsupported};
  std::optional<Scalar> beta;  // large-zeta regime only
  Scalar c{};
  Scalar sup_abs_int{};    // time units
  Scalar inf_strip_int{};  // time units

  Scalar phi(Scalar y) const { return phi_upper(params, y, beta); }
  Scalar psi(Scalar y) const { return psi_lower(params, strip, y); }
  Scalar m() const { return Scalar(1) / sup_abs_int; }
  Scalar M() const { return Scalar(1) / inf_strip_int; }
};

template <typename Scalar>
BoundsProfile<Scalar> make_bounds_profile(const ProblemParams<Scalar>& p, const StripInterval<Scalar>& strip) {
  validate_strip(p, strip, true);
  BoundsProfile<Scalar> out;
  out.params = p;
  out.strip = strip;
  out.regime = regime_of(p.zeta());
  if (out.regime == Regime::LargeZeta) out.beta = beta_root(p.zeta());
  out.c = cone_constant(p, strip);
  out.sup_abs_int = sup_abs_integral(p);
  out.inf_strip_int = inf_strip_integral(p, strip);
  return out;
}

}  // namespace rh

#pragma once

// Green's function of u'(t) + omega u(-t) = sigma(t), u(-T) = u(T):
//   u(t) = \int_{-T}^{T} k(t,s) sigma(s) ds.
//
// k is smooth on the four open regions cut out by the diagonals s = t and
// s = -t. It jumps by exactly 1 across s = t (in the t direction) and is
// continuous across s = -t.

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "rh/params.hpp"

namespace rh {

enum class Region {
  AboveDiagonals,  // t > |s|
  RightWedge,      // |t| < s
  LeftWedge,       // |t| < -s
  BelowDiagonals,  // t < -|s|
};

struct KernelRegion {
  Region tag{Region::AboveDiagonals};
  bool on_diagonal{false};      // t == s
  bool on_antidiagonal{false};  // t == -s

  bool boundary() const { return on_diagonal || on_antidiagonal; }
};

/// Which one-sided limit to take on the diagonal t = s.
enum class DiagonalSide {
  TBelowS,  // t -> s from below (the default tie-break)
  TAboveS,  // t -> s from above
};

inline std::string to_string(Region r) {
  switch (r) {
    case Region::AboveDiagonals: return "above-diagonals";
    case Region::RightWedge: return "right-wedge";
    case Region::LeftWedge: return "left-wedge";
    case Region::BelowDiagonals: return "below-diagonals";
  }
  return "?";
}

namespace detail {

template <typename Scalar>
void check_in_square(Scalar half_width, Scalar t, Scalar s) {
  using std::abs;
  // Allow a few ulps of slack so that T*z with |z| = 1 is accepted.
  const Scalar lim = half_width * (Scalar(1) + Scalar(8) * std::numeric_limits<Scalar>::epsilon());
  if (!(abs(t) <= lim) || !(abs(s) <= lim))
    throw DomainError("kernel argument outside [-T, T]^2");
}

template <typename Scalar>
void check_resonance(Scalar zeta) {
  using std::abs;
  using std::sin;
  if (abs(sin(zeta)) < Scalar(kResonanceTolerance))
    throw ResonanceError("resonant parameters: sin(omega*T) = 0");
}

}  // namespace detail

/// Region of the t = s diagonal point (s, s) seen from one side.
template <typename Scalar>
Region diagonal_region(Scalar s, DiagonalSide side) {
  if (side == DiagonalSide::TBelowS) return s > Scalar(0) ? Region::RightWedge : Region::BelowDiagonals;
  return s < Scalar(0) ? Region::LeftWedge : Region::AboveDiagonals;
}

/// Open region containing (t, s). On t = s the t < s side is returned; on
/// t = -s the region with t >= 0 on the right (AboveDiagonals / RightWedge)
/// is returned. Both choices are flagged.
template <typename Scalar>
KernelRegion region_of(Scalar t, Scalar s) {
  using std::abs;
  KernelRegion r;
  if (t == s) {
    r.on_diagonal = true;
    r.on_antidiagonal = (t == -s);
    r.tag = diagonal_region(s, DiagonalSide::TBelowS);
    return r;
  }
  if (t == -s) {
    r.on_antidiagonal = true;
    r.tag = t > Scalar(0) ? Region::AboveDiagonals : Region::RightWedge;
    return r;
  }
  if (t > abs(s)) r.tag = Region::AboveDiagonals;
  else if (abs(t) < s) r.tag = Region::RightWedge;
  else if (abs(t) < -s) r.tag = Region::LeftWedge;
  else r.tag = Region::BelowDiagonals;
  return r;
}

template <typename Scalar>
KernelRegion region_of(const ProblemParams<Scalar>& p, Scalar t, Scalar s) {
  detail::check_in_square(p.T, t, s);
  return region_of(t, s);
}

/// Raw four-branch form: 2 sin(omega T) k(t,s) = cos(...) +/- sin(...).
/// Evaluates the branch for `region` regardless of where (t, s) lies, which
/// gives one-sided limits on region boundaries.
template <typename Scalar>
Scalar branch_value(const ProblemParams<Scalar>& p, Region region, Scalar t, Scalar s) {
  using std::cos;
  using std::sin;
  const Scalar w = p.omega;
  const Scalar T = p.T;
  Scalar v{};
  switch (region) {
    case Region::AboveDiagonals: v = cos(w * (T - s - t)) + sin(w * (T + s - t)); break;
    case Region::RightWedge: v = cos(w * (T - s - t)) - sin(w * (T - s + t)); break;
    case Region::LeftWedge: v = cos(w * (T + s + t)) + sin(w * (T + s - t)); break;
    case Region::BelowDiagonals: v = cos(w * (T + s + t)) - sin(w * (T - s + t)); break;
  }
  return v / (Scalar(2) * sin(p.zeta()));
}

/// Product form in normalized coordinates z = t/T, y = s/T:
///   sin(zeta) k = cos(.) cos(.).
template <typename Scalar>
Scalar branch_value_normalized(Scalar zeta, Region region, Scalar z, Scalar y) {
  using std::cos;
  using std::sin;
  const Scalar q = quarter_pi<Scalar>;
  Scalar v{};
  switch (region) {
    case Region::AboveDiagonals: v = cos(zeta * (Scalar(1) - z) - q) * cos(zeta * y - q); break;
    case Region::RightWedge: v = cos(zeta * z + q) * cos(zeta * (y - Scalar(1)) - q); break;
    case Region::LeftWedge: v = cos(zeta * z + q) * cos(zeta * (Scalar(1) + y) - q); break;
    case Region::BelowDiagonals: v = cos(zeta * (z + Scalar(1)) + q) * cos(zeta * y - q); break;
  }
  return v / sin(zeta);
}

/// k(t, s) via the normalized product form (the default evaluation path).
template <typename Scalar>
Scalar kernel_eval(const ProblemParams<Scalar>& p, Scalar t, Scalar s) {
  detail::check_resonance(p.zeta());
  const KernelRegion r = region_of(p, t, s);
  return branch_value_normalized(p.zeta(), r.tag, t / p.T, s / p.T);
}

/// k(t, s) via the raw cos/sin form; cross-check for kernel_eval.
template <typename Scalar>
Scalar kernel_eval_raw(const ProblemParams<Scalar>& p, Scalar t, Scalar s) {
  detail::check_resonance(p.zeta());
  const KernelRegion r = region_of(p, t, s);
  return branch_value(p, r.tag, t, s);
}

/// k(Tz, Ty) computed directly from the product form.
template <typename Scalar>
Scalar kernel_eval_normalized(const ProblemParams<Scalar>& p, Scalar z, Scalar y) {
  detail::check_resonance(p.zeta());
  detail::check_in_square(Scalar(1), z, y);
  const KernelRegion r = region_of(z, y);
  return branch_value_normalized(p.zeta(), r.tag, z, y);
}

/// One-sided value of k on the diagonal point (s, s).
template <typename Scalar>
Scalar kernel_diagonal_limit(const ProblemParams<Scalar>& p, Scalar s, DiagonalSide side) {
  detail::check_resonance(p.zeta());
  detail::check_in_square(p.T, s, s);
  return branch_value_normalized(p.zeta(), diagonal_region(s, side), s / p.T, s / p.T);
}

/// lim_{t->s+} k(t,s) - lim_{t->s-} k(t,s). Equals 1 for every valid s.
template <typename Scalar>
Scalar kernel_jump(const ProblemParams<Scalar>& p, Scalar s) {
  using std::abs;
  if (!(abs(s) < p.T)) throw DomainError("kernel_jump requires |s| < T");
  return kernel_diagonal_limit(p, s, DiagonalSide::TAboveS) -
         kernel_diagonal_limit(p, s, DiagonalSide::TBelowS);
}

/// Difference of the two branches meeting on the antidiagonal at (-s, s).
/// Vanishes (up to round-off) since k is continuous there.
template <typename Scalar>
Scalar kernel_antidiagonal_gap(const ProblemParams<Scalar>& p, Scalar s) {
  using std::abs;
  detail::check_resonance(p.zeta());
  detail::check_in_square(p.T, s, s);
  const Scalar t = -s;
  // For t > 0 the antidiagonal separates AboveDiagonals and LeftWedge;
  // for t < 0 it separates RightWedge and BelowDiagonals.
  const Region hi = t >= Scalar(0) ? Region::AboveDiagonals : Region::RightWedge;
  const Region lo = t >= Scalar(0) ? Region::LeftWedge : Region::BelowDiagonals;
  return branch_value(p, hi, t, s) - branch_value(p, lo, t, s);
}

// ---------------------------------------------------------------------------
// Sign classification

enum class SignTag {
  StrictlyPositive,
  StrictlyNegative,
  PositiveVanishingOnP,
  NegativeVanishingOnP,
  ChangesSign,
};

struct SignClass {
  SignTag tag{SignTag::ChangesSign};
  /// Points where k vanishes in the two borderline cases, as (t/T, s/T).
  static constexpr std::array<std::array<double, 2>, 4> vanishing_set{
      {{-1.0, -1.0}, {0.0, 0.0}, {1.0, 1.0}, {1.0, -1.0}}};
};

inline std::string to_string(SignTag t) {
  switch (t) {
    case SignTag::StrictlyPositive: return "strictly-positive";
    case SignTag::StrictlyNegative: return "strictly-negative";
    case SignTag::PositiveVanishingOnP: return "positive-vanishing-on-P";
    case SignTag::NegativeVanishingOnP: return "negative-vanishing-on-P";
    case SignTag::ChangesSign: return "changes-sign";
  }
  return "?";
}

/// Sign of k on [-T,T]^2 as a function of zeta = omega T alone.
template <typename Scalar>
SignClass sign_class(Scalar zeta) {
  using std::abs;
  detail::check_resonance(zeta);
  const Scalar q = quarter_pi<Scalar>;
  const Scalar tol = Scalar(4) * std::numeric_limits<Scalar>::epsilon();
  SignClass out;
  if (abs(zeta - q) <= tol) out.tag = SignTag::PositiveVanishingOnP;
  else if (abs(zeta + q) <= tol) out.tag = SignTag::NegativeVanishingOnP;
  else if (zeta > Scalar(0) && zeta < q) out.tag = SignTag::StrictlyPositive;
  else if (zeta < Scalar(0) && zeta > -q) out.tag = SignTag::StrictlyNegative;
  else out.tag = SignTag::ChangesSign;
  return out;
}

}  // namespace rh

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rh {

/// Raised when an argument lies outside the domain an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// sin(omega T) is (numerically) zero: the periodic problem has no Green's function.
class ResonanceError : public DomainError {
 public:
  using DomainError::DomainError;
};

template <typename Scalar>
inline constexpr Scalar quarter_pi = std::numbers::pi_v<Scalar> / Scalar(4);

template <typename Scalar>
inline constexpr Scalar half_pi = std::numbers::pi_v<Scalar> / Scalar(2);

inline constexpr double kResonanceTolerance = 1e-12;

/// Operator data for u'(t) + omega u(-t) on [-T, T] with u(-T) = u(T).
template <typename Scalar = double>
struct ProblemParams {
  Scalar T{1};
  Scalar omega{1};

  Scalar zeta() const { return omega * T; }

  static ProblemParams make(Scalar T, Scalar omega,
                            Scalar resonance_tol = Scalar(kResonanceTolerance)) {
    ProblemParams p{T, omega};
    p.validate(resonance_tol);
    return p;
  }

  void validate(Scalar resonance_tol = Scalar(kResonanceTolerance)) const {
    using std::abs;
    using std::isfinite;
    using std::sin;
    if (!isfinite(T) || !isfinite(omega)) throw DomainError("T and omega must be finite");
    if (!(T > Scalar(0))) throw DomainError("T must be positive");
    if (abs(sin(zeta())) < resonance_tol)
      throw ResonanceError("resonant parameters: sin(omega*T) = 0");
  }
};

/// Which closed-form family the envelope and integral bounds use.
enum class Regime {
  SmallZeta,    // zeta in (0, pi/4]
  LargeZeta,    // zeta in (pi/4, pi/2)
  Unsupported,  // everything else
};

template <typename Scalar>
Regime regime_of(Scalar zeta) {
  if (zeta > Scalar(0) && zeta <= quarter_pi<Scalar>) return Regime::SmallZeta;
  if (zeta > quarter_pi<Scalar> && zeta < half_pi<Scalar>) return Regime::LargeZeta;
  return Regime::Unsupported;
}

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::SmallZeta: return "small-zeta";
    case Regime::LargeZeta: return "large-zeta";
    case Regime::Unsupported: return "unsupported";
  }
  return "unsupported";
}

}  // namespace rh

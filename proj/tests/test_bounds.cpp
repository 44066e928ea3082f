#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rh/bounds.hpp"
#include "rh/oracles.hpp"

using namespace rh;
using P = ProblemParams<double>;
using Strip = StripInterval<double>;

namespace {

constexpr double kPi = std::numbers::pi;
P from_zeta(double zeta, double T = 1.0) { return P::make(T, zeta / T); }

}  // namespace

TEST_CASE("beta root") {
  CHECK(beta_root(kPi / 4) == 1.0);
  const double b = beta_root(1.5);
  CHECK(b > kPi / 6);
  CHECK(b < 1.0);
  CHECK(b == doctest::Approx(0.933147498329147).epsilon(1e-11));
  CHECK(std::abs(beta_residual(1.5, b)) < 1e-11);
  CHECK_THROWS_AS(beta_root(0.5), DomainError);
  CHECK_THROWS_AS(beta_root(1.6), DomainError);
}

TEST_CASE("beta residual is positive at 1/2, non-positive at 1 and decreasing") {
  for (double z = 0.80; z < 1.57; z += 0.05) {
    CHECK(beta_residual(z, 0.5) > 0.0);
    CHECK(beta_residual(z, 1.0) <= 0.0);
    double prev = beta_residual(z, 0.5);
    for (int i = 1; i <= 500; ++i) {
      const double cur = beta_residual(z, 0.5 + i / 1000.0);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("breakpoint ordering in the large regime") {
  for (double z = 0.80; z < 1.57; z += 0.05) {
    const double e = kPi / (4 * z);
    const double b = beta_root(z);
    CHECK(-1 < -e);
    CHECK(-e < e - 1);
    CHECK(e - 1 < b - 1);
    CHECK(b - 1 < 0);
    CHECK(b - 1 < 1 - e);
    CHECK(0 < 1 - e);
    CHECK(1 - e < e);
    CHECK(e < b);
    CHECK(b < 1);
  }
}

TEST_CASE("phi examples") {
  CHECK(phi_upper(from_zeta(1.5), 1.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(phi_upper(from_zeta(1.5), 0.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(phi_upper(from_zeta(0.5), 0.0) == doctest::Approx(std::cos(kPi / 4 - 0.5) * std::cos(kPi / 4)).epsilon(1e-15));
  CHECK_THROWS_AS(phi_upper(from_zeta(1.5), 1.2), DomainError);
  CHECK_THROWS_AS(phi_upper(from_zeta(1.7), 0.0), DomainError);
}

TEST_CASE("phi is continuous at its breakpoints") {
  for (double z : {0.4, kPi / 4, 1.0, 1.3, 1.5}) {
    const P p = from_zeta(z);
    std::vector<double> cuts{0.0};
    if (z > kPi / 4) {
      const double e = kPi / (4 * z), b = beta_root(z);
      cuts = {-e, b - 1, 1 - e, b};
    }
    for (double y : cuts) CHECK(std::abs(phi_upper(p, y - 1e-12) - phi_upper(p, y + 1e-12)) < 1e-9);
  }
}

TEST_CASE("phi equals the grid max and dominates |k|") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> zd(0.05, 1.55), yd(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const P p = from_zeta(zd(rng));
    const double y = yd(rng);
    const double phi = phi_upper(p, y);
    CHECK(std::abs(grid_envelope_oracle(p, y, EnvelopeMode::Max) - phi) < 1e-6);
    CHECK(grid_envelope_oracle(p, y, EnvelopeMode::MaxAbs) <= phi + 1e-10);
  }
}

TEST_CASE("psi examples and oracle agreement") {
  const P p = from_zeta(1.5);
  const Strip s = Strip::make(0.48);
  CHECK(psi_lower(p, s, 1.0) ==
        doctest::Approx(std::cos(1.5 * 0.52 + kPi / 4) * std::cos(-kPi / 4)).epsilon(1e-14));
  for (double y : {-1.0, -0.6, -0.52, 0.0, 0.3, 0.48, 0.5, 0.52, 0.8, 1.0}) {
    CHECK(psi_lower(p, s, y) <= phi_upper(p, y));
    CHECK(std::abs(grid_envelope_oracle(p, y, EnvelopeMode::StripMin, std::optional(s)) - psi_lower(p, s, y)) < 1e-6);
  }
}

TEST_CASE("strip validation") {
  CHECK_THROWS_AS(Strip::make(0.6), DomainError);
  // 1 - pi/(4*1.5) = 0.4764
  CHECK_THROWS_AS(validate_strip(from_zeta(1.5), Strip::make(0.4)), DomainError);
  CHECK_NOTHROW(validate_strip(from_zeta(1.5), Strip::make(0.48)));
  CHECK_THROWS_AS(inf_strip_integral(from_zeta(0.5), Strip::make(0.5)), DomainError);
}

TEST_CASE("cone constant") {
  CHECK(std::abs(cone_constant(from_zeta(1.5), Strip::make(0.48)) - 0.000353538) < 1e-8);
  CHECK(std::abs(cone_constant(from_zeta(kPi / 4), Strip::make(0.5)) - std::pow(2 - std::sqrt(2.0), 2) / 2) < 1e-14);
  CHECK(std::abs(cone_constant(from_zeta(1.2), Strip::make(0.4)) - 0.020646927870344375) < 1e-15);
  CHECK(std::abs(cone_constant(from_zeta(0.5), Strip::make(0.25)) - 0.3379645473077529) < 1e-15);
}

TEST_CASE("cone constant bounded by the half-strip value and matches inf psi/phi") {
  for (auto [z, a] : {std::pair{1.5, 0.48}, {1.2, 0.4}, {0.5, 0.25}, {0.7, 0.1}, {1.0, 0.3}}) {
    const P p = from_zeta(z);
    const Strip s = Strip::make(a);
    const double c = cone_constant(p, s);
    const double t = std::tan(z / 2);
    CHECK(c > 0.0);
    CHECK(c <= std::pow((1 - t) / (1 + t), 2) + 1e-15);
    CHECK(std::abs(oracle_cone_constant(p, s, 801) - c) < 1e-6);
  }
}

TEST_CASE("sup of the absolute kernel integral") {
  CHECK(sup_abs_integral(P::make(1.0, 0.5)) == 2.0);
  const P p = from_zeta(1.5);
  const double v = sup_abs_integral(p);
  CHECK(v >= 1.0 / 1.5);
  CHECK(v == doctest::Approx(0.9983179608831805).epsilon(1e-13));
  const auto o = oracle_sup_abs_integral(p);
  CHECK(std::abs(o.value - v) < 1e-9);
  CHECK(o.t == doctest::Approx((kPi / 6 - 1) / 3).epsilon(1e-5));
}

TEST_CASE("inf of the strip integral") {
  const P p = P::make(1.0, 0.7);
  const Strip s = Strip::make(0.25);
  const double expect = (std::sin(0.35) + std::cos(0.7) - std::cos(0.35)) / (1.4 * std::sin(0.7));
  CHECK(inf_strip_integral(p, s) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(inf_strip_integral(p, s) == doctest::Approx(0.18667966836588887).epsilon(1e-13));
  CHECK(std::abs(oracle_inf_strip_integral(p, s).value - expect) < 1e-8);
  const P q = from_zeta(1.5);
  const Strip e = Strip::make(0.48);
  CHECK(inf_strip_integral(q, e) == doctest::Approx(9.273209814876873e-05).epsilon(1e-10));
  CHECK(inf_strip_integral(q, e) == doctest::Approx(strip_integral_at(q, e, 0.48)).epsilon(1e-12));
  CHECK(std::abs(quad_strip_integral(q, e, 0.5) - strip_integral_at(q, e, 0.5)) < 1e-12);
}

TEST_CASE("whole interval inf integral") {
  CHECK(whole_interval_inf_integral(P::make(1.0, 0.5)) == 2.0);
  CHECK(whole_interval_inf_integral(P::make(3.0, 0.25)) == 4.0);
  CHECK(std::abs(oracle_whole_interval_inf_integral(P::make(3.0, 0.25)) - 4.0) < 1e-8);
  CHECK_THROWS_AS(whole_interval_inf_integral(from_zeta(1.0)), DomainError);
}

TEST_CASE("strip positivity band in the large regime") {
  for (double z : {0.9, 1.2, 1.5}) {
    const P p = from_zeta(z);
    const double e = kPi / (4 * z);
    for (int i = 1; i < 200; ++i) {
      for (int j = 0; j <= 200; ++j) {
        const double y = -1.0 + j / 100.0;
        const double z1 = -e + (2 * e - 1) * i / 200.0;          // (-e, e - 1)
        const double z2 = (1 - e) + (2 * e - 1) * i / 200.0;     // (1 - e, e)
        CHECK_MESSAGE(kernel_eval_normalized(p, z1, y) > 0.0, "z=" << z1 << " y=" << y);
        CHECK_MESSAGE(kernel_eval_normalized(p, z2, y) > 0.0, "z=" << z2 << " y=" << y);
      }
    }
  }
}

TEST_CASE("bounds profile") {
  const auto prof = make_bounds_profile(from_zeta(1.5), Strip::make(0.48));
  REQUIRE(prof.beta.has_value());
  CHECK(prof.m() == doctest::Approx(1.0016848731393468).epsilon(1e-12));
  CHECK(prof.M() == doctest::Approx(1.0 / 9.273209814876873e-05).epsilon(1e-10));
  const auto small = make_bounds_profile(P::make(1.0, 0.5), Strip::make(0.25));
  CHECK_FALSE(small.beta.has_value());
  CHECK(small.m() == 0.5);
}

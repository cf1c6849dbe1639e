#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "cvdistill/errors.hpp"
#include "cvdistill/special.hpp"
#include "cvdistill/states.hpp"
#include "cvdistill/units.hpp"

using namespace cvdistill;

namespace {

constexpr double kPi = std::numbers::pi;

// erfc(x) from its Maclaurin series, 1 - 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1)).
double erfc_series(double x) {
  double term = x;
  double sum = x;
  for (int n = 1; n < 60; ++n) {
    term *= -x * x / n;
    sum += term / (2 * n + 1);
  }
  return 1.0 - 2.0 / std::sqrt(kPi) * sum;
}

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int n = 4000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

MixtureState canonical() { return make_noisy_state_xp(db_to_snu(-3.1), db_to_snu(27.0), 0.5, 1.8875, 60.0); }

}  // namespace

TEST_CASE("dB conversion") {
  CHECK(db_to_snu(0.0) == 1.0);
  CHECK(db_to_snu(10.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(db_to_snu(-3.1) == doctest::Approx(0.48977881936844614).epsilon(1e-14));
  CHECK(db_to_snu(27.0) == doctest::Approx(501.18723362727224).epsilon(1e-14));
  for (double db : {-20.0, -3.1, 0.0, 1.27, 17.5, 27.0}) CHECK(snu_to_db(db_to_snu(db)) == doctest::Approx(db).epsilon(1e-13));
  CHECK_THROWS_AS(snu_to_db(0.0), DomainError);
  CHECK_THROWS_AS(snu_to_db(-1.0), DomainError);
}

TEST_CASE("normal tail functions") {
  CHECK(0.5 * erfc_series(1.0) == doctest::Approx(0.07864960352514258).epsilon(1e-14));
  for (double x : {-2.5, -1.0, 0.0, 0.3, 1.0, 2.0, 3.0}) {
    CHECK(special::normal_sf(x * std::sqrt(2.0)) == doctest::Approx(0.5 * erfc_series(x)).epsilon(1e-12));
  }
  // No NaN and a finite log deep in the tail.
  for (double z : {10.0, 29.9, 30.1, 40.0, 1e3, 1e6}) {
    const double l = special::log_normal_sf(z);
    CHECK(std::isfinite(l));
    CHECK(l < 0.0);
    CHECK(std::isfinite(special::normal_hazard(z)));
  }
  // Continuity across the asymptotic switch.
  const double slope = (special::log_normal_sf(30.000001) - special::log_normal_sf(29.999999)) / 2e-6;
  CHECK(slope == doctest::Approx(-special::normal_hazard(30.0)).epsilon(1e-4));
  // Hazard approaches z for large z.
  CHECK(special::normal_hazard(1e4) == doctest::Approx(1e4).epsilon(1e-7));
  CHECK(special::normal_hazard(-40.0) >= 0.0);
  CHECK(special::normal_hazard(-40.0) < 1e-300);
  CHECK(special::mills_ratio(0.0) == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-14));
}

TEST_CASE("quadrature angle") {
  CHECK(QuadratureAngle(2.0 * kPi).radians() == 0.0);
  CHECK(QuadratureAngle(-kPi / 2).radians() == doctest::Approx(1.5 * kPi));
  CHECK(QuadratureAngle::phase().cos() == 0.0);
  CHECK(QuadratureAngle::phase().sin() == 1.0);
  CHECK(QuadratureAngle(kPi / 2).cos() == 0.0);
  CHECK(QuadratureAngle::from_degrees(180.0).cos() == -1.0);
  CHECK(QuadratureAngle::from_degrees(450.0).degrees() == doctest::Approx(90.0));
  CHECK_THROWS_AS(QuadratureAngle(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("component validation") {
  CHECK_NOTHROW(GaussianComponent::vacuum().validate());
  CHECK_NOTHROW((GaussianComponent{0, 0, 0.5, 2.0}.validate()));
  CHECK_THROWS_AS((GaussianComponent{0, 0, 0.5, 1.5}.validate()), DomainError);
  CHECK_THROWS_AS((GaussianComponent{0, 0, -1.0, 2.0}.validate()), DomainError);
  CHECK_THROWS_AS((GaussianComponent{std::nan(""), 0, 1, 1}.validate()), DomainError);
  CHECK_THROWS_AS(MixtureState({}, {}), DomainError);
  CHECK_THROWS_AS(MixtureState({GaussianComponent::vacuum()}, {0.5}), DomainError);
  CHECK_THROWS_AS(MixtureState({GaussianComponent::vacuum(), GaussianComponent::vacuum()}, {1.5, -0.5}), DomainError);
  CHECK_THROWS_AS(make_noisy_state(0.4, 2.0, 0.5, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(make_noisy_state(0.5, 2.0, 1.5, 1.0, 0.0), DomainError);
}

TEST_CASE("noisy state construction") {
  const auto s = make_noisy_state(0.5, 4.0, 0.3, 2.0, kPi / 2);
  REQUIRE(s.size() == 2);
  CHECK(s.weight(0) == doctest::Approx(0.7));
  CHECK(s.weight(1) == doctest::Approx(0.3));
  CHECK(s.component(0).mean_x == 0.0);
  CHECK(s.component(1).mean_x == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s.component(1).mean_p == doctest::Approx(2.0));
  CHECK(s.component(1).var_x == 0.5);
  CHECK(s.component(1).var_p == 4.0);

  // Degenerate mixing weights keep a usable single-component state.
  CHECK_NOTHROW(make_noisy_state_xp(0.5, 4.0, 0.0, 1.0, 0.0));
  CHECK_NOTHROW(make_noisy_state_xp(0.5, 4.0, 1.0, 1.0, 0.0));
}

TEST_CASE("quadrature statistics") {
  const auto s = canonical();
  const auto x = quadrature_stats(s, QuadratureAngle::amplitude());
  // Var = V + gamma (1 - gamma) d^2 along a single displacement axis.
  CHECK(x.mean == doctest::Approx(0.5 * 1.8875).epsilon(1e-14));
  CHECK(x.variance == doctest::Approx(0.48977881936844614 + 0.25 * 1.8875 * 1.8875).epsilon(1e-13));
  const auto p = quadrature_stats(s, QuadratureAngle::phase());
  CHECK(p.variance == doctest::Approx(501.18723362727224 + 0.25 * 3600.0).epsilon(1e-13));

  // Large common offset: no cancellation.
  const MixtureState offset({{1e8, 0, 1, 1}, {1e8 + 1.0, 0, 1, 1}}, {0.5, 0.5});
  CHECK(quadrature_stats(offset, QuadratureAngle::amplitude()).variance == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("marginal integrates the Wigner function") {
  const auto s = make_noisy_state_xp(0.6, 3.0, 0.4, 1.5, 2.0);
  for (double deg : {0.0, 30.0, 90.0, 135.0}) {
    const auto a = QuadratureAngle::from_degrees(deg);
    for (double q : {-1.0, 0.3, 2.2}) {
      // Integrate along the line perpendicular to the quadrature axis.
      const double integral = simpson(
          [&](double t) { return wigner_density(s, q * a.cos() - t * a.sin(), q * a.sin() + t * a.cos()); }, -15.0,
          15.0);
      CHECK(marginal_pdf(s, a, q) == doctest::Approx(integral).epsilon(1e-9));
    }
    const double mass = simpson([&](double q) { return marginal_pdf(s, a, q); }, -20.0, 20.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("vacuum Wigner peak") {
  const auto v = MixtureState::single(GaussianComponent::vacuum());
  CHECK(wigner_density(v, 0.0, 0.0) == doctest::Approx(1.0 / (2.0 * kPi)));
  CHECK(wigner_density(v, 1.0, -2.0) == doctest::Approx(wigner_density(v, -1.0, 2.0)));
}

TEST_CASE("quarter-turn rotation") {
  const auto s = make_noisy_state_xp(0.5, 4.0, 0.5, 1.0, 3.0);
  const auto r = s.rotated_quarter_turns(1);
  for (double x : {-1.0, 0.5}) {
    for (double p : {-2.0, 0.0, 1.7}) CHECK(wigner_density(r, -p, x) == doctest::Approx(wigner_density(s, x, p)));
  }
  const auto full = s.rotated_quarter_turns(4);
  CHECK(full.component(1).mean_p == s.component(1).mean_p);
  CHECK(s.rotated_quarter_turns(-1).component(1).mean_x == s.rotated_quarter_turns(3).component(1).mean_x);
}

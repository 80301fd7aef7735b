#include "sticky1d/entropy.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sticky1d/errors.hpp"
#include "sticky1d/kernel.hpp"
#include "sticky1d/simulate.hpp"

using sticky1d::DoublingShape;
using sticky1d::EntropyPair;
using sticky1d::EntropyProbe;
using sticky1d::ExactFluxInTime;
using sticky1d::Kernel;
using sticky1d::TestFunction;
using sticky1d::Trajectory;
using sticky1d::TrajectoryField;
using sticky1d::TrajectoryLadderFlux;

namespace {

// Stationary admissible shock -1/2 -> +1/2 at x = 0 (entropy solution of the
// quadratic model with zero source).
auto stationary_shock() {
  return sticky1d::make_field(
      [](double, double x) { return x < 0.0 ? -0.5 : 0.5; },
      [](double, double) { return 0.0; },
      [](double) { return std::vector<double>{0.0}; });
}

// Same jump transported at (wrong) speed c; violates Rankine-Hugoniot for
// c != 0 and must be flagged by the Kruzkov battery.
auto moving_shock(double c) {
  return sticky1d::make_field(
      [c](double t, double x) { return x < c * t ? -0.5 : 0.5; },
      [](double, double) { return 0.0; },
      [c](double t) { return std::vector<double>{c * t}; });
}

// Decreasing jump at rest: Rankine-Hugoniot holds (speed 0) but the jump is
// entropy-inadmissible for the concave flux.
auto inadmissible_shock() {
  return sticky1d::make_field(
      [](double, double x) { return x < 0.0 ? 0.5 : -0.5; },
      [](double, double) { return 0.0; },
      [](double) { return std::vector<double>{0.0}; });
}

double chi_line_integral(const TestFunction& chi, double c) {
  const auto [t0, t1] = chi.t_support();
  return oracles::quad_midpoint(
      [&](double t) { return chi.value(t, c * t); }, t0, t1, 200000);
}

}  // namespace

TEST_CASE("mollifier pieces match finite differences") {
  std::mt19937 rng(90);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (int i = 0; i < 60; ++i) {
    const double x = u(rng);
    CHECK(sticky1d::detail::bump_deriv(x) ==
          Catch::Approx(oracles::fd_derivative(sticky1d::detail::bump, x, 1e-6))
              .margin(1e-7));
  }
  std::uniform_real_distribution<double> v(0.02, 0.98);
  for (int i = 0; i < 60; ++i) {
    const double x = v(rng);
    CHECK(sticky1d::detail::ramp01_deriv(x) ==
          Catch::Approx(
              oracles::fd_derivative(sticky1d::detail::ramp01, x, 1e-7))
              .margin(1e-5));
  }
  CHECK(sticky1d::detail::ramp01(0.0) == 1.0);
  CHECK(sticky1d::detail::ramp01(1.0) == 0.0);
  CHECK(sticky1d::detail::ramp01(0.5) == Catch::Approx(0.5).margin(1e-15));

  // The pinned mollifier mass.
  const double mass = oracles::quad_midpoint(sticky1d::detail::bump, -1.0, 1.0,
                                             2000000);
  CHECK(mass == Catch::Approx(oracles::kBumpMass).margin(1e-9));
  CHECK(sticky1d::detail::kBumpMass ==
        Catch::Approx(oracles::kBumpMass).margin(1e-15));
}

TEST_CASE("test function partial derivatives match finite differences") {
  const TestFunction bump = TestFunction::bump2d(0.5, -0.2, 0.3, 0.4);
  DoublingShape shape;
  shape.sigma = 0.3;
  shape.tau = 0.7;
  shape.delta = 0.05;
  shape.eps = 0.08;
  shape.s = 0.5;
  shape.y = 0.1;
  shape.flat = 0.5;
  shape.ramp = 0.7;
  const TestFunction doub = TestFunction::doubling(shape);

  std::mt19937 rng(91);
  std::uniform_real_distribution<double> ut(0.05, 0.95);
  std::uniform_real_distribution<double> ux(-0.9, 0.9);
  for (const TestFunction* chi : {&bump, &doub}) {
    for (int i = 0; i < 80; ++i) {
      const double t = ut(rng), x = ux(rng);
      const double fd_t = oracles::fd_derivative(
          [&](double tt) { return chi->value(tt, x); }, t, 1e-7);
      const double fd_x = oracles::fd_derivative(
          [&](double xx) { return chi->value(t, xx); }, x, 1e-7);
      CHECK(chi->dt(t, x) == Catch::Approx(fd_t).margin(2e-5));
      CHECK(chi->dx(t, x) == Catch::Approx(fd_x).margin(2e-5));
    }
  }
}

TEST_CASE("test functions vanish outside their support boxes") {
  const TestFunction bump = TestFunction::bump2d(0.5, 0.0, 0.2, 0.3);
  const auto [t0, t1] = bump.t_support();
  const auto [x0, x1] = bump.x_support();
  CHECK(t0 == Catch::Approx(0.3));
  CHECK(t1 == Catch::Approx(0.7));
  CHECK(x0 == Catch::Approx(-0.3));
  CHECK(x1 == Catch::Approx(0.3));
  CHECK(bump.value(t0 - 1e-9, 0.0) == 0.0);
  CHECK(bump.value(0.5, x1 + 1e-9) == 0.0);
  CHECK(bump.value(0.5, 0.0) == Catch::Approx(1.0));  // normalized peak

  const TestFunction doub = sticky1d::make_doubling_probe(
      0.3, 0.7, 0.05, 0.08, 1.0, 1.0);
  const auto [tt0, tt1] = doub.t_support();
  const auto [xx0, xx1] = doub.x_support();
  for (double t : {tt0 - 1e-9, tt1 + 1e-9})
    for (double x : {-0.1, 0.0, 0.1}) CHECK(doub.value(t, x) == 0.0);
  for (double x : {xx0 - 1e-9, xx1 + 1e-9})
    for (double t : {0.4, 0.5, 0.6}) CHECK(doub.value(t, x) == 0.0);
  CHECK(doub.value(0.5, 0.0) > 0.0);
}

TEST_CASE("doubling probe admissibility is enforced") {
  using sticky1d::make_doubling_probe;
  using sticky1d::WindowViolation;
  CHECK_THROWS_AS(make_doubling_probe(0.7, 0.3, 0.05, 0.05, 1.0, 1.0),
                  WindowViolation);  // sigma >= tau
  CHECK_THROWS_AS(make_doubling_probe(0.3, 0.7, 0.0, 0.05, 1.0, 1.0),
                  WindowViolation);  // delta = 0
  CHECK_THROWS_AS(make_doubling_probe(0.3, 0.7, 0.05, 0.0, 1.0, 1.0),
                  WindowViolation);  // eps = 0
  CHECK_THROWS_AS(make_doubling_probe(0.3, 0.7, 0.2, 0.2, 1.0, 1.0),
                  WindowViolation);  // eps + delta >= min(sigma, T - tau)
  CHECK_THROWS_AS(make_doubling_probe(0.05, 0.95, 0.03, 0.03, 1.0, 1.0),
                  WindowViolation);  // violates at both ends
  CHECK_NOTHROW(make_doubling_probe(0.3, 0.7, 0.05, 0.08, 1.0, 1.0));
  // Off-center frozen copy s must stay inside (0, T).
  CHECK_THROWS_AS(make_doubling_probe(0.3, 0.7, 0.05, 0.08, 1.0, 1.0, 1.5),
                  WindowViolation);
}

TEST_CASE("stationary shock has the predicted entropy production") {
  const auto field = stationary_shock();
  const ExactFluxInTime flux;
  for (double alpha : {0.0, 0.25, -0.3, 0.49}) {
    const TestFunction chi = sticky1d::make_doubling_probe(
        0.35, 0.65, 0.05, 0.1, 0.5, 1.0);
    const EntropyProbe probe{alpha, chi};
    const double got = sticky1d::kruzkov_integral(field, flux, probe, 1.0);
    const double expect =
        (0.5 - 2.0 * alpha * alpha) * chi_line_integral(chi, 0.0);
    CHECK(got == Catch::Approx(expect).margin(2e-6));
    CHECK(got >= 0.0);
  }
}

TEST_CASE("alpha outside the jump range gives zero production") {
  const auto field = stationary_shock();
  const ExactFluxInTime flux;
  const TestFunction chi =
      sticky1d::make_doubling_probe(0.35, 0.65, 0.05, 0.1, 0.5, 1.0);
  // alpha = 1/2 equals the top state: |F - a| is (a - F), linear in F, so
  // the Kruzkov form degenerates to the plain weak form, which vanishes.
  const EntropyProbe probe{0.5, chi};
  const double got = sticky1d::kruzkov_integral(field, flux, probe, 1.0);
  CHECK(std::abs(got) <= 1e-9);
}

TEST_CASE("wrong shock speed is detected with the predicted magnitude") {
  // Jump transported at c = 1/2 instead of the Rankine-Hugoniot speed 0.
  // The probe window rides the line x = c t (second copy at y = c s), and
  // alpha = 0.4 makes the production rate 1/2 - 2 a^2 - 2 a c negative.
  const double c = 0.5;
  const double alpha = 0.4;
  const auto field = moving_shock(c);
  const ExactFluxInTime flux;
  const TestFunction chi = sticky1d::make_doubling_probe(
      0.25, 0.55, 0.05, 0.1, 1.0, 1.0, std::nullopt, c * 0.4);
  const EntropyProbe probe{alpha, chi};
  const double got = sticky1d::kruzkov_integral(field, flux, probe, 1.0);
  const double rate = 0.5 - 2.0 * alpha * alpha - 2.0 * alpha * c;
  const double expect = rate * chi_line_integral(chi, c);
  CHECK(rate < 0.0);
  CHECK(expect < -1e-3);  // the window genuinely sees the shock
  CHECK(got == Catch::Approx(expect).margin(2e-6));
  CHECK(got < -sticky1d::probe_tolerance(chi));

  // The battery flags it too.
  const auto results =
      sticky1d::kruzkov_battery(field, flux, {alpha}, {chi}, 1.0);
  REQUIRE(results.size() == 1);
  CHECK(!results[0].pass);
  CHECK(results[0].alpha == alpha);
}

TEST_CASE("rarefaction-shaped decreasing jump is rejected") {
  const auto field = inadmissible_shock();
  const ExactFluxInTime flux;
  const TestFunction chi = sticky1d::make_doubling_probe(
      0.35, 0.65, 0.05, 0.1, 0.5, 1.0);
  const EntropyProbe probe{0.0, chi};
  const double got = sticky1d::kruzkov_integral(field, flux, probe, 1.0);
  const double expect = -0.5 * chi_line_integral(chi, 0.0);
  CHECK(got == Catch::Approx(expect).margin(2e-6));
  CHECK(got < -sticky1d::probe_tolerance(chi));
}

TEST_CASE("probe support must sit inside the horizon") {
  const auto field = stationary_shock();
  const ExactFluxInTime flux;
  const TestFunction late = TestFunction::bump2d(0.9, 0.0, 0.3, 0.5);
  CHECK_THROWS_AS(
      sticky1d::kruzkov_integral(field, flux, EntropyProbe{0.0, late}, 1.0),
      sticky1d::ProbeOutOfWindow);
  CHECK_THROWS_AS(
      sticky1d::kruzkov_integral(field, flux, EntropyProbe{0.7, late}, 2.0),
      sticky1d::OutOfRange);  // |alpha| > 1/2
}

TEST_CASE("regularized entropy pair basics") {
  const EntropyPair pair{0.2, 1e-3};
  CHECK(pair.eta(0.2) == 0.0);
  // Quadratic core: (5e-4)^2 / (2 * 1e-3) = 1.25e-4.
  CHECK(pair.eta(0.2 + 5e-4) == Catch::Approx(1.25e-4));
  CHECK(pair.eta(0.5) == Catch::Approx(0.3 - 5e-4));
  CHECK(pair.eta_prime(0.2) == 0.0);
  CHECK(pair.eta_prime(0.5) == 1.0);
  CHECK(pair.eta_prime(-0.5) == -1.0);
  CHECK(pair.eta_prime(0.2 + 5e-4) == Catch::Approx(0.5));
}

TEST_CASE("exact psi matches numerical integration of eta' A'") {
  const ExactFluxInTime flux;
  std::mt19937 rng(92);
  std::uniform_real_distribution<double> uu(-0.5, 0.5);
  for (int i = 0; i < 25; ++i) {
    const double alpha = uu(rng);
    const double u = uu(rng);
    const double eps = 1e-3;
    const EntropyPair pair{alpha, eps};
    const double exact = flux.psi(0.0, alpha, eps, u);
    const double numeric = oracles::quad_midpoint(
        [&](double y) { return pair.eta_prime(y) * (-2.0 * y); },
        std::min(alpha, u), std::max(alpha, u), 400000);
    const double sign = u >= alpha ? 1.0 : -1.0;
    CHECK(exact == Catch::Approx(sign * numeric).margin(1e-9));
  }
}

TEST_CASE("ladder psi matches numerical integration of eta' A_N'") {
  const auto st = sticky1d::make_initial_state({-0.6, -0.1, 0.2, 0.8},
                                               {0.7, 1.3, 1.1, 0.9});
  const Kernel k = Kernel::odd_bump(1.0, 0.5);
  const Trajectory tr = sticky1d::simulate(st, k, 0.4);
  const TrajectoryLadderFlux flux(tr);
  std::mt19937 rng(93);
  std::uniform_real_distribution<double> uu(-0.5, 0.5);
  const double t = 0.2;
  for (int i = 0; i < 15; ++i) {
    const double alpha = uu(rng);
    const double u = uu(rng);
    const double eps = 1e-3;
    const EntropyPair pair{alpha, eps};
    const double exact = flux.psi(t, alpha, eps, u);
    const double numeric = oracles::quad_midpoint(
        [&](double y) { return pair.eta_prime(y) * flux.derivative(t, y); },
        std::min(alpha, u), std::max(alpha, u), 400000);
    const double sign = u >= alpha ? 1.0 : -1.0;
    CHECK(exact == Catch::Approx(sign * numeric).margin(1e-6));
  }
}

TEST_CASE("trajectory battery passes and pair value converges to Kruzkov") {
  const auto st = sticky1d::make_initial_state({-0.5, 0.0, 0.45},
                                               {1.2, 0.9, 0.9});
  const Kernel k = Kernel::odd_bump(2.0, 0.8);
  const Trajectory tr = sticky1d::simulate(st, k, 1.0);
  const TrajectoryField field(tr);
  const TrajectoryLadderFlux flux(tr);

  std::vector<TestFunction> chis;
  chis.push_back(sticky1d::make_doubling_probe(0.3, 0.6, 0.05, 0.1, 1.0, 1.0));
  chis.push_back(TestFunction::bump2d(0.5, 0.0, 0.25, 0.7));
  const std::vector<double> alphas{-0.4, -0.15, 0.05, 0.26, 0.45};
  const auto results = sticky1d::kruzkov_battery(field, flux, alphas, chis, 1.0);
  REQUIRE(results.size() == alphas.size() * chis.size());
  for (const auto& r : results) {
    INFO("probe " << r.probe_id << " alpha " << r.alpha << " value "
                  << r.value);
    CHECK(r.pass);
  }

  // Regularized pair against the sharp Kruzkov functional.
  const EntropyPair pair{0.26, 1e-3};
  const double sharp = sticky1d::kruzkov_integral(
      field, flux, EntropyProbe{0.26, chis[0]}, 1.0);
  const double smooth =
      sticky1d::entropy_pair_value(field, flux, pair, chis[0], 1.0);
  CHECK(std::abs(smooth - sharp) <= 1e-4);
}

TEST_CASE("probe tolerance scales with the test function size") {
  const TestFunction small = sticky1d::make_doubling_probe(
      0.45, 0.55, 0.02, 0.03, 0.5, 1.0);
  const TestFunction wide = TestFunction::bump2d(0.5, 0.0, 0.4, 2.0);
  CHECK(sticky1d::probe_tolerance(small) >= 1e-6);
  CHECK(sticky1d::probe_tolerance(wide) >= 1e-6);
  // Steeper, larger-volume probes get proportionally looser tolerances.
  CHECK(sticky1d::probe_tolerance(small) > 1e-6);
}

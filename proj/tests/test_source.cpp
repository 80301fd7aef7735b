#include "sticky1d/source.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sticky1d/errors.hpp"
#include "sticky1d/flux.hpp"
#include "sticky1d/kernel.hpp"

using sticky1d::DiscreteSourceEvaluator;
using sticky1d::Kernel;
using sticky1d::ParticleState;
using sticky1d::StepFunction;
using sticky1d::StepSourceEvaluator;

namespace {

ParticleState make_state(std::mt19937& rng, int n, double spread) {
  const auto rs = oracles::random_state(rng, n, spread);
  return sticky1d::make_initial_state(rs.x, rs.m);
}

}  // namespace

TEST_CASE("cached evaluator reproduces the double sum exactly") {
  std::mt19937 rng(61);
  const Kernel k = Kernel::odd_bump(1.5, 0.8);
  const ParticleState st = make_state(rng, 14, 1.2);
  const DiscreteSourceEvaluator cached(st, k);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double x = ux(rng);
    CHECK(cached(x) ==
          Catch::Approx(sticky1d::discrete_source(st, k, x)).margin(1e-16));
  }
  // Including exactly at particle positions (jump-inclusive convention).
  for (double xp : st.x)
    CHECK(cached(xp) ==
          Catch::Approx(sticky1d::discrete_source(st, k, xp)).margin(1e-16));
}

TEST_CASE("quadrature route matches the double sum on the empirical CDF") {
  // Two genuinely independent evaluations of the same object: the defining
  // double sum versus F (phi*F) - int F (phi'*F) evaluated by quadrature.
  std::mt19937 rng(62);
  const Kernel k = Kernel::odd_bump(2.0, 0.9);
  const ParticleState st = make_state(rng, 9, 1.0);
  const StepFunction f = sticky1d::empirical_cdf(st);
  const double reach = 2.5;
  std::uniform_real_distribution<double> ux(-2.2, 2.2);
  for (int i = 0; i < 40; ++i) {
    const double x = ux(rng);
    const double quad = sticky1d::source_eval(f, k, x, reach);
    const double sum = sticky1d::discrete_source(st, k, x);
    CHECK(quad == Catch::Approx(sum).margin(1e-8));
  }
}

TEST_CASE("closed-form step evaluator matches the double sum") {
  std::mt19937 rng(63);
  const Kernel k = Kernel::odd_bump(1.0, 0.7);
  const ParticleState st = make_state(rng, 12, 1.0);
  const StepFunction f = sticky1d::empirical_cdf(st);
  const StepSourceEvaluator fast(f, k, 2.0);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double x = ux(rng);
    CHECK(fast(x) ==
          Catch::Approx(sticky1d::discrete_source(st, k, x)).margin(1e-13));
  }
}

TEST_CASE("batch profile equals pointwise evaluation") {
  std::mt19937 rng(64);
  const Kernel k = Kernel::odd_bump(1.2, 0.8);
  const ParticleState st = make_state(rng, 7, 0.9);
  const StepFunction f = sticky1d::empirical_cdf(st);
  const double reach = 2.0;
  std::vector<double> xs;
  for (int i = 0; i <= 30; ++i) xs.push_back(-2.0 + 4.0 * i / 30.0);
  const auto prof = sticky1d::source_profile(f, k, xs, reach);
  REQUIRE(prof.size() == xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(prof[i] ==
          Catch::Approx(sticky1d::source_eval(f, k, xs[i], reach)).margin(2e-9));
  std::vector<double> bad{1.0, 0.0};
  CHECK_THROWS_AS(sticky1d::source_profile(f, k, bad, reach),
                  sticky1d::OutOfRange);
}

TEST_CASE("source vanishes identically beyond the jump hull") {
  // Total antisymmetry: the full double sum over all pairs is zero, so the
  // cumulative source returns to zero once every jump is included.
  std::mt19937 rng(65);
  const Kernel k = Kernel::odd_bump(3.0, 1.0);
  const ParticleState st = make_state(rng, 10, 0.8);
  const StepFunction f = sticky1d::empirical_cdf(st);
  const StepSourceEvaluator fast(f, k, 2.0);
  CHECK(std::abs(fast(10.0)) <= 1e-15);
  CHECK(std::abs(fast(f.breakpoints().back())) <= 1e-15);
  CHECK(fast(f.breakpoints().front() - 1e-9) == 0.0);
  CHECK(std::abs(sticky1d::discrete_source(st, k, 10.0)) <= 1e-15);
}

TEST_CASE("zero kernel gives zero source on every route") {
  std::mt19937 rng(66);
  const ParticleState st = make_state(rng, 6, 1.0);
  const StepFunction f = sticky1d::empirical_cdf(st);
  CHECK(sticky1d::discrete_source(st, Kernel::zero(), 0.3) == 0.0);
  CHECK(sticky1d::source_eval(f, Kernel::zero(), 0.3, 2.0) == 0.0);
  CHECK(StepSourceEvaluator(f, Kernel::zero(), 2.0)(0.3) == 0.0);
}

TEST_CASE("support guards reject data escaping the truncation radius") {
  const StepFunction far({5.0}, {-0.5, 0.5});
  const Kernel k = Kernel::odd_bump(1.0, 1.0);
  CHECK_THROWS_AS(sticky1d::source_eval(far, k, 0.0, 2.0), sticky1d::OutOfRange);
  CHECK_THROWS_AS(StepSourceEvaluator(far, k, 2.0), sticky1d::OutOfRange);
  CHECK_THROWS_AS(sticky1d::source_eval(far, k, 0.0, -1.0),
                  sticky1d::OutOfRange);
  // Dust jumps (roundoff scale) are exempt from the hull check.
  const StepFunction dusty({0.0, 5.0}, {-0.5, 0.5, 0.5 + 1e-14});
  CHECK_NOTHROW(StepSourceEvaluator(dusty, k, 2.0));
}

TEST_CASE("two-particle source has the closed form") {
  // N = 2 at positions -a, a with unit weights: row sums are
  // m S(d)/4-type products; check against a fully hand-expanded formula.
  const double a = 0.3;
  const Kernel k = Kernel::odd_bump(2.0, 1.0);
  const auto st = sticky1d::make_initial_state({-a, a}, {1.0, 1.0});
  const double s_val = k.eval(2.0 * a);  // S(x2 - x1) = S(2a)
  // l = 1: (1/4) m1 m2 S(x1 - x2) = -(1/4) S(2a); l = 2 adds +(1/4) S(2a).
  CHECK(sticky1d::discrete_source(st, k, -a) ==
        Catch::Approx(-0.25 * s_val).margin(1e-16));
  CHECK(sticky1d::discrete_source(st, k, 0.0) ==
        Catch::Approx(-0.25 * s_val).margin(1e-16));
  CHECK(sticky1d::discrete_source(st, k, a) == Catch::Approx(0.0).margin(1e-16));
  CHECK(sticky1d::discrete_source(st, k, -a - 1e-12) == 0.0);
}

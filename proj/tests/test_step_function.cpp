#include "sticky1d/step_function.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sticky1d/errors.hpp"
#include "sticky1d/kernel.hpp"
#include "sticky1d/numerics.hpp"

using sticky1d::Kernel;
using sticky1d::StepFunction;

namespace {

StepFunction random_cdf(std::mt19937& rng, int jumps, double spread) {
  std::uniform_real_distribution<double> ux(-spread, spread);
  std::vector<double> bp(jumps);
  for (double& b : bp) b = ux(rng);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::uniform_real_distribution<double> uw(0.1, 1.0);
  std::vector<double> w(bp.size());
  double tot = 0.0;
  for (double& wi : w) tot += (wi = uw(rng));
  std::vector<double> v{-0.5};
  double acc = -0.5;
  for (double wi : w) v.push_back(acc += wi / tot);
  v.back() = 0.5;
  return StepFunction(bp, v);
}

}  // namespace

TEST_CASE("construction validates shape") {
  CHECK_THROWS_AS(StepFunction({0.0, 0.0}, {1.0, 2.0, 3.0}), sticky1d::Error);
  CHECK_THROWS_AS(StepFunction({1.0, 0.0}, {1.0, 2.0, 3.0}), sticky1d::Error);
  CHECK_THROWS_AS(StepFunction({0.0}, {1.0}), sticky1d::Error);
  CHECK_NOTHROW(StepFunction({0.0}, {1.0, 2.0}));
}

TEST_CASE("evaluation is right-continuous with correct tails") {
  const StepFunction f({-1.0, 2.0}, {-0.5, 0.25, 0.5});
  CHECK(f(-5.0) == -0.5);
  CHECK(f(-1.0 - 1e-12) == -0.5);
  CHECK(f(-1.0) == 0.25);  // value from the right
  CHECK(f(0.0) == 0.25);
  CHECK(f(2.0) == 0.5);
  CHECK(f(100.0) == 0.5);
  CHECK(f.left_tail() == -0.5);
  CHECK(f.right_tail() == 0.5);
  CHECK(f.jump_count() == 2);
  CHECK(f.jump(0) == 0.75);
  CHECK(f.jump(1) == 0.25);
}

TEST_CASE("constant, monotonicity, shifted-CDF shape, total variation") {
  const StepFunction c = StepFunction::constant(3.0);
  CHECK(c(0.0) == 3.0);
  CHECK(c.jump_count() == 0);

  const StepFunction f({-1.0, 2.0}, {-0.5, 0.25, 0.5});
  CHECK(f.non_decreasing());
  CHECK(f.is_shifted_cdf());
  CHECK(f.total_variation() == 1.0);

  const StepFunction g({0.0}, {-0.5, 0.4});
  CHECK(!g.is_shifted_cdf());
  const StepFunction h({0.0, 1.0}, {-0.5, 0.7, 0.5});
  CHECK(!h.non_decreasing());
  CHECK(!h.is_shifted_cdf());
  CHECK(h.total_variation() == Catch::Approx(1.4));
}

TEST_CASE("canonical form removes zero jumps and equality uses it") {
  const StepFunction f({-1.0, 0.0, 2.0}, {-0.5, 0.25, 0.25, 0.5});
  const StepFunction g({-1.0, 2.0}, {-0.5, 0.25, 0.5});
  CHECK(f.canonical().jump_count() == 2);
  CHECK(f == g);
  const StepFunction h({-1.0, 2.0}, {-0.5, 0.3, 0.5});
  CHECK(!(f == h));
}

TEST_CASE("l1 distance of shifted Heavisides equals the shift") {
  const StepFunction f({0.25}, {-0.5, 0.5});
  const StepFunction g({1.0}, {-0.5, 0.5});
  CHECK(sticky1d::l1_distance(f, g) == Catch::Approx(0.75).epsilon(1e-15));
  CHECK(sticky1d::l1_distance(f, f) == 0.0);
}

TEST_CASE("l1 distance matches a hand-computed case") {
  // f: -.5 | (0) .1 | (1) .5      g: -.5 | (0.5) .5
  // |f-g| = 0 on (-inf,0), .6 on (0,.5), .4 on (.5,1), 0 after.
  const StepFunction f({0.0, 1.0}, {-0.5, 0.1, 0.5});
  const StepFunction g({0.5}, {-0.5, 0.5});
  CHECK(sticky1d::l1_distance(f, g) ==
        Catch::Approx(0.6 * 0.5 + 0.4 * 0.5).epsilon(1e-15));
}

TEST_CASE("l1 distance agrees with dense Riemann sampling") {
  std::mt19937 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const StepFunction f = random_cdf(rng, 6, 2.0);
    const StepFunction g = random_cdf(rng, 9, 2.0);
    const double exact = sticky1d::l1_distance(f, g);
    const double brute = oracles::brute_l1(f, g, -2.5, 2.5, 400000);
    CHECK(exact == Catch::Approx(brute).margin(2e-4));
  }
}

TEST_CASE("l1 distance demands matching tails") {
  const StepFunction f({0.0}, {-0.5, 0.5});
  const StepFunction g({0.0}, {-0.5, 0.4});
  CHECK_THROWS_AS(sticky1d::l1_distance(f, g), sticky1d::MismatchedTails);
}

TEST_CASE("convolution against kernel derivative equals direct quadrature") {
  // convolve_step(f, k, 0) must equal int S'(z - y) f(y) dy for compactly
  // supported S', because the jump-sum is the exact integration by parts.
  const Kernel k = Kernel::odd_bump(1.4, 0.9);
  std::mt19937 rng(11);
  const StepFunction f = random_cdf(rng, 7, 1.5);
  for (double z : {-1.8, -0.3, 0.0, 0.41, 1.2, 2.9}) {
    const double lib = sticky1d::convolve_step(f, k, 0, z);
    const double direct = sticky1d::integrate_piecewise(
        [&](double y) { return k.eval(z - y, 1) * f(y); }, z - k.radius(),
        z + k.radius(), f.breakpoints(), 1e-11);
    CHECK(lib == Catch::Approx(direct).margin(1e-9));

    const double lib1 = sticky1d::convolve_step(f, k, 1, z);
    const double direct1 = sticky1d::integrate_piecewise(
        [&](double y) { return k.eval(z - y, 2) * f(y); }, z - k.radius(),
        z + k.radius(), f.breakpoints(), 1e-11);
    CHECK(lib1 == Catch::Approx(direct1).margin(1e-8));
  }
}

TEST_CASE("convolution guards") {
  const StepFunction f({0.0}, {-0.5, 0.5});
  const Kernel k = Kernel::odd_bump(1.0, 1.0);
  CHECK_THROWS_AS(sticky1d::convolve_step(f, k, 2, 0.0), sticky1d::OutOfRange);
  CHECK(sticky1d::convolve_step(f, Kernel::zero(), 0, 0.0) == 0.0);
}

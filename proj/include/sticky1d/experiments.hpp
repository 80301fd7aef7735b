#ifndef STICKY1D_EXPERIMENTS_HPP_
#define STICKY1D_EXPERIMENTS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <vector>

#include "sticky1d/errors.hpp"
#include "sticky1d/finite_volume.hpp"
#include "sticky1d/flux.hpp"
#include "sticky1d/kernel.hpp"
#include "sticky1d/simulate.hpp"
#include "sticky1d/step_function.hpp"

namespace sticky1d {

// ---------------------------------------------------------------------------
// Initial data sampling: midpoint quantiles with equal unit weights, so the
// mean weight is exactly 1 and the sampled CDF converges in L1 at rate
// (support width)/N.

namespace detail {

// inf{x : f(x) >= level} for a right-continuous non-decreasing step function.
inline double step_quantile(const StepFunction& f, double level) {
  const auto& bp = f.breakpoints();
  const auto& vals = f.values();
  const auto it = std::lower_bound(vals.begin() + 1, vals.end(), level);
  if (it == vals.end())
    throw NonMonotoneInput("quantile: level above the right tail");
  return bp[static_cast<std::size_t>(it - vals.begin()) - 1];
}

// Same for a callable CDF, by bracket expansion and bisection.
template <class Fn>
double callable_quantile(const Fn& f, double level) {
  double lo = -1.0, hi = 1.0;
  int guard = 0;
  while (f(lo) >= level) {
    lo *= 2.0;
    if (++guard > 60)
      throw UnboundedSupport("quantile: CDF never drops below the level");
  }
  guard = 0;
  while (f(hi) < level) {
    hi *= 2.0;
    if (++guard > 60)
      throw UnboundedSupport("quantile: CDF never reaches the level");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi));
       ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= level)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// Strict-separation repair for atomic CDFs: ties are spread by a
// deterministic perturbation i * 1e-12 * scale (the sticky dynamics
// immediately re-merges them, so the represented measure is unchanged).
inline void repair_ties(std::vector<double>& x) {
  bool tied = false;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i] < x[i + 1])) tied = true;
  if (!tied) return;
  const double scale = std::max(x.back() - x.front(), 1.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] += static_cast<double>(i + 1) * 1e-12 * scale;
}

}  // namespace detail

// Quantile sampler for a step-function CDF (must pass the shifted-CDF
// invariants). x_i = inf{x : F(x) >= -1/2 + (i - 1/2)/N}, m_i = 1.
inline ParticleState initial_data_from_cdf(const StepFunction& f_in, int n) {
  if (n < 1) throw OutOfRange("initial data: need at least one particle");
  if (!f_in.non_decreasing() || !f_in.is_shifted_cdf())
    throw NonMonotoneInput(
        "initial data: CDF must be non-decreasing with tails -1/2, +1/2");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i)
    x[static_cast<std::size_t>(i - 1)] =
        detail::step_quantile(f_in, -0.5 + (i - 0.5) / n);
  detail::repair_ties(x);
  return make_initial_state(x, std::vector<double>(x.size(), 1.0));
}

// Quantile sampler for a callable CDF; monotonicity is spot-checked on a
// uniform grid over the sampled range.
template <class Fn, class = std::enable_if_t<!std::is_convertible_v<
                        const Fn&, const StepFunction&>>>
ParticleState initial_data_from_cdf(const Fn& f_in, int n) {
  if (n < 1) throw OutOfRange("initial data: need at least one particle");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i)
    x[static_cast<std::size_t>(i - 1)] =
        detail::callable_quantile(f_in, -0.5 + (i - 0.5) / n);
  const double lo = x.front() - 1.0, hi = x.back() + 1.0;
  double prev = f_in(lo);
  for (int k = 1; k <= 1000; ++k) {
    const double cur = f_in(lo + (hi - lo) * k / 1000.0);
    if (cur < prev - 1e-12)
      throw NonMonotoneInput("initial data: CDF sample decreases");
    prev = cur;
  }
  detail::repair_ties(x);
  return make_initial_state(x, std::vector<double>(x.size(), 1.0));
}

// ---------------------------------------------------------------------------
// Mean-field convergence study.

struct ConvergenceRow {
  int n_particles = 0;
  double dist_self = 0.0;  // sup_t L1 distance to the 2*N_max particle run
  double dist_fv = 0.0;    // sup_t L1 distance to the finite-volume field
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  int n_reference = 0;
  double fv_dx = 0.0;
  double reach = 0.0;
};

namespace detail {

inline GridField make_grid(const StepFunction& f, double lo, double hi,
                           int n_cells) {
  return grid_from_step(f, lo, hi, n_cells);
}

template <class Fn, class = std::enable_if_t<!std::is_convertible_v<
                        const Fn&, const StepFunction&>>>
GridField make_grid(const Fn& f, double lo, double hi, int n_cells) {
  return grid_from_function(f, lo, hi, n_cells);
}

}  // namespace detail

// Runs the doubling ladder against (a) a 2*max(N) particle reference and
// (b) the split finite-volume reference on the envelope domain, and reports
// sup-over-snapshots L1 distances per N.
template <class Cdf>
ConvergenceTable meanfield_convergence(const Cdf& f_in,
                                       const std::vector<int>& n_values,
                                       const Kernel& kernel, double t_final,
                                       std::vector<double> snapshot_times,
                                       int fv_cells = 0,
                                       const SimOptions& opt = {}) {
  if (n_values.empty())
    throw OutOfRange("convergence study: empty particle ladder");
  snapshot_times.push_back(t_final);
  std::sort(snapshot_times.begin(), snapshot_times.end());
  snapshot_times.erase(
      std::unique(snapshot_times.begin(), snapshot_times.end()),
      snapshot_times.end());

  ConvergenceTable table;
  table.n_reference = 2 * *std::max_element(n_values.begin(), n_values.end());
  const ParticleState ref_init = initial_data_from_cdf(f_in, table.n_reference);
  const Trajectory ref =
      simulate(ref_init, kernel, t_final, snapshot_times, opt);

  const Envelope env = ref.envelope();
  const double reach = std::max(kernel.radius(), env.reach);
  const double half_width = 2.0 * env.reach + kernel.radius();
  table.reach = reach;
  if (fv_cells <= 0)
    fv_cells = static_cast<int>(std::ceil(2.0 * half_width / 0.025));
  GridField g0 = detail::make_grid(f_in, -half_width, half_width, fv_cells);
  table.fv_dx = g0.dx();
  const FvResult fv =
      fv_solve(std::move(g0), kernel, reach, t_final, snapshot_times);

  std::vector<StepFunction> ref_cdf, fv_cdf;
  for (double t : snapshot_times) ref_cdf.push_back(empirical_cdf(ref.at(t)));
  for (const GridField& g : fv.snapshots) fv_cdf.push_back(to_step_function(g));

  for (int n : n_values) {
    const Trajectory tr = simulate(initial_data_from_cdf(f_in, n), kernel,
                                   t_final, snapshot_times, opt);
    ConvergenceRow row;
    row.n_particles = n;
    for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
      const StepFunction fn = empirical_cdf(tr.at(snapshot_times[k]));
      row.dist_self = std::max(row.dist_self, l1_distance(fn, ref_cdf[k]));
      row.dist_fv = std::max(row.dist_fv, l1_distance(fn, fv_cdf[k]));
    }
    table.rows.push_back(row);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Stability (Gronwall) study.

struct StabilityReport {
  std::vector<double> times;
  std::vector<double> distance;
  std::vector<double> ratio;
  double initial_distance = 0.0;
  double c_hat = 0.0;    // smallest C with ratio(t) <= e^{C t} at snapshots
  double c_paper = 0.0;  // 4R|phi| + 4R(r+R)|phi'| + 8R^2|phi'|
};

// Paper-scale stability ceiling from the kernel norms and the common
// envelope radius R = max(kernel radius, spatial reach).
inline double stability_ceiling(const Kernel& kernel, double reach) {
  const double r = kernel.radius();
  const double R = std::max(r, reach);
  const KernelSupNorms norms = kernel.sup_norms();
  return 4.0 * R * norms.phi + 4.0 * R * (r + R) * norms.phi_prime +
         8.0 * R * R * norms.phi_prime;
}

// Evolves two initial states under the same kernel and measures the L1
// expansion ratio at each snapshot.
inline StabilityReport stability_check(const ParticleState& a0,
                                       const ParticleState& b0,
                                       const Kernel& kernel, double t_final,
                                       std::vector<double> snapshot_times,
                                       const SimOptions& opt = {}) {
  snapshot_times.push_back(t_final);
  std::sort(snapshot_times.begin(), snapshot_times.end());
  snapshot_times.erase(
      std::unique(snapshot_times.begin(), snapshot_times.end()),
      snapshot_times.end());

  StabilityReport rep;
  rep.initial_distance = l1_distance(empirical_cdf(a0), empirical_cdf(b0));
  if (rep.initial_distance < 1e-14)
    throw ZeroInitialDistance(
        "stability: initial L1 distance below 1e-14, ratio undefined");

  const Trajectory ta = simulate(a0, kernel, t_final, snapshot_times, opt);
  const Trajectory tb = simulate(b0, kernel, t_final, snapshot_times, opt);
  rep.c_hat = -std::numeric_limits<double>::infinity();
  for (double t : snapshot_times) {
    const double d =
        l1_distance(empirical_cdf(ta.at(t)), empirical_cdf(tb.at(t)));
    rep.times.push_back(t);
    rep.distance.push_back(d);
    rep.ratio.push_back(d / rep.initial_distance);
    if (t > 0.0 && d > 0.0)
      rep.c_hat = std::max(rep.c_hat, std::log(d / rep.initial_distance) / t);
  }
  const double reach = std::max(ta.envelope().reach, tb.envelope().reach);
  rep.c_paper = stability_ceiling(kernel, reach);
  return rep;
}

// ---------------------------------------------------------------------------
// Flux-perturbation (level N vs 2N) study.

struct FluxGapReport {
  std::vector<double> times;
  std::vector<double> distance;   // ||F_N(t) - F_{2N}(t)||_1
  std::vector<double> bound;      // e^{C t}(d0 + t * sup flux-Lip gap)
  double initial_distance = 0.0;
  double sup_lip_vs_exact = 0.0;  // sup_t |A_N - A|_Lip, coarse run
  double sup_lip_between = 0.0;   // sup_t |A_N - A_{2N}|_Lip
  double c_hat = 0.0;
  bool inequality_holds = true;
};

// Measures the discrete-flux Lipschitz gap between two resolutions of the
// same initial CDF and checks the Gronwall-form distance bound built from
// the measured quantities.
inline FluxGapReport flux_perturbation_check(
    const Trajectory& coarse, const Trajectory& fine,
    std::vector<double> snapshot_times) {
  const double t_final = std::min(coarse.t_final(), fine.t_final());
  snapshot_times.push_back(t_final);
  std::sort(snapshot_times.begin(), snapshot_times.end());
  snapshot_times.erase(
      std::unique(snapshot_times.begin(), snapshot_times.end()),
      snapshot_times.end());

  FluxGapReport rep;
  rep.initial_distance =
      l1_distance(empirical_cdf(coarse.at(coarse.t_begin())),
                  empirical_cdf(fine.at(fine.t_begin())));
  rep.c_hat = 0.0;
  for (double t : snapshot_times) {
    const ParticleState sa = coarse.at(t);
    const ParticleState sb = fine.at(t);
    const PiecewiseLinearFlux fa{theta_ladder(sa)};
    const PiecewiseLinearFlux fb{theta_ladder(sb)};
    rep.sup_lip_vs_exact =
        std::max(rep.sup_lip_vs_exact, lip_seminorm_vs_exact(fa));
    rep.sup_lip_between =
        std::max(rep.sup_lip_between, lip_seminorm_between(fa, fb));
    const double d = l1_distance(empirical_cdf(sa), empirical_cdf(sb));
    rep.times.push_back(t);
    rep.distance.push_back(d);
    if (t > 0.0 && rep.initial_distance > 0.0 && d > 0.0)
      rep.c_hat = std::max(rep.c_hat, std::log(d / rep.initial_distance) / t);
  }
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    const double t = rep.times[k];
    const double b = std::exp(rep.c_hat * t) *
                     (rep.initial_distance + t * rep.sup_lip_between);
    rep.bound.push_back(b);
    if (rep.distance[k] > b * (1.0 + 1e-9) + 1e-12)
      rep.inequality_holds = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Time-Lipschitz study.

struct TimeLipschitzReport {
  double measured = 0.0;  // max over pairs of ||F(t) - F(s)||_1 / |t - s|
  double c_bound = 0.0;   // M^2 + 2 R C (1 + M), C = sup|S| * M
  std::size_t pairs = 0;
  bool pass = false;
};

// Measures the L1 modulus of continuity in time over all snapshot pairs and
// compares it with the a-priori constant from the envelope bounds.
inline TimeLipschitzReport time_lipschitz_check(const Trajectory& tr,
                                                std::vector<double> times) {
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.size() < 5)
    throw OutOfRange("time-Lipschitz: need at least 5 snapshot times");

  std::vector<StepFunction> cdfs;
  cdfs.reserve(times.size());
  for (double t : times) cdfs.push_back(empirical_cdf(tr.at(t)));

  TimeLipschitzReport rep;
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      const double dt = times[j] - times[i];
      if (dt <= 0.0) continue;
      rep.measured = std::max(rep.measured, l1_distance(cdfs[i], cdfs[j]) / dt);
      ++rep.pairs;
    }
  if (rep.pairs < 10)
    throw OutOfRange("time-Lipschitz: need at least 10 snapshot pairs");

  const Envelope env = tr.envelope();
  const double m_bar = env.m_bound;
  const double reach = std::max(tr.kernel().radius(), env.reach);
  const double c_h1 = h1_constant(tr.kernel(), m_bar);
  rep.c_bound = m_bar * m_bar + 2.0 * reach * c_h1 * (1.0 + m_bar);
  rep.pass = rep.measured <= rep.c_bound * (1.0 + 1e-9);
  return rep;
}

}  // namespace sticky1d

#endif  // STICKY1D_EXPERIMENTS_HPP_

#ifndef STICKY1D_FINITE_VOLUME_HPP_
#define STICKY1D_FINITE_VOLUME_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "sticky1d/errors.hpp"
#include "sticky1d/kernel.hpp"
#include "sticky1d/numerics.hpp"
#include "sticky1d/source.hpp"
#include "sticky1d/step_function.hpp"

namespace sticky1d {

// Uniform finite-volume grid on [lo, hi] storing cell averages.
struct GridField {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> u;

  int n() const { return static_cast<int>(u.size()); }
  double dx() const { return (hi - lo) / static_cast<double>(u.size()); }
  double center(int i) const { return lo + (i + 0.5) * dx(); }
  double interface(int i) const { return lo + i * dx(); }
};

// Exact cell averages of a step function.
inline GridField grid_from_step(const StepFunction& f, double lo, double hi,
                                int n_cells) {
  if (!(lo < hi) || n_cells < 1)
    throw OutOfRange("grid_from_step: need lo < hi and at least one cell");
  GridField g;
  g.lo = lo;
  g.hi = hi;
  g.u.resize(static_cast<std::size_t>(n_cells));
  const auto& bp = f.breakpoints();
  const double dx = g.dx();
  for (int i = 0; i < n_cells; ++i) {
    const double a = lo + i * dx;
    const double b = (i + 1 == n_cells) ? hi : lo + (i + 1) * dx;
    auto it = std::upper_bound(bp.begin(), bp.end(), a);
    double acc = 0.0;
    double prev = a;
    for (; it != bp.end() && *it < b; ++it) {
      acc += f(0.5 * (prev + *it)) * (*it - prev);
      prev = *it;
    }
    acc += f(0.5 * (prev + b)) * (b - prev);
    g.u[static_cast<std::size_t>(i)] = acc / (b - a);
  }
  return g;
}

// Cell averages of a callable profile by fixed-order Gauss-Legendre panels.
template <class Fn>
GridField grid_from_function(Fn&& f, double lo, double hi, int n_cells) {
  if (!(lo < hi) || n_cells < 1)
    throw OutOfRange("grid_from_function: need lo < hi and at least one cell");
  GridField g;
  g.lo = lo;
  g.hi = hi;
  g.u.resize(static_cast<std::size_t>(n_cells));
  const double dx = g.dx();
  for (int i = 0; i < n_cells; ++i) {
    const double a = lo + i * dx;
    g.u[static_cast<std::size_t>(i)] = gauss8(f, a, a + dx) / dx;
  }
  return g;
}

// Piecewise-constant embedding of the grid with tails pinned exactly to
// -1/2 and +1/2 at the domain boundary; suitable for exact L1 distances
// against shifted CDFs.
inline StepFunction to_step_function(const GridField& g) {
  const int n = g.n();
  std::vector<double> bp, values;
  bp.reserve(static_cast<std::size_t>(n) + 1);
  values.reserve(static_cast<std::size_t>(n) + 2);
  values.push_back(-0.5);
  for (int i = 0; i <= n; ++i) {
    bp.push_back(i == n ? g.hi : g.interface(i));
    if (i < n) values.push_back(g.u[static_cast<std::size_t>(i)]);
  }
  values.push_back(0.5);
  return StepFunction(std::move(bp), std::move(values));
}

namespace detail {

// Engquist-Osher numerical flux for A(u) = -u^2:
//   F(a, b) = A+(a) + A-(b) = -min(a,0)^2 - max(b,0)^2.
inline double eo_flux(double a, double b) {
  const double am = std::min(a, 0.0);
  const double bp = std::max(b, 0.0);
  return -am * am - bp * bp;
}

// One conservative update of u with ghost states -1/2 / +1/2.
inline void eo_sweep(std::vector<double>& u, double lambda,
                     std::vector<double>& flux_scratch) {
  const std::size_t n = u.size();
  flux_scratch.resize(n + 1);
  flux_scratch[0] = eo_flux(-0.5, u[0]);
  for (std::size_t i = 1; i < n; ++i)
    flux_scratch[i] = eo_flux(u[i - 1], u[i]);
  flux_scratch[n] = eo_flux(u[n - 1], 0.5);
  for (std::size_t i = 0; i < n; ++i)
    u[i] -= lambda * (flux_scratch[i + 1] - flux_scratch[i]);
}

// Source rates at the cell centers for the current grid state. B[u] uses the
// self-minus-other kernel convention, so the balance law reads
// u_t + A(u)_x = -B[u]; the rate returned here is the signed right-hand side.
inline void source_rates(const GridField& g, const Kernel& kernel,
                         double reach, std::vector<double>& out) {
  const StepSourceEvaluator src(to_step_function(g), kernel, reach);
  const std::size_t n = g.u.size();
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = -src(g.center(static_cast<int>(i)));
}

// Explicit-midpoint substep of du/dt = -B[u] over h.
inline void source_substep(GridField& g, const Kernel& kernel, double reach,
                           double h, std::vector<double>& k1,
                           std::vector<double>& k2, GridField& half) {
  source_rates(g, kernel, reach, k1);
  half = g;
  for (std::size_t i = 0; i < g.u.size(); ++i)
    half.u[i] += 0.5 * h * k1[i];
  source_rates(half, kernel, reach, k2);
  for (std::size_t i = 0; i < g.u.size(); ++i) g.u[i] += h * k2[i];
}

}  // namespace detail

// One Strang-split step: half source, full Engquist-Osher transport, half
// source. Enforces the CFL restriction dt <= cfl_max * dx (max wave speed of
// A(u) = -u^2 on [-1/2, 1/2] is 1).
inline void fv_step(GridField& g, const Kernel& kernel, double reach,
                    double dt, double cfl_max = 0.45) {
  if (g.n() == 0) throw OutOfRange("fv_step: empty grid");
  const double dx = g.dx();
  if (!(dt > 0.0) || dt > cfl_max * dx * (1.0 + 1e-9))
    throw CflViolation("fv_step: dt exceeds the CFL bound cfl_max * dx");
  static thread_local std::vector<double> k1, k2, flux_scratch;
  static thread_local GridField half;
  if (kernel.family() != KernelFamily::zero) {
    detail::source_substep(g, kernel, reach, 0.5 * dt, k1, k2, half);
    detail::eo_sweep(g.u, dt / dx, flux_scratch);
    detail::source_substep(g, kernel, reach, 0.5 * dt, k1, k2, half);
  } else {
    detail::eo_sweep(g.u, dt / dx, flux_scratch);
  }
}

// Reference solution snapshots.
struct FvResult {
  std::vector<double> times;
  std::vector<GridField> snapshots;
  int steps = 0;
};

// Marches the split scheme to t_final, landing exactly on every requested
// snapshot time (and on t_final). dt_target = 0 means "as large as CFL
// allows".
inline FvResult fv_solve(GridField g, const Kernel& kernel, double reach,
                         double t_final, std::vector<double> snapshot_times,
                         double dt_target = 0.0, double cfl_max = 0.45) {
  if (!(t_final >= 0.0)) throw OutOfRange("fv_solve: negative final time");
  snapshot_times.push_back(t_final);
  std::sort(snapshot_times.begin(), snapshot_times.end());
  snapshot_times.erase(
      std::unique(snapshot_times.begin(), snapshot_times.end()),
      snapshot_times.end());
  for (double t : snapshot_times)
    if (!(t >= 0.0) || t > t_final)
      throw OutOfRange("fv_solve: snapshot outside [0, t_final]");

  const double dt_max = cfl_max * g.dx();
  const double dt_base =
      dt_target > 0.0 ? std::min(dt_target, dt_max) : dt_max;
  FvResult res;
  double t = 0.0;
  for (double target : snapshot_times) {
    while (t < target) {
      const double h = std::min(dt_base, target - t);
      const bool lands = h >= target - t;
      fv_step(g, kernel, reach, h, cfl_max);
      ++res.steps;
      t = lands ? target : t + h;
    }
    res.times.push_back(target);
    res.snapshots.push_back(g);
  }
  return res;
}

}  // namespace sticky1d

#endif  // STICKY1D_FINITE_VOLUME_HPP_

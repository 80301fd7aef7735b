#ifndef STICKY1D_ENTROPY_HPP_
#define STICKY1D_ENTROPY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sticky1d/errors.hpp"
#include "sticky1d/flux.hpp"
#include "sticky1d/numerics.hpp"
#include "sticky1d/simulate.hpp"
#include "sticky1d/source.hpp"
#include "sticky1d/step_function.hpp"

namespace sticky1d {

namespace detail {

// exp(-1/(1-u^2)) on (-1, 1), zero outside; all derivatives vanish at +-1.
inline double bump(double u) {
  const double w = 1.0 - u * u;
  if (!(w > 0.0) || 1.0 / w > 700.0) return 0.0;
  return std::exp(-1.0 / w);
}

inline double bump_deriv(double u) {
  const double w = 1.0 - u * u;
  if (!(w > 0.0) || 1.0 / w > 700.0) return 0.0;
  return std::exp(-1.0 / w) * (-2.0 * u / (w * w));
}

// Mass of the bump: int_{-1}^{1} exp(-1/(1-u^2)) du.
inline constexpr double kBumpMass = 0.44399381616807944;

// C-infinity ramp: 1 for u <= 0, 0 for u >= 1, strictly decreasing between.
inline double ramp01(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - u));
  const double b = std::exp(-1.0 / u);
  return a / (a + b);
}

inline double ramp01_deriv(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - u));       // g(1-u)
  const double b = std::exp(-1.0 / u);               // g(u)
  const double ap = -a / ((1.0 - u) * (1.0 - u));    // d/du g(1-u)
  const double bp = b / (u * u);                     // d/du g(u)
  const double den = (a + b) * (a + b);
  return (ap * b - a * bp) / den;
}

// Trapezoid window: 0 outside [sigma-delta, tau+delta], 1 on [sigma, tau],
// linear ramps of width delta on both sides.
inline double trapezoid(double v, double sigma, double tau, double delta) {
  if (v <= sigma - delta || v >= tau + delta) return 0.0;
  if (v < sigma) return (v - sigma + delta) / delta;
  if (v <= tau) return 1.0;
  return (tau + delta - v) / delta;
}

inline double trapezoid_deriv(double v, double sigma, double tau,
                              double delta) {
  if (v <= sigma - delta || v >= tau + delta) return 0.0;
  if (v < sigma) return 1.0 / delta;
  if (v <= tau) return 0.0;
  return -1.0 / delta;
}

}  // namespace detail

// Product-form doubled test function
//   chi(t, x) = b_eps((t-s)/2) b_eps((x-y)/2) g((x+y)/2) h_delta((t+s)/2)
// with b_eps a unit-mass mollifier of width eps, g == 1 on [-flat, flat] with
// a smooth ramp of width ramp, and h_delta the trapezoid window over
// [sigma, tau] with shoulders delta. (s, y) are the frozen second copy of the
// doubled variables.
struct DoublingShape {
  double sigma = 0.0, tau = 0.0, delta = 0.0, eps = 0.0;
  double s = 0.0, y = 0.0;
  double flat = 1.0;  // half-width of the g == 1 plateau
  double ramp = 1.0;  // width of the smooth decay of g
};

// Nonnegative space-time test function with analytic partials: either a
// smooth product bump or a doubled product window.
class TestFunction {
 public:
  static TestFunction bump2d(double t_center, double x_center,
                             double t_halfwidth, double x_halfwidth) {
    if (!(t_halfwidth > 0.0) || !(x_halfwidth > 0.0))
      throw WindowViolation("test function: halfwidths must be positive");
    TestFunction f;
    f.kind_ = Kind::bump;
    f.tc_ = t_center;
    f.xc_ = x_center;
    f.wt_ = t_halfwidth;
    f.wx_ = x_halfwidth;
    return f;
  }

  static TestFunction doubling(const DoublingShape& shape) {
    TestFunction f;
    f.kind_ = Kind::doubling;
    f.shape_ = shape;
    return f;
  }

  double value(double t, double x) const {
    if (kind_ == Kind::bump)
      return nb((t - tc_) / wt_) * nb((x - xc_) / wx_);
    const auto& d = shape_;
    return beps(0.5 * (t - d.s), d.eps) * beps(0.5 * (x - d.y), d.eps) *
           plateau(0.5 * (x + d.y)) *
           detail::trapezoid(0.5 * (t + d.s), d.sigma, d.tau, d.delta);
  }

  double dt(double t, double x) const {
    if (kind_ == Kind::bump)
      return nb_deriv((t - tc_) / wt_) / wt_ * nb((x - xc_) / wx_);
    const auto& d = shape_;
    const double bx = beps(0.5 * (x - d.y), d.eps);
    const double g = plateau(0.5 * (x + d.y));
    const double bt = beps(0.5 * (t - d.s), d.eps);
    const double h =
        detail::trapezoid(0.5 * (t + d.s), d.sigma, d.tau, d.delta);
    const double bt_p = 0.5 * beps_deriv(0.5 * (t - d.s), d.eps);
    const double h_p =
        0.5 * detail::trapezoid_deriv(0.5 * (t + d.s), d.sigma, d.tau, d.delta);
    return (bt_p * h + bt * h_p) * bx * g;
  }

  double dx(double t, double x) const {
    if (kind_ == Kind::bump)
      return nb((t - tc_) / wt_) * nb_deriv((x - xc_) / wx_) / wx_;
    const auto& d = shape_;
    const double bt = beps(0.5 * (t - d.s), d.eps);
    const double h =
        detail::trapezoid(0.5 * (t + d.s), d.sigma, d.tau, d.delta);
    const double bx = beps(0.5 * (x - d.y), d.eps);
    const double g = plateau(0.5 * (x + d.y));
    const double bx_p = 0.5 * beps_deriv(0.5 * (x - d.y), d.eps);
    const double g_p = 0.5 * plateau_deriv(0.5 * (x + d.y));
    return bt * h * (bx_p * g + bx * g_p);
  }

  // Closed support box (conservative for the doubling form).
  std::pair<double, double> t_support() const {
    if (kind_ == Kind::bump) return {tc_ - wt_, tc_ + wt_};
    const auto& d = shape_;
    const double lo =
        std::max(d.s - 2.0 * d.eps, 2.0 * (d.sigma - d.delta) - d.s);
    const double hi =
        std::min(d.s + 2.0 * d.eps, 2.0 * (d.tau + d.delta) - d.s);
    return {lo, hi};
  }

  std::pair<double, double> x_support() const {
    if (kind_ == Kind::bump) return {xc_ - wx_, xc_ + wx_};
    const auto& d = shape_;
    return {d.y - 2.0 * d.eps, d.y + 2.0 * d.eps};
  }

  // Interior kink times of t -> chi(t, x): the trapezoid corners of the
  // doubling window (the smooth factors contribute none).
  std::vector<double> t_kinks() const {
    if (kind_ == Kind::bump) return {};
    const auto& d = shape_;
    return {2.0 * (d.sigma - d.delta) - d.s, 2.0 * d.sigma - d.s,
            2.0 * d.tau - d.s, 2.0 * (d.tau + d.delta) - d.s};
  }

  // Descriptive window parameters for reports: (sigma, tau, eps, delta).
  double report_sigma() const {
    return kind_ == Kind::bump ? tc_ - wt_ : shape_.sigma;
  }
  double report_tau() const {
    return kind_ == Kind::bump ? tc_ + wt_ : shape_.tau;
  }
  double report_eps() const { return kind_ == Kind::bump ? wx_ : shape_.eps; }
  double report_delta() const {
    return kind_ == Kind::bump ? 0.0 : shape_.delta;
  }

 private:
  enum class Kind { bump, doubling };

  // Bump normalized to peak 1.
  static double nb(double u) { return detail::bump(u) * kInvBump0; }
  static double nb_deriv(double u) { return detail::bump_deriv(u) * kInvBump0; }
  // Unit-mass mollifier of width eps.
  static double beps(double u, double eps) {
    return detail::bump(u / eps) / (detail::kBumpMass * eps);
  }
  static double beps_deriv(double u, double eps) {
    return detail::bump_deriv(u / eps) / (detail::kBumpMass * eps * eps);
  }
  double plateau(double x) const {
    return detail::ramp01((std::abs(x) - shape_.flat) / shape_.ramp);
  }
  double plateau_deriv(double x) const {
    const double d =
        detail::ramp01_deriv((std::abs(x) - shape_.flat) / shape_.ramp) /
        shape_.ramp;
    return x >= 0.0 ? d : -d;
  }

  static constexpr double kInvBump0 = 2.718281828459045;  // 1 / bump(0) = e

  Kind kind_ = Kind::bump;
  double tc_ = 0, xc_ = 0, wt_ = 1, wx_ = 1;
  DoublingShape shape_;
};

// Builds the doubled test function for the window [sigma, tau] with ramp
// delta and mollifier width eps, centered at second copy (s, y); validates
// the admissibility constraint 0 < eps + delta < min(sigma, T - tau) and
// checks by dense sampling that the support stays inside (0, T) x R and
// within [sigma - delta - 2 eps, tau + delta + 2 eps] in time.
inline TestFunction make_doubling_probe(double sigma, double tau, double delta,
                                        double eps, double flat_radius,
                                        double t_horizon,
                                        std::optional<double> s = std::nullopt,
                                        double y = 0.0) {
  if (!(sigma < tau))
    throw WindowViolation("doubling probe: need sigma < tau");
  if (!(delta > 0.0) || !(eps > 0.0))
    throw WindowViolation("doubling probe: need positive delta and eps");
  if (!(eps + delta < std::min(sigma, t_horizon - tau)))
    throw WindowViolation(
        "doubling probe: need 0 < eps + delta < min(sigma, T - tau)");
  if (!(flat_radius > 0.0))
    throw WindowViolation("doubling probe: need positive plateau radius");

  DoublingShape shape;
  shape.sigma = sigma;
  shape.tau = tau;
  shape.delta = delta;
  shape.eps = eps;
  shape.s = s.value_or(0.5 * (sigma + tau));
  shape.y = y;
  shape.flat = flat_radius;
  shape.ramp = 1.0;
  if (!(shape.s > 0.0) || !(shape.s < t_horizon))
    throw WindowViolation("doubling probe: s outside (0, T)");
  const TestFunction chi = TestFunction::doubling(shape);

  // Sampling check of the compact-support claim.
  const double lo_claim = sigma - delta - 2.0 * eps;
  const double hi_claim = tau + delta + 2.0 * eps;
  const int n = 10000;
  const double off[3] = {0.0, 0.9 * eps, 1.8 * eps};
  for (int i = 0; i <= n; ++i) {
    const double t = t_horizon * static_cast<double>(i) / n;
    for (double dx : off) {
      if (chi.value(t, y + dx) != 0.0 || chi.value(t, y - dx) != 0.0) {
        if (t <= 0.0 || t >= t_horizon || t < lo_claim || t > hi_claim)
          throw WindowViolation("doubling probe: support escapes the window");
      }
    }
  }
  return chi;
}

// One Kruzkov probe: comparison constant alpha and test function chi >= 0.
struct EntropyProbe {
  double alpha = 0.0;
  TestFunction chi;
};

// Time-quadrature control. The x-integral of each row is computed exactly
// against the field's step structure; in t the integral is split at the
// known kinks (window corners, collision times) and each smooth piece gets a
// composite Gauss rule whose panel count doubles from n0 until the result
// changes by less than tol.
struct QuadControl {
  int n0 = 2;
  double tol = 1e-8;
  int max_level = 7;
};

namespace detail {

struct PieceIntegrals {
  double chi = 0.0;    // int chi dx over the piece
  double chi_t = 0.0;  // int chi_t dx over the piece
  double dchi = 0.0;   // chi(t, b) - chi(t, a)  (exact chi_x integral)
};

inline PieceIntegrals piece_integrals(const TestFunction& chi, double t,
                                      double a, double b, double panel_w) {
  PieceIntegrals out;
  out.dchi = chi.value(t, b) - chi.value(t, a);
  const int n_panels =
      std::max(1, static_cast<int>(std::ceil((b - a) / panel_w)));
  const double h = (b - a) / n_panels;
  for (int k = 0; k < n_panels; ++k) {
    const double mid = a + (k + 0.5) * h;
    const double half = 0.5 * h;
    for (int i = 0; i < 4; ++i) {
      const double dx = half * kGauss8Nodes[i];
      const double w = half * kGauss8Weights[i];
      out.chi += w * (chi.value(t, mid - dx) + chi.value(t, mid + dx));
      out.chi_t += w * (chi.dt(t, mid - dx) + chi.dt(t, mid + dx));
    }
  }
  return out;
}

// Sweeps one t-row: splits [x0, x1] at the field's breakpoints, evaluates
// the piecewise-constant (F, B) pair at piece midpoints and the smooth chi
// integrals per piece, and accumulates term(F, B, piece).
template <class Field, class PieceTerm>
double row_integral(const Field& field, const TestFunction& chi, double t,
                    double x0, double x1, PieceTerm&& term) {
  const double panel_w = (x1 - x0) / 64.0;
  double acc = 0.0;
  double prev = x0;
  const auto piece = [&](double a, double b) {
    if (!(b > a)) return;
    const double mid = 0.5 * (a + b);
    acc += term(field.value(t, mid), field.source(t, mid),
                piece_integrals(chi, t, a, b, panel_w));
  };
  for (double bk : field.x_breaks(t, x0, x1)) {
    piece(prev, bk);
    prev = bk;
  }
  piece(prev, x1);
  return acc;
}

// Composite Gauss-Legendre over [a, b], panel count doubling until stable.
template <class RowFn>
double panel_refine(RowFn& row, double a, double b, double tol, int n0,
                    int max_level) {
  double prev = 0.0;
  bool have_prev = false;
  double value = 0.0;
  for (int level = 0; level <= max_level; ++level) {
    const int n = n0 << level;
    const double h = (b - a) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double c = a + (i + 0.5) * h;
      const double half = 0.5 * h;
      for (int g = 0; g < 4; ++g) {
        const double dt = half * kGauss8Nodes[g];
        acc += kGauss8Weights[g] * (row(c - dt) + row(c + dt));
      }
    }
    value = acc * 0.5 * h;
    if (have_prev && std::abs(value - prev) < tol) return value;
    prev = value;
    have_prev = true;
  }
  return value;
}

template <class RowFn>
double probe_quadrature(const TestFunction& chi,
                        const std::vector<double>& extra_splits,
                        double t_horizon, const QuadControl& q, RowFn&& row) {
  const auto [t0, t1] = chi.t_support();
  if (!(t0 >= 0.0) || !(t1 <= t_horizon) || !(t0 < t1))
    throw ProbeOutOfWindow("entropy probe: support not inside [0, T]");
  std::vector<double> pts{t0, t1};
  for (double p : chi.t_kinks())
    if (p > t0 && p < t1) pts.push_back(p);
  for (double p : extra_splits)
    if (p > t0 && p < t1) pts.push_back(p);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double frac = (pts[i + 1] - pts[i]) / (t1 - t0);
    total += panel_refine(row, pts[i], pts[i + 1],
                          q.tol * std::max(frac, 0.05), q.n0, q.max_level);
  }
  return total;
}

}  // namespace detail

// Kruzkov entropy production of the field against constant alpha:
//   I = int int |F - a| chi_t + sgn(F - a)(A(t,F) - A(t,a)) chi_x
//             - sgn(F - a) chi B[F]  dx dt,
// nonnegative (up to quadrature error) for entropy solutions when chi >= 0.
// The source term enters negated: with the odd kernel convention used by
// source_eval / discrete_source (arguments self minus other), the balance law
// satisfied by the dynamics is F_t + A(t, F)_x = -B[F].
template <class Field, class Flux>
double kruzkov_integral(const Field& field, const Flux& flux,
                        const EntropyProbe& probe, double t_horizon,
                        const QuadControl& q = {}) {
  const double alpha = probe.alpha;
  if (std::abs(alpha) > 0.5 + 1e-12)
    throw OutOfRange("kruzkov: alpha must lie in [-1/2, 1/2]");
  const auto [x0, x1] = probe.chi.x_support();
  const auto [t0, t1] = probe.chi.t_support();
  const auto row = [&](double t) {
    const double a_alpha = flux.eval(t, alpha);
    return detail::row_integral(
        field, probe.chi, t, x0, x1,
        [&](double f, double b, const detail::PieceIntegrals& pi) {
          const int sg = sgn(f - alpha);
          return std::abs(f - alpha) * pi.chi_t +
                 sg * (flux.eval(t, f) - a_alpha) * pi.dchi -
                 sg * b * pi.chi;
        });
  };
  return detail::probe_quadrature(probe.chi, field.t_breaks(t0, t1), t_horizon,
                                  q, row);
}

// Regularized entropy eta(u) = s_eps(u - alpha) with the C^{1,1}
// absolute-value regularization s_eps (quadratic core of half-width eps_reg).
struct EntropyPair {
  double alpha = 0.0;
  double eps_reg = 1e-3;

  double eta(double u) const {
    const double z = u - alpha;
    if (std::abs(z) <= eps_reg) return z * z / (2.0 * eps_reg);
    return std::abs(z) - 0.5 * eps_reg;
  }
  double eta_prime(double u) const {
    return std::clamp((u - alpha) / eps_reg, -1.0, 1.0);
  }
};

// Regularized entropy production:
//   I = int int chi_t eta(F) + chi_x psi(t, F) - chi eta'(F) B[F] dx dt,
// psi(t, u) = int_alpha^u eta'(y) A'(t, y) dy supplied exactly by the flux.
// The source term is negated for the same orientation reason as in
// kruzkov_integral.
template <class Field, class Flux>
double entropy_pair_value(const Field& field, const Flux& flux,
                          const EntropyPair& pair, const TestFunction& chi,
                          double t_horizon, const QuadControl& q = {}) {
  const auto [x0, x1] = chi.x_support();
  const auto [t0, t1] = chi.t_support();
  const auto row = [&](double t) {
    return detail::row_integral(
        field, chi, t, x0, x1,
        [&](double f, double b, const detail::PieceIntegrals& pi) {
          return pair.eta(f) * pi.chi_t +
                 flux.psi(t, pair.alpha, pair.eps_reg, f) * pi.dchi -
                 pair.eta_prime(f) * b * pi.chi;
        });
  };
  return detail::probe_quadrature(chi, field.t_breaks(t0, t1), t_horizon, q,
                                  row);
}

// ---------------------------------------------------------------------------
// Concrete fields and fluxes.

// Time-frozen exact flux A(u) = -u^2 with exact regularized pair integral.
struct ExactFluxInTime {
  double eval(double, double u) const { return -u * u; }
  double derivative(double, double u) const { return -2.0 * u; }

  // int_alpha^u clamp((y-alpha)/eps, -1, 1) * (-2 y) dy, exact.
  double psi(double, double alpha, double eps, double u) const {
    const double sign = u >= alpha ? 1.0 : -1.0;
    const double a = std::min(alpha, u);
    const double b = std::max(alpha, u);
    const auto piece = [&](double lo, double hi) {
      if (!(hi > lo)) return 0.0;
      const double mid = 0.5 * (lo + hi);
      if (mid < alpha - eps) return hi * hi - lo * lo;
      if (mid > alpha + eps) return -(hi * hi - lo * lo);
      return (-2.0 / eps) * ((hi * hi * hi - lo * lo * lo) / 3.0 -
                             alpha * (hi * hi - lo * lo) / 2.0);
    };
    const double lo_mid = std::clamp(alpha - eps, a, b);
    const double hi_mid = std::clamp(alpha + eps, a, b);
    return sign * (piece(a, lo_mid) + piece(lo_mid, hi_mid) + piece(hi_mid, b));
  }
};

// Piecewise-linear ladder flux of a particle trajectory, evaluated at the
// frozen current time of each quadrature row.
class TrajectoryLadderFlux {
 public:
  explicit TrajectoryLadderFlux(const Trajectory& tr) : tr_(&tr) {}

  double eval(double t, double u) const {
    refresh(t);
    return (*flux_)(u);
  }
  double derivative(double t, double u) const {
    refresh(t);
    return flux_->derivative(u);
  }

  // Exact: A_N' is constant per ladder segment, so the integral telescopes
  // through the regularized entropy eta.
  double psi(double t, double alpha, double eps, double u) const {
    refresh(t);
    const double sign = u >= alpha ? 1.0 : -1.0;
    const double a = std::min(alpha, u);
    const double b = std::max(alpha, u);
    const EntropyPair pair{alpha, eps};
    const auto& th = flux_->ladder().theta;
    double acc = 0.0;
    for (std::size_t k = flux_->segment(a); k + 1 < th.size(); ++k) {
      if (th[k] >= b) break;
      const double lo = std::max(a, th[k]);
      const double hi = std::min(b, th[k + 1]);
      if (hi > lo) acc += flux_->slope(k) * (pair.eta(hi) - pair.eta(lo));
    }
    return sign * acc;
  }

 private:
  void refresh(double t) const {
    if (!flux_ || t != cached_t_) {
      flux_.emplace(theta_ladder(tr_->at(t)));
      cached_t_ = t;
    }
  }
  const Trajectory* tr_;
  mutable std::optional<PiecewiseLinearFlux> flux_;
  mutable double cached_t_ = std::numeric_limits<double>::quiet_NaN();
};

// Particle trajectory as a space-time field: exact empirical CDF values, the
// closed-form discrete source, and the jump positions as row breakpoints;
// everything cached per quadrature row.
class TrajectoryField {
 public:
  explicit TrajectoryField(const Trajectory& tr) : tr_(&tr) {}

  double value(double t, double x) const {
    refresh(t);
    return (*cdf_)(x);
  }
  double source(double t, double x) const {
    refresh(t);
    return (*src_)(x);
  }
  std::vector<double> x_breaks(double t, double x0, double x1) const {
    refresh(t);
    const auto& bp = cdf_->breakpoints();
    const auto lo = std::upper_bound(bp.begin(), bp.end(), x0);
    const auto hi = std::lower_bound(lo, bp.end(), x1);
    return std::vector<double>(lo, hi);
  }
  // Collision times inside (a, b): the t-kinks of the field.
  std::vector<double> t_breaks(double a, double b) const {
    std::vector<double> out;
    for (const CollisionEvent& ev : tr_->events())
      if (ev.time > a && ev.time < b) out.push_back(ev.time);
    return out;
  }

 private:
  void refresh(double t) const {
    if (!cdf_ || t != cached_t_) {
      const ParticleState st = tr_->at(t);
      cdf_.emplace(empirical_cdf(st));
      src_.emplace(st, tr_->kernel());
      cached_t_ = t;
    }
  }
  const Trajectory* tr_;
  mutable std::optional<StepFunction> cdf_;
  mutable std::optional<DiscreteSourceEvaluator> src_;
  mutable double cached_t_ = std::numeric_limits<double>::quiet_NaN();
};

// Synthetic field from callables plus an optional row-breakpoint callable
// (test instrumentation; exact fields must report their discontinuities).
template <class V, class S, class B>
struct CallableField {
  V val;
  S src;
  B breaks;
  double value(double t, double x) const { return val(t, x); }
  double source(double t, double x) const { return src(t, x); }
  std::vector<double> x_breaks(double t, double x0, double x1) const {
    std::vector<double> out = breaks(t);
    std::erase_if(out, [&](double v) { return !(v > x0) || !(v < x1); });
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<double> t_breaks(double, double) const { return {}; }
};

template <class V, class S, class B>
CallableField<V, S, B> make_field(V val, S src, B breaks) {
  return CallableField<V, S, B>{std::move(val), std::move(src),
                                std::move(breaks)};
}

template <class V, class S>
auto make_field(V val, S src) {
  auto no_breaks = [](double) { return std::vector<double>{}; };
  return CallableField<V, S, decltype(no_breaks)>{
      std::move(val), std::move(src), std::move(no_breaks)};
}

// One row of the verification battery report.
struct ProbeResult {
  int probe_id = 0;
  double alpha = 0.0;
  double sigma = 0.0, tau = 0.0, epsilon = 0.0, delta = 0.0;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Tolerance scale of one probe: 1e-6 times max(1, probe-norm volume factor).
inline double probe_tolerance(const TestFunction& chi) {
  const auto [t0, t1] = chi.t_support();
  const auto [x0, x1] = chi.x_support();
  double sup_dt = 0.0, sup_dx = 0.0;
  const int n = 24;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const double t = t0 + (t1 - t0) * i / n;
      const double x = x0 + (x1 - x0) * j / n;
      sup_dt = std::max(sup_dt, std::abs(chi.dt(t, x)));
      sup_dx = std::max(sup_dx, std::abs(chi.dx(t, x)));
    }
  const double vol = (t1 - t0) * (x1 - x0);
  return 1e-6 * std::max(1.0, (sup_dt + sup_dx) * vol);
}

// Runs the full probe battery; a probe passes when its entropy production is
// above -tolerance.
template <class Field, class Flux>
std::vector<ProbeResult> kruzkov_battery(const Field& field, const Flux& flux,
                                         const std::vector<double>& alphas,
                                         const std::vector<TestFunction>& chis,
                                         double t_horizon,
                                         const QuadControl& q = {}) {
  std::vector<ProbeResult> out;
  int id = 0;
  for (const TestFunction& chi : chis) {
    const double tol = probe_tolerance(chi);
    for (double alpha : alphas) {
      EntropyProbe probe{alpha, chi};
      ProbeResult r;
      r.probe_id = id++;
      r.alpha = alpha;
      r.sigma = chi.report_sigma();
      r.tau = chi.report_tau();
      r.epsilon = chi.report_eps();
      r.delta = chi.report_delta();
      r.tolerance = tol;
      r.value = kruzkov_integral(field, flux, probe, t_horizon, q);
      r.pass = r.value >= -tol;
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace sticky1d

#endif  // STICKY1D_ENTROPY_HPP_

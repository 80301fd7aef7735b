#ifndef STICKY1D_NUMERICS_HPP_
#define STICKY1D_NUMERICS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace sticky1d {

// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 4> kGauss8Nodes = {
    0.18343464249564980, 0.52553240991632899, 0.79666647741362674,
    0.96028985649753623};
inline constexpr std::array<double, 4> kGauss8Weights = {
    0.36268378337836198, 0.31370664587788729, 0.22238103445337447,
    0.10122853629037626};

template <class F>
double gauss8(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double dx = h * kGauss8Nodes[i];
    s += kGauss8Weights[i] * (f(c - dx) + f(c + dx));
  }
  return s * h;
}

namespace detail {

template <class F>
double adaptive_gauss_rec(F& f, double a, double b, double whole, double tol,
                          int depth) {
  const double m = 0.5 * (a + b);
  const double left = gauss8(f, a, m);
  const double right = gauss8(f, m, b);
  const double split = left + right;
  if (depth <= 0 || std::abs(split - whole) <= tol) return split;
  return adaptive_gauss_rec(f, a, m, left, 0.5 * tol, depth - 1) +
         adaptive_gauss_rec(f, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Gauss-Legendre (order 8 per panel, recursive bisection). `tol` is
// an absolute tolerance budget for the whole interval.
template <class F>
double adaptive_gauss(F&& f, double a, double b, double tol,
                      int max_depth = 28) {
  if (!(a < b)) return 0.0;
  return detail::adaptive_gauss_rec(f, a, b, gauss8(f, a, b), tol, max_depth);
}

// Integrates f over [a, b] splitting first at the given interior points
// (breakpoints of piecewise-smooth integrands), then adaptively per piece.
// `rel_tol` is interpreted relative to max(1, running |integral|).
template <class F>
double integrate_piecewise(F&& f, double a, double b,
                           const std::vector<double>& interior_splits,
                           double rel_tol) {
  if (!(a < b)) return 0.0;
  std::vector<double> pts;
  pts.push_back(a);
  for (double p : interior_splits)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double len_frac = (pts[i + 1] - pts[i]) / (b - a);
    const double tol = rel_tol * std::max(1.0, std::abs(total)) *
                       std::max(len_frac, 1e-3);
    total += adaptive_gauss(f, pts[i], pts[i + 1], tol);
  }
  return total;
}

// Golden-section maximizer for a unimodal bracket [a, b]; returns argmax.
template <class F>
double golden_section_max(F&& f, double a, double b, double x_tol,
                          int max_iter = 160) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Least-squares fit y ~ k/x + c over rows (x_i, y_i); returns {k, c, r2}.
struct ReciprocalFit {
  double slope = 0.0;      // coefficient of 1/x
  double intercept = 0.0;  // constant term
  double r2 = 0.0;
};

inline ReciprocalFit fit_reciprocal(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  ReciprocalFit out;
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return out;
  double su = 0, sy = 0, suu = 0, suy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = 1.0 / x[i];
    su += u;
    sy += y[i];
    suu += u * u;
    suy += u * y[i];
  }
  const double den = n * suu - su * su;
  if (den == 0) return out;
  out.slope = (n * suy - su * sy) / den;
  out.intercept = (sy - out.slope * su) / n;
  const double mean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = out.slope / x[i] + out.intercept;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  out.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

}  // namespace sticky1d

#endif  // STICKY1D_NUMERICS_HPP_

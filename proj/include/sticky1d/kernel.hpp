#ifndef STICKY1D_KERNEL_HPP_
#define STICKY1D_KERNEL_HPP_

#include <cmath>
#include <string>

#include "sticky1d/errors.hpp"
#include "sticky1d/numerics.hpp"

namespace sticky1d {

enum class KernelFamily { zero, odd_bump };

// Sup norms of the interaction kernel and its first two derivatives,
// written S, phi = S', phi' = S''.
struct KernelSupNorms {
  double s = 0.0;
  double phi = 0.0;
  double phi_prime = 0.0;
};

// Odd, smooth, compactly supported interaction kernel.
//
// Family odd_bump: S(x) = kappa * x * exp(-1/(r^2 - x^2)) on (-r, r), zero
// outside; all derivatives vanish at the support edge. Family zero: S == 0
// (radius kept for bookkeeping so reach estimates remain finite).
class Kernel {
 public:
  static Kernel zero(double radius = 1.0) {
    return Kernel(KernelFamily::zero, 0.0, radius);
  }
  static Kernel odd_bump(double kappa, double radius) {
    if (!(radius > 0.0) || !std::isfinite(kappa) || !std::isfinite(radius))
      throw OutOfRange("kernel: odd_bump requires finite kappa and radius > 0");
    return Kernel(KernelFamily::odd_bump, kappa, radius);
  }

  KernelFamily family() const { return family_; }
  double kappa() const { return kappa_; }
  double radius() const { return radius_; }

  // Evaluates d^order S / dx^order, order in {0, 1, 2}.
  double eval(double x, int order = 0) const {
    if (family_ == KernelFamily::zero) return 0.0;
    const double r2 = radius_ * radius_;
    const double w = r2 - x * x;
    // Outside the support, and deep enough into the edge that exp(-1/w)
    // underflows, every derivative is zero.
    if (!(w > 0.0) || 1.0 / w > 700.0) return 0.0;
    const double u = std::exp(-1.0 / w);
    switch (order) {
      case 0:
        return kappa_ * x * u;
      case 1:
        return kappa_ * u * (1.0 - 2.0 * x * x / (w * w));
      case 2: {
        const double w2 = w * w;
        const double x3 = x * x * x;
        return kappa_ * u *
               (-6.0 * x / w2 - 8.0 * x3 / (w2 * w) + 4.0 * x3 / (w2 * w2));
      }
      default:
        throw OutOfRange("kernel: derivative order must be 0, 1 or 2");
    }
  }
  double operator()(double x) const { return eval(x, 0); }

  // Cached sup norms over the support, accurate to ~1e-8 relative.
  const KernelSupNorms& sup_norms() const {
    if (!norms_ready_) {
      norms_ = compute_sup_norms();
      norms_ready_ = true;
    }
    return norms_;
  }

 private:
  Kernel(KernelFamily f, double kappa, double radius)
      : family_(f), kappa_(kappa), radius_(radius) {}

  KernelSupNorms compute_sup_norms() const {
    KernelSupNorms out;
    if (family_ == KernelFamily::zero || kappa_ == 0.0) return out;
    out.s = sup_abs(0);
    out.phi = sup_abs(1);
    out.phi_prime = sup_abs(2);
    return out;
  }

  // Dense scan of |d^order S| on [0, r] (magnitudes are even functions),
  // then golden-section refinement around the best bracket.
  double sup_abs(int order) const {
    const int n = 16384;
    double best = 0.0;
    int best_i = 0;
    for (int i = 0; i <= n; ++i) {
      const double x = radius_ * static_cast<double>(i) / n;
      const double v = std::abs(eval(x, order));
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    const double lo = radius_ * static_cast<double>(std::max(0, best_i - 1)) / n;
    const double hi = radius_ * static_cast<double>(std::min(n, best_i + 1)) / n;
    const auto mag = [&](double x) { return std::abs(eval(x, order)); };
    const double xm =
        golden_section_max(mag, lo, hi, 1e-10 * std::max(radius_, 1.0));
    return std::max(best, mag(xm));
  }

  KernelFamily family_;
  double kappa_;
  double radius_;
  mutable KernelSupNorms norms_;
  mutable bool norms_ready_ = false;
};

inline std::string to_string(KernelFamily f) {
  return f == KernelFamily::zero ? "zero" : "odd_bump";
}

}  // namespace sticky1d

#endif  // STICKY1D_KERNEL_HPP_

#ifndef STICKY1D_STEP_FUNCTION_HPP_
#define STICKY1D_STEP_FUNCTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "sticky1d/errors.hpp"
#include "sticky1d/kernel.hpp"

namespace sticky1d {

// Right-continuous piecewise-constant function on the line.
//
// values() has one entry more than breakpoints(): values()[k] is the constant
// value on (b_{k-1}, b_k), with b_{-1} = -inf and b_n = +inf. At a breakpoint
// the function takes the value from the right: f(b_k) = values()[k+1].
class StepFunction {
 public:
  StepFunction() : values_{0.0} {}

  StepFunction(std::vector<double> breakpoints, std::vector<double> values)
      : bp_(std::move(breakpoints)), values_(std::move(values)) {
    if (values_.size() != bp_.size() + 1)
      throw Error("step function: need one more value than breakpoints");
    for (std::size_t i = 0; i + 1 < bp_.size(); ++i)
      if (!(bp_[i] < bp_[i + 1]))
        throw Error("step function: breakpoints must be strictly increasing");
    for (double b : bp_)
      if (!std::isfinite(b)) throw Error("step function: breakpoint not finite");
    for (double v : values_)
      if (!std::isfinite(v)) throw Error("step function: value not finite");
  }

  static StepFunction constant(double c) { return StepFunction({}, {c}); }

  double operator()(double x) const {
    const auto it = std::upper_bound(bp_.begin(), bp_.end(), x);
    return values_[static_cast<std::size_t>(it - bp_.begin())];
  }

  const std::vector<double>& breakpoints() const { return bp_; }
  const std::vector<double>& values() const { return values_; }
  double left_tail() const { return values_.front(); }
  double right_tail() const { return values_.back(); }
  std::size_t jump_count() const { return bp_.size(); }

  // Jump f(b_k+) - f(b_k-) at breakpoint k.
  double jump(std::size_t k) const { return values_[k + 1] - values_[k]; }

  bool non_decreasing() const {
    for (std::size_t i = 0; i + 1 < values_.size(); ++i)
      if (values_[i + 1] < values_[i]) return false;
    return true;
  }

  // Shifted-CDF shape: tails exactly -1/2 and +1/2 and nondecreasing values.
  bool is_shifted_cdf() const {
    return left_tail() == -0.5 && right_tail() == 0.5 && non_decreasing();
  }

  double total_variation() const {
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i)
      tv += std::abs(values_[i + 1] - values_[i]);
    return tv;
  }

  // Canonical form: breakpoints with zero jump removed.
  StepFunction canonical() const {
    std::vector<double> bp, v;
    v.push_back(values_.front());
    for (std::size_t k = 0; k < bp_.size(); ++k) {
      if (values_[k + 1] != v.back()) {
        bp.push_back(bp_[k]);
        v.push_back(values_[k + 1]);
      }
    }
    return StepFunction(std::move(bp), std::move(v));
  }

  friend bool operator==(const StepFunction& a, const StepFunction& b) {
    const StepFunction ca = a.canonical();
    const StepFunction cb = b.canonical();
    return ca.bp_ == cb.bp_ && ca.values_ == cb.values_;
  }

 private:
  std::vector<double> bp_;
  std::vector<double> values_;
};

// Exact L1 distance between two step functions with equal tails, computed by
// sweeping the merged breakpoint partition. Throws MismatchedTails when the
// functions differ at infinity (the distance would be infinite).
inline double l1_distance(const StepFunction& f, const StepFunction& g) {
  if (f.left_tail() != g.left_tail() || f.right_tail() != g.right_tail())
    throw MismatchedTails("l1_distance: tail values differ");
  const auto& bf = f.breakpoints();
  const auto& bg = g.breakpoints();
  if (bf.empty() && bg.empty()) return 0.0;

  std::vector<double> merged;
  merged.reserve(bf.size() + bg.size());
  std::merge(bf.begin(), bf.end(), bg.begin(), bg.end(),
             std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

  double dist = 0.0;
  std::size_t i = 0, j = 0;  // index of next breakpoint of f resp. g
  for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
    while (i < bf.size() && bf[i] <= merged[k]) ++i;
    while (j < bg.size() && bg[j] <= merged[k]) ++j;
    const double df = f.values()[i] - g.values()[j];
    dist += std::abs(df) * (merged[k + 1] - merged[k]);
  }
  return dist;
}

// Exact convolution of the kernel derivative against a step function:
//   order 0:  (phi * f)(z)  = sum_j J_j S(z - a_j)     with phi = S'
//   order 1:  (phi' * f)(z) = sum_j J_j phi(z - a_j)
// where J_j are the jumps of f. This is the antiderivative identity for
// compactly supported kernels; constants (and tails) drop out because phi has
// zero mean. Throws UnboundedSupport if the kernel has no finite radius.
inline double convolve_step(const StepFunction& f, const Kernel& k, int order,
                            double z) {
  if (order != 0 && order != 1)
    throw OutOfRange("convolve_step: order must be 0 or 1");
  if (!(k.radius() > 0.0) || !std::isfinite(k.radius()))
    throw UnboundedSupport("convolve_step: kernel must have finite radius");
  if (k.family() == KernelFamily::zero) return 0.0;
  const auto& bp = f.breakpoints();
  // Only breakpoints within the kernel radius contribute.
  const auto lo = std::lower_bound(bp.begin(), bp.end(), z - k.radius());
  const auto hi = std::upper_bound(bp.begin(), bp.end(), z + k.radius());
  double s = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const auto j = static_cast<std::size_t>(it - bp.begin());
    s += f.jump(j) * k.eval(z - *it, order);
  }
  return s;
}

}  // namespace sticky1d

#endif  // STICKY1D_STEP_FUNCTION_HPP_

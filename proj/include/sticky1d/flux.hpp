#ifndef STICKY1D_FLUX_HPP_
#define STICKY1D_FLUX_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "sticky1d/errors.hpp"
#include "sticky1d/particle_state.hpp"
#include "sticky1d/step_function.hpp"

namespace sticky1d {

// Burgers-type flux of the aggregation equation, A(u) = -u^2 on [-1/2, 1/2].
struct ExactFlux {
  double operator()(double u) const { return -u * u; }
  double derivative(double u) const { return -2.0 * u; }
};

// Cumulative state ladder of a particle state:
//   theta_0 = -1/2,  theta_i = -1/2 + (1/N) sum_{j<=i} m_j,  theta_N = +1/2.
// The last entry is renormalized to exactly +1/2; a defect beyond 1e-12 means
// mass conservation was lost upstream and is reported as an error.
struct ThetaLadder {
  std::vector<double> theta;  // size N + 1, strictly increasing

  int n() const { return static_cast<int>(theta.size()) - 1; }
};

inline ThetaLadder theta_ladder(const ParticleState& st) {
  const std::size_t n = st.m.size();
  if (n == 0) throw Error("theta ladder: empty state");
  ThetaLadder lad;
  lad.theta.resize(n + 1);
  lad.theta[0] = -0.5;
  const double inv_n = 1.0 / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += st.m[i] * inv_n;
    lad.theta[i + 1] = -0.5 + acc;
  }
  if (std::abs(lad.theta[n] - 0.5) > 1e-12)
    throw Error("theta ladder: total mass defect exceeds 1e-12");
  lad.theta[n] = 0.5;
  return lad;
}

// Piecewise-linear interpolant of A(u) = -u^2 at the ladder nodes; the
// discrete flux whose Rankine-Hugoniot speeds reproduce the particle
// velocities.
class PiecewiseLinearFlux {
 public:
  explicit PiecewiseLinearFlux(ThetaLadder lad) : lad_(std::move(lad)) {
    a_.resize(lad_.theta.size());
    for (std::size_t i = 0; i < a_.size(); ++i)
      a_[i] = -lad_.theta[i] * lad_.theta[i];
  }

  const ThetaLadder& ladder() const { return lad_; }

  // Index of the segment [theta_{k}, theta_{k+1}] containing u (clamped).
  std::size_t segment(double u) const {
    const auto& th = lad_.theta;
    auto it = std::upper_bound(th.begin(), th.end(), u);
    std::size_t k = static_cast<std::size_t>(it - th.begin());
    if (k == 0) return 0;
    if (k >= th.size()) return th.size() - 2;
    return k - 1;
  }

  double slope(std::size_t seg) const {
    return (a_[seg + 1] - a_[seg]) / (lad_.theta[seg + 1] - lad_.theta[seg]);
  }

  double operator()(double u) const {
    if (std::abs(u) > 0.5 + 1e-12)
      throw OutOfRange("flux: state outside [-1/2, 1/2]");
    u = std::clamp(u, -0.5, 0.5);
    const std::size_t k = segment(u);
    return a_[k] + slope(k) * (u - lad_.theta[k]);
  }

  // One-sided derivative (the slope of the containing segment).
  double derivative(double u) const {
    if (std::abs(u) > 0.5 + 1e-12)
      throw OutOfRange("flux: state outside [-1/2, 1/2]");
    u = std::clamp(u, -0.5, 0.5);
    return slope(segment(u));
  }

 private:
  ThetaLadder lad_;
  std::vector<double> a_;
};

namespace detail {

struct ClusterSpan {
  int first = 0;  // first particle index
  int last = 0;   // last particle index (inclusive)
};

inline std::vector<ClusterSpan> cluster_spans(const ParticleState& st) {
  std::vector<ClusterSpan> spans;
  const int n = st.n();
  for (int i = 0; i < n;) {
    int j = i;
    while (j + 1 < n && st.cluster[static_cast<std::size_t>(j + 1)] ==
                            st.cluster[static_cast<std::size_t>(i)])
      ++j;
    spans.push_back(ClusterSpan{i, j});
    i = j + 1;
  }
  return spans;
}

}  // namespace detail

// Shifted empirical CDF of a particle state: the right-continuous step
// function jumping by the cluster masses, with tails at -1/2 and +1/2 pinned
// through the renormalized ladder.
inline StepFunction empirical_cdf(const ParticleState& st) {
  const ThetaLadder lad = theta_ladder(st);
  const auto spans = detail::cluster_spans(st);
  std::vector<double> bp, values;
  bp.reserve(spans.size());
  values.reserve(spans.size() + 1);
  values.push_back(-0.5);
  for (const auto& span : spans) {
    bp.push_back(st.x[static_cast<std::size_t>(span.first)]);
    values.push_back(lad.theta[static_cast<std::size_t>(span.last) + 1]);
  }
  return StepFunction(std::move(bp), std::move(values));
}

// Left/right states of the CDF jump carried by one cluster.
struct JumpStates {
  double left = 0.0;
  double right = 0.0;
};

inline JumpStates jump_states(const ThetaLadder& lad,
                              const detail::ClusterSpan& span) {
  return JumpStates{lad.theta[static_cast<std::size_t>(span.first)],
                    lad.theta[static_cast<std::size_t>(span.last) + 1]};
}

// |chord slope of the discrete flux across the jump - cluster velocity|.
// The chord slope between ladder nodes L and R equals -(L + R).
inline double rh_residual(const ParticleState& st, int cluster_index) {
  const auto spans = detail::cluster_spans(st);
  if (cluster_index < 0 ||
      cluster_index >= static_cast<int>(spans.size()))
    throw OutOfRange("rh_residual: no such cluster");
  const ThetaLadder lad = theta_ladder(st);
  const JumpStates js =
      jump_states(lad, spans[static_cast<std::size_t>(cluster_index)]);
  if (js.right - js.left < 1e-14)
    throw DegenerateJump("rh_residual: jump height below 1e-14");
  const double chord = -(js.left + js.right);
  const std::vector<double> v = velocity(st);
  const double vel =
      v[static_cast<std::size_t>(spans[static_cast<std::size_t>(cluster_index)].first)];
  return std::abs(chord - vel);
}

// Entropy margin of one probe state: chord slope from the left state of the
// jump to theta_probe, minus the shock speed (the cluster velocity).
// Admissibility requires the margin to be nonnegative for probes inside the
// jump; by piecewise linearity it suffices to probe the ladder nodes between
// the states.
inline double oleinik_margin(const ParticleState& st, int cluster_index,
                             double theta_probe) {
  const auto spans = detail::cluster_spans(st);
  if (cluster_index < 0 || cluster_index >= static_cast<int>(spans.size()))
    throw OutOfRange("oleinik_margin: no such cluster");
  const auto& span = spans[static_cast<std::size_t>(cluster_index)];
  const ThetaLadder lad = theta_ladder(st);
  const JumpStates js = jump_states(lad, span);
  if (js.right - js.left < 1e-14)
    throw DegenerateJump("oleinik_margin: jump height below 1e-14");
  if (!(theta_probe > js.left) || !(theta_probe <= js.right))
    throw OutOfRange("oleinik_margin: probe must lie in (left, right]");
  const PiecewiseLinearFlux flux(lad);
  const double chord =
      (flux(theta_probe) - flux(js.left)) / (theta_probe - js.left);
  const std::vector<double> v = velocity(st);
  return chord - v[static_cast<std::size_t>(span.first)];
}

// Minimal entropy margin over the interior ladder nodes of the jump plus
// n_uniform uniformly spaced interior probes.
inline double min_oleinik_margin(const ParticleState& st, int cluster_index,
                                 int n_uniform = 16) {
  const auto spans = detail::cluster_spans(st);
  if (cluster_index < 0 || cluster_index >= static_cast<int>(spans.size()))
    throw OutOfRange("min_oleinik_margin: no such cluster");
  const auto& span = spans[static_cast<std::size_t>(cluster_index)];
  const ThetaLadder lad = theta_ladder(st);
  const JumpStates js = jump_states(lad, span);
  if (js.right - js.left < 1e-14)
    throw DegenerateJump("min_oleinik_margin: jump height below 1e-14");
  double worst = std::numeric_limits<double>::infinity();
  for (int k = span.first + 1; k <= span.last; ++k) {
    const double node = lad.theta[static_cast<std::size_t>(k)];
    if (node > js.left && node <= js.right)
      worst = std::min(worst, oleinik_margin(st, cluster_index, node));
  }
  for (int j = 1; j <= n_uniform; ++j) {
    const double p =
        js.left + (js.right - js.left) * static_cast<double>(j) /
                      static_cast<double>(n_uniform + 1);
    if (p > js.left) worst = std::min(worst, oleinik_margin(st, cluster_index, p));
  }
  worst = std::min(worst, oleinik_margin(st, cluster_index, js.right));
  return worst;
}

// Per-shock report of one state.
struct ShockInfo {
  int cluster = 0;
  double position = 0.0;
  double left_state = 0.0;
  double right_state = 0.0;
  double chord_slope = 0.0;
  double velocity = 0.0;
  double rh_residual = 0.0;
  double min_oleinik_margin = 0.0;
};

namespace detail {

inline double min_margin_impl(const PiecewiseLinearFlux& flux,
                              const JumpStates& js, double vel,
                              const ThetaLadder& lad, int first, int last,
                              int n_uniform) {
  const double a_left = flux(js.left);
  const auto chord = [&](double p) {
    return (flux(p) - a_left) / (p - js.left) - vel;
  };
  double worst = chord(js.right);
  for (int k = first + 1; k <= last; ++k) {
    const double node = lad.theta[static_cast<std::size_t>(k)];
    if (node > js.left && node <= js.right)
      worst = std::min(worst, chord(node));
  }
  for (int j = 1; j <= n_uniform; ++j) {
    const double p =
        js.left + (js.right - js.left) * static_cast<double>(j) /
                      static_cast<double>(n_uniform + 1);
    if (p > js.left) worst = std::min(worst, chord(p));
  }
  return worst;
}

}  // namespace detail

inline std::vector<ShockInfo> shock_report(const ParticleState& st,
                                           int n_uniform = 16) {
  const auto spans = detail::cluster_spans(st);
  const ThetaLadder lad = theta_ladder(st);
  const PiecewiseLinearFlux flux(lad);
  const std::vector<double> v = velocity(st);
  std::vector<ShockInfo> out;
  out.reserve(spans.size());
  for (std::size_t c = 0; c < spans.size(); ++c) {
    const JumpStates js = jump_states(lad, spans[c]);
    ShockInfo info;
    info.cluster = static_cast<int>(c);
    info.position = st.x[static_cast<std::size_t>(spans[c].first)];
    info.left_state = js.left;
    info.right_state = js.right;
    info.chord_slope = -(js.left + js.right);
    info.velocity = v[static_cast<std::size_t>(spans[c].first)];
    info.rh_residual = std::abs(info.chord_slope - info.velocity);
    info.min_oleinik_margin = detail::min_margin_impl(
        flux, js, info.velocity, lad, spans[c].first, spans[c].last, n_uniform);
    out.push_back(info);
  }
  return out;
}

// Sup of |A_N - A| over the state interval, probed at the ladder nodes,
// segment midpoints and n_uniform uniform points. For the quadratic flux the
// true sup is attained at segment midpoints, so the probe set is exact.
inline double flux_sup_error(const PiecewiseLinearFlux& flux,
                             int n_uniform = 1000) {
  const ExactFlux exact;
  const auto& th = flux.ladder().theta;
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < th.size(); ++k) {
    const double mid = 0.5 * (th[k] + th[k + 1]);
    worst = std::max(worst, std::abs(flux(mid) - exact(mid)));
  }
  for (int j = 0; j <= n_uniform; ++j) {
    const double u = -0.5 + static_cast<double>(j) / n_uniform;
    worst = std::max(worst, std::abs(flux(u) - exact(u)));
  }
  return worst;
}

// Lipschitz seminorm of A_N - A on [-1/2, 1/2], evaluated node-wise: on each
// segment the difference's derivative is linear, so its extrema sit at the
// segment ends.
inline double lip_seminorm_vs_exact(const PiecewiseLinearFlux& flux) {
  const ExactFlux exact;
  const auto& th = flux.ladder().theta;
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < th.size(); ++k) {
    const double s = flux.slope(k);
    worst = std::max(worst, std::abs(s - exact.derivative(th[k])));
    worst = std::max(worst, std::abs(s - exact.derivative(th[k + 1])));
  }
  return worst;
}

// Lipschitz seminorm of A_N - A_M (two ladder fluxes) on the merged ladder:
// both derivatives are piecewise constant, so the max lives on merged nodes.
inline double lip_seminorm_between(const PiecewiseLinearFlux& a,
                                   const PiecewiseLinearFlux& b) {
  std::vector<double> nodes = a.ladder().theta;
  nodes.insert(nodes.end(), b.ladder().theta.begin(), b.ladder().theta.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double mid = 0.5 * (nodes[k] + nodes[k + 1]);
    worst = std::max(worst, std::abs(a.derivative(mid) - b.derivative(mid)));
  }
  return worst;
}

}  // namespace sticky1d

#endif  // STICKY1D_FLUX_HPP_

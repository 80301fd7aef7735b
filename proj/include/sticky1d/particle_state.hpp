#ifndef STICKY1D_PARTICLE_STATE_HPP_
#define STICKY1D_PARTICLE_STATE_HPP_

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "sticky1d/errors.hpp"
#include "sticky1d/kernel.hpp"

namespace sticky1d {

inline int sgn(double v) { return (v > 0.0) - (v < 0.0); }

// State of the weighted aggregation system at one instant.
//
// Positions are nondecreasing. `cluster` is a contiguous, nondecreasing id
// sequence starting at 0; members of one cluster share a bitwise-identical
// position (stuck particles never separate again). Weights stay individual
// inside a cluster.
struct ParticleState {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> m;
  std::vector<int> cluster;
  double x_bound_initial = 0.0;  // max |x_i| of the generating initial data

  int n() const { return static_cast<int>(x.size()); }
  int n_clusters() const { return x.empty() ? 0 : cluster.back() + 1; }

  // Half-open particle index range [first, last) of one cluster.
  std::pair<int, int> cluster_range(int c) const {
    int lo = 0;
    while (lo < n() && cluster[static_cast<std::size_t>(lo)] != c) ++lo;
    int hi = lo;
    while (hi < n() && cluster[static_cast<std::size_t>(hi)] == c) ++hi;
    return {lo, hi};
  }

  double mean_weight() const {
    double s = 0.0;
    for (double w : m) s += w;
    return s / static_cast<double>(m.size());
  }
};

// Structural invariants; throws Error on violation.
inline void validate_state(const ParticleState& st) {
  const std::size_t n = st.x.size();
  if (n == 0) throw Error("state: empty");
  if (st.m.size() != n || st.cluster.size() != n)
    throw Error("state: field sizes disagree");
  if (st.cluster.front() != 0) throw Error("state: cluster ids must start at 0");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (st.x[i + 1] < st.x[i]) throw Error("state: positions not ordered");
    const int dc = st.cluster[i + 1] - st.cluster[i];
    if (dc != 0 && dc != 1) throw Error("state: cluster ids not contiguous");
    if (dc == 0 && st.x[i + 1] != st.x[i])
      throw Error("state: cluster members must share one position");
    if (dc == 1 && !(st.x[i + 1] > st.x[i]))
      throw Error("state: distinct clusters must be strictly ordered");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(st.m[i] > 0.0)) throw Error("state: weights must be positive");
    if (!std::isfinite(st.x[i]) || !std::isfinite(st.m[i]))
      throw Error("state: non-finite entry");
  }
}

// Builds the t = 0 state from admissible initial data: strictly increasing
// positions, positive weights with unit mean (tolerance 1e-12).
inline ParticleState make_initial_state(std::vector<double> x,
                                        std::vector<double> m) {
  if (x.empty() || x.size() != m.size())
    throw InvalidInitialData("initial data: need equally many positions and weights");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i] < x[i + 1]))
      throw InvalidInitialData("initial data: positions must be strictly increasing");
  double sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!(m[i] > 0.0))
      throw InvalidInitialData("initial data: weights must be positive");
    if (!std::isfinite(x[i]) || !std::isfinite(m[i]))
      throw InvalidInitialData("initial data: non-finite entry");
    sum += m[i];
  }
  if (std::abs(sum / static_cast<double>(m.size()) - 1.0) > 1e-12)
    throw InvalidInitialData("initial data: weights must average to 1");

  ParticleState st;
  st.x = std::move(x);
  st.m = std::move(m);
  st.cluster.resize(st.x.size());
  for (std::size_t i = 0; i < st.cluster.size(); ++i)
    st.cluster[i] = static_cast<int>(i);
  st.x_bound_initial =
      std::max(std::abs(st.x.front()), std::abs(st.x.back()));
  return st;
}

// Aggregation velocity v_i = (1/N) [ sum_{x_j > x_i} m_j - sum_{x_j < x_i} m_j ],
// the sgn(0) = 0 convention making co-located particles ignore each other.
// Computed per group of equal positions via prefix sums; equals the naive
// double loop.
inline std::vector<double> velocity(const ParticleState& st) {
  const std::size_t n = st.x.size();
  std::vector<double> v(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (double w : st.m) total += w;
  double left = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    double group = 0.0;
    while (j < n && st.x[j] == st.x[i]) group += st.m[j++];
    const double right = total - left - group;
    const double vi = (right - left) * inv_n;
    for (std::size_t k = i; k < j; ++k) v[k] = vi;
    left += group;
    i = j;
  }
  return v;
}

// Weight transfer rate mdot_i = (1/N) m_i sum_j m_j S(x_j - x_i).
// Aggregated over equal-position groups: members of a group see identical
// kernel sums, so the group factor is shared (and S(0) = 0 drops self terms).
inline std::vector<double> weight_rhs(const ParticleState& st,
                                      const Kernel& kernel) {
  const std::size_t n = st.x.size();
  std::vector<double> out(n, 0.0);
  if (kernel.family() == KernelFamily::zero) return out;
  const double inv_n = 1.0 / static_cast<double>(n);

  // Group boundaries and masses.
  std::vector<std::size_t> start;
  std::vector<double> gx, gm;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    double mass = 0.0;
    while (j < n && st.x[j] == st.x[i]) mass += st.m[j++];
    start.push_back(i);
    gx.push_back(st.x[i]);
    gm.push_back(mass);
    i = j;
  }
  const std::size_t g = gx.size();
  std::vector<double> factor(g, 0.0);
  for (std::size_t a = 0; a < g; ++a) {
    double s = 0.0;
    for (std::size_t b = 0; b < g; ++b) {
      if (b == a) continue;
      s += gm[b] * kernel.eval(gx[b] - gx[a], 0);
    }
    factor[a] = s * inv_n;
  }
  for (std::size_t a = 0; a < g; ++a) {
    const std::size_t end = (a + 1 < g) ? start[a + 1] : n;
    for (std::size_t i = start[a]; i < end; ++i) out[i] = st.m[i] * factor[a];
  }
  return out;
}

// A-priori envelope for a run of horizon T starting from `initial`:
//   m_bound = max_i m_i(0) * exp(||S||_inf T)   (two-sided weight envelope)
//   reach   = max_i |x_i(0)| + m_bound * T      (no particle escapes it)
struct Envelope {
  double x_bound = 0.0;  // max |x_i(0)|
  double m_bound = 0.0;  // weight envelope over [0, T]
  double reach = 0.0;    // support radius of the empirical CDF over [0, T]
};

inline Envelope envelope_bounds(const ParticleState& initial,
                                const Kernel& kernel, double t_final) {
  Envelope env;
  for (double xi : initial.x) env.x_bound = std::max(env.x_bound, std::abs(xi));
  double m_max = 0.0;
  for (double mi : initial.m) m_max = std::max(m_max, mi);
  env.m_bound = m_max * std::exp(kernel.sup_norms().s * t_final);
  env.reach = env.x_bound + env.m_bound * t_final;
  return env;
}

// Sublinearity constant of the weight transfer field given a weight bound:
// |mdot_i| <= C (1 + max_k m_k) with C = ||S||_inf * m_bound.
inline double h1_constant(const Kernel& kernel, double m_bound) {
  return kernel.sup_norms().s * m_bound;
}

}  // namespace sticky1d

#endif  // STICKY1D_PARTICLE_STATE_HPP_

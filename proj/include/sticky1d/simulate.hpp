#ifndef STICKY1D_SIMULATE_HPP_
#define STICKY1D_SIMULATE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sticky1d/errors.hpp"
#include "sticky1d/kernel.hpp"
#include "sticky1d/particle_state.hpp"

namespace sticky1d {

struct SimOptions {
  double dt = 0.0;           // nominal step; <= 0 means 1e-3 * horizon
  double gap_tol = 1e-10;    // collision threshold on inter-cluster gaps
  double event_tol = 1e-12;  // time tolerance of event location
  int max_events_per_step = 32;
};

struct CollisionEvent {
  double time = 0.0;
  std::vector<int> indices;  // particle indices of the merged block
};

struct NearMiss {
  double time = 0.0;
  int left_index = 0;  // last particle index of the left cluster
  double gap = 0.0;
};

namespace detail {

// ODE right-hand side on a frozen cluster partition. Integrates cluster
// representative positions (so stuck particles stay bitwise identical) plus
// individual weights. Velocities depend only on ordering and masses; weight
// transfer uses the kernel between cluster representatives, windowed to the
// kernel radius.
class FrozenOde {
 public:
  FrozenOde(const ParticleState& st, const Kernel& kernel)
      : kernel_(&kernel), n_(st.x.size()) {
    start_.push_back(0);
    for (std::size_t i = 1; i < n_; ++i)
      if (st.cluster[i] != st.cluster[i - 1]) start_.push_back(i);
    start_.push_back(n_);
    c_ = start_.size() - 1;
  }

  std::size_t n_clusters() const { return c_; }

  std::vector<double> representatives(const ParticleState& st) const {
    std::vector<double> rep(c_);
    for (std::size_t a = 0; a < c_; ++a) rep[a] = st.x[start_[a]];
    return rep;
  }

  void deriv(const std::vector<double>& rep, const std::vector<double>& m,
             std::vector<double>& d_rep, std::vector<double>& dm) const {
    d_rep.resize(c_);
    dm.resize(n_);
    mass_.resize(c_);
    double total = 0.0;
    for (std::size_t a = 0; a < c_; ++a) {
      double s = 0.0;
      for (std::size_t i = start_[a]; i < start_[a + 1]; ++i) s += m[i];
      mass_[a] = s;
      total += s;
    }
    const double inv_n = 1.0 / static_cast<double>(n_);
    // Transport: (mass strictly right - mass strictly left) / N.
    double left = 0.0;
    for (std::size_t a = 0; a < c_; ++a) {
      const double right = total - left - mass_[a];
      d_rep[a] = (right - left) * inv_n;
      left += mass_[a];
    }
    // Weight transfer, windowed to the kernel radius around each cluster.
    if (kernel_->family() == KernelFamily::zero) {
      std::fill(dm.begin(), dm.end(), 0.0);
      return;
    }
    const double r = kernel_->radius();
    std::size_t lo = 0, hi = 0;
    for (std::size_t a = 0; a < c_; ++a) {
      while (lo < c_ && rep[lo] < rep[a] - r) ++lo;
      if (hi < a + 1) hi = a + 1;
      while (hi < c_ && rep[hi] <= rep[a] + r) ++hi;
      double g = 0.0;
      for (std::size_t b = lo; b < hi; ++b) {
        if (b == a) continue;
        g += mass_[b] * kernel_->eval(rep[b] - rep[a], 0);
      }
      g *= inv_n;
      for (std::size_t i = start_[a]; i < start_[a + 1]; ++i) dm[i] = m[i] * g;
    }
  }

  // Classic RK4 over step h starting from (rep0, m0).
  void rk4(double h, const std::vector<double>& rep0,
           const std::vector<double>& m0, std::vector<double>& rep1,
           std::vector<double>& m1) const {
    deriv(rep0, m0, k1x_, k1m_);
    axpy(rep0, k1x_, 0.5 * h, tx_);
    axpy(m0, k1m_, 0.5 * h, tm_);
    deriv(tx_, tm_, k2x_, k2m_);
    axpy(rep0, k2x_, 0.5 * h, tx_);
    axpy(m0, k2m_, 0.5 * h, tm_);
    deriv(tx_, tm_, k3x_, k3m_);
    axpy(rep0, k3x_, h, tx_);
    axpy(m0, k3m_, h, tm_);
    deriv(tx_, tm_, k4x_, k4m_);
    combine(rep0, k1x_, k2x_, k3x_, k4x_, h, rep1);
    combine(m0, k1m_, k2m_, k3m_, k4m_, h, m1);
  }

  double min_gap(const std::vector<double>& rep) const {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a + 1 < c_; ++a)
      g = std::min(g, rep[a + 1] - rep[a]);
    return g;
  }

  // Last particle index of the left cluster of the tightest gap.
  int min_gap_left_index(const std::vector<double>& rep) const {
    double g = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t a = 0; a + 1 < c_; ++a) {
      if (rep[a + 1] - rep[a] < g) {
        g = rep[a + 1] - rep[a];
        best = a;
      }
    }
    return static_cast<int>(start_[best + 1]) - 1;
  }

  void write_back(ParticleState& st, const std::vector<double>& rep,
                  const std::vector<double>& m, double t) const {
    for (std::size_t a = 0; a < c_; ++a)
      for (std::size_t i = start_[a]; i < start_[a + 1]; ++i) st.x[i] = rep[a];
    st.m = m;
    st.t = t;
  }

 private:
  static void axpy(const std::vector<double>& y, const std::vector<double>& d,
                   double h, std::vector<double>& out) {
    out.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * d[i];
  }
  static void combine(const std::vector<double>& y,
                      const std::vector<double>& k1,
                      const std::vector<double>& k2,
                      const std::vector<double>& k3,
                      const std::vector<double>& k4, double h,
                      std::vector<double>& out) {
    out.resize(y.size());
    const double c = h / 6.0;
    for (std::size_t i = 0; i < y.size(); ++i)
      out[i] = y[i] + c * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
  }

  const Kernel* kernel_;
  std::size_t n_ = 0, c_ = 0;
  std::vector<std::size_t> start_;  // cluster boundaries, size c_ + 1
  mutable std::vector<double> mass_, k1x_, k1m_, k2x_, k2m_, k3x_, k3m_, k4x_,
      k4m_, tx_, tm_;
};

// Merges every maximal run of adjacent clusters with gaps <= gap_tol at the
// mass-weighted mean position; repeats until all gaps clear the threshold.
inline void merge_touching_clusters(ParticleState& st, double gap_tol,
                                    std::vector<CollisionEvent>* events) {
  const std::size_t n = st.x.size();
  for (;;) {
    bool merged_any = false;
    std::size_t i = 0;
    while (i < n) {
      // Maximal block [i, j) of clusters whose adjacent gaps are all small.
      std::size_t j = i;
      int cluster_span = 1;
      while (j + 1 < n) {
        if (st.cluster[j + 1] == st.cluster[j]) {
          ++j;
        } else if (st.x[j + 1] - st.x[j] <= gap_tol) {
          ++j;
          ++cluster_span;
        } else {
          break;
        }
      }
      ++j;  // half-open end
      if (cluster_span > 1) {
        double wm = 0.0, wsum = 0.0;
        for (std::size_t k = i; k < j; ++k) {
          wm += st.m[k] * st.x[k];
          wsum += st.m[k];
        }
        const double pos = wm / wsum;
        CollisionEvent ev;
        ev.time = st.t;
        for (std::size_t k = i; k < j; ++k) {
          st.x[k] = pos;
          st.cluster[k] = st.cluster[i];
          ev.indices.push_back(static_cast<int>(k));
        }
        if (events) events->push_back(std::move(ev));
        merged_any = true;
      }
      i = j;
    }
    // Renumber cluster ids contiguously, comparing pre-renumber values so
    // overwriting st.cluster[k - 1] cannot split a run of equal ids.
    int id = 0;
    int prev_old = n > 0 ? st.cluster[0] : 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (st.cluster[k] != prev_old) ++id;
      prev_old = st.cluster[k];
      st.cluster[k] = id;
    }
    if (!merged_any) return;
  }
}

}  // namespace detail

// Advances the state by exactly dt. Collisions inside the step are located by
// bisection on the minimal inter-cluster gap to time tolerance event_tol; the
// touching clusters merge at their mass-weighted mean and integration resumes
// on the coarser partition. Committed sub-states are appended to `dense` when
// provided.
inline ParticleState step(const ParticleState& in, const Kernel& kernel,
                          double dt, const SimOptions& opt = {},
                          std::vector<CollisionEvent>* events = nullptr,
                          std::vector<NearMiss>* near_misses = nullptr,
                          std::vector<ParticleState>* dense = nullptr) {
  ParticleState st = in;
  double remaining = dt;
  int events_here = 0;
  std::vector<double> rep0, rep1, m1, rep_mid, m_mid;
  while (remaining > 0.0) {
    const detail::FrozenOde ode(st, kernel);
    rep0 = ode.representatives(st);
    ode.rk4(remaining, rep0, st.m, rep1, m1);
    const double trial_gap = ode.min_gap(rep1);
    if (trial_gap > opt.gap_tol) {
      ode.write_back(st, rep1, m1, st.t + remaining);
      if (near_misses && std::isfinite(trial_gap) &&
          trial_gap <= 100.0 * opt.gap_tol)
        near_misses->push_back(
            NearMiss{st.t, ode.min_gap_left_index(rep1), trial_gap});
      if (dense) dense->push_back(st);
      break;
    }
    // Earliest touching time in (0, remaining]: bisection keeps min_gap(lo) >
    // gap_tol >= min_gap(hi).
    double lo = 0.0, hi = remaining;
    std::vector<double> rep_hi = rep1, m_hi = m1;
    while (hi - lo > opt.event_tol) {
      const double mid = 0.5 * (lo + hi);
      ode.rk4(mid, rep0, st.m, rep_mid, m_mid);
      if (ode.min_gap(rep_mid) > opt.gap_tol) {
        lo = mid;
      } else {
        hi = mid;
        rep_hi = rep_mid;
        m_hi = m_mid;
      }
    }
    ode.write_back(st, rep_hi, m_hi, st.t + hi);
    detail::merge_touching_clusters(st, opt.gap_tol, events);
    if (dense) dense->push_back(st);
    remaining -= hi;
    if (++events_here > opt.max_events_per_step)
      throw StepTooLarge(
          "step: more than " + std::to_string(opt.max_events_per_step) +
          " collision events in one nominal step; reduce dt");
  }
  return st;
}

// Event-resolved trajectory with dense output.
class Trajectory {
 public:
  Trajectory(Kernel kernel, SimOptions opt, Envelope env, double t_final)
      : kernel_(std::move(kernel)), opt_(opt), env_(env), t_final_(t_final) {}

  const Kernel& kernel() const { return kernel_; }
  const SimOptions& options() const { return opt_; }
  const Envelope& envelope() const { return env_; }
  double t_begin() const { return states_.front().t; }
  double t_final() const { return t_final_; }
  const std::vector<ParticleState>& states() const { return states_; }
  const std::vector<CollisionEvent>& events() const { return events_; }
  const std::vector<NearMiss>& near_misses() const { return near_misses_; }
  const ParticleState& initial() const { return states_.front(); }
  const ParticleState& final_state() const { return states_.back(); }

  // State at any time in [t_begin, t_final]: latest committed state at or
  // before t, advanced by one event-free RK4 remainder step.
  ParticleState at(double t) const {
    if (states_.empty()) throw Error("trajectory: empty");
    if (t < t_begin() - 1e-12 || t > t_final_ + 1e-12)
      throw OutOfRange("trajectory: time outside the simulated range");
    t = std::clamp(t, t_begin(), t_final_);
    auto it = std::upper_bound(
        states_.begin(), states_.end(), t,
        [](double v, const ParticleState& s) { return v < s.t; });
    const ParticleState& base = *(it - 1);
    if (base.t == t) return base;
    const detail::FrozenOde ode(base, kernel_);
    std::vector<double> rep0 = ode.representatives(base), rep1, m1;
    ode.rk4(t - base.t, rep0, base.m, rep1, m1);
    ParticleState out = base;
    ode.write_back(out, rep1, m1, t);
    return out;
  }

  friend Trajectory simulate(const ParticleState&, const Kernel&, double,
                             std::span<const double>, SimOptions);

 private:
  Kernel kernel_;
  SimOptions opt_;
  Envelope env_;
  double t_final_;
  std::vector<ParticleState> states_;
  std::vector<CollisionEvent> events_;
  std::vector<NearMiss> near_misses_;
};

// Integrates the aggregation dynamics from `initial` to t_final, committing a
// state at least every opt.dt and exactly at each requested snapshot time.
inline Trajectory simulate(const ParticleState& initial, const Kernel& kernel,
                           double t_final,
                           std::span<const double> snapshot_times = {},
                           SimOptions opt = {}) {
  validate_state(initial);
  if (std::abs(initial.mean_weight() - 1.0) > 1e-12)
    throw InvalidInitialData("simulate: weights must average to 1");
  if (!(t_final >= initial.t))
    throw OutOfRange("simulate: t_final precedes the initial time");
  if (opt.dt <= 0.0) opt.dt = 1e-3 * std::max(t_final - initial.t, 1e-300);

  std::vector<double> targets(snapshot_times.begin(), snapshot_times.end());
  targets.push_back(t_final);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  for (double s : targets)
    if (s < initial.t || s > t_final)
      throw OutOfRange("simulate: snapshot time outside [t0, t_final]");

  Trajectory traj(kernel, opt, envelope_bounds(initial, kernel, t_final),
                  t_final);
  traj.states_.push_back(initial);
  ParticleState st = initial;
  for (double target : targets) {
    while (st.t < target) {
      const double h = std::min(opt.dt, target - st.t);
      const bool lands = h >= target - st.t;
      st = step(st, kernel, h, opt, &traj.events_, &traj.near_misses_,
                &traj.states_);
      if (lands) {
        st.t = target;  // absorb roundoff of the final chunk
        traj.states_.back().t = target;
      }
    }
  }
  return traj;
}

}  // namespace sticky1d

#endif  // STICKY1D_SIMULATE_HPP_

#ifndef STICKY1D_IO_HPP_
#define STICKY1D_IO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sticky1d/entropy.hpp"
#include "sticky1d/errors.hpp"
#include "sticky1d/finite_volume.hpp"
#include "sticky1d/flux.hpp"
#include "sticky1d/particle_state.hpp"
#include "sticky1d/simulate.hpp"
#include "sticky1d/step_function.hpp"

namespace sticky1d {

// All floating-point output uses %.17g so that parsing the text recovers the
// exact double and reruns are byte-identical.
inline std::string to_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw IoError("");
    return v;
  } catch (...) {
    throw IoError(where + ": malformed number '" + s + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Step functions: header row carrying the tail values, then one row per
// breakpoint with the flanking values.

inline std::string step_to_csv(const StepFunction& f) {
  std::string s;
  s += "tails," + to_g17(f.left_tail()) + "," + to_g17(f.right_tail()) + "\n";
  s += "breakpoint,value_left,value_right\n";
  const auto& bp = f.breakpoints();
  const auto& vals = f.values();
  for (std::size_t k = 0; k < bp.size(); ++k)
    s += to_g17(bp[k]) + "," + to_g17(vals[k]) + "," + to_g17(vals[k + 1]) +
         "\n";
  return s;
}

inline StepFunction step_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("step csv: empty file");
  auto head = detail::split_csv_line(line);
  if (head.size() != 3 || head[0] != "tails")
    throw IoError("step csv: first row must be tails,<left>,<right>");
  const double left = detail::parse_double(head[1], "step csv tails");
  const double right = detail::parse_double(head[2], "step csv tails");
  if (!std::getline(in, line) ||
      detail::split_csv_line(line) !=
          std::vector<std::string>{"breakpoint", "value_left", "value_right"})
    throw IoError("step csv: missing column header");
  std::vector<double> bp, values;
  values.push_back(left);
  int row = 2;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 3)
      throw IoError("step csv row " + std::to_string(row) +
                    ": expected 3 columns");
    const std::string where = "step csv row " + std::to_string(row);
    bp.push_back(detail::parse_double(f[0], where));
    const double vl = detail::parse_double(f[1], where);
    const double vr = detail::parse_double(f[2], where);
    if (vl != values.back())
      throw IoError(where + ": value_left disagrees with the previous row");
    values.push_back(vr);
  }
  if (values.back() != right)
    throw IoError("step csv: last value_right disagrees with the tail header");
  return StepFunction(std::move(bp), std::move(values));
}

// ---------------------------------------------------------------------------
// Trajectories: flat CSV of every committed state, columns
// t,i,x_i,m_i,cluster_id; a new state starts whenever i returns to 0.

inline std::string trajectory_to_csv(const std::vector<ParticleState>& states) {
  std::string s = "t,i,x_i,m_i,cluster_id\n";
  for (const ParticleState& st : states)
    for (std::size_t i = 0; i < st.x.size(); ++i)
      s += to_g17(st.t) + "," + std::to_string(i) + "," + to_g17(st.x[i]) +
           "," + to_g17(st.m[i]) + "," + std::to_string(st.cluster[i]) + "\n";
  return s;
}

inline std::vector<ParticleState> trajectory_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      detail::split_csv_line(line) !=
          std::vector<std::string>{"t", "i", "x_i", "m_i", "cluster_id"})
    throw IoError("trajectory csv: bad or missing header");
  std::vector<ParticleState> states;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    const std::string where = "trajectory csv row " + std::to_string(row);
    if (f.size() != 5) throw IoError(where + ": expected 5 columns");
    const double t = detail::parse_double(f[0], where);
    const long i = std::lround(detail::parse_double(f[1], where));
    const double x = detail::parse_double(f[2], where);
    const double m = detail::parse_double(f[3], where);
    const long c = std::lround(detail::parse_double(f[4], where));
    if (i == 0) {
      states.emplace_back();
      states.back().t = t;
    }
    if (states.empty() ||
        i != static_cast<long>(states.back().x.size()))
      throw IoError(where + ": particle index out of sequence");
    if (states.back().t != t)
      throw IoError(where + ": time changed mid-state");
    states.back().x.push_back(x);
    states.back().m.push_back(m);
    states.back().cluster.push_back(static_cast<int>(c));
  }
  if (states.empty()) throw IoError("trajectory csv: no states");
  double reach = 0.0;
  for (double x : states.front().x) reach = std::max(reach, std::abs(x));
  for (ParticleState& st : states) {
    st.x_bound_initial = reach;
    validate_state(st);
  }
  return states;
}

// ---------------------------------------------------------------------------
// Event log: JSON array of {time, merged_indices}.

inline std::string events_to_json(const std::vector<CollisionEvent>& events) {
  std::string s = "[\n";
  for (std::size_t k = 0; k < events.size(); ++k) {
    s += "  {\"time\": " + to_g17(events[k].time) + ", \"merged_indices\": [";
    for (std::size_t j = 0; j < events[k].indices.size(); ++j) {
      if (j) s += ", ";
      s += std::to_string(events[k].indices[j]);
    }
    s += "]}";
    if (k + 1 < events.size()) s += ",";
    s += "\n";
  }
  s += "]\n";
  return s;
}

// ---------------------------------------------------------------------------
// Shock reports: one row per (snapshot time, shock).

inline std::string shocks_to_csv(const std::vector<double>& times,
                                 const std::vector<std::vector<ShockInfo>>&
                                     reports) {
  std::string s =
      "t,shock_position,left_state,right_state,chord_slope,velocity,"
      "rh_residual,min_oleinik_margin\n";
  for (std::size_t k = 0; k < times.size(); ++k)
    for (const ShockInfo& info : reports[k])
      s += to_g17(times[k]) + "," + to_g17(info.position) + "," +
           to_g17(info.left_state) + "," + to_g17(info.right_state) + "," +
           to_g17(info.chord_slope) + "," + to_g17(info.velocity) + "," +
           to_g17(info.rh_residual) + "," + to_g17(info.min_oleinik_margin) +
           "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Entropy battery reports.

inline std::string entropy_to_csv(const std::vector<ProbeResult>& results) {
  std::string s =
      "probe_id,alpha,sigma,tau,epsilon,delta,integral_value,tolerance,pass\n";
  for (const ProbeResult& r : results)
    s += std::to_string(r.probe_id) + "," + to_g17(r.alpha) + "," +
         to_g17(r.sigma) + "," + to_g17(r.tau) + "," + to_g17(r.epsilon) +
         "," + to_g17(r.delta) + "," + to_g17(r.value) + "," +
         to_g17(r.tolerance) + "," + (r.pass ? "1" : "0") + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Finite-volume snapshots.

inline std::string grid_to_csv(const GridField& g) {
  std::string s = "x_center,F_value\n";
  for (int i = 0; i < g.n(); ++i)
    s += to_g17(g.center(i)) + "," + to_g17(g.u[static_cast<std::size_t>(i)]) +
         "\n";
  return s;
}

}  // namespace sticky1d

#endif  // STICKY1D_IO_HPP_

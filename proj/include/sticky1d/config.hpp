#ifndef STICKY1D_CONFIG_HPP_
#define STICKY1D_CONFIG_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sticky1d/errors.hpp"
#include "sticky1d/experiments.hpp"
#include "sticky1d/io.hpp"
#include "sticky1d/kernel.hpp"
#include "sticky1d/particle_state.hpp"
#include "sticky1d/simulate.hpp"

namespace sticky1d {

struct KernelConfig {
  std::string family = "odd_bump";
  double kappa = 1.0;
  double radius = 1.0;
  bool operator==(const KernelConfig&) const = default;
};

struct CdfConfig {
  std::string kind = "smoothstep";  // "smoothstep" | "linear"
  double lo = -1.0;
  double hi = 1.0;
  bool operator==(const CdfConfig&) const = default;
};

struct InitialConfig {
  std::string mode = "uniform";  // "uniform" | "explicit" | "from_cdf"
  std::vector<double> x;
  std::vector<double> m;
  CdfConfig cdf;
  bool operator==(const InitialConfig&) const = default;
};

struct WindowConfig {
  double sigma = 0.0;
  double tau = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  double y = 0.0;
  std::optional<double> s;
  bool operator==(const WindowConfig&) const = default;
};

struct VerifyConfig {
  std::vector<double> alphas;
  std::vector<WindowConfig> windows;
  bool operator==(const VerifyConfig&) const = default;
};

struct StudyConfig {
  std::string kind;  // "converge" | "stability" | "time_lipschitz"
  std::vector<int> n_values;
  int fv_cells = 0;
  double perturbation = 0.01;
  int n_times = 11;
  bool operator==(const StudyConfig&) const = default;
};

struct Config {
  int schema_version = 1;
  int n_particles = 0;
  double t_final = 1.0;
  double dt = 0.0;
  double gap_tol = 1e-10;
  double event_tol = 1e-12;
  KernelConfig kernel;
  InitialConfig initial;
  std::vector<double> snapshots;
  std::string output_dir = "out";
  VerifyConfig verify;
  std::optional<StudyConfig> study;
  bool operator==(const Config&) const = default;
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw ConfigError("config: unknown key " +
                        (path.empty() ? it.key() : path + "." + it.key()));
  }
}

inline const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number())
    throw ConfigError("config: " + path + " must be a number");
  return j.get<double>();
}

inline int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer())
    throw ConfigError("config: " + path + " must be an integer");
  return j.get<int>();
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string())
    throw ConfigError("config: " + path + " must be a string");
  return j.get<std::string>();
}

inline std::vector<double> as_number_array(const json& j,
                                           const std::string& path) {
  if (!j.is_array())
    throw ConfigError("config: " + path + " must be an array");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(as_number(e, path + "[]"));
  return out;
}

}  // namespace detail

// Parses the JSON config text. Syntax errors are reported with the line
// number; schema errors with the offending key path. Unknown keys are
// errors.
inline Config parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i < upto; ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError("config line " + std::to_string(line) + ": " +
                      std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::check_keys(j, "",
                     {"schema_version", "n_particles", "t_final", "dt",
                      "gap_tol", "event_tol", "kernel", "initial", "snapshots",
                      "output_dir", "verify", "study"});

  Config c;
  if (const auto* v = detail::find(j, "schema_version"))
    c.schema_version = detail::as_int(*v, "schema_version");
  else
    throw ConfigError("config: missing required key schema_version");
  if (const auto* v = detail::find(j, "n_particles"))
    c.n_particles = detail::as_int(*v, "n_particles");
  if (const auto* v = detail::find(j, "t_final"))
    c.t_final = detail::as_number(*v, "t_final");
  if (const auto* v = detail::find(j, "dt"))
    c.dt = detail::as_number(*v, "dt");
  if (const auto* v = detail::find(j, "gap_tol"))
    c.gap_tol = detail::as_number(*v, "gap_tol");
  if (const auto* v = detail::find(j, "event_tol"))
    c.event_tol = detail::as_number(*v, "event_tol");
  if (const auto* v = detail::find(j, "output_dir"))
    c.output_dir = detail::as_string(*v, "output_dir");
  if (const auto* v = detail::find(j, "snapshots"))
    c.snapshots = detail::as_number_array(*v, "snapshots");

  if (const auto* k = detail::find(j, "kernel")) {
    detail::check_keys(*k, "kernel", {"family", "kappa", "radius"});
    if (const auto* v = detail::find(*k, "family"))
      c.kernel.family = detail::as_string(*v, "kernel.family");
    if (const auto* v = detail::find(*k, "kappa"))
      c.kernel.kappa = detail::as_number(*v, "kernel.kappa");
    if (const auto* v = detail::find(*k, "radius"))
      c.kernel.radius = detail::as_number(*v, "kernel.radius");
  }

  if (const auto* ini = detail::find(j, "initial")) {
    detail::check_keys(*ini, "initial", {"mode", "x", "m", "cdf"});
    if (const auto* v = detail::find(*ini, "mode"))
      c.initial.mode = detail::as_string(*v, "initial.mode");
    if (const auto* v = detail::find(*ini, "x"))
      c.initial.x = detail::as_number_array(*v, "initial.x");
    if (const auto* v = detail::find(*ini, "m"))
      c.initial.m = detail::as_number_array(*v, "initial.m");
    if (const auto* cdf = detail::find(*ini, "cdf")) {
      detail::check_keys(*cdf, "initial.cdf", {"kind", "lo", "hi"});
      if (const auto* v = detail::find(*cdf, "kind"))
        c.initial.cdf.kind = detail::as_string(*v, "initial.cdf.kind");
      if (const auto* v = detail::find(*cdf, "lo"))
        c.initial.cdf.lo = detail::as_number(*v, "initial.cdf.lo");
      if (const auto* v = detail::find(*cdf, "hi"))
        c.initial.cdf.hi = detail::as_number(*v, "initial.cdf.hi");
    }
  }

  if (const auto* ver = detail::find(j, "verify")) {
    detail::check_keys(*ver, "verify", {"alphas", "windows"});
    if (const auto* v = detail::find(*ver, "alphas"))
      c.verify.alphas = detail::as_number_array(*v, "verify.alphas");
    if (const auto* ws = detail::find(*ver, "windows")) {
      if (!ws->is_array())
        throw ConfigError("config: verify.windows must be an array");
      for (const auto& w : *ws) {
        detail::check_keys(w, "verify.windows[]",
                           {"sigma", "tau", "delta", "epsilon", "y", "s"});
        WindowConfig wc;
        if (const auto* v = detail::find(w, "sigma"))
          wc.sigma = detail::as_number(*v, "verify.windows[].sigma");
        if (const auto* v = detail::find(w, "tau"))
          wc.tau = detail::as_number(*v, "verify.windows[].tau");
        if (const auto* v = detail::find(w, "delta"))
          wc.delta = detail::as_number(*v, "verify.windows[].delta");
        if (const auto* v = detail::find(w, "epsilon"))
          wc.epsilon = detail::as_number(*v, "verify.windows[].epsilon");
        if (const auto* v = detail::find(w, "y"))
          wc.y = detail::as_number(*v, "verify.windows[].y");
        if (const auto* v = detail::find(w, "s"))
          wc.s = detail::as_number(*v, "verify.windows[].s");
        c.verify.windows.push_back(wc);
      }
    }
  }

  if (const auto* st = detail::find(j, "study")) {
    detail::check_keys(
        *st, "study",
        {"kind", "n_values", "fv_cells", "perturbation", "n_times"});
    StudyConfig sc;
    if (const auto* v = detail::find(*st, "kind"))
      sc.kind = detail::as_string(*v, "study.kind");
    else
      throw ConfigError("config: missing required key study.kind");
    if (const auto* v = detail::find(*st, "n_values")) {
      if (!v->is_array())
        throw ConfigError("config: study.n_values must be an array");
      for (const auto& e : *v)
        sc.n_values.push_back(detail::as_int(e, "study.n_values[]"));
    }
    if (const auto* v = detail::find(*st, "fv_cells"))
      sc.fv_cells = detail::as_int(*v, "study.fv_cells");
    if (const auto* v = detail::find(*st, "perturbation"))
      sc.perturbation = detail::as_number(*v, "study.perturbation");
    if (const auto* v = detail::find(*st, "n_times"))
      sc.n_times = detail::as_int(*v, "study.n_times");
    c.study = sc;
  }
  return c;
}

// Semantic validation plus canonical ordering of list-valued fields.
inline Config normalize_config(Config c) {
  if (c.schema_version != 1)
    throw ConfigError("config: schema_version must be 1");
  if (!(c.t_final > 0.0)) throw ConfigError("config: t_final must be > 0");
  if (c.dt < 0.0) throw ConfigError("config: dt must be >= 0");
  if (!(c.gap_tol > 0.0)) throw ConfigError("config: gap_tol must be > 0");
  if (!(c.event_tol > 0.0)) throw ConfigError("config: event_tol must be > 0");

  if (c.kernel.family != "zero" && c.kernel.family != "odd_bump")
    throw ConfigError("config: kernel.family must be \"zero\" or \"odd_bump\"");
  if (!(c.kernel.radius > 0.0))
    throw ConfigError("config: kernel.radius must be > 0");
  if (c.kernel.family == "odd_bump" && !(c.kernel.kappa > 0.0))
    throw ConfigError("config: kernel.kappa must be > 0");

  const std::string& mode = c.initial.mode;
  if (mode == "uniform") {
    if (c.n_particles < 1)
      throw ConfigError("config: n_particles must be >= 1 for uniform mode");
    if (!c.initial.x.empty() || !c.initial.m.empty())
      throw ConfigError("config: initial.x/m are only for explicit mode");
  } else if (mode == "explicit") {
    if (c.initial.x.empty())
      throw ConfigError("config: explicit mode needs initial.x");
    if (c.initial.m.size() != c.initial.x.size())
      throw ConfigError("config: initial.x and initial.m sizes differ");
    for (double m : c.initial.m)
      if (!(m > 0.0)) throw ConfigError("config: weights must be positive");
    for (std::size_t i = 0; i + 1 < c.initial.x.size(); ++i)
      if (!(c.initial.x[i] < c.initial.x[i + 1]))
        throw ConfigError(
            "config: initial.x must be strictly increasing");
    double mean = 0.0;
    for (double m : c.initial.m) mean += m;
    mean /= static_cast<double>(c.initial.m.size());
    if (std::abs(mean - 1.0) > 1e-12)
      throw ConfigError("config: weights must average to 1");
    if (c.n_particles == 0)
      c.n_particles = static_cast<int>(c.initial.x.size());
    if (c.n_particles != static_cast<int>(c.initial.x.size()))
      throw ConfigError("config: n_particles disagrees with initial.x size");
  } else if (mode == "from_cdf") {
    if (c.n_particles < 1)
      throw ConfigError("config: n_particles must be >= 1 for from_cdf mode");
    if (!c.initial.x.empty() || !c.initial.m.empty())
      throw ConfigError("config: initial.x/m are only for explicit mode");
    if (c.initial.cdf.kind != "smoothstep" && c.initial.cdf.kind != "linear")
      throw ConfigError(
          "config: initial.cdf.kind must be \"smoothstep\" or \"linear\"");
    if (!(c.initial.cdf.lo < c.initial.cdf.hi))
      throw ConfigError("config: initial.cdf needs lo < hi");
  } else {
    throw ConfigError(
        "config: initial.mode must be \"uniform\", \"explicit\" or "
        "\"from_cdf\"");
  }

  std::sort(c.snapshots.begin(), c.snapshots.end());
  c.snapshots.erase(std::unique(c.snapshots.begin(), c.snapshots.end()),
                    c.snapshots.end());
  for (double t : c.snapshots)
    if (!(t >= 0.0) || t > c.t_final)
      throw ConfigError("config: snapshots must lie in [0, t_final]");

  for (double a : c.verify.alphas)
    if (std::abs(a) > 0.5)
      throw ConfigError("config: verify.alphas must lie in [-1/2, 1/2]");

  if (c.study) {
    const std::string& kind = c.study->kind;
    if (kind != "converge" && kind != "stability" && kind != "time_lipschitz")
      throw ConfigError(
          "config: study.kind must be \"converge\", \"stability\" or "
          "\"time_lipschitz\"");
    if (kind == "converge") {
      if (c.study->n_values.empty())
        throw ConfigError("config: converge study needs study.n_values");
      for (int n : c.study->n_values)
        if (n < 1)
          throw ConfigError("config: study.n_values entries must be >= 1");
      if (c.initial.mode != "from_cdf")
        throw ConfigError("config: converge study needs initial.mode from_cdf");
    }
    if (kind == "stability" && !(c.study->perturbation > 0.0))
      throw ConfigError("config: study.perturbation must be > 0");
    if (kind == "time_lipschitz" && c.study->n_times < 5)
      throw ConfigError("config: study.n_times must be >= 5");
  }
  return c;
}

// Canonical serialization: fixed key order, %.17g floats; parsing the output
// and normalizing again reproduces the identical Config.
inline std::string serialize_config(const Config& c) {
  std::string s = "{\n";
  s += "  \"schema_version\": " + std::to_string(c.schema_version) + ",\n";
  s += "  \"n_particles\": " + std::to_string(c.n_particles) + ",\n";
  s += "  \"t_final\": " + to_g17(c.t_final) + ",\n";
  s += "  \"dt\": " + to_g17(c.dt) + ",\n";
  s += "  \"gap_tol\": " + to_g17(c.gap_tol) + ",\n";
  s += "  \"event_tol\": " + to_g17(c.event_tol) + ",\n";
  s += "  \"kernel\": {\"family\": \"" + c.kernel.family +
       "\", \"kappa\": " + to_g17(c.kernel.kappa) +
       ", \"radius\": " + to_g17(c.kernel.radius) + "},\n";
  s += "  \"initial\": {\"mode\": \"" + c.initial.mode + "\"";
  if (c.initial.mode == "explicit") {
    s += ", \"x\": [";
    for (std::size_t i = 0; i < c.initial.x.size(); ++i)
      s += (i ? ", " : "") + to_g17(c.initial.x[i]);
    s += "], \"m\": [";
    for (std::size_t i = 0; i < c.initial.m.size(); ++i)
      s += (i ? ", " : "") + to_g17(c.initial.m[i]);
    s += "]";
  }
  if (c.initial.mode == "from_cdf")
    s += ", \"cdf\": {\"kind\": \"" + c.initial.cdf.kind +
         "\", \"lo\": " + to_g17(c.initial.cdf.lo) +
         ", \"hi\": " + to_g17(c.initial.cdf.hi) + "}";
  s += "},\n";
  s += "  \"snapshots\": [";
  for (std::size_t i = 0; i < c.snapshots.size(); ++i)
    s += (i ? ", " : "") + to_g17(c.snapshots[i]);
  s += "],\n";
  s += "  \"output_dir\": \"" + c.output_dir + "\",\n";
  s += "  \"verify\": {\"alphas\": [";
  for (std::size_t i = 0; i < c.verify.alphas.size(); ++i)
    s += (i ? ", " : "") + to_g17(c.verify.alphas[i]);
  s += "], \"windows\": [";
  for (std::size_t i = 0; i < c.verify.windows.size(); ++i) {
    const WindowConfig& w = c.verify.windows[i];
    s += (i ? ", " : "");
    s += "{\"sigma\": " + to_g17(w.sigma) + ", \"tau\": " + to_g17(w.tau) +
         ", \"delta\": " + to_g17(w.delta) +
         ", \"epsilon\": " + to_g17(w.epsilon) + ", \"y\": " + to_g17(w.y);
    if (w.s) s += ", \"s\": " + to_g17(*w.s);
    s += "}";
  }
  s += "]}";
  if (c.study) {
    s += ",\n  \"study\": {\"kind\": \"" + c.study->kind + "\"";
    if (!c.study->n_values.empty()) {
      s += ", \"n_values\": [";
      for (std::size_t i = 0; i < c.study->n_values.size(); ++i)
        s += (i ? ", " : "") + std::to_string(c.study->n_values[i]);
      s += "]";
    }
    s += ", \"fv_cells\": " + std::to_string(c.study->fv_cells);
    s += ", \"perturbation\": " + to_g17(c.study->perturbation);
    s += ", \"n_times\": " + std::to_string(c.study->n_times);
    s += "}";
  }
  s += "\n}\n";
  return s;
}

// ---------------------------------------------------------------------------
// Config-driven object construction.

inline Kernel make_kernel(const KernelConfig& kc) {
  if (kc.family == "zero") return Kernel::zero(kc.radius);
  return Kernel::odd_bump(kc.kappa, kc.radius);
}

// CDF families available to from_cdf mode.
inline double eval_cdf(const CdfConfig& cdf, double x) {
  const double u = std::clamp((x - cdf.lo) / (cdf.hi - cdf.lo), 0.0, 1.0);
  if (cdf.kind == "linear") return -0.5 + u;
  return -0.5 + u * u * (3.0 - 2.0 * u);  // smoothstep
}

inline ParticleState make_initial(const Config& c) {
  if (c.initial.mode == "explicit")
    return make_initial_state(c.initial.x, c.initial.m);
  if (c.initial.mode == "from_cdf")
    return initial_data_from_cdf(
        [&](double x) { return eval_cdf(c.initial.cdf, x); }, c.n_particles);
  // uniform: equally spaced midpoints of [-1, 1], unit weights
  std::vector<double> x(static_cast<std::size_t>(c.n_particles));
  for (int i = 0; i < c.n_particles; ++i)
    x[static_cast<std::size_t>(i)] =
        -1.0 + 2.0 * (i + 0.5) / static_cast<double>(c.n_particles);
  return make_initial_state(x,
                            std::vector<double>(x.size(), 1.0));
}

inline SimOptions make_sim_options(const Config& c) {
  SimOptions opt;
  opt.dt = c.dt;
  opt.gap_tol = c.gap_tol;
  opt.event_tol = c.event_tol;
  return opt;
}

}  // namespace sticky1d

#endif  // STICKY1D_CONFIG_HPP_

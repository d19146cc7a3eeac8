#pragma once

// Experiment description (model, grid, estimator hierarchy, sweep) read from
// the configuration tree, and the per-sample solver used by every estimator.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "momc/config.hpp"
#include "momc/errors.hpp"
#include "momc/estimators.hpp"
#include "momc/mesh.hpp"
#include "momc/models.hpp"
#include "momc/sampling.hpp"
#include "momc/stepper.hpp"

namespace momc {

enum class EstimatorKind { mc, mlmc, momc, apmomc };

inline const char* to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::mc: return "mc";
    case EstimatorKind::mlmc: return "mlmc";
    case EstimatorKind::momc: return "momc";
    case EstimatorKind::apmomc: return "apmomc-bifidelity";
  }
  return "?";
}

inline EstimatorKind parse_estimator_kind(const std::string& s) {
  if (s == "mc") return EstimatorKind::mc;
  if (s == "mlmc") return EstimatorKind::mlmc;
  if (s == "momc") return EstimatorKind::momc;
  if (s == "apmomc" || s == "apmomc-bifidelity") return EstimatorKind::apmomc;
  throw ConfigError("unknown estimator '" + s + "'");
}

/// Cost of one run of the full model at design order 1..3 on the nominal grid.
inline double nominal_cost(ModelKind kind, int order) {
  checked_order(order);
  static constexpr double burgers[3] = {1.0, 4.0, 9.0};
  static constexpr double swe[3] = {3.0, 12.0, 60.0};
  static constexpr double imex[3] = {1.0, 4.0, 12.0};
  switch (kind) {
    case ModelKind::burgers:
    case ModelKind::bloodflow_elastic: return burgers[order - 1];
    case ModelKind::swe: return swe[order - 1];
    case ModelKind::jinxin:
    case ModelKind::bloodflow: return imex[order - 1];
  }
  return 1.0;
}

struct LevelSpec {
  int order = 1;
  bool reduced = false;
  std::size_t cells = 0;
  double cost = 0.0;
};

struct ReferenceSpec {
  int order = 3;
  std::size_t samples = 0;
  std::string path;  ///< empty: <out>/reference.csv
};

struct ExperimentConfig {
  ModelSpec model;
  std::size_t cells = 200;
  double x_min = 0.0;
  double x_max = 1.0;
  Boundary boundary = Boundary::transmissive;
  double t_end = 0.0;
  double cfl = 0.9;
  std::size_t qoi = 0;
  DistributionSpec dist;
  EstimatorKind estimator = EstimatorKind::mc;
  AlphaMode alpha_mode = AlphaMode::per_cell;
  double reduced_cost_ratio = 0.25;
  /// Reduced levels: "limit" solves the full model at zero relaxation time with
  /// the AP-IMEX scheme; "native" runs the standalone reduced model's solver.
  bool reduced_native = false;
  std::vector<LevelSpec> levels;  ///< cheapest first
  std::vector<std::size_t> sweep;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  ReferenceSpec reference;
  Json tree;  ///< configuration as read (with command-line overrides applied)

  Grid1D grid(std::size_t n) const { return {x_min, x_max, n}; }
  Grid1D grid() const { return grid(cells); }
  std::vector<double> costs() const {
    std::vector<double> c;
    for (const LevelSpec& l : levels) c.push_back(l.cost);
    return c;
  }
};

namespace detail {

inline void check_keys(const Json& obj, const std::string& section,
                       const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("'" + section + "' must be a table");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown key '" + (section.empty() ? "" : section + ".") + it.key() + "'");
    }
  }
}

template <typename T>
T get_or(const Json& obj, const std::string& key, T fallback, const std::string& section) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("bad value for '" + section + "." + key + "'");
  }
}

inline std::size_t get_count(const Json& obj, const std::string& key, std::size_t fallback,
                             const std::string& section) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("'" + section + "." + key + "' must be a nonnegative integer");
  }
  return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace detail

inline ModelSpec model_from_json(const Json& j) {
  using detail::get_or;
  detail::check_keys(j, "model",
                     {"kind", "profile", "jx_a", "jx_epsilon", "froude", "gravity",
                      "wave_amplitude", "wave_velocity", "test", "rho", "h0", "eta",
                      "area_amplitude", "tau", "pressure", "scales"});
  ModelSpec m;
  if (!j.contains("kind")) throw ConfigError("model.kind is required");
  m.kind = parse_model_kind(get_or<std::string>(j, "kind", "", "model"));
  m.profile = get_or<std::string>(j, "profile", "benchmark", "model");
  if (m.profile != "benchmark" && m.profile != "wave") {
    throw ConfigError("model.profile must be 'benchmark' or 'wave'");
  }
  m.jx_a = get_or<double>(j, "jx_a", m.jx_a, "model");
  m.jx_epsilon = get_or<double>(j, "jx_epsilon", m.jx_epsilon, "model");
  m.froude = get_or<double>(j, "froude", m.froude, "model");
  if (j.contains("gravity")) m.gravity = get_or<double>(j, "gravity", 9.81, "model");
  m.wave_amplitude = get_or<double>(j, "wave_amplitude", m.wave_amplitude, "model");
  m.wave_velocity = get_or<double>(j, "wave_velocity", m.wave_velocity, "model");
  m.bf_test = get_or<int>(j, "test", m.bf_test, "model");
  if (m.bf_test != 1 && m.bf_test != 2) throw ConfigError("model.test must be 1 or 2");
  m.rho = get_or<double>(j, "rho", m.rho, "model");
  m.h0 = get_or<double>(j, "h0", m.h0, "model");
  m.eta = get_or<double>(j, "eta", m.eta, "model");
  m.area_amplitude = get_or<double>(j, "area_amplitude", m.area_amplitude, "model");
  if (j.contains("tau")) {
    m.tau_override = get_or<double>(j, "tau", 0.0, "model");
    if (*m.tau_override < 0.0) throw ConfigError("model.tau must be >= 0");
  }
  const std::string pressure = get_or<std::string>(j, "pressure", "benchmark", "model");
  if (pressure != "benchmark" && pressure != "equilibrium") {
    throw ConfigError("model.pressure must be 'benchmark' or 'equilibrium'");
  }
  m.equilibrium_pressure = pressure == "equilibrium";
  if (!(m.jx_epsilon >= 0.0)) throw ConfigError("model.jx_epsilon must be >= 0");
  if (!(m.froude > 0.0)) throw ConfigError("model.froude must be positive");
  if (j.contains("scales")) {
    const Json& s = j.at("scales");
    detail::check_keys(s, "model.scales", {"length", "time", "density", "area", "viscosity", "depth"});
    m.bf_scales.length = get_or<double>(s, "length", 1.0, "model.scales");
    m.bf_scales.time = get_or<double>(s, "time", 1.0, "model.scales");
    m.bf_scales.density = get_or<double>(s, "density", 1.0, "model.scales");
    m.bf_scales.area = get_or<double>(s, "area", 1.0, "model.scales");
    m.bf_scales.viscosity = get_or<double>(s, "viscosity", 1.0, "model.scales");
    m.swe_scales.length = m.bf_scales.length;
    m.swe_scales.time = m.bf_scales.time;
    m.swe_scales.depth = get_or<double>(s, "depth", 1.0, "model.scales");
    for (double v : {m.bf_scales.length, m.bf_scales.time, m.bf_scales.density, m.bf_scales.area,
                     m.bf_scales.viscosity, m.swe_scales.depth}) {
      if (!(v > 0.0)) throw ConfigError("model.scales entries must be positive");
    }
  }
  return m;
}

/// Default final time of each benchmark family.
inline double default_t_end(const ModelSpec& m) {
  switch (m.kind) {
    case ModelKind::burgers:
    case ModelKind::jinxin: return 2.5;
    case ModelKind::swe: return m.profile == "wave" ? 0.2 : 1.0;
    default: return 0.1;
  }
}

inline std::size_t default_cells(const ModelSpec& m) {
  switch (m.kind) {
    case ModelKind::burgers:
    case ModelKind::jinxin: return 200;
    case ModelKind::swe: return 250;
    default: return 50;
  }
}

inline ExperimentConfig experiment_from_json(const Json& root) {
  using detail::get_count;
  using detail::get_or;
  detail::check_keys(root, "",
                     {"model", "grid", "time", "qoi", "distribution", "estimator", "levels",
                      "sweep", "replications", "seed", "reference", "output", "workers"});
  ExperimentConfig c;
  c.tree = root;
  if (!root.contains("model")) throw ConfigError("missing 'model' section");
  c.model = model_from_json(root.at("model"));

  const auto dom = default_domain(c.model);
  c.x_min = dom.first;
  c.x_max = dom.second;
  c.boundary = default_boundary(c.model);
  c.cells = default_cells(c.model);
  if (root.contains("grid")) {
    const Json& g = root.at("grid");
    detail::check_keys(g, "grid", {"cells", "x_min", "x_max", "boundary"});
    c.cells = get_count(g, "cells", c.cells, "grid");
    c.x_min = get_or<double>(g, "x_min", c.x_min, "grid");
    c.x_max = get_or<double>(g, "x_max", c.x_max, "grid");
    if (g.contains("boundary")) {
      const std::string b = get_or<std::string>(g, "boundary", "", "grid");
      if (b == "periodic") c.boundary = Boundary::periodic;
      else if (b == "transmissive") c.boundary = Boundary::transmissive;
      else throw ConfigError("grid.boundary must be 'periodic' or 'transmissive'");
    }
  }
  if (c.cells < 4 || !(c.x_max > c.x_min)) throw ConfigError("grid needs >= 4 cells and x_max > x_min");

  c.t_end = default_t_end(c.model);
  if (root.contains("time")) {
    const Json& t = root.at("time");
    detail::check_keys(t, "time", {"t_end", "cfl"});
    c.t_end = get_or<double>(t, "t_end", c.t_end, "time");
    c.cfl = get_or<double>(t, "cfl", c.cfl, "time");
  }
  if (!(c.t_end >= 0.0)) throw ConfigError("time.t_end must be >= 0");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw ConfigError("time.cfl must lie in (0, 1]");

  const std::vector<std::string> names = var_names(c.model.kind);
  if (root.contains("qoi")) {
    const std::string q = get_or<std::string>(root, "qoi", "", "qoi");
    bool found = false;
    for (std::size_t v = 0; v < names.size(); ++v) {
      if (names[v] == q) {
        c.qoi = v;
        found = true;
      }
    }
    if (!found) throw ConfigError("qoi '" + q + "' is not a variable of the model");
  }

  const UniformRange ur = default_distribution(c.model);
  UniformDim d{ur.lower, ur.upper};
  if (root.contains("distribution")) {
    const Json& dj = root.at("distribution");
    detail::check_keys(dj, "distribution", {"lower", "upper"});
    d.lower = get_or<double>(dj, "lower", d.lower, "distribution");
    d.upper = get_or<double>(dj, "upper", d.upper, "distribution");
  }
  c.dist.dims = {d};
  c.dist.validate();

  if (root.contains("estimator")) {
    const Json& e = root.at("estimator");
    detail::check_keys(e, "estimator", {"kind", "alpha", "reduced_cost_ratio", "reduced_scheme"});
    c.estimator = parse_estimator_kind(get_or<std::string>(e, "kind", "mc", "estimator"));
    c.alpha_mode = parse_alpha_mode(get_or<std::string>(e, "alpha", "per_cell", "estimator"));
    c.reduced_cost_ratio = get_or<double>(e, "reduced_cost_ratio", c.reduced_cost_ratio, "estimator");
    if (!(c.reduced_cost_ratio > 0.0)) throw ConfigError("estimator.reduced_cost_ratio must be positive");
    const std::string scheme = get_or<std::string>(e, "reduced_scheme", "limit", "estimator");
    if (scheme != "limit" && scheme != "native") {
      throw ConfigError("estimator.reduced_scheme must be 'limit' or 'native'");
    }
    c.reduced_native = scheme == "native";
  }

  if (root.contains("levels")) {
    const Json& ls = root.at("levels");
    if (!ls.is_array()) throw ConfigError("'levels' must be a list");
    for (std::size_t k = 0; k < ls.size(); ++k) {
      const std::string sec = "levels." + std::to_string(k);
      const Json& lj = ls[k];
      if (lj.is_null()) throw ConfigError(sec + " is missing");
      detail::check_keys(lj, sec, {"order", "fidelity", "cells", "cost"});
      LevelSpec l;
      l.order = get_or<int>(lj, "order", 1, sec);
      if (l.order < 1 || l.order > 3) throw ConfigError(sec + ".order must be 1, 2 or 3");
      const std::string fid = get_or<std::string>(lj, "fidelity", "full", sec);
      if (fid != "full" && fid != "reduced") throw ConfigError(sec + ".fidelity must be full or reduced");
      l.reduced = fid == "reduced";
      l.cells = get_count(lj, "cells", c.cells, sec);
      l.cost = get_or<double>(lj, "cost", 0.0, sec);
      c.levels.push_back(l);
    }
  }

  c.reference.order = 3;
  for (const LevelSpec& l : c.levels) c.reference.order = l.order;
  if (!c.levels.empty()) {
    int top = 1;
    for (const LevelSpec& l : c.levels) top = std::max(top, l.order);
    c.reference.order = top;
  }
  if (root.contains("reference")) {
    const Json& r = root.at("reference");
    detail::check_keys(r, "reference", {"order", "samples", "path"});
    c.reference.order = get_or<int>(r, "order", c.reference.order, "reference");
    c.reference.samples = get_count(r, "samples", 0, "reference");
    c.reference.path = get_or<std::string>(r, "path", "", "reference");
  }
  checked_order(c.reference.order);
  if (c.levels.empty()) c.levels.push_back({c.reference.order, false, c.cells, 0.0});

  if (root.contains("sweep")) {
    const Json& s = root.at("sweep");
    if (!s.is_array()) throw ConfigError("'sweep' must be a list");
    for (const Json& v : s) {
      if (!v.is_number_integer() || v.get<long long>() < 2) {
        throw ConfigError("sweep entries must be integers >= 2");
      }
      c.sweep.push_back(static_cast<std::size_t>(v.get<long long>()));
    }
  }
  c.replications = get_count(root, "replications", 1, "root");
  if (c.replications == 0) throw ConfigError("replications must be >= 1");
  if (root.contains("seed")) {
    const Json& s = root.at("seed");
    if (!s.is_number_integer()) throw ConfigError("seed must be an integer");
    c.seed = s.is_number_unsigned() ? s.get<std::uint64_t>()
                                    : static_cast<std::uint64_t>(s.get<long long>());
  }

  // Per-level costs and structural checks.
  std::size_t finest = 0;
  for (const LevelSpec& l : c.levels) finest = std::max(finest, l.cells);
  for (std::size_t k = 0; k < c.levels.size(); ++k) {
    LevelSpec& l = c.levels[k];
    if (l.reduced) {
      if (!has_relaxation(c.model.kind)) {
        throw ConfigError(std::string("model ") + to_string(c.model.kind) + " has no reduced form");
      }
      if (l.cost <= 0.0) l.cost = c.reduced_cost_ratio * nominal_cost(c.model.kind, 1);
    } else if (l.cost <= 0.0) {
      const double ratio = static_cast<double>(l.cells) / static_cast<double>(finest);
      l.cost = nominal_cost(c.model.kind, l.order) * ratio * ratio;
    }
  }
  switch (c.estimator) {
    case EstimatorKind::mc:
      if (c.levels.size() != 1) throw ConfigError("mc uses exactly one level");
      break;
    case EstimatorKind::apmomc:
      if (c.levels.size() < 2 || !c.levels.front().reduced || c.levels.front().order != 1) {
        throw ConfigError("apmomc needs a reduced order-1 first level followed by full levels");
      }
      for (std::size_t k = 1; k < c.levels.size(); ++k) {
        if (c.levels[k].reduced) throw ConfigError("only the first apmomc level may be reduced");
      }
      break;
    case EstimatorKind::momc:
      for (const LevelSpec& l : c.levels) {
        if (l.reduced) throw ConfigError("momc levels must be full-order; use apmomc");
      }
      break;
    case EstimatorKind::mlmc:
      for (std::size_t k = 1; k < c.levels.size(); ++k) {
        const std::size_t a = c.levels[k - 1].cells, b = c.levels[k].cells;
        if (b != 2 * a && b != a) throw ConfigError("mlmc levels must refine the grid by 2");
      }
      break;
  }
  if (c.estimator != EstimatorKind::mlmc) {
    for (const LevelSpec& l : c.levels) {
      if (l.cells != c.cells) throw ConfigError("only mlmc levels may change the grid");
    }
  } else if (c.levels.back().cells != c.cells) {
    throw ConfigError("the finest mlmc level must use grid.cells");
  }
  for (std::size_t k = 1; k < c.levels.size(); ++k) {
    if (c.levels[k].cost < c.levels[k - 1].cost) {
      throw ConfigError("levels must be listed cheapest first");
    }
  }
  std::size_t max_sweep = 0;
  for (std::size_t m : c.sweep) max_sweep = std::max(max_sweep, m);
  if (c.reference.samples == 0) c.reference.samples = std::max<std::size_t>(max_sweep, 2);
  if (c.reference.samples < max_sweep) {
    throw ConfigError("reference.samples must be >= the largest sweep entry");
  }
  return c;
}

inline ExperimentConfig experiment_from_text(const std::string& text) {
  return experiment_from_json(parse_config_text(text));
}

/// Solver configuration of one hierarchy level.
struct LevelSolver {
  ModelSpec model;
  StepperConfig stepper;
  Grid1D grid;
  Boundary boundary;
};

inline LevelSolver level_solver(const ExperimentConfig& c, const LevelSpec& l) {
  LevelSolver s{c.model, {}, c.grid(l.cells), c.boundary};
  if (l.reduced) s.model = c.reduced_native ? reduced_model_of(c.model) : limit_model_of(c.model);
  s.stepper = default_stepper(s.model.kind, l.order);
  s.stepper.cfl = c.cfl;
  return s;
}

/// Quantity of interest of one realization at t_end. A reduced level has no
/// relaxed variable; its value is taken on the equilibrium manifold.
inline Profile solve_profile(const ExperimentConfig& c, const LevelSolver& s, double z) {
  const InitialData init =
      initial_condition(s.model, s.grid, z, s.boundary, s.stepper.ic_quadrature);
  const AdvanceResult r = advance(init, s.stepper, c.t_end);
  if (c.qoi < r.state.n_vars()) {
    const auto v = r.state.var(c.qoi);
    return Profile(v.begin(), v.end());
  }
  Profile out(r.state.n_cells());
  for (std::size_t i = 0; i < out.size(); ++i) {
    State st{};
    for (std::size_t v = 0; v < r.state.n_vars(); ++v) st[v] = r.state(v, i);
    out[i] = relaxation_equilibrium(c.model, init.params[i], st);
  }
  return out;
}

}  // namespace momc

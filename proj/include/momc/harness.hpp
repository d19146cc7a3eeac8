#pragma once

// Experiment driver: single solves, persisted reference moments, estimator
// sweeps and hierarchy diagnostics, all written as CSV.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "momc/estimators.hpp"
#include "momc/experiment.hpp"
#include "momc/hash.hpp"
#include "momc/parallel.hpp"
#include "momc/sampling.hpp"

namespace momc {

struct RunOptions {
  unsigned workers = 1;
  bool timing = false;  ///< wall_ms stays 0 otherwise, keeping files reproducible
  std::string out_dir = ".";
  std::optional<double> z;   ///< solve: random input
  std::optional<int> order;  ///< solve: design order
};

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Applies command-line overrides to the configuration tree before parsing.
inline void apply_overrides(Json& tree, std::optional<std::uint64_t> seed,
                            std::optional<std::size_t> replications) {
  if (!tree.is_object()) throw ConfigError("configuration must be a table");
  if (seed) tree["seed"] = *seed;
  if (replications) tree["replications"] = *replications;
}

/// Seed of the reference ensemble, independent of the sweep replications.
inline std::uint64_t reference_seed(std::uint64_t seed) { return mix64(seed ^ 0x5245464552454e43ULL); }

/// Identity of a reference field: everything its values depend on.
inline std::string reference_key(const ExperimentConfig& c) {
  Json j;
  j["model"] = model_hash(c.model);
  j["grid"] = {c.x_min, c.x_max, c.cells, to_string(c.boundary)};
  j["t_end"] = c.t_end;
  j["cfl"] = c.cfl;
  j["qoi"] = c.qoi;
  j["distribution"] = {c.dist.dims.at(0).lower, c.dist.dims.at(0).upper};
  j["order"] = c.reference.order;
  j["samples"] = c.reference.samples;
  j["seed"] = c.seed;
  return hex64(fnv1a64(canonical_json(j)));
}

namespace detail {

inline void ensure_parent(const std::filesystem::path& p) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "'");
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& p) : path_(p) {
    ensure_parent(p);
    out_.open(p, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot write '" + p.string() + "'");
  }
  void line(const std::string& s) {
    out_ << s << '\n';
    out_.flush();
    if (!out_) throw IoError("write to '" + path_.string() + "' failed");
  }
  void meta(const std::string& key, const std::string& value) { line("# " + key + ": " + value); }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

inline void write_provenance(CsvWriter& w, const ExperimentConfig& c) {
  w.meta("seed", std::to_string(c.seed));
  w.meta("config_hash", config_hash(c.tree));
  w.meta("model_hash", model_hash(c.model));
}

inline std::string join_counts(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ';';
    s += std::to_string(v[k]);
  }
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sample evaluation.

struct LevelSamples {
  SampleSet profiles;
  std::vector<double> wall_ms;  ///< per-sample solve time (timing runs only)
};

/// Solves samples [0, count) of the hierarchy seeded by `seed` on one level.
inline LevelSamples evaluate_level(const ExperimentConfig& c, const LevelSpec& level,
                                   std::uint64_t seed, std::size_t count, const RunOptions& opt) {
  const LevelSolver solver = level_solver(c, level);
  LevelSamples out;
  out.profiles.resize(count);
  out.wall_ms.assign(count, 0.0);
  parallel_for(count, opt.workers, [&](std::size_t k) {
    const auto t0 = std::chrono::steady_clock::now();
    out.profiles[k] = solve_profile(c, solver, sample(seed, c.dist, k)[0]);
    if (opt.timing) {
      out.wall_ms[k] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
  });
  return out;
}

inline std::vector<SampleSet> prefixes(const std::vector<LevelSamples>& all,
                                       const std::vector<std::size_t>& counts) {
  std::vector<SampleSet> out(all.size());
  for (std::size_t l = 0; l < all.size(); ++l) {
    if (counts[l] > all[l].profiles.size()) throw DomainError("prefix exceeds evaluated samples");
    out[l].assign(all[l].profiles.begin(), all[l].profiles.begin() + static_cast<long>(counts[l]));
  }
  return out;
}

/// Runs the configured estimator on nested level samples (cheapest first).
inline MomentField run_estimator(const ExperimentConfig& c, const std::vector<SampleSet>& levels) {
  const std::vector<double> costs = c.costs();
  switch (c.estimator) {
    case EstimatorKind::mc: {
      const Moments m = mc_estimate(levels.front());
      MomentField f;
      f.mean = m.mean;
      f.variance = m.variance;
      f.alpha.resize(1);
      f.counts = {levels.front().size()};
      f.cost = static_cast<double>(levels.front().size()) * costs.front();
      return f;
    }
    case EstimatorKind::momc: return momc_recursive(levels, costs, c.alpha_mode);
    case EstimatorKind::apmomc: {
      const std::vector<SampleSet> full(levels.begin() + 1, levels.end());
      const std::vector<double> fc(costs.begin() + 1, costs.end());
      return apmomc_bifidelity(levels.front(), full, costs.front(), fc, c.alpha_mode);
    }
    case EstimatorKind::mlmc: return mlmc_estimate(levels, costs);
  }
  throw UnsupportedError("unknown estimator");
}

/// Error-bound diagnostics; MLMC levels are lifted to the finest grid first.
inline HierarchyDiagnostics diagnostics_for(const ExperimentConfig& c,
                                            const std::vector<SampleSet>& levels) {
  const double dx = c.grid().dx();
  if (c.estimator != EstimatorKind::mlmc) return hierarchy_diagnostics(levels, dx);
  std::vector<SampleSet> lifted(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    for (const Profile& p : levels[l]) lifted[l].push_back(prolongate(p, c.cells / p.size()));
  }
  return hierarchy_diagnostics(lifted, dx);
}

// ---------------------------------------------------------------------------
// solve

inline std::filesystem::path run_solve(const ExperimentConfig& c, const RunOptions& opt) {
  const int order = opt.order.value_or(c.reference.order);
  checked_order(order);
  const double z = opt.z.value_or(sample(c.seed, c.dist, 0)[0]);
  if (z < c.dist.dims[0].lower || z > c.dist.dims[0].upper) {
    throw ConfigError("z lies outside the input distribution");
  }
  const LevelSolver s = level_solver(c, {order, false, c.cells, 0.0});
  const AdvanceResult r = advance(s.model, s.stepper, s.grid, z, c.t_end, s.boundary);
  const auto path = std::filesystem::path(opt.out_dir) / "solve.csv";
  detail::CsvWriter w(path);
  detail::write_provenance(w, c);
  w.meta("z", fmt17(z));
  w.meta("order", std::to_string(order));
  w.meta("steps", std::to_string(r.steps));
  std::string header = "x";
  for (const std::string& n : var_names(s.model.kind)) header += "," + n;
  w.line(header);
  for (std::size_t i = 0; i < s.grid.n_cells(); ++i) {
    std::string row = fmt17(s.grid.center(i));
    for (std::size_t v = 0; v < r.state.n_vars(); ++v) row += "," + fmt17(r.state(v, i));
    w.line(row);
  }
  return path;
}

// ---------------------------------------------------------------------------
// reference

struct ReferenceField {
  std::vector<double> x;
  Profile mean;
  Profile variance;
  std::map<std::string, std::string> meta;
};

inline std::filesystem::path reference_path(const ExperimentConfig& c, const RunOptions& opt) {
  if (!c.reference.path.empty()) {
    const std::filesystem::path p(c.reference.path);
    return p.is_absolute() ? p : std::filesystem::path(opt.out_dir) / p;
  }
  return std::filesystem::path(opt.out_dir) / "reference.csv";
}

/// Plain MC with the highest-order full solver at M_ref samples.
inline std::filesystem::path run_reference(const ExperimentConfig& c, const RunOptions& opt) {
  const LevelSpec level{c.reference.order, false, c.cells, 0.0};
  const LevelSamples s =
      evaluate_level(c, level, reference_seed(c.seed), c.reference.samples, opt);
  const Moments m = mc_estimate(s.profiles);
  const Grid1D g = c.grid();
  const auto path = reference_path(c, opt);
  detail::CsvWriter w(path);
  detail::write_provenance(w, c);
  w.meta("reference_key", reference_key(c));
  w.meta("order", std::to_string(c.reference.order));
  w.meta("samples", std::to_string(c.reference.samples));
  w.meta("cells", std::to_string(c.cells));
  w.line("x,mean,variance,ci95_half_width");
  const double msz = static_cast<double>(c.reference.samples);
  for (std::size_t i = 0; i < g.n_cells(); ++i) {
    const double half = 1.959963984540054 * std::sqrt(m.variance[i] / msz);
    w.line(fmt17(g.center(i)) + "," + fmt17(m.mean[i]) + "," + fmt17(m.variance[i]) + "," +
           fmt17(half));
  }
  return path;
}

inline ReferenceField read_reference(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open reference '" + path.string() + "'");
  ReferenceField r;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      const std::size_t colon = line.find(": ");
      if (colon != std::string::npos) r.meta[line.substr(2, colon - 2)] = line.substr(colon + 2);
      continue;
    }
    if (!header) {
      if (line != "x,mean,variance,ci95_half_width") {
        throw IoError("unexpected reference header in '" + path.string() + "'");
      }
      header = true;
      continue;
    }
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      vals.push_back(std::strtod(cell.c_str(), &end));
      if (end == cell.c_str()) throw IoError("malformed reference row in '" + path.string() + "'");
    }
    if (vals.size() != 4) throw IoError("malformed reference row in '" + path.string() + "'");
    r.x.push_back(vals[0]);
    r.mean.push_back(vals[1]);
    r.variance.push_back(vals[2]);
  }
  if (!header) throw IoError("reference '" + path.string() + "' has no data");
  return r;
}

/// Loads the reference and checks that it belongs to this experiment.
inline ReferenceField load_reference(const ExperimentConfig& c, const RunOptions& opt) {
  const auto path = reference_path(c, opt);
  ReferenceField r = read_reference(path);
  const auto it = r.meta.find("reference_key");
  if (it == r.meta.end() || it->second != reference_key(c)) {
    throw StaleReferenceError("reference '" + path.string() +
                              "' was computed for a different model, grid or seed");
  }
  if (r.mean.size() != c.cells) throw StaleReferenceError("reference grid size mismatch");
  return r;
}

// ---------------------------------------------------------------------------
// sweep

struct ConvergenceRecord {
  std::size_t m_top = 0;
  std::vector<std::size_t> counts;
  double cost = 0.0;
  double err_mean = 0.0;
  double err_var = 0.0;
  double bound = 0.0;
  std::string replication;  ///< index, or "mean" for replication averages
  double wall_ms = 0.0;
};

inline constexpr const char* kSweepHeader =
    "M_L,M_levels,total_cost,err_expectation_L1,err_variance_L1,predicted_bound,replication,wall_ms";

inline std::string to_csv(const ConvergenceRecord& r) {
  return std::to_string(r.m_top) + "," + detail::join_counts(r.counts) + "," + fmt17(r.cost) + "," +
         fmt17(r.err_mean) + "," + fmt17(r.err_var) + "," + fmt17(r.bound) + "," + r.replication +
         "," + fmt17(r.wall_ms);
}

/// Records of every (replication, M_L) pair followed by replication averages.
inline std::vector<ConvergenceRecord> sweep_records(const ExperimentConfig& c,
                                                    const ReferenceField& ref,
                                                    const RunOptions& opt,
                                                    const std::function<void(const ConvergenceRecord&)>& emit = {}) {
  if (c.sweep.empty()) throw ConfigError("sweep needs at least one M_L value");
  const std::vector<double> costs = c.costs();
  std::vector<std::vector<std::size_t>> schedule;
  std::vector<std::size_t> largest(c.levels.size(), 0);
  for (std::size_t m : c.sweep) {
    schedule.push_back(allocate_samples(m, costs));
    for (std::size_t l = 0; l < largest.size(); ++l) {
      largest[l] = std::max(largest[l], schedule.back()[l]);
    }
  }
  const double dx = c.grid().dx();
  std::vector<ConvergenceRecord> rows;
  for (std::size_t r = 0; r < c.replications; ++r) {
    const std::uint64_t seed = replication_seed(c.seed, r);
    std::vector<LevelSamples> all;
    for (std::size_t l = 0; l < c.levels.size(); ++l) {
      all.push_back(evaluate_level(c, c.levels[l], seed, largest[l], opt));
    }
    for (std::size_t s = 0; s < c.sweep.size(); ++s) {
      const auto t0 = std::chrono::steady_clock::now();
      const std::vector<SampleSet> levels = prefixes(all, schedule[s]);
      const MomentField est = run_estimator(c, levels);
      ConvergenceRecord rec;
      rec.m_top = c.sweep[s];
      rec.counts = est.counts;
      rec.cost = est.cost;
      rec.err_mean = l1_distance(est.mean, ref.mean, dx);
      rec.err_var = l1_distance(est.variance, ref.variance, dx);
      rec.bound = diagnostics_for(c, levels).bound;
      rec.replication = std::to_string(r);
      if (opt.timing) {
        double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                        .count();
        for (std::size_t l = 0; l < all.size(); ++l) {
          for (std::size_t k = 0; k < schedule[s][l]; ++k) ms += all[l].wall_ms[k];
        }
        rec.wall_ms = ms;
      }
      if (emit) emit(rec);
      rows.push_back(std::move(rec));
    }
  }
  const double inv = 1.0 / static_cast<double>(c.replications);
  for (std::size_t s = 0; s < c.sweep.size(); ++s) {
    ConvergenceRecord avg;
    avg.m_top = c.sweep[s];
    avg.replication = "mean";
    for (std::size_t r = 0; r < c.replications; ++r) {
      const ConvergenceRecord& x = rows[r * c.sweep.size() + s];
      avg.counts = x.counts;
      avg.cost = x.cost;
      avg.err_mean += inv * x.err_mean;
      avg.err_var += inv * x.err_var;
      avg.bound += inv * x.bound;
      avg.wall_ms += inv * x.wall_ms;
    }
    if (emit) emit(avg);
    rows.push_back(std::move(avg));
  }
  return rows;
}

/// Writes sweep.csv; rows are flushed as they are produced.
inline std::filesystem::path run_sweep(const ExperimentConfig& c, const RunOptions& opt) {
  const ReferenceField ref = load_reference(c, opt);
  const auto path = std::filesystem::path(opt.out_dir) / "sweep.csv";
  detail::CsvWriter w(path);
  detail::write_provenance(w, c);
  w.meta("estimator", to_string(c.estimator));
  w.line(kSweepHeader);
  sweep_records(c, ref, opt, [&](const ConvergenceRecord& r) { w.line(to_csv(r)); });
  return path;
}

// ---------------------------------------------------------------------------
// diag

/// Per-level sigma/tau/xi dump for the largest sweep entry, first replication.
inline std::filesystem::path run_diag(const ExperimentConfig& c, const RunOptions& opt) {
  std::size_t m_top = 2;
  for (std::size_t m : c.sweep) m_top = std::max(m_top, m);
  const std::vector<std::size_t> counts = allocate_samples(m_top, c.costs());
  const std::uint64_t seed = replication_seed(c.seed, 0);
  std::vector<LevelSamples> all;
  for (std::size_t l = 0; l < c.levels.size(); ++l) {
    all.push_back(evaluate_level(c, c.levels[l], seed, counts[l], opt));
  }
  const std::vector<SampleSet> levels = prefixes(all, counts);
  const HierarchyDiagnostics d = diagnostics_for(c, levels);
  const MomentField est = run_estimator(c, levels);
  const auto path = std::filesystem::path(opt.out_dir) / "diag.csv";
  detail::CsvWriter w(path);
  detail::write_provenance(w, c);
  w.meta("estimator", to_string(c.estimator));
  w.meta("predicted_bound", fmt17(d.bound));
  w.line("level,order,fidelity,cells,M,cost,sigma,tau,xi,rho_mean,alpha_mean");
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const LevelSpec& s = c.levels[l];
    double am = 0.0;
    if (!est.alpha[l].empty()) {
      for (double a : est.alpha[l]) am += a;
      am /= static_cast<double>(est.alpha[l].size());
    }
    w.line(std::to_string(l) + "," + std::to_string(s.order) + "," +
           (s.reduced ? "reduced" : "full") + "," + std::to_string(s.cells) + "," +
           std::to_string(counts[l]) + "," + fmt17(s.cost) + "," + fmt17(d.sigma[l]) + "," +
           fmt17(d.tau[l]) + "," + fmt17(d.xi[l]) + "," + fmt17(d.rho_mean[l]) + "," + fmt17(am));
  }
  return path;
}

}  // namespace momc

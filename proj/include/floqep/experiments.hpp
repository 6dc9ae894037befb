#pragma once

// Experiment harness: JSON config ingestion (strict schema), single-cycle and
// multi-cycle runs, chirality determination, frequency sweeps, and CSV/JSON
// emission. Outputs are byte-stable for identical configs.

#include <json.hpp>

#include <array>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "floqep/adiabatic.hpp"
#include "floqep/floquet.hpp"
#include "floqep/integrate.hpp"
#include "floqep/linalg.hpp"
#include "floqep/model.hpp"
#include "floqep/version.hpp"

namespace floqep {

using Json = nlohmann::ordered_json;

enum class Direction { cw, ccw, both };

inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::cw: return "cw";
    case Direction::ccw: return "ccw";
    default: return "both";
  }
}

struct InitialState {
  int adiabatic_index = 1;      // 1-based; ignored when vector is set
  std::optional<Vec> vector;
};

struct OutputPaths {
  std::string csv;   // file name; empty selects a per-command default
  std::string json;
};

struct ExperimentConfig {
  bool use_preset = true;
  ModelPreset preset_model{"longhi3", {}};
  Mat explicit_h0;
  std::vector<DriveTerm> explicit_drives;

  double omega_abs = 0.0;
  Direction direction = Direction::cw;
  long cycles = 1;
  InitialState initial;
  int samples_per_cycle = 200;
  IntegratorSettings integrator;
  OutputPaths outputs;

  // Per-command extras.
  int state_index = 0;
  int l_max = 0;
  std::array<int, 2> pair{0, 0};
  std::vector<double> omega_grid;

  Json echo;  // raw config document, replayed into summaries

  void validate() const {
    if (!(omega_abs > 0.0)) throw ConfigError("config: omega_abs must be > 0");
    if (cycles < 1) throw ConfigError("config: cycles must be >= 1");
    if (samples_per_cycle < 2) throw ConfigError("config: samples_per_cycle must be >= 2");
    integrator.validate();
  }
};

// ---------------------------------------------------------------------------
// Strict JSON parsing. Unknown keys anywhere are rejected.

namespace detail {

inline void require_keys(const Json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
  }
}

inline double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError("config: " + where + " must be a number");
  return j.get<double>();
}

inline Cx as_complex(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("config: " + where + " must be a [re, im] pair");
  return Cx(j[0].get<double>(), j[1].get<double>());
}

inline Mat as_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError("config: " + where + " must be a matrix");
  const Eigen::Index n = static_cast<Eigen::Index>(j.size());
  Mat m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw ConfigError("config: " + where + " must be square");
    for (Eigen::Index c = 0; c < n; ++c)
      m(r, c) = as_complex(row[static_cast<size_t>(c)],
                           where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

inline Vec as_cvector(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError("config: " + where + " must be a vector");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = as_complex(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

}  // namespace detail

inline ExperimentConfig parse_config_impl(const Json& doc) {
  detail::require_keys(doc,
                       {"model", "omega_abs", "direction", "cycles", "initial",
                        "samples_per_cycle", "integrator", "outputs", "state_index",
                        "l_max", "pair", "omega_grid"},
                       "top level");
  ExperimentConfig cfg;
  cfg.echo = doc;

  if (!doc.contains("model")) throw ConfigError("config: missing 'model'");
  const Json& jm = doc["model"];
  if (jm.contains("preset")) {
    detail::require_keys(jm, {"preset", "parameters"}, "model");
    cfg.use_preset = true;
    if (!jm["preset"].is_string()) throw ConfigError("config: model.preset must be a string");
    cfg.preset_model.name = jm["preset"].get<std::string>();
    if (jm.contains("parameters")) {
      if (!jm["parameters"].is_object())
        throw ConfigError("config: model.parameters must be an object");
      for (auto it = jm["parameters"].begin(); it != jm["parameters"].end(); ++it)
        cfg.preset_model.parameters[it.key()] =
            detail::as_number(it.value(), "model.parameters." + it.key());
    }
  } else if (jm.contains("h0")) {
    detail::require_keys(jm, {"h0", "drives"}, "model");
    cfg.use_preset = false;
    cfg.explicit_h0 = detail::as_matrix(jm["h0"], "model.h0");
    if (jm.contains("drives")) {
      if (!jm["drives"].is_array()) throw ConfigError("config: model.drives must be an array");
      for (size_t i = 0; i < jm["drives"].size(); ++i) {
        const Json& jd = jm["drives"][i];
        detail::require_keys(jd, {"matrix", "harmonics"}, "model.drives[" + std::to_string(i) + "]");
        DriveTerm term;
        term.matrix = detail::as_matrix(jd.at("matrix"), "drive matrix");
        if (!jd.contains("harmonics") || !jd["harmonics"].is_object())
          throw ConfigError("config: drive harmonics must be an object");
        for (auto it = jd["harmonics"].begin(); it != jd["harmonics"].end(); ++it) {
          int n = 0;
          try {
            n = std::stoi(it.key());
          } catch (...) {
            throw ConfigError("config: harmonic key '" + it.key() + "' is not an integer");
          }
          term.harmonics[n] = detail::as_complex(it.value(), "harmonic " + it.key());
        }
        cfg.explicit_drives.push_back(std::move(term));
      }
    }
  } else {
    throw ConfigError("config: model needs either 'preset' or 'h0'");
  }

  if (!doc.contains("omega_abs")) throw ConfigError("config: missing 'omega_abs'");
  cfg.omega_abs = detail::as_number(doc["omega_abs"], "omega_abs");

  if (doc.contains("direction")) {
    const std::string d = doc["direction"].is_string() ? doc["direction"].get<std::string>() : "";
    if (d == "cw")
      cfg.direction = Direction::cw;
    else if (d == "ccw")
      cfg.direction = Direction::ccw;
    else if (d == "both")
      cfg.direction = Direction::both;
    else
      throw ConfigError("config: direction must be cw, ccw or both");
  }
  if (doc.contains("cycles")) {
    if (!doc["cycles"].is_number_integer()) throw ConfigError("config: cycles must be an integer");
    cfg.cycles = doc["cycles"].get<long>();
  }
  if (doc.contains("samples_per_cycle")) {
    if (!doc["samples_per_cycle"].is_number_integer())
      throw ConfigError("config: samples_per_cycle must be an integer");
    cfg.samples_per_cycle = doc["samples_per_cycle"].get<int>();
  }
  if (doc.contains("initial")) {
    const Json& ji = doc["initial"];
    detail::require_keys(ji, {"adiabatic_index", "vector"}, "initial");
    if (ji.contains("adiabatic_index") && ji.contains("vector"))
      throw ConfigError("config: initial takes either adiabatic_index or vector, not both");
    if (ji.contains("adiabatic_index")) {
      if (!ji["adiabatic_index"].is_number_integer())
        throw ConfigError("config: initial.adiabatic_index must be an integer");
      cfg.initial.adiabatic_index = ji["adiabatic_index"].get<int>();
    } else if (ji.contains("vector")) {
      cfg.initial.vector = detail::as_cvector(ji["vector"], "initial.vector");
    } else {
      throw ConfigError("config: initial needs adiabatic_index or vector");
    }
  }
  if (doc.contains("integrator")) {
    const Json& js = doc["integrator"];
    detail::require_keys(js, {"rel_tol", "abs_tol", "max_step", "initial_step"}, "integrator");
    if (js.contains("rel_tol")) cfg.integrator.rel_tol = detail::as_number(js["rel_tol"], "rel_tol");
    if (js.contains("abs_tol")) cfg.integrator.abs_tol = detail::as_number(js["abs_tol"], "abs_tol");
    if (js.contains("max_step")) cfg.integrator.max_step = detail::as_number(js["max_step"], "max_step");
    if (js.contains("initial_step"))
      cfg.integrator.initial_step = detail::as_number(js["initial_step"], "initial_step");
  }
  if (doc.contains("outputs")) {
    const Json& jo = doc["outputs"];
    detail::require_keys(jo, {"csv", "json"}, "outputs");
    if (jo.contains("csv")) cfg.outputs.csv = jo["csv"].get<std::string>();
    if (jo.contains("json")) cfg.outputs.json = jo["json"].get<std::string>();
  }
  if (doc.contains("state_index")) cfg.state_index = doc["state_index"].get<int>();
  if (doc.contains("l_max")) cfg.l_max = doc["l_max"].get<int>();
  if (doc.contains("pair")) {
    const Json& jp = doc["pair"];
    if (!jp.is_array() || jp.size() != 2) throw ConfigError("config: pair must be [y1, y2]");
    cfg.pair = {jp[0].get<int>(), jp[1].get<int>()};
  }
  if (doc.contains("omega_grid")) {
    const Json& jg = doc["omega_grid"];
    if (!jg.is_array()) throw ConfigError("config: omega_grid must be an array");
    for (const auto& v : jg) cfg.omega_grid.push_back(detail::as_number(v, "omega_grid entry"));
  }

  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config(const Json& doc) {
  try {
    return parse_config_impl(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(doc);
}

// Instantiate the model with the signed frequency of one circulation
// direction (which must not be `both`).
inline PeriodicHamiltonian build_hamiltonian(const ExperimentConfig& cfg, Direction dir) {
  if (dir == Direction::both)
    throw ConfigError("build_hamiltonian: a concrete direction is required");
  const double omega = (dir == Direction::cw) ? cfg.omega_abs : -cfg.omega_abs;
  if (cfg.use_preset) return preset(cfg.preset_model, omega);
  PeriodicHamiltonian h;
  h.h0 = cfg.explicit_h0;
  h.dim = static_cast<int>(cfg.explicit_h0.rows());
  h.drives = cfg.explicit_drives;
  h.omega = omega;
  h.validate();
  return h;
}

inline FrameMode frame_mode_for(const PeriodicHamiltonian& h) {
  return h.preset_name == "longhi3" ? FrameMode::analytic_longhi3 : FrameMode::numeric;
}

// ---------------------------------------------------------------------------
// Runners

struct SingleCycleResult {
  AdiabaticTrajectory trajectory;
  int init_index = 1;               // 1-based
  double return_fidelity = 0.0;     // |f_init(T)|^2
  double leakage = 0.0;             // max_{m != init} |f_m(T)|^2
  Direction direction = Direction::cw;
};

namespace detail {

inline std::vector<double> cycle_times(double period, int samples_per_cycle, long cycles = 1) {
  const long n = static_cast<long>(samples_per_cycle) * cycles;
  std::vector<double> times(static_cast<size_t>(n) + 1);
  for (long i = 0; i <= n; ++i)
    times[static_cast<size_t>(i)] = period * cycles * static_cast<double>(i) / static_cast<double>(n);
  return times;
}

inline std::pair<Vec, int> resolve_initial(const ExperimentConfig& cfg,
                                           const FrameSample& frame0) {
  if (cfg.initial.vector) {
    const Vec& a0 = *cfg.initial.vector;
    if (a0.size() != static_cast<Eigen::Index>(frame0.e.size()))
      throw ConfigError("initial vector has wrong dimension");
    // Nominal index: the dominant adiabatic component of the given vector.
    int best = 1;
    double best_val = -1.0;
    for (size_t k = 0; k < frame0.e.size(); ++k) {
      const double v =
          std::abs(binner(frame0.e_adj[k], a0) / binner(frame0.e_adj[k], frame0.e[k]));
      if (v > best_val) {
        best_val = v;
        best = static_cast<int>(k) + 1;
      }
    }
    return {a0, best};
  }
  const int n = cfg.initial.adiabatic_index;
  if (n < 1 || n > static_cast<int>(frame0.e.size()))
    throw ConfigError("initial.adiabatic_index out of range");
  return {frame0.e[static_cast<size_t>(n - 1)], n};
}

}  // namespace detail

inline SingleCycleResult run_single_cycle(const ExperimentConfig& cfg,
                                          Direction dir) {
  const PeriodicHamiltonian h = build_hamiltonian(cfg, dir);
  const double T = h.period();
  const std::vector<double> times = detail::cycle_times(T, cfg.samples_per_cycle, 1);
  const std::vector<FrameSample> frames = frame_along(h, times, frame_mode_for(h));

  auto [a0, init_index] = detail::resolve_initial(cfg, frames.front());
  const Trajectory traj =
      evolve(h, a0, {0.0, T}, static_cast<int>(times.size()), cfg.integrator);

  SingleCycleResult res;
  res.direction = dir;
  res.trajectory = project(traj, frames);
  res.init_index = init_index;
  const Vec& f_end = res.trajectory.amplitudes.back();
  res.return_fidelity = std::norm(f_end[init_index - 1]);
  res.leakage = 0.0;
  for (Eigen::Index k = 0; k < f_end.size(); ++k)
    if (k != init_index - 1) res.leakage = std::max(res.leakage, std::norm(f_end[k]));
  return res;
}

// Stroboscopic record of a multi-cycle run. Amplitudes are measured in the
// t = 0 frame gauge; the working state is rescaled to unit norm whenever its
// norm exceeds 1e6 (secular growth is polynomial), with the cumulative log
// factor recorded.
struct MultiCycleRecord {
  std::vector<double> t;                    // cycle boundaries, 0..cycles
  std::vector<Eigen::VectorXd> fn_sq;       // |f_n|^2 of the working state
  std::vector<double> log_scale;            // ln of cumulative rescale factor
  Vec final_state;
  double final_log_scale = 0.0;
};

inline MultiCycleRecord run_cycles(const PeriodicHamiltonian& h, const Vec& a0,
                                   long cycles, const IntegratorSettings& s,
                                   const FrameSample& frame0) {
  const double T = h.period();
  const size_t n = frame0.e.size();

  auto measure = [&](const Vec& state) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (size_t k = 0; k < n; ++k)
      out[static_cast<Eigen::Index>(k)] = std::norm(
          binner(frame0.e_adj[k], state) / binner(frame0.e_adj[k], frame0.e[k]));
    return out;
  };

  MultiCycleRecord rec;
  Vec state = a0;
  double log_scale = 0.0;
  rec.t.push_back(0.0);
  rec.fn_sq.push_back(measure(state));
  rec.log_scale.push_back(log_scale);

  for (long m = 1; m <= cycles; ++m) {
    // H(t) is T-periodic, so each cycle integrates over [0, T].
    state = evolve(h, state, {0.0, T}, 2, s).states.back();
    const double nrm = state.norm();
    if (!std::isfinite(nrm) || nrm > 1e300)
      throw NormOverflow("run_cycles: state norm overflow at cycle " + std::to_string(m));
    rec.t.push_back(T * static_cast<double>(m));
    rec.fn_sq.push_back(measure(state));
    rec.log_scale.push_back(log_scale);
    if (nrm > 1e6) {
      state /= nrm;
      log_scale += std::log(nrm);
    }
  }
  rec.final_state = state;
  rec.final_log_scale = log_scale;
  return rec;
}

// Normalized dominance fractions averaged over the trailing `window` cycle
// boundaries; sums to 1 exactly.
inline Eigen::VectorXd dominance_fractions(const MultiCycleRecord& rec, int window = 10) {
  const Eigen::Index n = rec.fn_sq.front().size();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  const size_t count = std::min<size_t>(static_cast<size_t>(window), rec.fn_sq.size());
  for (size_t i = rec.fn_sq.size() - count; i < rec.fn_sq.size(); ++i) {
    const double sum = rec.fn_sq[i].sum();
    if (sum > 0.0) acc += rec.fn_sq[i] / sum;
  }
  acc /= acc.sum();
  return acc;
}

struct ChiralityResult {
  int dominant_cw = 0;   // 1-based; 0 = undecided
  int dominant_ccw = 0;
  Eigen::VectorXd fractions_cw, fractions_ccw;
  bool chiral = false;
  EPReport ep_report;
  MultiCycleRecord record_cw, record_ccw;
  double dominance_threshold = 0.6;
};

inline ChiralityResult run_chirality(const ExperimentConfig& cfg) {
  if (cfg.direction != Direction::both)
    throw ConfigError("run_chirality: direction must be 'both'");

  ChiralityResult res;
  auto run_dir = [&](Direction dir, MultiCycleRecord& rec, Eigen::VectorXd& fractions,
                     int& dominant) {
    const PeriodicHamiltonian h = build_hamiltonian(cfg, dir);
    const std::vector<FrameSample> frame0 =
        frame_along(h, {0.0}, frame_mode_for(h));
    auto [a0, init_index] = detail::resolve_initial(cfg, frame0.front());
    (void)init_index;
    rec = run_cycles(h, a0, cfg.cycles, cfg.integrator, frame0.front());
    fractions = dominance_fractions(rec);
    Eigen::Index arg = 0;
    const double top = fractions.maxCoeff(&arg);
    dominant = (top >= res.dominance_threshold) ? static_cast<int>(arg) + 1 : 0;
  };
  run_dir(Direction::cw, res.record_cw, res.fractions_cw, res.dominant_cw);
  run_dir(Direction::ccw, res.record_ccw, res.fractions_ccw, res.dominant_ccw);

  const PeriodicHamiltonian h_cw = build_hamiltonian(cfg, Direction::cw);
  std::vector<double> lam;
  for (const double v : detail::h0_frame(h_cw).lambda) lam.push_back(v);
  res.ep_report = predict_ep(lam, h_cw.omega);

  res.chiral = res.dominant_cw != 0 && res.dominant_ccw != 0 &&
               res.dominant_cw != res.dominant_ccw;
  return res;
}

struct SweepRow {
  double omega_abs = 0.0;
  double max_im_mu = 0.0;
  double defectivity = 1.0;
  bool ep_flag = false;
  std::vector<std::vector<int>> subsets;
  std::vector<int> orders;
  int dominant_cw = 0;
  int dominant_ccw = 0;
  bool chiral = false;
  std::string error;  // empty on success
};

namespace detail {

inline SweepRow sweep_row(const ExperimentConfig& cfg, double omega_abs) {
  SweepRow row;
  row.omega_abs = omega_abs;
  ExperimentConfig local = cfg;
  local.omega_abs = omega_abs;
  local.direction = Direction::both;

  const PeriodicHamiltonian h = build_hamiltonian(local, Direction::cw);
  const Mat m = monodromy(h, local.integrator);
  const FloquetSpectrum sp = quasi_energies(m, h.omega);
  row.max_im_mu = sp.quasi_energies.imag().cwiseAbs().maxCoeff();
  row.defectivity = sp.defectivity;

  std::vector<double> lam = h0_frame(h).lambda;
  const EPReport ep = predict_ep(lam, h.omega);
  row.subsets = ep.subsets;
  row.orders = ep.orders;
  row.ep_flag = sp.defective && !ep.empty();

  const ChiralityResult ch = run_chirality(local);
  row.dominant_cw = ch.dominant_cw;
  row.dominant_ccw = ch.dominant_ccw;
  row.chiral = ch.chiral;
  return row;
}

}  // namespace detail

// Per-point resonance map. Rows are pure functions of (config, grid point);
// they are computed concurrently and merged in grid order. Failures are
// recorded per row and the sweep continues.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                       const std::vector<double>& omega_grid,
                                       bool parallel = true) {
  std::vector<SweepRow> rows(omega_grid.size());
  auto compute = [&](size_t i) {
    try {
      rows[i] = detail::sweep_row(cfg, omega_grid[i]);
    } catch (const std::exception& e) {
      rows[i] = SweepRow{};
      rows[i].omega_abs = omega_grid[i];
      rows[i].error = e.what();
    }
  };

  const unsigned hw = std::thread::hardware_concurrency();
  if (!parallel || hw <= 1 || omega_grid.size() <= 1) {
    for (size_t i = 0; i < omega_grid.size(); ++i) compute(i);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (size_t i = next.fetch_add(1); i < omega_grid.size(); i = next.fetch_add(1))
        compute(i);
    };
    std::vector<std::thread> pool;
    const unsigned count = std::min<unsigned>(hw, static_cast<unsigned>(omega_grid.size()));
    pool.reserve(count);
    for (unsigned k = 0; k < count; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Emission. All floats carry 15 significant digits; output is byte-stable for
// identical inputs.

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

// Trajectory CSV: header `t,f1_sq,...,fN_sq,norm_scale`, one row per sample.
inline void emit_trajectory_csv(const std::string& path, const std::vector<double>& t,
                                const std::vector<Eigen::VectorXd>& fn_sq,
                                const std::vector<double>& log_scale) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("emit: cannot open " + path);
  const Eigen::Index n = fn_sq.empty() ? 0 : fn_sq.front().size();
  out << "t";
  for (Eigen::Index k = 0; k < n; ++k) out << ",f" << (k + 1) << "_sq";
  out << ",norm_scale\n";
  for (size_t i = 0; i < t.size(); ++i) {
    out << format_double(t[i]);
    for (Eigen::Index k = 0; k < n; ++k) out << ',' << format_double(fn_sq[i][k]);
    out << ',' << format_double(log_scale.empty() ? 0.0 : log_scale[i]) << '\n';
  }
  if (!out) throw IoError("emit: write failed for " + path);
}

inline void emit_json(const std::string& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("emit: cannot open " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("emit: write failed for " + path);
}

inline Json complex_to_json(Cx v) { return Json::array({v.real(), v.imag()}); }

inline Json spectrum_to_json(const FloquetSpectrum& sp) {
  Json j;
  Json mus = Json::array();
  for (Eigen::Index i = 0; i < sp.quasi_energies.size(); ++i)
    mus.push_back(complex_to_json(sp.quasi_energies[i]));
  j["quasi_energies"] = mus;
  j["defectivity"] = sp.defectivity;
  j["defective"] = sp.defective;
  j["abs_det_monodromy"] = sp.abs_det_monodromy;
  j["eigenvector_condition"] = sp.condition;
  return j;
}

inline Json ep_report_to_json(const EPReport& ep) {
  Json j;
  j["subsets"] = ep.subsets;
  j["orders"] = ep.orders;
  j["dominant_cw"] = ep.dominant_cw;
  j["dominant_ccw"] = ep.dominant_ccw;
  Json table = Json::array();
  for (const auto& [pair, g] : ep.harmonic_table)
    table.push_back(Json{{"pair", Json::array({pair.first, pair.second})}, {"G", g}});
  j["harmonic_table"] = table;
  Json warn = Json::array();
  for (const auto& w : ep.warnings)
    warn.push_back(Json{{"pair", Json::array({w.i, w.j})},
                        {"harmonic", w.harmonic},
                        {"detune", w.detune}});
  j["near_resonance_warnings"] = warn;
  return j;
}

inline Json summary_skeleton(const ExperimentConfig& cfg) {
  Json j;
  j["tool"] = Json{{"name", kToolName}, {"version", kVersion}};
  j["config"] = cfg.echo;
  return j;
}

}  // namespace floqep

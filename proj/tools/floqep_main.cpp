// Command line front end.
//
// Subcommands: spectrum, evolve, chirality, eigenstate, generalized, sweep.
// Global flags: --config PATH (required), --out DIR, --seed (accepted and
// unused; runs are deterministic), --tol-scale FACTOR.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "floqep/experiments.hpp"
#include "floqep/floquet.hpp"
#include "floqep/version.hpp"

namespace {

using namespace floqep;

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = ".";
  long seed = 0;
  double tol_scale = 1.0;
};

std::string out_path(const GlobalOpts& g, const std::string& name) {
  std::filesystem::create_directories(g.out_dir);
  return (std::filesystem::path(g.out_dir) / name).string();
}

ExperimentConfig load(const GlobalOpts& g) {
  if (g.config_path.empty()) throw ConfigError("--config PATH is required");
  ExperimentConfig cfg = load_config(g.config_path);
  if (g.tol_scale != 1.0) {
    if (!(g.tol_scale > 0.0)) throw ConfigError("--tol-scale must be positive");
    cfg.integrator.rel_tol *= g.tol_scale;
    cfg.integrator.abs_tol *= g.tol_scale;
  }
  return cfg;
}

Direction concrete_direction(const ExperimentConfig& cfg) {
  if (cfg.direction == Direction::both)
    throw ConfigError("this subcommand needs direction cw or ccw");
  return cfg.direction;
}

Json fourier_state_to_json(const FourierFloquetState& st) {
  Json j;
  j["mu"] = complex_to_json(st.mu);
  j["omega"] = st.omega;
  j["l_min"] = st.l_min;
  j["l_max"] = st.l_max();
  j["seed_l"] = st.seed_l;
  j["residual_bound"] = st.residual_bound;
  Json coeffs = Json::array();
  for (int l = st.l_min; l <= st.l_max(); ++l) {
    Json entry;
    entry["l"] = l;
    Json v = Json::array();
    for (Eigen::Index i = 0; i < st.a(l).size(); ++i) v.push_back(complex_to_json(st.a(l)[i]));
    entry["a"] = v;
    coeffs.push_back(entry);
  }
  j["coeffs"] = coeffs;
  if (st.has_secular) {
    j["gamma"] = complex_to_json(st.gamma);
    Json bs = Json::array();
    for (size_t i = 0; i < st.secular_coeffs.size(); ++i) {
      Json entry;
      entry["l"] = st.b_l_min + static_cast<int>(i);
      Json v = Json::array();
      for (Eigen::Index r = 0; r < st.secular_coeffs[i].size(); ++r)
        v.push_back(complex_to_json(st.secular_coeffs[i][r]));
      entry["b"] = v;
      bs.push_back(entry);
    }
    j["secular_coeffs"] = bs;
  }
  return j;
}

int cmd_spectrum(const GlobalOpts& g) {
  ExperimentConfig cfg = load(g);
  const Direction dir = cfg.direction == Direction::both ? Direction::cw : cfg.direction;
  const PeriodicHamiltonian h = build_hamiltonian(cfg, dir);
  const Mat m = monodromy(h, cfg.integrator);
  const FloquetSpectrum sp = quasi_energies(m, h.omega);
  const EPReport ep = predict_ep(floqep::detail::h0_frame(h).lambda, h.omega);

  Json j = summary_skeleton(cfg);
  j["direction"] = to_string(dir);
  j["spectrum"] = spectrum_to_json(sp);
  j["ep_report"] = ep_report_to_json(ep);
  j["ep_flag"] = sp.defective && !ep.empty();
  emit_json(out_path(g, cfg.outputs.json.empty() ? "spectrum.json" : cfg.outputs.json), j);

  std::cout << "spectrum: omega=" << format_double(h.omega)
            << " max|Im mu|=" << format_double(sp.quasi_energies.imag().cwiseAbs().maxCoeff())
            << " defectivity=" << format_double(sp.defectivity)
            << " ep=" << ((sp.defective && !ep.empty()) ? "yes" : "no") << "\n";
  return 0;
}

int cmd_evolve(const GlobalOpts& g) {
  ExperimentConfig cfg = load(g);
  const Direction dir = concrete_direction(cfg);
  const PeriodicHamiltonian h = build_hamiltonian(cfg, dir);

  Json j = summary_skeleton(cfg);
  j["direction"] = to_string(dir);
  const Mat m = monodromy(h, cfg.integrator);
  const FloquetSpectrum sp = quasi_energies(m, h.omega);
  const EPReport ep = predict_ep(floqep::detail::h0_frame(h).lambda, h.omega);
  j["spectrum"] = spectrum_to_json(sp);
  j["ep_report"] = ep_report_to_json(ep);

  const std::string csv = out_path(g, cfg.outputs.csv.empty() ? "trajectory.csv" : cfg.outputs.csv);
  if (cfg.cycles == 1) {
    const SingleCycleResult res = run_single_cycle(cfg, dir);
    std::vector<Eigen::VectorXd> fn_sq;
    std::vector<double> lscale(res.trajectory.amplitudes.size(), 0.0);
    for (const Vec& f : res.trajectory.amplitudes)
      fn_sq.push_back(f.cwiseAbs2().real());
    emit_trajectory_csv(csv, res.trajectory.source.times, fn_sq, lscale);
    j["init_index"] = res.init_index;
    j["return_fidelity"] = res.return_fidelity;
    j["leakage"] = res.leakage;
    std::cout << "evolve: 1 cycle, return_fidelity="
              << format_double(res.return_fidelity)
              << " leakage=" << format_double(res.leakage) << "\n";
  } else {
    const std::vector<FrameSample> frame0 = frame_along(h, {0.0}, frame_mode_for(h));
    auto [a0, init_index] = floqep::detail::resolve_initial(cfg, frame0.front());
    const MultiCycleRecord rec = run_cycles(h, a0, cfg.cycles, cfg.integrator, frame0.front());
    emit_trajectory_csv(csv, rec.t, rec.fn_sq, rec.log_scale);
    const Eigen::VectorXd fr = dominance_fractions(rec);
    Json jf = Json::array();
    for (Eigen::Index i = 0; i < fr.size(); ++i) jf.push_back(fr[i]);
    j["init_index"] = init_index;
    j["dominance_fractions"] = jf;
    std::cout << "evolve: " << cfg.cycles << " cycles, final top fraction="
              << format_double(fr.maxCoeff()) << "\n";
  }
  emit_json(out_path(g, cfg.outputs.json.empty() ? "summary.json" : cfg.outputs.json), j);
  return 0;
}

int cmd_chirality(const GlobalOpts& g) {
  ExperimentConfig cfg = load(g);
  cfg.direction = Direction::both;
  const ChiralityResult res = run_chirality(cfg);

  const std::string base = cfg.outputs.csv.empty() ? "chirality" : cfg.outputs.csv;
  auto strip = [](std::string s) {
    const auto pos = s.rfind(".csv");
    return pos == std::string::npos ? s : s.substr(0, pos);
  };
  emit_trajectory_csv(out_path(g, strip(base) + "_cw.csv"), res.record_cw.t,
                      res.record_cw.fn_sq, res.record_cw.log_scale);
  emit_trajectory_csv(out_path(g, strip(base) + "_ccw.csv"), res.record_ccw.t,
                      res.record_ccw.fn_sq, res.record_ccw.log_scale);

  const PeriodicHamiltonian h = build_hamiltonian(cfg, Direction::cw);
  const Mat m = monodromy(h, cfg.integrator);
  const FloquetSpectrum sp = quasi_energies(m, h.omega);

  Json j = summary_skeleton(cfg);
  j["spectrum"] = spectrum_to_json(sp);
  j["ep_report"] = ep_report_to_json(res.ep_report);
  j["dominant_cw"] = res.dominant_cw;
  j["dominant_ccw"] = res.dominant_ccw;
  j["chiral"] = res.chiral;
  Json fcw = Json::array(), fccw = Json::array();
  for (Eigen::Index i = 0; i < res.fractions_cw.size(); ++i) fcw.push_back(res.fractions_cw[i]);
  for (Eigen::Index i = 0; i < res.fractions_ccw.size(); ++i) fccw.push_back(res.fractions_ccw[i]);
  j["dominance_fractions"] = Json{{"cw", fcw}, {"ccw", fccw}};
  emit_json(out_path(g, cfg.outputs.json.empty() ? "chirality.json" : cfg.outputs.json), j);

  std::cout << "chirality: dominant_cw=" << res.dominant_cw
            << " dominant_ccw=" << res.dominant_ccw
            << " chiral=" << (res.chiral ? "true" : "false") << "\n";
  return 0;
}

int cmd_eigenstate(const GlobalOpts& g) {
  ExperimentConfig cfg = load(g);
  const Direction dir = concrete_direction(cfg);
  const PeriodicHamiltonian h = build_hamiltonian(cfg, dir);
  if (cfg.state_index < 1) throw ConfigError("eigenstate: state_index (1-based) is required");

  FourierFloquetState st;
  try {
    st = build_floquet_state(h, cfg.state_index, cfg.l_max);
  } catch (const SingularMatrix& e) {
    std::cerr << "eigenstate collapses at a Floquet EP; use the generalized subcommand\n";
    throw;
  }

  Json j = summary_skeleton(cfg);
  j["direction"] = to_string(dir);
  j["state_index"] = cfg.state_index;
  j["state"] = fourier_state_to_json(st);
  emit_json(out_path(g, cfg.outputs.json.empty() ? "eigenstate.json" : cfg.outputs.json), j);

  std::cout << "eigenstate: n=" << cfg.state_index << " mu=" << format_double(st.mu.real())
            << (st.mu.imag() >= 0 ? "+" : "") << format_double(st.mu.imag()) << "i"
            << " residual=" << format_double(st.residual_bound) << "\n";
  return 0;
}

int cmd_generalized(const GlobalOpts& g) {
  ExperimentConfig cfg = load(g);
  const Direction dir = concrete_direction(cfg);
  const PeriodicHamiltonian h = build_hamiltonian(cfg, dir);
  if (cfg.pair[0] < 1 || cfg.pair[1] < 1)
    throw ConfigError("generalized: pair [y1, y2] (1-based) is required");

  const FourierFloquetState st = build_generalized_state(h, cfg.pair[0], cfg.pair[1], cfg.l_max);

  Json j = summary_skeleton(cfg);
  j["direction"] = to_string(dir);
  j["pair"] = Json::array({cfg.pair[0], cfg.pair[1]});
  j["state"] = fourier_state_to_json(st);
  emit_json(out_path(g, cfg.outputs.json.empty() ? "generalized.json" : cfg.outputs.json), j);

  std::cout << "generalized: pair=(" << cfg.pair[0] << "," << cfg.pair[1]
            << ") gamma=" << format_double(st.gamma.real())
            << (st.gamma.imag() >= 0 ? "+" : "") << format_double(st.gamma.imag()) << "i"
            << " residual=" << format_double(st.residual_bound) << "\n";
  return 0;
}

int cmd_sweep(const GlobalOpts& g) {
  ExperimentConfig cfg = load(g);
  if (cfg.omega_grid.empty() && !cfg.echo.contains("omega_grid"))
    throw ConfigError("sweep: omega_grid is required");
  const std::vector<SweepRow> rows = run_sweep(cfg, cfg.omega_grid);

  const std::string csv = out_path(g, cfg.outputs.csv.empty() ? "sweep.csv" : cfg.outputs.csv);
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw IoError("sweep: cannot open " + csv);
    out << "omega_abs,max_im_mu,defectivity,ep_flag,subset_count,dominant_cw,dominant_ccw,chiral,error\n";
    for (const auto& r : rows) {
      out << format_double(r.omega_abs) << ',' << format_double(r.max_im_mu) << ','
          << format_double(r.defectivity) << ',' << (r.ep_flag ? 1 : 0) << ','
          << r.subsets.size() << ',' << r.dominant_cw << ',' << r.dominant_ccw << ','
          << (r.chiral ? 1 : 0) << ',' << r.error << '\n';
    }
  }

  Json j = summary_skeleton(cfg);
  Json jr = Json::array();
  for (const auto& r : rows) {
    Json e;
    e["omega_abs"] = r.omega_abs;
    e["max_im_mu"] = r.max_im_mu;
    e["defectivity"] = r.defectivity;
    e["ep_flag"] = r.ep_flag;
    e["subsets"] = r.subsets;
    e["orders"] = r.orders;
    e["dominant_cw"] = r.dominant_cw;
    e["dominant_ccw"] = r.dominant_ccw;
    e["chiral"] = r.chiral;
    e["error"] = r.error;
    jr.push_back(e);
  }
  j["rows"] = jr;
  emit_json(out_path(g, cfg.outputs.json.empty() ? "sweep.json" : cfg.outputs.json), j);

  size_t flagged = 0;
  for (const auto& r : rows)
    if (r.ep_flag) ++flagged;
  std::cout << "sweep: " << rows.size() << " points, " << flagged << " EP-flagged\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet quasi-energy spectra, exceptional points and chiral cycling"};
  app.set_version_flag("--version", std::string(floqep::kVersion));

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON config path")->required(false);
  app.add_option("--out", g.out_dir, "output directory (default: current)");
  app.add_option("--seed", g.seed, "unused; runs are deterministic");
  app.add_option("--tol-scale", g.tol_scale, "multiply integrator tolerances by this factor");

  app.require_subcommand(1);
  auto* sc_spectrum = app.add_subcommand("spectrum", "quasi-energies and EP diagnostics");
  auto* sc_evolve = app.add_subcommand("evolve", "integrate and project a trajectory");
  auto* sc_chirality = app.add_subcommand("chirality", "multi-cycle run in both directions");
  auto* sc_eigenstate = app.add_subcommand("eigenstate", "Fourier-recursion Floquet eigenstate");
  auto* sc_generalized = app.add_subcommand("generalized", "secular state at an order-2 Floquet EP");
  auto* sc_sweep = app.add_subcommand("sweep", "resonance map over an omega grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sc_spectrum->parsed()) return cmd_spectrum(g);
    if (sc_evolve->parsed()) return cmd_evolve(g);
    if (sc_chirality->parsed()) return cmd_chirality(g);
    if (sc_eigenstate->parsed()) return cmd_eigenstate(g);
    if (sc_generalized->parsed()) return cmd_generalized(g);
    if (sc_sweep->parsed()) return cmd_sweep(g);
  } catch (const floqep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const floqep::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

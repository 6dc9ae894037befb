#pragma once

// Instantaneous eigenframe along the drive cycle, complex Berry phases, and
// biorthogonal projection of trajectories onto adiabatic amplitudes.
//
// The frame at time t consists of the eigenpairs H(t) e^(n) = s_n e^(n) and
// the adjoint pairs H^H(t) e^(n,adj) = conj(s_n) e^(n,adj), with
// <e^(n,adj) | e^(m)> = 0 for n != m. A trajectory a(t) decomposes as
//
//   a(t) = sum_n f_n(t) e^(n)(t) exp(-i int_0^t s_n)
//
// and the adiabatic approximation predicts f_n(t) = f_n(0) exp(-i phi_n(t))
// with the complex Berry phase
//
//   phi_n(t) = -i int_0^t <e^(n,adj)|de^(n)/dt> / <e^(n,adj)|e^(n)> dxi .
//
// Over a closed cycle that encircles no static EP, phi_n(T) = 0.
//
// Numeric frames compute eigenvector time-derivatives exactly at each sample
// by solving the differentiated eigenproblem (H - s) de = (sdot - dH/dt) e
// with a fixed pivot-coordinate gauge (the pivot entry of e^(n) is held at 1
// along the whole loop). Quadrature is the composite trapezoid on the sample
// grid, which is spectrally accurate for smooth periodic integrands.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "floqep/floquet.hpp"
#include "floqep/integrate.hpp"
#include "floqep/linalg.hpp"
#include "floqep/model.hpp"

namespace floqep {

enum class FrameMode { analytic_longhi3, numeric };

struct FrameSample {
  double t = 0.0;
  Vec sigma;                 // instantaneous eigenvalues
  std::vector<Vec> e;        // right eigenvectors, pivot-entry-1 gauge
  std::vector<Vec> e_adj;    // adjoint eigenvectors (scale enters only via ratios)
  std::vector<Vec> e_dot;    // exact d e^(n)/dt in the same gauge
  Vec phase_accum;           // int_0^t sigma_n
  Vec berry_accum;           // phi_n(t)

  Cx berry_integrand(int n) const {
    return binner(e_adj[static_cast<size_t>(n)], e_dot[static_cast<size_t>(n)]) /
           binner(e_adj[static_cast<size_t>(n)], e[static_cast<size_t>(n)]);
  }
};

namespace detail {

// One numeric frame sample: eigen-decompose H(t), order states to follow the
// previous sample (max biorthogonal overlap), regauge to pivot-entry 1, and
// attach exact eigenvector derivatives.
struct NumericFrameBuilder {
  const PeriodicHamiltonian& h;
  double gap_tol;
  std::vector<Eigen::Index> pivots;  // per state, fixed at the first sample

  explicit NumericFrameBuilder(const PeriodicHamiltonian& ham, double gap_tol_rel)
      : h(ham), gap_tol(gap_tol_rel) {}

  FrameSample raw_sample(double t) const {
    const Mat ht = assemble(h, t);
    EigenDecomposition ed = eig(ht);
    const Eigen::Index n = ed.dim();

    double max_sigma = ed.values.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (std::abs(ed.values[i] - ed.values[j]) < gap_tol * std::max(max_sigma, 1e-300))
          throw GapCollapse("frame_along: instantaneous gap collapse at t=" +
                            std::to_string(t));

    FrameSample fs;
    fs.t = t;
    fs.sigma = ed.values;
    fs.e = ed.right_vectors;
    fs.e_adj = ed.left_vectors;
    return fs;
  }

  // Permutation matching prev -> cur by |<e_adj_prev | e_cur>|. Returns false
  // when the assignment is ambiguous (top two overlaps within 1%).
  static bool match_order(const FrameSample& prev, FrameSample& cur) {
    const size_t n = prev.e.size();
    std::vector<size_t> perm(n, SIZE_MAX);
    std::vector<bool> used(n, false);
    for (size_t p = 0; p < n; ++p) {
      double best = -1.0, second = -1.0;
      size_t arg = 0;
      for (size_t c = 0; c < n; ++c) {
        const double ov = std::abs(binner(prev.e_adj[p], cur.e[c])) /
                          (prev.e_adj[p].norm() * cur.e[c].norm());
        if (ov > best) {
          second = best;
          best = ov;
          arg = c;
        } else if (ov > second) {
          second = ov;
        }
      }
      if (best <= 0.0 || (second > 0.0 && second / best > 0.99)) return false;
      if (used[arg]) return false;
      used[arg] = true;
      perm[p] = arg;
    }
    FrameSample out;
    out.t = cur.t;
    out.sigma.resize(static_cast<Eigen::Index>(n));
    out.e.resize(n);
    out.e_adj.resize(n);
    for (size_t p = 0; p < n; ++p) {
      out.sigma[static_cast<Eigen::Index>(p)] = cur.sigma[static_cast<Eigen::Index>(perm[p])];
      out.e[p] = cur.e[perm[p]];
      out.e_adj[p] = cur.e_adj[perm[p]];
    }
    cur = std::move(out);
    return true;
  }

  // Follow the frame from prev (already gauged) to time t, bisecting when the
  // matching is ambiguous. Depth-limited; deeper ambiguity means the sampling
  // is too coarse.
  FrameSample continue_to(const FrameSample& prev, double t, int depth = 0) const {
    FrameSample cur = raw_sample(t);
    if (!match_order(prev, cur)) {
      if (depth >= 4)
        throw AmbiguousMatching("frame_along: state matching ambiguous near t=" +
                                std::to_string(t));
      const FrameSample mid = continue_to(prev, 0.5 * (prev.t + t), depth + 1);
      return continue_to(mid, t, depth + 1);
    }
    finish_sample(cur);
    return cur;
  }

  // Regauge to pivot-entry 1 and attach exact derivatives.
  void finish_sample(FrameSample& fs) const {
    const Mat ht = assemble(h, fs.t);
    const Mat hdot = assemble_dot(h, fs.t);
    const size_t n = fs.e.size();
    fs.e_dot.resize(n);
    for (size_t k = 0; k < n; ++k) {
      const Eigen::Index piv = pivots[k];
      if (std::abs(fs.e[k][piv]) < 1e-8 * fs.e[k].norm())
        throw VanishingNorm("frame_along: pivot entry collapsed for state " +
                            std::to_string(k + 1));
      fs.e[k] /= fs.e[k][piv];

      const Cx sigma = fs.sigma[static_cast<Eigen::Index>(k)];
      const Cx den = binner(fs.e_adj[k], fs.e[k]);
      if (std::abs(den) < 1e-12 * fs.e_adj[k].norm() * fs.e[k].norm())
        throw VanishingNorm("frame_along: biorthogonal norm vanishes (static EP?)");
      const Cx sigma_dot = binner(fs.e_adj[k], (hdot * fs.e[k]).eval()) / den;
      const Vec rhs = sigma_dot * fs.e[k] - hdot * fs.e[k];
      const Mat a = ht - sigma * Mat::Identity(ht.rows(), ht.cols());
      Vec v = solve_singular(a, rhs, fs.e_adj[k], fs.e[k]);
      v -= v[piv] * fs.e[k];  // pivot entry of the derivative stays 0
      fs.e_dot[k] = v;
    }
  }

  FrameSample first_sample(double t) {
    FrameSample fs = raw_sample(t);
    pivots.clear();
    for (const Vec& v : fs.e) pivots.push_back(leading_entry(v));
    finish_sample(fs);
    return fs;
  }
};

inline FrameSample analytic_longhi3_sample(const PeriodicHamiltonian& h, double t) {
  const double Omega = h.preset_params.at("Omega");
  const double R0 = h.preset_params.at("R0");
  const Cx R = R0 * std::exp(Cx(0.0, h.omega * t));
  const Cx Rdot = R0 * Cx(0.0, h.omega) * std::exp(Cx(0.0, h.omega * t));
  const Longhi3Frame lf = analytic_frame_longhi3(Omega, R);

  FrameSample fs;
  fs.t = t;
  fs.sigma.resize(3);
  fs.e.resize(3);
  fs.e_adj.resize(3);
  fs.e_dot.resize(3);
  for (int n = 0; n < 3; ++n) {
    fs.sigma[n] = lf.sigma[static_cast<size_t>(n)];
    fs.e[static_cast<size_t>(n)] = lf.e[static_cast<size_t>(n)];
    fs.e_adj[static_cast<size_t>(n)] = lf.e_adj[static_cast<size_t>(n)];
    Vec d = Vec::Zero(3);
    d[2] = -Rdot;  // only the third entry carries the drive
    fs.e_dot[static_cast<size_t>(n)] = d;
  }
  return fs;
}

}  // namespace detail

// Sample the instantaneous eigenframe at the given times and accumulate the
// dynamical and Berry phases by the trapezoid rule on that grid.
inline std::vector<FrameSample> frame_along(const PeriodicHamiltonian& h,
                                            const std::vector<double>& times,
                                            FrameMode mode,
                                            double gap_tol_rel = 1e-6) {
  h.validate();
  if (times.empty()) throw BadSpan("frame_along: no sample times");

  std::vector<FrameSample> frames;
  frames.reserve(times.size());

  if (mode == FrameMode::analytic_longhi3) {
    if (h.preset_name != "longhi3")
      throw ParameterOutOfRange("frame_along: analytic mode requires the longhi3 preset");
    for (double t : times) frames.push_back(detail::analytic_longhi3_sample(h, t));
  } else {
    detail::NumericFrameBuilder builder(h, gap_tol_rel);
    frames.push_back(builder.first_sample(times.front()));
    for (size_t i = 1; i < times.size(); ++i)
      frames.push_back(builder.continue_to(frames.back(), times[i]));
  }

  const Eigen::Index n = frames.front().sigma.size();
  frames.front().phase_accum = Vec::Zero(n);
  frames.front().berry_accum = Vec::Zero(n);
  for (size_t i = 1; i < frames.size(); ++i) {
    const double dt = frames[i].t - frames[i - 1].t;
    frames[i].phase_accum = frames[i - 1].phase_accum;
    frames[i].berry_accum = frames[i - 1].berry_accum;
    for (Eigen::Index k = 0; k < n; ++k) {
      frames[i].phase_accum[k] +=
          0.5 * dt * (frames[i - 1].sigma[k] + frames[i].sigma[k]);
      const Cx g0 = frames[i - 1].berry_integrand(static_cast<int>(k));
      const Cx g1 = frames[i].berry_integrand(static_cast<int>(k));
      frames[i].berry_accum[k] += Cx(0.0, -1.0) * 0.5 * dt * (g0 + g1);
    }
  }
  return frames;
}

// Time average of the instantaneous eigenvalues over exactly one period;
// equals the eigenvalues of H0 for the one-sided drive family.
inline Vec mean_sigma(const std::vector<FrameSample>& frames, double period) {
  if (frames.size() < 2) throw BadSpan("mean_sigma: need at least two samples");
  const double span = frames.back().t - frames.front().t;
  if (std::abs(span - period) > 1e-9 * period)
    throw BadSpan("mean_sigma: samples must span exactly one period");
  const Eigen::Index n = frames.front().sigma.size();
  Vec acc = Vec::Zero(n);
  for (size_t i = 1; i < frames.size(); ++i) {
    const double dt = frames[i].t - frames[i - 1].t;
    acc += 0.5 * dt * (frames[i - 1].sigma + frames[i].sigma);
  }
  return acc / period;
}

// Accumulated complex Berry phase phi_n at the final sample (1-based n).
inline Cx berry_phase(const std::vector<FrameSample>& frames, int n) {
  if (frames.empty()) throw BadSpan("berry_phase: no frames");
  const Eigen::Index dim = frames.front().sigma.size();
  if (n < 1 || n > dim) throw ParameterOutOfRange("berry_phase: index out of range");
  return frames.back().berry_accum[n - 1];
}

struct AdiabaticTrajectory {
  std::vector<FrameSample> frames;
  std::vector<Vec> amplitudes;  // f_n(t_i), one vector per sample
  Trajectory source;
};

// Biorthogonal projection of a trajectory onto the instantaneous frame:
// f_n(t) = <e_adj | a> / <e_adj | e> * exp(+i int sigma_n).
inline AdiabaticTrajectory project(const Trajectory& traj,
                                   const std::vector<FrameSample>& frames) {
  if (traj.times.size() != frames.size())
    throw LengthMismatch("project: trajectory and frames sample counts differ");
  const double scale = std::abs(traj.times.back() - traj.times.front()) + 1e-300;
  for (size_t i = 0; i < frames.size(); ++i)
    if (std::abs(traj.times[i] - frames[i].t) > 1e-9 * scale)
      throw BadSpan("project: sample times misaligned at index " + std::to_string(i));

  AdiabaticTrajectory out;
  out.frames = frames;
  out.source = traj;
  out.amplitudes.reserve(frames.size());
  const size_t n = frames.front().e.size();
  for (size_t i = 0; i < frames.size(); ++i) {
    Vec f(static_cast<Eigen::Index>(n));
    for (size_t k = 0; k < n; ++k) {
      const Cx den = binner(frames[i].e_adj[k], frames[i].e[k]);
      if (std::abs(den) < 1e-12 * frames[i].e_adj[k].norm() * frames[i].e[k].norm())
        throw VanishingNorm("project: biorthogonal norm vanishes");
      const Cx raw = binner(frames[i].e_adj[k], traj.states[i]) / den;
      f[static_cast<Eigen::Index>(k)] =
          raw * std::exp(Cx(0.0, 1.0) * frames[i].phase_accum[static_cast<Eigen::Index>(k)]);
    }
    out.amplitudes.push_back(std::move(f));
  }
  return out;
}

// Closed-form adiabatic (rotating-wave) prediction for the longhi3 model:
// f_n(t) = f_n(0) exp(-i phi_n(t)) with
// phi_1 = phi_3 = -phi_2/2 = i (R(t) - R(0)) / (2 Omega^2).
inline std::vector<std::array<Cx, 3>> rwa_predict_longhi3(double Omega, double R0,
                                                          double omega,
                                                          const std::array<Cx, 3>& f0,
                                                          const std::vector<double>& times) {
  if (!(Omega > 0.0)) throw ParameterOutOfRange("rwa_predict_longhi3: Omega must be > 0");
  std::vector<std::array<Cx, 3>> out;
  out.reserve(times.size());
  for (double t : times) {
    const Cx R = R0 * std::exp(Cx(0.0, omega * t));
    const Cx phi1 = Cx(0.0, 1.0) * (R - R0) / (2.0 * Omega * Omega);
    const std::array<Cx, 3> phi = {phi1, -2.0 * phi1, phi1};
    std::array<Cx, 3> f;
    for (int k = 0; k < 3; ++k)
      f[static_cast<size_t>(k)] =
          f0[static_cast<size_t>(k)] * std::exp(Cx(0.0, -1.0) * phi[static_cast<size_t>(k)]);
    out.push_back(f);
  }
  return out;
}

// Exact amplitude equations of the longhi3 model in the instantaneous basis:
//   df1/dt =  (Rdot/2O^2) [ f1 + f2 e^{-iOt} + f3 e^{-2iOt} ]
//   df2/dt = -(Rdot/O^2)  [ f1 e^{+iOt} + f2 + f3 e^{-iOt} ]
//   df3/dt =  (Rdot/2O^2) [ f1 e^{+2iOt} + f2 e^{+iOt} + f3 ]
// with Rdot = i w R0 e^{iwt}.
inline std::array<Cx, 3> exact_amplitude_rhs_longhi3(double Omega, double R0, double omega,
                                                     double t, const std::array<Cx, 3>& f) {
  if (!(Omega > 0.0))
    throw ParameterOutOfRange("exact_amplitude_rhs_longhi3: Omega must be > 0");
  const Cx rdot = Cx(0.0, omega) * R0 * std::exp(Cx(0.0, omega * t));
  const double o2 = Omega * Omega;
  const Cx em = std::exp(Cx(0.0, -Omega * t));
  const Cx ep = std::exp(Cx(0.0, Omega * t));
  std::array<Cx, 3> d;
  d[0] = rdot / (2.0 * o2) * (f[0] + f[1] * em + f[2] * em * em);
  d[1] = -rdot / o2 * (f[0] * ep + f[1] + f[2] * em);
  d[2] = rdot / (2.0 * o2) * (f[0] * ep * ep + f[1] * ep + f[2]);
  return d;
}

}  // namespace floqep

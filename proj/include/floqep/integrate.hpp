#pragma once

// Adaptive Dormand-Prince 5(4) integration of i da/dt = H(t) a with dense
// output at requested sample times (step-to-boundary: the integrator lands on
// each sample exactly) and monodromy construction over one period.
//
// No renormalization happens inside the integrator; solutions at a Floquet EP
// grow polynomially and consumers rescale as needed.

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "floqep/linalg.hpp"
#include "floqep/model.hpp"

namespace floqep {

struct IntegratorSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.1;      // fraction of the reference span (period T)
  double initial_step = 0.0;  // absolute; 0 selects automatically

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw ParameterOutOfRange("IntegratorSettings: tolerances must be positive");
    if (!(max_step > 0.0) || max_step > 1.0)
      throw ParameterOutOfRange("IntegratorSettings: need 0 < max_step <= 1");
  }
};

struct Trajectory {
  std::vector<double> times;   // strictly monotone; includes both endpoints
  std::vector<Vec> states;
  long step_count = 0;
  double max_local_error_estimate = 0.0;  // relative to tolerance, <= 1 when accepted
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kA[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr double kB5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                                  -2187.0 / 6784,  11.0 / 84,  0.0};
inline constexpr double kB4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                  -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

}  // namespace detail

// Integrate dy/dt = rhs(t, y) from t0 to t1 (either direction), recording the
// solution at `samples` uniformly spaced times including both endpoints.
// `max_step_abs` caps |h|; pass the period-derived cap from the caller.
template <class Rhs>
Trajectory integrate_adaptive(Rhs&& rhs, const Vec& y0, double t0, double t1,
                              int samples, const IntegratorSettings& s,
                              double max_step_abs) {
  s.validate();
  if (samples < 2) throw ParameterOutOfRange("integrate_adaptive: need samples >= 2");
  if (!(max_step_abs > 0.0))
    throw ParameterOutOfRange("integrate_adaptive: max_step_abs must be positive");
  const double span = t1 - t0;
  if (span == 0.0) throw BadSpan("integrate_adaptive: empty time span");
  const double dir = span > 0.0 ? 1.0 : -1.0;

  Trajectory traj;
  traj.times.reserve(static_cast<size_t>(samples));
  traj.states.reserve(static_cast<size_t>(samples));

  std::vector<double> targets(static_cast<size_t>(samples));
  for (int i = 0; i < samples; ++i)
    targets[static_cast<size_t>(i)] = t0 + span * static_cast<double>(i) / (samples - 1);
  targets.back() = t1;

  const Eigen::Index n = y0.size();
  Vec y = y0, ynew(n), yerr(n);
  std::array<Vec, 7> k;
  for (auto& ki : k) ki.resize(n);
  Vec stage(n);

  double t = t0;
  double h = s.initial_step > 0.0 ? s.initial_step : std::abs(span) * 1e-4;
  h = std::min(h, max_step_abs);

  size_t next_target = 0;
  traj.times.push_back(t);
  traj.states.push_back(y);
  ++next_target;

  const double h_floor = 1e-14 * std::abs(span);
  while (next_target < targets.size()) {
    const double remaining = targets.back() - t;
    if (h > std::abs(remaining)) h = std::abs(remaining);
    // Land exactly on the next sample time.
    bool hit_target = false;
    double h_try = h;
    if (std::abs(targets[next_target] - t) <= h_try) {
      h_try = std::abs(targets[next_target] - t);
      hit_target = true;
    }
    if (h_try < h_floor) throw StepSizeUnderflow("integrate_adaptive: step underflow");

    const double hs = dir * h_try;
    rhs(t, y, k[0]);
    for (int i = 1; i < 7; ++i) {
      stage = y;
      for (int j = 0; j < i; ++j)
        if (detail::kA[i][j] != 0.0) stage += (hs * detail::kA[i][j]) * k[j];
      rhs(t + detail::kC[i] * hs, stage, k[i]);
    }
    ynew = y;
    yerr.setZero();
    for (int i = 0; i < 7; ++i) {
      if (detail::kB5[i] != 0.0) ynew += (hs * detail::kB5[i]) * k[i];
      const double db = detail::kB5[i] - detail::kB4[i];
      if (db != 0.0) yerr += (hs * db) * k[i];
    }
    if (!is_finite(ynew)) throw NonFiniteState("integrate_adaptive: non-finite state");

    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = s.abs_tol + s.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double e = std::abs(yerr[i]) / sc;
      err += e * e;
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (err <= 1.0) {
      t = hit_target ? targets[next_target] : t + hs;
      y.swap(ynew);
      ++traj.step_count;
      traj.max_local_error_estimate = std::max(traj.max_local_error_estimate, err);
      if (hit_target) {
        traj.times.push_back(t);
        traj.states.push_back(y);
        ++next_target;
      }
    }
    double fac = 0.2;
    if (err == 0.0)
      fac = 5.0;
    else if (std::isfinite(err))
      fac = 0.9 * std::pow(err, -0.2);
    h = h_try * std::clamp(fac, 0.2, 5.0);
    h = std::min(h, max_step_abs);
    if (h < h_floor && next_target < targets.size())
      throw StepSizeUnderflow("integrate_adaptive: step underflow after rejection");
  }
  return traj;
}

// Right-hand side of i da/dt = H(t) a, i.e. da/dt = -i H(t) a, evaluated
// without materializing H(t).
struct SchrodingerRhs {
  const PeriodicHamiltonian& h;
  mutable Vec tmp;

  explicit SchrodingerRhs(const PeriodicHamiltonian& ham) : h(ham), tmp(ham.dim) {}

  void operator()(double t, const Vec& y, Vec& dydt) const {
    tmp.noalias() = h.h0 * y;
    for (const auto& d : h.drives) tmp.noalias() += d.amplitude(t, h.omega) * (d.matrix * y);
    dydt = Cx(0.0, -1.0) * tmp;
  }
};

// Evolve i da/dt = H(t) a over t_span with `samples` recorded states.
inline Trajectory evolve(const PeriodicHamiltonian& h, const Vec& a0,
                         std::pair<double, double> t_span, int samples,
                         const IntegratorSettings& s = {}) {
  h.validate();
  if (a0.size() != h.dim) throw LengthMismatch("evolve: initial state has wrong length");
  if (!is_finite(a0)) throw NonFiniteState("evolve: non-finite initial state");
  SchrodingerRhs rhs(h);
  return integrate_adaptive(rhs, a0, t_span.first, t_span.second, samples, s,
                            s.max_step * h.period());
}

// One-period propagator M: column j is the solution at t = T started from the
// j-th unit vector. Its eigenvalues are exp(-i mu_n T).
inline Mat monodromy(const PeriodicHamiltonian& h, const IntegratorSettings& s = {}) {
  h.validate();
  const double T = h.period();
  Mat m(h.dim, h.dim);
  for (int j = 0; j < h.dim; ++j) {
    Vec e = Vec::Zero(h.dim);
    e[j] = 1.0;
    m.col(j) = evolve(h, e, {0.0, T}, 2, s).states.back();
  }
  return m;
}

}  // namespace floqep

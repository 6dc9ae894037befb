#pragma once

// Time-periodic non-Hermitian Hamiltonian families
//
//   H(t) = H0 + sum_k R_k(t) H_k,   R_k(t) = sum_{n>=1} c_{k,n} exp(i n w t)
//
// The drive spectrum is one-sided (positive harmonics only); the sign of w
// carries the circulation direction of the parameter loop (w > 0 clockwise,
// w < 0 counter-clockwise). Two builtin presets:
//
//   longhi3  N=3 cascade with R-independent instantaneous spectrum (-O, 0, O)
//   sqrt2    N=2 model with instantaneous spectrum +-sqrt(O^2 + R(t)); the
//            branch point R = -O^2 must stay outside the drive loop

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "floqep/linalg.hpp"

namespace floqep {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct DriveTerm {
  Mat matrix;                    // coupling H_k
  std::map<int, Cx> harmonics;   // n >= 1 -> coefficient c_{k,n}

  void validate(Eigen::Index dim) const {
    if (matrix.rows() != dim || matrix.cols() != dim)
      throw LengthMismatch("DriveTerm: matrix dimension mismatch");
    if (harmonics.empty()) throw ParameterOutOfRange("DriveTerm: no harmonics");
    bool nonzero = false;
    for (const auto& [n, c] : harmonics) {
      if (n < 1) throw ParameterOutOfRange("DriveTerm: harmonic index must be >= 1");
      if (std::abs(c) > 0.0) nonzero = true;
    }
    if (!nonzero) throw ParameterOutOfRange("DriveTerm: all coefficients zero");
  }

  // R_k(t) and its time derivative.
  Cx amplitude(double t, double omega) const {
    Cx r = 0.0;
    for (const auto& [n, c] : harmonics) r += c * std::exp(Cx(0.0, n * omega * t));
    return r;
  }
  Cx amplitude_dot(double t, double omega) const {
    Cx r = 0.0;
    for (const auto& [n, c] : harmonics)
      r += c * Cx(0.0, n * omega) * std::exp(Cx(0.0, n * omega * t));
    return r;
  }
};

struct PeriodicHamiltonian {
  Mat h0;
  std::vector<DriveTerm> drives;
  double omega = 0.0;  // signed; |omega| sets the period
  int dim = 0;

  // Preset provenance, when built by preset(); enables analytic frames.
  std::string preset_name;
  std::map<std::string, double> preset_params;

  double period() const { return kTwoPi / std::abs(omega); }

  void validate() const {
    if (omega == 0.0) throw ParameterOutOfRange("PeriodicHamiltonian: omega must be nonzero");
    if (h0.rows() != dim || h0.cols() != dim)
      throw NotSquare("PeriodicHamiltonian: h0 dimension mismatch");
    if (!is_finite(h0)) throw NumericError("PeriodicHamiltonian: non-finite h0");
    for (const auto& d : drives) d.validate(dim);
  }
};

// H(t) = H0 + sum_k R_k(t) H_k. Periodic in t with period 2*pi/|omega| by
// construction.
inline Mat assemble(const PeriodicHamiltonian& h, double t) {
  if (!std::isfinite(t)) throw NumericError("assemble: non-finite time");
  Mat out = h.h0;
  for (const auto& d : h.drives) out += d.amplitude(t, h.omega) * d.matrix;
  return out;
}

// dH/dt, available in closed form from the drive spectrum.
inline Mat assemble_dot(const PeriodicHamiltonian& h, double t) {
  Mat out = Mat::Zero(h.dim, h.dim);
  for (const auto& d : h.drives) out += d.amplitude_dot(t, h.omega) * d.matrix;
  return out;
}

// One-sided Fourier blocks S^(k) with H(t) - H0 = sum_k S^(k) exp(i k w t).
inline std::map<int, Mat> fourier_blocks(const PeriodicHamiltonian& h) {
  std::map<int, Mat> blocks;
  for (const auto& d : h.drives)
    for (const auto& [n, c] : d.harmonics) {
      auto it = blocks.find(n);
      if (it == blocks.end())
        blocks.emplace(n, (c * d.matrix).eval());
      else
        it->second += c * d.matrix;
    }
  return blocks;
}

struct ModelPreset {
  std::string name;
  std::map<std::string, double> parameters;

  double param_or(const std::string& key, double fallback) const {
    auto it = parameters.find(key);
    return it == parameters.end() ? fallback : it->second;
  }
};

// Builtin models. longhi3:
//
//        ( 0      1    0 )        ( 0  0  0 )
//   H0 = ( O^2/2  0    1 ) , H1 = ( 1  0  0 ) ,  R(t) = R0 exp(i w t)
//        ( 0    O^2/2  0 )        ( 0 -1  0 )
//
// with H0 eigenvalues (-O, 0, O). sqrt2: H0 = [[0,1],[O^2,0]],
// H1 = [[0,0],[1,0]], same single-harmonic drive; H0 eigenvalues (-O, O).
inline PeriodicHamiltonian preset(const ModelPreset& p, double omega) {
  const double Omega = p.param_or("Omega", 1.0);
  const double R0 = p.param_or("R0", 0.2);
  if (!(Omega > 0.0)) throw ParameterOutOfRange("preset: Omega must be > 0");
  if (omega == 0.0) throw ParameterOutOfRange("preset: omega must be nonzero");
  for (const auto& [key, value] : p.parameters) {
    (void)value;
    if (key != "Omega" && key != "R0")
      throw ParameterOutOfRange("preset: unknown parameter '" + key + "'");
  }

  PeriodicHamiltonian h;
  h.omega = omega;
  h.preset_name = p.name;
  h.preset_params = {{"Omega", Omega}, {"R0", R0}};

  if (p.name == "longhi3") {
    h.dim = 3;
    h.h0 = Mat::Zero(3, 3);
    h.h0(0, 1) = 1.0;
    h.h0(1, 0) = Omega * Omega / 2.0;
    h.h0(1, 2) = 1.0;
    h.h0(2, 1) = Omega * Omega / 2.0;
    Mat h1 = Mat::Zero(3, 3);
    h1(1, 0) = 1.0;
    h1(2, 1) = -1.0;
    if (R0 != 0.0) h.drives.push_back(DriveTerm{h1, {{1, Cx(R0, 0.0)}}});
  } else if (p.name == "sqrt2") {
    if (!(std::abs(R0) < Omega * Omega))
      throw ParameterOutOfRange("preset sqrt2: need |R0| < Omega^2");
    h.dim = 2;
    h.h0 = Mat::Zero(2, 2);
    h.h0(0, 1) = 1.0;
    h.h0(1, 0) = Omega * Omega;
    Mat h1 = Mat::Zero(2, 2);
    h1(1, 0) = 1.0;
    if (R0 != 0.0) h.drives.push_back(DriveTerm{h1, {{1, Cx(R0, 0.0)}}});
  } else {
    throw UnknownPreset("preset: unknown model '" + p.name + "'");
  }
  h.validate();
  return h;
}

// Closed-form instantaneous eigenframe of the longhi3 model at drive value R.
// Eigenvalues are (-O, 0, O) independent of R; eigenvectors and adjoint
// eigenvectors are returned in the model's unnormalized gauge (first entry 1
// for the rights, last entry 1 for the adjoints).
struct Longhi3Frame {
  std::array<double, 3> sigma;
  std::array<Vec, 3> e;
  std::array<Vec, 3> e_adj;
};

inline Longhi3Frame analytic_frame_longhi3(double Omega, Cx R) {
  if (!(Omega > 0.0)) throw ParameterOutOfRange("analytic_frame_longhi3: Omega must be > 0");
  const double o2 = Omega * Omega / 2.0;
  Longhi3Frame f;
  f.sigma = {-Omega, 0.0, Omega};
  for (int n = 0; n < 3; ++n) {
    f.e[n] = Vec(3);
    f.e_adj[n] = Vec(3);
  }
  f.e[0] << 1.0, -Omega, o2 - R;
  f.e[1] << 1.0, 0.0, -o2 - R;
  f.e[2] << 1.0, Omega, o2 - R;
  f.e_adj[0] << o2 + std::conj(R), -Omega, 1.0;
  f.e_adj[1] << -o2 + std::conj(R), 0.0, 1.0;
  f.e_adj[2] << o2 + std::conj(R), Omega, 1.0;
  return f;
}

}  // namespace floqep

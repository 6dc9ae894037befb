#pragma once

// Quasi-energy extraction, Floquet exceptional-point prediction and
// detection, and construction of (generalized) Floquet eigenstates for the
// one-sided drive family H(t) = H0 + sum_k S^(k) exp(i k w t).
//
// A Floquet eigenstate is sought as
//
//   f(t) = exp(-i mu t) sum_l a^(l) exp(i l w t)
//
// which turns the equation of motion into the one-sided recursion
//
//   (mu - l w - H0) a^(l) = sum_{k>=1} S^(k) a^(l-k)
//
// solvable upward in l from the seed a^(0) = w^(n) (eigenvector of H0) with
// mu = lambda_n. The recursion matrix goes singular exactly when two H0
// eigenvalues differ by an integer multiple of w (a multi-photon resonance):
// the quasi-energies then coalesce together with their eigenstates and the
// propagator acquires a defective (exceptional) quasi-energy. Which branch
// survives depends on the drive direction: the lowest eigenvalue of the
// resonant subset for w > 0, the highest for w < 0.
//
// At an order-2 resonance the missing basis member carries a secular term,
//
//   F(t) = exp(-i mu t) sum_l (a^(l) + gamma t b^(l)) exp(i l w t)
//
// where the b^(l) are the Fourier coefficients of the surviving eigenstate,
// the a-chain is seeded with the collapsing eigenvector at l = -G (G the
// resonance harmonic), and gamma is fixed by the solvability condition of the
// singular l = 0 block.

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "floqep/integrate.hpp"
#include "floqep/linalg.hpp"
#include "floqep/model.hpp"

namespace floqep {

inline constexpr double kEpsResonance = 1e-9;   // resonance detector, units of w
inline constexpr double kNearResonance = 1e-3;  // warning band, units of w
inline constexpr double kDefectivityFlag = 1e-4;
inline constexpr double kTruncTol = 1e-10;
inline constexpr int kLMaxCap = 512;

// Fold a real eigenvalue into the principal quasi-energy interval
// [-|w|/2, |w|/2) (half-open; the lower boundary is included).
inline double fold(double lambda, double omega) {
  if (omega == 0.0) throw ParameterOutOfRange("fold: omega must be nonzero");
  const double w = std::abs(omega);
  const double s = std::floor(lambda / w + 0.5);
  double out = lambda - s * w;
  if (out >= w / 2.0) out -= w;   // guard rounding at the upper boundary
  if (out < -w / 2.0) out += w;
  return out;
}

struct FloquetSpectrum {
  Vec quasi_energies;       // sorted by (Re, Im); Re in [-|w|/2, |w|/2)
  Mat floquet_vectors;      // unit-normalized monodromy eigenvectors, column n
  double defectivity = 1.0;  // sigma_min of the eigenvector matrix
  double omega = 0.0;
  double abs_det_monodromy = 0.0;
  bool defective = false;   // defectivity below threshold, scalar matrices excluded
  double condition = 1.0;
};

// Quasi-energies mu_n = (i/T) Log rho_n from the monodromy eigenvalues rho_n
// (principal logarithm; Re mu lands in the folded interval automatically).
inline FloquetSpectrum quasi_energies(const Mat& m, double omega, double tol = 1e-10) {
  if (omega == 0.0) throw ParameterOutOfRange("quasi_energies: omega must be nonzero");
  const double T = kTwoPi / std::abs(omega);
  EigenDecomposition ed = eig(m, tol);
  const Eigen::Index n = m.rows();

  FloquetSpectrum sp;
  sp.omega = omega;
  sp.quasi_energies.resize(n);
  sp.floquet_vectors.resize(n, n);
  std::vector<std::pair<Cx, Eigen::Index>> mus(static_cast<size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const Cx rho = ed.values[j];
    if (std::abs(rho) < 1e-300)
      throw SingularMatrix("quasi_energies: monodromy eigenvalue vanishes");
    mus[static_cast<size_t>(j)] = {Cx(0.0, 1.0) / T * std::log(rho), j};
  }
  std::sort(mus.begin(), mus.end(), [](const auto& a, const auto& b) {
    if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
    return a.first.imag() < b.first.imag();
  });
  for (Eigen::Index j = 0; j < n; ++j) {
    sp.quasi_energies[j] = mus[static_cast<size_t>(j)].first;
    sp.floquet_vectors.col(j) = ed.right_vectors[static_cast<size_t>(mus[static_cast<size_t>(j)].second)];
  }

  Eigen::JacobiSVD<Mat> svd(sp.floquet_vectors);
  sp.defectivity = svd.singularValues()(n - 1);
  sp.condition = ed.condition;
  sp.abs_det_monodromy = std::abs(m.determinant());

  // A scalar monodromy (e.g. the identity) is a diagonalizable degeneracy,
  // not an EP; never flag it.
  const Cx mean_diag = m.trace() / static_cast<double>(n);
  const bool scalar = (m - mean_diag * Mat::Identity(n, n)).norm() <= 1e-12 * (m.norm() + 1.0);
  sp.defective = !scalar && sp.defectivity < kDefectivityFlag;
  return sp;
}

struct NearResonance {
  int i = 0, j = 0;  // 1-based eigenvalue indices
  int harmonic = 0;
  double detune = 0.0;  // |(lambda_j - lambda_i)/w - g|, units of w
};

struct EPReport {
  std::vector<std::vector<int>> subsets;  // 1-based index sets, each sorted
  std::vector<int> orders;                // M per subset
  std::vector<int> dominant_cw;           // lowest eigenvalue index per subset
  std::vector<int> dominant_ccw;          // highest eigenvalue index per subset
  std::map<std::pair<int, int>, int> harmonic_table;  // resonant pair -> G
  std::vector<NearResonance> warnings;

  bool empty() const { return subsets.empty(); }
};

// Multi-photon resonance combinatorics: indices m, n are linked when
// lambda_m - lambda_n is a nonzero integer multiple of w within eps_res;
// connected components of size >= 2 are the predicted EP subsets of order M =
// component size. The surviving branch is the lowest member for w > 0 and the
// highest for w < 0; both are reported.
inline EPReport predict_ep(const std::vector<double>& h0_eigs, double omega,
                           double eps_res = kEpsResonance) {
  if (omega == 0.0) throw ParameterOutOfRange("predict_ep: omega must be nonzero");
  const int n = static_cast<int>(h0_eigs.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(h0_eigs[static_cast<size_t>(i)] - h0_eigs[static_cast<size_t>(j)]) <
          eps_res * std::abs(omega))
        throw DegenerateInput("predict_ep: eigenvalues " + std::to_string(i + 1) + " and " +
                              std::to_string(j + 1) + " are not distinct");

  EPReport rep;
  std::vector<int> parent(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] =
        parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
    return x;
  };

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double r = (h0_eigs[static_cast<size_t>(j)] - h0_eigs[static_cast<size_t>(i)]) / omega;
      const double g = std::round(r);
      const double detune = std::abs(r - g);
      if (g == 0.0) continue;
      if (detune < eps_res) {
        parent[static_cast<size_t>(find(i))] = find(j);
        rep.harmonic_table[{i + 1, j + 1}] = static_cast<int>(std::abs(g));
      } else if (detune < kNearResonance) {
        rep.warnings.push_back({i + 1, j + 1, static_cast<int>(std::abs(g)), detune});
      }
    }

  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i + 1);
  for (auto& [root, members] : groups) {
    (void)root;
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end());
    rep.subsets.push_back(members);
    rep.orders.push_back(static_cast<int>(members.size()));
    // h0_eigs are sorted-independent: pick by eigenvalue, not position.
    int lo = members.front(), hi = members.front();
    for (int idx : members) {
      if (h0_eigs[static_cast<size_t>(idx - 1)] < h0_eigs[static_cast<size_t>(lo - 1)]) lo = idx;
      if (h0_eigs[static_cast<size_t>(idx - 1)] > h0_eigs[static_cast<size_t>(hi - 1)]) hi = idx;
    }
    rep.dominant_cw.push_back(lo);
    rep.dominant_ccw.push_back(hi);
  }
  return rep;
}

// Truncated Fourier representation of a (generalized) Floquet eigenstate.
// mu is the folded quasi-energy; the coefficient window is shifted by the
// integer fold offset so f(t) = exp(-i mu t) sum_l (a^(l) + gamma t b^(l))
// exp(i l w t) solves the equation of motion verbatim. The H0-eigenvector
// seed therefore sits at l = seed_l (0 when no folding occurred).
struct FourierFloquetState {
  Cx mu;
  double omega = 0.0;
  int l_min = 0;
  std::vector<Vec> coeffs;  // a^(l), l = l_min .. l_min + coeffs.size() - 1
  int seed_l = 0;

  bool has_secular = false;
  Cx gamma = 0.0;
  int b_l_min = 0;
  std::vector<Vec> secular_coeffs;  // b^(l)

  double residual_bound = 0.0;  // max_t ||i f' - H f|| / max_t ||f||

  int l_max() const { return l_min + static_cast<int>(coeffs.size()) - 1; }
  const Vec& a(int l) const { return coeffs[static_cast<size_t>(l - l_min)]; }
  bool has_a(int l) const { return l >= l_min && l <= l_max(); }

  Vec eval(double t) const {
    Vec out = Vec::Zero(coeffs.front().size());
    for (int l = l_min; l <= l_max(); ++l)
      out += a(l) * std::exp(Cx(0.0, l * omega * t));
    if (has_secular)
      for (size_t i = 0; i < secular_coeffs.size(); ++i) {
        const int l = b_l_min + static_cast<int>(i);
        out += (gamma * t) * secular_coeffs[i] * std::exp(Cx(0.0, l * omega * t));
      }
    return (out * std::exp(Cx(0.0, -1.0) * mu * t)).eval();
  }

  // Exact time derivative of the truncated representation.
  Vec eval_derivative(double t) const {
    Vec out = Vec::Zero(coeffs.front().size());
    for (int l = l_min; l <= l_max(); ++l)
      out += Cx(0.0, l * omega) * a(l) * std::exp(Cx(0.0, l * omega * t));
    if (has_secular)
      for (size_t i = 0; i < secular_coeffs.size(); ++i) {
        const int l = b_l_min + static_cast<int>(i);
        const Cx ph = std::exp(Cx(0.0, l * omega * t));
        out += gamma * secular_coeffs[i] * ph;
        out += (gamma * t) * Cx(0.0, l * omega) * secular_coeffs[i] * ph;
      }
    out *= std::exp(Cx(0.0, -1.0) * mu * t);
    return (out + Cx(0.0, -1.0) * mu * eval(t)).eval();
  }
};

namespace detail {

// Right-hand side sum_{k} S^(k) x^(l-k) over the available harmonics.
inline Vec recursion_rhs(const std::map<int, Mat>& blocks,
                         const std::map<int, Vec>& x, int l, Eigen::Index dim) {
  Vec rhs = Vec::Zero(dim);
  for (const auto& [k, sk] : blocks) {
    auto it = x.find(l - k);
    if (it != x.end()) rhs.noalias() += sk * it->second;
  }
  return rhs;
}

inline double max_norm(const std::map<int, Vec>& x) {
  double m = 0.0;
  for (const auto& [l, v] : x) {
    (void)l;
    m = std::max(m, v.norm());
  }
  return m;
}

// Relative residual of i f' = H(t) f over sampled times.
inline double reconstruction_residual(const PeriodicHamiltonian& h,
                                      const FourierFloquetState& st,
                                      double t_max, int samples = 64) {
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = t_max * static_cast<double>(i) / samples;
    const Vec f = st.eval(t);
    const Vec lhs = Cx(0.0, 1.0) * st.eval_derivative(t);
    const Vec rhs = assemble(h, t) * f;
    worst = std::max(worst, (lhs - rhs).norm());
    scale = std::max(scale, f.norm());
  }
  return worst / std::max(scale, 1e-300);
}

// Sorted real eigenvalues of H0 plus leading-one eigenvectors and the paired
// adjoint eigenvectors. Shared entry point for the state constructions.
struct H0Frame {
  std::vector<double> lambda;
  std::vector<Vec> w;      // leading-entry-1 gauge
  std::vector<Vec> w_adj;  // adjoint eigenvectors (scale-free usage only)
};

inline H0Frame h0_frame(const PeriodicHamiltonian& h, double tol = 1e-10) {
  EigenDecomposition ed = eig(h.h0, tol);
  H0Frame fr;
  const double scale = ed.values.cwiseAbs().maxCoeff() + 1.0;
  for (Eigen::Index i = 0; i < ed.dim(); ++i) {
    if (std::abs(ed.values[i].imag()) > 1e-8 * scale)
      throw DegenerateInput("h0_frame: H0 eigenvalues must be real");
    fr.lambda.push_back(ed.values[i].real());
    fr.w.push_back(gauge_leading_one(ed.right_vectors[static_cast<size_t>(i)]));
    fr.w_adj.push_back(ed.left_vectors[static_cast<size_t>(i)]);
  }
  for (size_t i = 0; i + 1 < fr.lambda.size(); ++i)
    if (fr.lambda[i + 1] - fr.lambda[i] < 1e-12 * scale)
      throw DegenerateInput("h0_frame: H0 eigenvalues must be distinct");
  return fr;
}

// Apply the integer fold shift to a raw-index coefficient window.
inline void store_folded(FourierFloquetState& st, double lambda_anchor,
                         const std::map<int, Vec>& a_raw,
                         const std::map<int, Vec>* b_raw) {
  const double mu = fold(lambda_anchor, st.omega);
  const double shift_real = (lambda_anchor - mu) / st.omega;
  const int shift = static_cast<int>(std::lround(shift_real));
  st.mu = mu;
  st.l_min = a_raw.begin()->first - shift;
  st.coeffs.clear();
  for (const auto& [l, v] : a_raw) {
    (void)l;
    st.coeffs.push_back(v);
  }
  st.seed_l = -shift;
  if (b_raw) {
    st.b_l_min = b_raw->begin()->first - shift;
    st.secular_coeffs.clear();
    for (const auto& [l, v] : *b_raw) {
      (void)l;
      st.secular_coeffs.push_back(v);
    }
  }
}

}  // namespace detail

// Sorted real eigenvalues of H0; the hypothesis check (real, distinct) is
// shared with the state constructions.
inline std::vector<double> h0_eigenvalues(const PeriodicHamiltonian& h) {
  return detail::h0_frame(h).lambda;
}

// Default truncation window: generous multiple of the largest harmonic gap.
inline int default_l_max(const std::vector<double>& lambda, double omega) {
  double gap = 0.0;
  for (size_t i = 0; i < lambda.size(); ++i)
    for (size_t j = i + 1; j < lambda.size(); ++j)
      gap = std::max(gap, std::abs(lambda[j] - lambda[i]));
  const int g = static_cast<int>(std::ceil(gap / std::abs(omega)));
  return std::min(kLMaxCap, 8 * (1 + g));
}

// Build the Floquet eigenstate emanating from the n-th H0 eigenvalue
// (1-based, eigenvalues sorted ascending) by the one-sided Fourier recursion.
// Raises SingularMatrix when lambda_n sits on the collapsing side of a
// resonant subset; the caller must switch to build_generalized_state.
inline FourierFloquetState build_floquet_state(const PeriodicHamiltonian& h, int n,
                                               int l_max = 0,
                                               double trunc_tol = kTruncTol) {
  h.validate();
  detail::H0Frame fr = detail::h0_frame(h);
  const int dim = h.dim;
  if (n < 1 || n > dim) throw ParameterOutOfRange("build_floquet_state: index out of range");
  const double lambda = fr.lambda[static_cast<size_t>(n - 1)];
  if (l_max <= 0) l_max = default_l_max(fr.lambda, h.omega);

  const std::map<int, Mat> blocks = fourier_blocks(h);
  std::map<int, Vec> a;
  a[0] = fr.w[static_cast<size_t>(n - 1)];

  int below_tol = 0;
  bool converged = blocks.empty();
  for (int l = 1; l <= kLMaxCap && !converged; ++l) {
    const Vec rhs = detail::recursion_rhs(blocks, a, l, dim);
    const Mat m = (lambda - l * h.omega) * Mat::Identity(dim, dim) - h.h0;
    Vec x;
    try {
      x = solve(m, rhs);
    } catch (const SingularMatrix&) {
      throw SingularMatrix("build_floquet_state: recursion matrix singular at l=" +
                           std::to_string(l) +
                           " (Floquet EP: use build_generalized_state)");
    }
    a[l] = x;
    if (x.norm() <= trunc_tol * detail::max_norm(a))
      ++below_tol;
    else
      below_tol = 0;
    if (l >= l_max && below_tol >= 2) converged = true;
  }
  if (!converged && !blocks.empty()) {
    // Tail check at the cap.
    const double tail = a.rbegin()->second.norm();
    if (tail > trunc_tol * detail::max_norm(a))
      throw TruncationNotConverged("build_floquet_state: tail " + std::to_string(tail) +
                                   " at l_max cap");
  }

  FourierFloquetState st;
  st.omega = h.omega;
  detail::store_folded(st, lambda, a, nullptr);
  st.residual_bound = detail::reconstruction_residual(h, st, h.period());
  return st;
}

// Build the secular (generalized) Floquet eigenstate for a resonant pair
// (y1, y2) of H0 eigenvalue indices (1-based). The surviving branch is the
// higher eigenvalue for w < 0 and the lower for w > 0; the returned state is
// the other, secular member. gamma measures the secular strength and is fixed
// by the solvability condition of the singular l = 0 block; the solution
// component along the surviving eigenvector is set to zero.
inline FourierFloquetState build_generalized_state(const PeriodicHamiltonian& h, int y1,
                                                   int y2, int l_max = 0,
                                                   double trunc_tol = kTruncTol) {
  h.validate();
  detail::H0Frame fr = detail::h0_frame(h);
  const int dim = h.dim;
  if (y1 < 1 || y1 > dim || y2 < 1 || y2 > dim || y1 == y2)
    throw ParameterOutOfRange("build_generalized_state: bad pair");
  if (fr.lambda[static_cast<size_t>(y1 - 1)] > fr.lambda[static_cast<size_t>(y2 - 1)])
    std::swap(y1, y2);

  const double lam_lo = fr.lambda[static_cast<size_t>(y1 - 1)];
  const double lam_hi = fr.lambda[static_cast<size_t>(y2 - 1)];
  const double r = (lam_hi - lam_lo) / std::abs(h.omega);
  const double g_real = std::round(r);
  if (g_real == 0.0 || std::abs(r - g_real) > 1e-6)
    throw NotResonant("build_generalized_state: gap/|w| = " + std::to_string(r));
  const int G = static_cast<int>(g_real);

  const int surv = (h.omega < 0.0) ? y2 : y1;
  const int coll = (surv == y1) ? y2 : y1;
  const double mu_anchor = fr.lambda[static_cast<size_t>(surv - 1)];
  const Vec& w_surv = fr.w[static_cast<size_t>(surv - 1)];
  const Vec& w_coll = fr.w[static_cast<size_t>(coll - 1)];
  const Vec& w_surv_adj = fr.w_adj[static_cast<size_t>(surv - 1)];

  if (l_max <= 0) l_max = default_l_max(fr.lambda, h.omega);
  const std::map<int, Mat> blocks = fourier_blocks(h);
  const Mat id = Mat::Identity(dim, dim);
  auto shifted = [&](int l) { return ((mu_anchor - l * h.omega) * id - h.h0).eval(); };

  // Secular coefficients: the Fourier chain of the surviving eigenstate.
  std::map<int, Vec> b;
  b[0] = w_surv;
  {
    int below = 0;
    for (int l = 1; l <= kLMaxCap; ++l) {
      const Vec rhs = detail::recursion_rhs(blocks, b, l, dim);
      Vec x;
      try {
        x = solve(shifted(l), rhs);
      } catch (const SingularMatrix&) {
        throw SingularMatrix("build_generalized_state: surviving branch singular at l=" +
                             std::to_string(l) + " (a third eigenvalue intrudes)");
      }
      b[l] = x;
      if (x.norm() <= trunc_tol * detail::max_norm(b))
        ++below;
      else
        below = 0;
      if (l >= l_max && below >= 2) break;
      if (l == kLMaxCap && x.norm() > trunc_tol * detail::max_norm(b))
        throw TruncationNotConverged("build_generalized_state: secular chain tail");
    }
  }

  // Non-secular chain seeded with the collapsing eigenvector at l = -G.
  std::map<int, Vec> a;
  a[-G] = w_coll;
  for (int l = -G + 1; l <= -1; ++l) {
    const Vec rhs = detail::recursion_rhs(blocks, a, l, dim);
    Vec x;
    try {
      x = solve(shifted(l), rhs);
    } catch (const SingularMatrix&) {
      throw SingularMatrix("build_generalized_state: interior chain singular at l=" +
                           std::to_string(l) + " (a third eigenvalue intrudes)");
    }
    a[l] = x;
  }

  // Solvability of the singular l = 0 block fixes gamma.
  const Vec drive_part = detail::recursion_rhs(blocks, a, 0, dim);
  const Cx denom = binner(w_surv_adj, w_surv);
  const Cx gamma = Cx(0.0, -1.0) * binner(w_surv_adj, drive_part) / denom;
  const Vec d = drive_part - Cx(0.0, 1.0) * gamma * w_surv;
  a[0] = solve_singular(mu_anchor * id - h.h0, d, w_surv_adj, w_surv);

  // Upper chain, with the secular forcing -i gamma b^(l).
  {
    int below = 0;
    for (int l = 1; l <= kLMaxCap; ++l) {
      Vec rhs = detail::recursion_rhs(blocks, a, l, dim);
      auto itb = b.find(l);
      if (itb != b.end()) rhs -= Cx(0.0, 1.0) * gamma * itb->second;
      Vec x;
      try {
        x = solve(shifted(l), rhs);
      } catch (const SingularMatrix&) {
        throw SingularMatrix("build_generalized_state: upper chain singular at l=" +
                             std::to_string(l) + " (a third eigenvalue intrudes)");
      }
      a[l] = x;
      if (x.norm() <= trunc_tol * std::max(detail::max_norm(a), detail::max_norm(b)))
        ++below;
      else
        below = 0;
      if (l >= l_max && below >= 2 && b.count(l) == 0) break;
      if (l == kLMaxCap && below < 2)
        throw TruncationNotConverged("build_generalized_state: chain tail at cap");
    }
  }

  FourierFloquetState st;
  st.omega = h.omega;
  st.has_secular = true;
  st.gamma = gamma;
  detail::store_folded(st, mu_anchor, a, &b);
  st.residual_bound = detail::reconstruction_residual(h, st, 3.0 * h.period());
  return st;
}

// beta(n, k) = i^k n! / (n - k)!, the coefficients combining generalized
// eigenvectors into polynomially growing basis solutions.
struct GeneralizedBasisCoeffs {
  int n_max = 0;
  std::vector<std::vector<Cx>> table;  // table[n][k], 0 <= k <= n

  Cx beta(int n, int k) const {
    if (n < 0 || n > n_max || k < 0 || k > n)
      throw ParameterOutOfRange("beta: index out of range");
    return table[static_cast<size_t>(n)][static_cast<size_t>(k)];
  }
};

inline GeneralizedBasisCoeffs beta_coeffs(int n_max) {
  if (n_max < 0 || n_max > 12)
    throw Overflow("beta_coeffs: n_max must be in [0, 12] for exact factorials");
  GeneralizedBasisCoeffs out;
  out.n_max = n_max;
  out.table.resize(static_cast<size_t>(n_max) + 1);
  const Cx i_unit(0.0, 1.0);
  for (int n = 0; n <= n_max; ++n) {
    out.table[static_cast<size_t>(n)].resize(static_cast<size_t>(n) + 1);
    double falling = 1.0;  // n! / (n-k)!
    Cx ipow = 1.0;
    for (int k = 0; k <= n; ++k) {
      out.table[static_cast<size_t>(n)][static_cast<size_t>(k)] = ipow * falling;
      falling *= static_cast<double>(n - k);
      ipow *= i_unit;
    }
  }
  return out;
}

// Least-squares growth exponent of log||a(mT)|| against log(mT) over the
// trailing half of the stroboscopic samples. At a Floquet EP of order M the
// exponent approaches s <= M-1; bounded dynamics gives s ~ 0.
inline double secular_exponent(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 10)
    throw InsufficientData("secular_exponent: need at least 10 samples");
  const size_t start = samples.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t count = 0;
  for (size_t i = start; i < samples.size(); ++i) {
    const auto& [t, norm] = samples[i];
    if (!(t > 0.0) || !(norm > 0.0))
      throw InsufficientData("secular_exponent: need positive times and norms");
    const double x = std::log(t), y = std::log(norm);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  const double denom = count * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw InsufficientData("secular_exponent: degenerate fit");
  return (count * sxy - sx * sy) / denom;
}

// Floquet generator R = (i/T) log M via the Schur-based matrix logarithm.
inline Mat floquet_generator(const Mat& m, double omega) {
  if (omega == 0.0) throw ParameterOutOfRange("floquet_generator: omega must be nonzero");
  const double T = kTwoPi / std::abs(omega);
  const Mat logm = m.log();
  return (Cx(0.0, 1.0) / T) * logm;
}

// Magnitude ratio ||Q|| / ||q|| of the first Jordan-chain step of the most
// defective eigenvalue pair of a generator. q is the kernel-direction singular
// vector of (R - mu I); Q solves (R - mu I) Q = q with the kernel component
// dropped (rank-deficient pseudoinverse).
inline double jordan_chain_ratio(const Mat& generator) {
  if (generator.rows() != generator.cols())
    throw NotSquare("jordan_chain_ratio: matrix not square");
  const Eigen::Index n = generator.rows();
  if (n < 2) throw ParameterOutOfRange("jordan_chain_ratio: need N >= 2");

  EigenDecomposition ed = eig(generator);
  Eigen::Index bi = 0, bj = 1;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = std::abs(ed.values[i] - ed.values[j]);
      if (d < best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  const Cx mu = 0.5 * (ed.values[bi] + ed.values[bj]);

  const Mat a = generator - mu * Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec q = svd.matrixV().col(n - 1);  // kernel direction, unit norm
  Vec big_q = Vec::Zero(n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double s = svd.singularValues()(k);
    if (s <= 0.0) continue;
    big_q += (svd.matrixU().col(k).dot(q) / s) * svd.matrixV().col(k);
  }
  return big_q.norm();
}

}  // namespace floqep

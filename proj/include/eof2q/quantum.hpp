#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "errors.hpp"
#include "linalg.hpp"
#include "matrix.hpp"

namespace eof2q {

// Two-qubit basis order used throughout: up-up, up-down, down-up, down-down.

/// Pure two-qubit state. May be subnormalized: the squared norm is the
/// probability weight of the state inside a decomposition.
struct pure_state {
  std::array<cplx, 4> amp{};
};

inline double norm_sq(const pure_state& s) {
  double n = 0.0;
  for (const auto& a : s.amp) n += std::norm(a);
  return n;
}

inline cplx inner(const pure_state& a, const pure_state& b) {
  cplx v = 0.0;
  for (int i = 0; i < 4; ++i) v += std::conj(a.amp[i]) * b.amp[i];
  return v;
}

inline pure_state scaled(const pure_state& s, const cplx& f) {
  pure_state r = s;
  for (auto& a : r.amp) a *= f;
  return r;
}

inline pure_state add(const pure_state& x, const pure_state& y) {
  pure_state r;
  for (int i = 0; i < 4; ++i) r.amp[i] = x.amp[i] + y.amp[i];
  return r;
}

inline pure_state normalized(const pure_state& s) {
  const double n2 = norm_sq(s);
  if (n2 <= 1e-14) throw zero_norm("normalized: state has (near-)zero norm");
  return scaled(s, 1.0 / std::sqrt(n2));
}

namespace detail {

inline void require_normalized(const pure_state& s, const char* who) {
  if (std::abs(norm_sq(s) - 1.0) > 1e-12) throw not_normalized(who);
}

// Symmetric bilinear form underlying the tilde inner product:
// B(a,b) = -a0*b3 + a1*b2 + a2*b1 - a3*b0, so that <a|b~> = conj(B(a,b)).
inline cplx tilde_bilinear(const pure_state& a, const pure_state& b) {
  return -a.amp[0] * b.amp[3] + a.amp[1] * b.amp[2] + a.amp[2] * b.amp[1] -
         a.amp[3] * b.amp[0];
}

}  // namespace detail

/// Spin flip of a pure state: (sigma_y x sigma_y) |psi*>.
inline pure_state spin_flip(const pure_state& s) {
  return pure_state{{-std::conj(s.amp[3]), std::conj(s.amp[2]), std::conj(s.amp[1]),
                     -std::conj(s.amp[0])}};
}

/// Tilde inner product <a|b~>. Symmetric under swapping a and b.
inline cplx tilde_inner(const pure_state& a, const pure_state& b) {
  return std::conj(detail::tilde_bilinear(a, b));
}

/// Preconcurrence c = <psi|psi~> / <psi|psi>, defined for subnormalized states.
inline cplx preconcurrence(const pure_state& s) {
  const double n2 = norm_sq(s);
  if (n2 <= 1e-14) throw zero_norm("preconcurrence: state has (near-)zero norm");
  return tilde_inner(s, s) / n2;
}

/// Concurrence C = |<psi|psi~>| of a normalized pure state.
inline double concurrence(const pure_state& s) {
  detail::require_normalized(s, "concurrence: state is not normalized");
  return std::abs(tilde_inner(s, s));
}

/// Monotone convex map from concurrence to entanglement of formation:
/// the binary entropy of (1 + sqrt(1 - C^2))/2, in bits, with 0*log0 = 0.
inline double eof_from_concurrence(double c) {
  if (c < -1e-12 || c > 1.0 + 1e-12)
    throw out_of_range("eof_from_concurrence: concurrence outside [0,1]");
  c = std::clamp(c, 0.0, 1.0);
  const double x = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c)));
  double h = 0.0;
  for (double y : {x, 1.0 - x})
    if (y > 0.0) h -= y * std::log2(y);
  return h;
}

namespace detail {

// Binary entropy of the reduced eigenvalues {mu, 1-mu}.
inline double entropy_from_det(double det) {
  const double root = std::sqrt(std::max(0.0, 1.0 - 4.0 * det));
  double h = 0.0;
  for (double mu : {0.5 * (1.0 + root), 0.5 * (1.0 - root)}) {
    mu = std::clamp(mu, 0.0, 1.0);
    if (mu > 0.0) h -= mu * std::log2(mu);
  }
  return h;
}

}  // namespace detail

/// Entanglement of a normalized pure state: the von Neumann entropy (bits) of
/// the reduced state of one qubit. subsystem 0 traces out qubit B, 1 traces
/// out qubit A; the two agree for any pure state.
inline double entropy_of_entanglement(const pure_state& s, int subsystem = 0) {
  detail::require_normalized(s, "entropy_of_entanglement: state is not normalized");
  const auto& a = s.amp;
  double d00, d11;
  cplx d01;
  if (subsystem == 0) {
    d00 = std::norm(a[0]) + std::norm(a[1]);
    d11 = std::norm(a[2]) + std::norm(a[3]);
    d01 = a[0] * std::conj(a[2]) + a[1] * std::conj(a[3]);
  } else {
    d00 = std::norm(a[0]) + std::norm(a[2]);
    d11 = std::norm(a[1]) + std::norm(a[3]);
    d01 = a[0] * std::conj(a[1]) + a[2] * std::conj(a[3]);
  }
  return detail::entropy_from_det(d00 * d11 - std::norm(d01));
}

/// Validated 4x4 density matrix: Hermitian within 1e-10, eigenvalues >= -1e-10,
/// unit trace within 1e-10. Inputs outside those bands are rejected.
class density_matrix {
 public:
  explicit density_matrix(const cmat& m) : m_(m) {
    if (m.dim() != 4) throw invalid_density_matrix("density matrix must be 4x4");
    if (hermiticity_error(m) > 1e-10)
      throw invalid_density_matrix("density matrix is not Hermitian");
    if (std::abs(trace(m) - cplx(1.0)) > 1e-10)
      throw invalid_density_matrix("density matrix trace is not 1");
    const auto eg = herm_eig(m);
    if (eg.eigenvalues[3] < -1e-10)
      throw invalid_density_matrix("density matrix has a negative eigenvalue");
  }

  const cmat& matrix() const { return m_; }

 private:
  cmat m_;
};

namespace detail {

// (sigma_y x sigma_y) conj(rho) (sigma_y x sigma_y) on the raw matrix.
inline cmat spin_flip_raw(const cmat& rho) {
  static constexpr double sgn[4] = {-1.0, 1.0, 1.0, -1.0};
  cmat r(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      r(i, j) = sgn[i] * sgn[j] * std::conj(rho(3 - i, 3 - j));
  return r;
}

// Rank = number of eigenvalues above 1e-12 (relative to the unit trace).
inline int rank_from_eigenvalues(const std::array<double, 4>& ev) {
  int n = 0;
  for (double e : ev)
    if (e > 1e-12) ++n;
  return n;
}

struct eigen_vectors_result {
  std::array<pure_state, 4> v{};  // subnormalized eigenvectors, descending
  int rank = 0;
};

// Subnormalized eigenvectors of rho: <v_i|v_i> equals the i-th eigenvalue.
inline eigen_vectors_result subnormalized_eigenvectors(const density_matrix& rho) {
  const auto eg = herm_eig(rho.matrix());
  eigen_vectors_result res;
  res.rank = rank_from_eigenvalues(eg.eigenvalues);
  if (res.rank == 0) res.rank = 1;  // unit trace makes this unreachable
  for (int k = 0; k < res.rank; ++k) {
    const double w = std::sqrt(std::max(0.0, eg.eigenvalues[k]));
    for (int i = 0; i < 4; ++i) res.v[k].amp[i] = w * eg.eigenvectors(i, k);
  }
  return res;
}

struct tau_pipeline_result {
  eigen_vectors_result eig;
  takagi_result tk;  // Takagi factorization of tau_ij = <v_i|v_j~>
};

inline tau_pipeline_result tau_pipeline(const density_matrix& rho) {
  tau_pipeline_result res;
  res.eig = subnormalized_eigenvectors(rho);
  const int n = res.eig.rank;
  cmat tau(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const cplx t = tilde_inner(res.eig.v[i], res.eig.v[j]);
      tau(i, j) = t;
      tau(j, i) = t;
    }
  res.tk = takagi(tau);
  return res;
}

}  // namespace detail

/// Spin flip of a density matrix.
inline density_matrix spin_flip(const density_matrix& rho) {
  return density_matrix(detail::spin_flip_raw(rho.matrix()));
}

struct lambda_spectrum {
  std::array<double, 4> lambdas{};  // descending, non-negative; zero past rank
  int rank = 0;                     // rank of rho
};

/// Lambda spectrum of rho via the Takagi factorization of the tilde Gram
/// matrix of subnormalized eigenvectors. This is the primary route.
inline lambda_spectrum compute_lambdas(const density_matrix& rho) {
  const auto pipe = detail::tau_pipeline(rho);
  lambda_spectrum ls;
  ls.rank = pipe.eig.rank;
  for (int i = 0; i < ls.rank; ++i) ls.lambdas[i] = pipe.tk.values[i];
  return ls;
}

/// Lambda spectrum via the Hermitian matrix sqrt(sqrt(rho) rho~ sqrt(rho));
/// retained as an independent cross-check of the primary route. Eigenvalues
/// of that matrix below 1e-14 of its norm are clamped to zero before the
/// square root: taking sqrt halves the significant digits around zero, so the
/// exact-zero lambdas of rank-deficient states would otherwise surface as
/// noise of order 1e-8.
inline lambda_spectrum compute_lambdas_r_route(const density_matrix& rho) {
  const cmat s = sqrt_psd(rho.matrix());
  const cmat m = s * detail::spin_flip_raw(rho.matrix()) * s;
  const auto eg = herm_eig(m);
  const double floor = 1e-14 * (1.0 + frobenius_norm(m));
  lambda_spectrum ls;
  ls.rank = detail::rank_from_eigenvalues(herm_eig(rho.matrix()).eigenvalues);
  for (int i = 0; i < 4; ++i)
    ls.lambdas[i] = eg.eigenvalues[i] > floor ? std::sqrt(eg.eigenvalues[i]) : 0.0;
  return ls;
}

/// Concurrence of a mixed state: max(0, l1 - l2 - l3 - l4).
inline double concurrence(const density_matrix& rho) {
  const auto ls = compute_lambdas(rho);
  return std::max(0.0, ls.lambdas[0] - ls.lambdas[1] - ls.lambdas[2] - ls.lambdas[3]);
}

/// Entanglement of formation of an arbitrary two-qubit density matrix.
inline double eof(const density_matrix& rho) {
  return eof_from_concurrence(concurrence(rho));
}

}  // namespace eof2q

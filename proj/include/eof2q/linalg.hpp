#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "matrix.hpp"

namespace eof2q {

struct herm_eig_result {
  std::array<double, kMaxDim> eigenvalues{};  // descending; entries past dim are zero
  cmat eigenvectors = cmat(1);                // unitary, columns are the eigenvectors
};

struct takagi_result {
  cmat u = cmat(1);                       // unitary with u * tau * u^T diagonal
  std::array<double, kMaxDim> values{};   // non-negative, descending
};

namespace detail {

// Stable descending order, ties kept in original index order.
template <int N>
inline std::array<int, N> descending_order(const std::array<double, N>& v, int n) {
  std::array<int, N> idx{};
  std::iota(idx.begin(), idx.begin() + n, 0);
  std::stable_sort(idx.begin(), idx.begin() + n,
                   [&](int a, int b) { return v[a] > v[b]; });
  return idx;
}

inline double offdiag_norm(const cmat& a) {
  double s = 0.0;
  for (int p = 0; p < a.dim(); ++p)
    for (int q = p + 1; q < a.dim(); ++q) s += std::norm(a(p, q));
  return std::sqrt(s);
}

// One unitary similarity rotation G on rows/cols (p,q) of the Hermitian matrix a,
// chosen to annihilate a(p,q). G = [[c, s], [-conj(s), c]] with c real.
// Also applied to the eigenvector accumulator: vecs <- vecs * G^dagger.
inline void herm_jacobi_rotation(cmat& a, cmat& vecs, int p, int q) {
  const cplx h = a(p, q);
  const double ah = std::abs(h);
  if (ah == 0.0) return;
  const double alpha = std::real(a(p, p));
  const double beta = std::real(a(q, q));
  const double tau = (alpha - beta) / (2.0 * ah);
  const double sign = tau >= 0.0 ? 1.0 : -1.0;
  const double t = sign / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const cplx s = t * c * (h / ah);

  const int n = a.dim();
  for (int j = 0; j < n; ++j) {  // rows: a <- G a
    const cplx ap = a(p, j), aq = a(q, j);
    a(p, j) = c * ap + s * aq;
    a(q, j) = -std::conj(s) * ap + c * aq;
  }
  for (int i = 0; i < n; ++i) {  // cols: a <- a G^dagger
    const cplx ap = a(i, p), aq = a(i, q);
    a(i, p) = c * ap + std::conj(s) * aq;
    a(i, q) = -s * ap + c * aq;
    const cplx vp = vecs(i, p), vq = vecs(i, q);
    vecs(i, p) = c * vp + std::conj(s) * vq;
    vecs(i, q) = -s * vp + c * vq;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
}

// Unitary congruence rotation V on (p,q) annihilating the off-diagonal entry of
// a complex symmetric matrix: a <- V a V^T with V = [[c, s], [-conj(s), c]].
// The phase of s is fixed so that the annihilation condition reduces to a real
// equation; the resulting step is exact for any pair, degenerate or not.
inline void takagi_jacobi_rotation(cmat& a, cmat& u, int p, int q) {
  const cplx b = a(p, q);
  const double ab = std::abs(b);
  if (ab == 0.0) return;
  const cplx eb = b / ab;  // e^{i arg b}
  const cplx kappa = a(q, q) / eb + std::conj(a(p, p)) * eb;
  const double ak = std::abs(kappa);
  const cplx ephi = ak > 0.0 ? std::conj(kappa) / ak : cplx(1.0, 0.0);  // e^{i phi}
  const double hre = std::real((a(q, q) * ephi - a(p, p) * std::conj(ephi)) / eb);
  const double theta = 0.5 * std::atan2(-2.0 * ab, hre);
  const double c = std::cos(theta);
  const cplx s = std::sin(theta) * ephi;

  const int n = a.dim();
  for (int j = 0; j < n; ++j) {  // rows: a <- V a, u <- V u
    const cplx ap = a(p, j), aq = a(q, j);
    a(p, j) = c * ap + s * aq;
    a(q, j) = -std::conj(s) * ap + c * aq;
    const cplx up = u(p, j), uq = u(q, j);
    u(p, j) = c * up + s * uq;
    u(q, j) = -std::conj(s) * up + c * uq;
  }
  for (int i = 0; i < n; ++i) {  // cols: a <- a V^T
    const cplx ap = a(i, p), aq = a(i, q);
    a(i, p) = c * ap + s * aq;
    a(i, q) = -std::conj(s) * ap + c * aq;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
/// Eigenvalues are returned in descending order (ties keep original order);
/// eigenvectors are the columns of the returned unitary.
inline herm_eig_result herm_eig(const cmat& h) {
  const int n = h.dim();
  const double scale = 1.0 + frobenius_norm(h);
  if (hermiticity_error(h) > 1e-10 * scale)
    throw not_hermitian("herm_eig: input is not Hermitian within tolerance");

  cmat a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));

  cmat vecs = cmat::identity(n);
  for (int sweep = 0; sweep < 60; ++sweep) {
    if (detail::offdiag_norm(a) <= 1e-15 * scale) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) detail::herm_jacobi_rotation(a, vecs, p, q);
  }

  std::array<double, kMaxDim> vals{};
  for (int i = 0; i < n; ++i) vals[i] = std::real(a(i, i));
  const auto order = detail::descending_order<kMaxDim>(vals, n);

  herm_eig_result res{{}, cmat(n)};
  for (int k = 0; k < n; ++k) {
    res.eigenvalues[k] = vals[order[k]];
    for (int i = 0; i < n; ++i) res.eigenvectors(i, k) = vecs(i, order[k]);
  }
  return res;
}

/// Hermitian PSD square root. Eigenvalues in [-1e-8, 0) are clamped to zero;
/// anything below -1e-8 is rejected.
inline cmat sqrt_psd(const cmat& p) {
  const int n = p.dim();
  const auto eg = herm_eig(p);
  std::array<double, kMaxDim> root{};
  for (int i = 0; i < n; ++i) {
    const double ev = eg.eigenvalues[i];
    if (ev < -1e-8) throw not_positive("sqrt_psd: eigenvalue below -1e-8");
    root[i] = ev > 0.0 ? std::sqrt(ev) : 0.0;
  }
  cmat s(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx v = 0.0;
      for (int k = 0; k < n; ++k)
        v += eg.eigenvectors(i, k) * root[k] * std::conj(eg.eigenvectors(j, k));
      s(i, j) = v;
    }
  return s;
}

/// Takagi (Autonne) factorization of a complex symmetric matrix:
/// u * tau * u^T = diag(values) with values real, non-negative, descending.
///
/// The unitary is seeded by diagonalizing the Hermitian matrix tau*tau^dagger,
/// which leaves the congruence diagonal except inside (nearly) degenerate
/// singular-value clusters; cyclic congruence-Jacobi sweeps then finish those
/// off to machine precision, and a final row phase makes the diagonal real
/// non-negative.
inline takagi_result takagi(const cmat& tau_in) {
  const int n = tau_in.dim();
  const double scale = 1.0 + frobenius_norm(tau_in);
  if (symmetry_error(tau_in) > 1e-10 * scale)
    throw not_symmetric("takagi: input is not symmetric within tolerance");

  cmat tau(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tau(i, j) = 0.5 * (tau_in(i, j) + tau_in(j, i));

  const auto eg = herm_eig(tau * adjoint(tau));
  cmat u = adjoint(eg.eigenvectors);
  cmat a = u * tau * transpose(u);

  for (int sweep = 0; sweep < 60; ++sweep) {
    if (detail::offdiag_norm(a) <= 1e-15 * scale) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) detail::takagi_jacobi_rotation(a, u, p, q);
  }

  std::array<double, kMaxDim> vals{};
  for (int i = 0; i < n; ++i) {
    const cplx d = a(i, i);
    vals[i] = std::abs(d);
    if (vals[i] > 0.0) {
      const cplx ph = std::polar(1.0, -0.5 * std::arg(d));
      for (int j = 0; j < n; ++j) u(i, j) *= ph;
    }
  }

  const auto order = detail::descending_order<kMaxDim>(vals, n);
  takagi_result res{cmat(n), {}};
  for (int k = 0; k < n; ++k) {
    res.values[k] = vals[order[k]];
    for (int j = 0; j < n; ++j) res.u(k, j) = u(order[k], j);
  }
  return res;
}

}  // namespace eof2q

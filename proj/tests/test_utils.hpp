#pragma once

// Shared helpers for the test suites, including eigenvalue/singular-value
// oracles that stay independent of the library's complex solvers: they work
// through a plain real-symmetric Jacobi iteration on the doubled real
// embedding of a Hermitian matrix.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <eof2q/eof2q.hpp>

namespace testutil {

using eof2q::cmat;
using eof2q::cplx;
using eof2q::density_matrix;
using eof2q::pure_state;

// Cyclic Jacobi for a real symmetric matrix, row-major, n <= 8. Test-only.
inline std::vector<double> real_sym_eigenvalues(std::vector<double> a, int n) {
  double scale = 0.0;
  for (double v : a) scale += v * v;
  scale = std::sqrt(scale) + 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (std::sqrt(off) <= 1e-15 * scale) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double th = 0.5 * std::atan2(2.0 * apq, a[p * n + p] - a[q * n + q]);
        const double c = std::cos(th), s = std::sin(th);
        for (int j = 0; j < n; ++j) {
          const double xp = a[p * n + j], xq = a[q * n + j];
          a[p * n + j] = c * xp + s * xq;
          a[q * n + j] = -s * xp + c * xq;
        }
        for (int i = 0; i < n; ++i) {
          const double xp = a[i * n + p], xq = a[i * n + q];
          a[i * n + p] = c * xp + s * xq;
          a[i * n + q] = -s * xp + c * xq;
        }
      }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a[i * n + i];
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

// Eigenvalues of a Hermitian matrix H = X + iY via the real symmetric
// embedding [[X, -Y], [Y, X]], whose spectrum is that of H doubled.
inline std::vector<double> hermitian_eigenvalues_oracle(const cmat& h) {
  const int n = h.dim(), N = 2 * n;
  std::vector<double> a(N * N, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = h(i, j).real(), y = h(i, j).imag();
      a[i * N + j] = x;
      a[(i + n) * N + (j + n)] = x;
      a[i * N + (j + n)] = -y;
      a[(i + n) * N + j] = y;
    }
  const auto doubled = real_sym_eigenvalues(std::move(a), N);
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
  return ev;
}

// Singular values of a complex matrix: square roots of the eigenvalues of
// t^dagger t, through the independent oracle above.
inline std::vector<double> singular_values_oracle(const cmat& t) {
  auto ev = hermitian_eigenvalues_oracle(eof2q::adjoint(t) * t);
  for (auto& e : ev) e = std::sqrt(std::max(0.0, e));
  return ev;
}

inline cmat random_gaussian(int n, eof2q::rng& g) {
  cmat m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g.cgaussian();
  return m;
}

inline cmat random_hermitian(int n, eof2q::rng& g) {
  const cmat a = random_gaussian(n, g);
  return cplx(0.5) * (a + eof2q::adjoint(a));
}

inline cmat random_symmetric(int n, eof2q::rng& g) {
  const cmat a = random_gaussian(n, g);
  return a + eof2q::transpose(a);
}

inline cmat random_psd(int n, eof2q::rng& g) {
  const cmat a = random_gaussian(n, g);
  return a * eof2q::adjoint(a);
}

inline density_matrix random_rho(int rank, std::uint64_t seed) {
  eof2q::random_spec spec;
  spec.method = eof2q::random_method::ginibre;
  spec.rank = rank;
  spec.seed = seed;
  return eof2q::random_density_matrix(spec);
}

inline pure_state singlet() {
  const double r = 1.0 / std::sqrt(2.0);
  return pure_state{{0.0, r, -r, 0.0}};
}

inline pure_state phi_plus() {
  const double r = 1.0 / std::sqrt(2.0);
  return pure_state{{r, 0.0, 0.0, r}};
}

inline pure_state basis_state(int k) {
  pure_state s;
  s.amp[k] = 1.0;
  return s;
}

inline cmat projector(const pure_state& s) {
  cmat m(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = s.amp[i] * std::conj(s.amp[j]);
  return m;
}

// p * |singlet><singlet| + (1 - p) * identity / 4.
inline cmat werner_matrix(double p) {
  cmat m = projector(singlet());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) *= p;
  for (int i = 0; i < 4; ++i) m(i, i) += (1.0 - p) / 4.0;
  return m;
}

inline double max_offdiag(const cmat& a) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      if (i != j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

}  // namespace testutil

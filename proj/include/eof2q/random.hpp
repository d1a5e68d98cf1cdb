#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "quantum.hpp"

namespace eof2q {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic, portable PRNG: xoshiro256++ seeded through splitmix64.
/// Identical seeds produce bit-identical streams on any platform; Gaussians
/// come from the Box-Muller transform.
class rng {
 public:
  explicit rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& si : s_) si = detail::splitmix64(x);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }  // [0, 1)

  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = double((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    const double m = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559005768 * u2;
    cached_ = m * std::sin(a);
    have_cached_ = true;
    return m * std::cos(a);
  }

  cplx cgaussian() {
    const double re = gaussian();
    return {re, gaussian()};
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  std::uint64_t s_[4]{};
  double cached_ = 0.0;
  bool have_cached_ = false;
};

/// Derives an independent substream seed for item `stream` of a batch, so
/// batches can be evaluated in any order (or in parallel) reproducibly.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ull * (stream + 1));
  return detail::splitmix64(x);
}

/// Haar-random normalized pure state.
inline pure_state haar_pure_state(rng& g) {
  pure_state s;
  for (auto& a : s.amp) a = g.cgaussian();
  return normalized(s);
}

/// Haar-random m x n isometry: complex Gaussian matrix orthonormalized by
/// modified Gram-Schmidt, which fixes the phase freedom by making the R
/// factor's diagonal real and positive.
inline rmat haar_isometry(int m, int n, rng& g) {
  rmat u(m, n);
  for (int j = 0; j < n; ++j) {
    for (;;) {
      for (int i = 0; i < m; ++i) u(i, j) = g.cgaussian();
      for (int pass = 0; pass < 2; ++pass)
        for (int k = 0; k < j; ++k) {
          cplx proj = 0.0;
          for (int i = 0; i < m; ++i) proj += std::conj(u(i, k)) * u(i, j);
          for (int i = 0; i < m; ++i) u(i, j) -= proj * u(i, k);
        }
      double nn = 0.0;
      for (int i = 0; i < m; ++i) nn += std::norm(u(i, j));
      if (nn > 1e-24) {
        const double inv = 1.0 / std::sqrt(nn);
        for (int i = 0; i < m; ++i) u(i, j) *= inv;
        break;
      }
    }
  }
  return u;
}

/// Haar-random real orthogonal n x n matrix (same scheme, real entries).
inline rmat haar_real_orthogonal(int n, rng& g) {
  rmat u(n, n);
  for (int j = 0; j < n; ++j) {
    for (;;) {
      for (int i = 0; i < n; ++i) u(i, j) = g.gaussian();
      for (int pass = 0; pass < 2; ++pass)
        for (int k = 0; k < j; ++k) {
          cplx proj = 0.0;
          for (int i = 0; i < n; ++i) proj += std::conj(u(i, k)) * u(i, j);
          for (int i = 0; i < n; ++i) u(i, j) -= proj * u(i, k);
        }
      double nn = 0.0;
      for (int i = 0; i < n; ++i) nn += std::norm(u(i, j));
      if (nn > 1e-24) {
        const double inv = 1.0 / std::sqrt(nn);
        for (int i = 0; i < n; ++i) u(i, j) *= inv;
        break;
      }
    }
  }
  return u;
}

enum class random_method { ginibre, mixture_of_pures, haar_pure };

/// Deterministic specification of a batch of random density matrices. Item k
/// of the batch is drawn from a fresh generator seeded with mix_seed(seed, k).
struct random_spec {
  random_method method = random_method::ginibre;
  int rank = 4;  // ginibre only
  int count = 1;
  std::uint64_t seed = 0;
};

namespace detail {

inline cmat ginibre_density(int rank, rng& g) {
  // G G^dagger / tr for a 4 x rank complex Gaussian G.
  cplx gm[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < rank; ++j) gm[i][j] = g.cgaussian();
  cmat m(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= i; ++j) {
      cplx v = 0.0;
      for (int k = 0; k < rank; ++k) v += gm[i][k] * std::conj(gm[j][k]);
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  const double tr = std::real(trace(m));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) /= tr;
  for (int i = 0; i < 4; ++i) m(i, i) = std::real(m(i, i));
  return m;
}

}  // namespace detail

/// Single random density matrix drawn from item `index` of the spec's batch.
inline density_matrix random_density_matrix(const random_spec& spec, int index = 0) {
  if (spec.rank < 1 || spec.rank > 4)
    throw error("random_density_matrix: rank must be in 1..4");
  rng g(mix_seed(spec.seed, std::uint64_t(index)));
  switch (spec.method) {
    case random_method::ginibre:
      return density_matrix(detail::ginibre_density(spec.rank, g));
    case random_method::haar_pure: {
      const pure_state psi = haar_pure_state(g);
      cmat m(4);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = psi.amp[i] * std::conj(psi.amp[j]);
      return density_matrix(m);
    }
    case random_method::mixture_of_pures: {
      // Four Haar states with normalized uniform weights.
      double w[4];
      double tot = 0.0;
      for (double& wi : w) tot += (wi = g.uniform01() + 1e-12);
      cmat m(4);
      for (double wi : w) {
        const pure_state psi = haar_pure_state(g);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) m(i, j) += (wi / tot) * psi.amp[i] * std::conj(psi.amp[j]);
      }
      for (int i = 0; i < 4; ++i) m(i, i) = std::real(m(i, i));
      return density_matrix(m);
    }
  }
  throw error("random_density_matrix: unknown method");
}

inline std::vector<density_matrix> random_density_matrices(const random_spec& spec) {
  std::vector<density_matrix> out;
  out.reserve(spec.count);
  for (int k = 0; k < spec.count; ++k) out.push_back(random_density_matrix(spec, k));
  return out;
}

}  // namespace eof2q

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "quantum.hpp"

namespace eof2q {

enum class ensemble_source {
  eigen,
  tilde_orthogonal,
  phase_adjusted,
  optimal,
  zero_concurrence,
  sampled,
};

/// Pure-state ensemble realizing a density matrix: the members are
/// subnormalized so that sum_i |w_i><w_i| = rho and the squared norms are the
/// ensemble probabilities.
struct decomposition {
  std::vector<pure_state> members;
  ensemble_source source = ensemble_source::sampled;
};

inline cmat reconstruct(const decomposition& d) {
  cmat r(4);
  for (const auto& w : d.members)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r(i, j) += w.amp[i] * std::conj(w.amp[j]);
  return r;
}

inline double reconstruction_error(const decomposition& d, const density_matrix& rho) {
  return frobenius_norm(reconstruct(d) - rho.matrix());
}

inline double total_weight(const decomposition& d) {
  double s = 0.0;
  for (const auto& w : d.members) s += norm_sq(w);
  return s;
}

/// Tilde Gram matrix <w_i|w_j~> of an ensemble with at most four members.
inline cmat tilde_gram(const decomposition& d) {
  const int n = static_cast<int>(d.members.size());
  if (n < 1 || n > kMaxDim) throw error("tilde_gram: member count must be in 1..4");
  cmat g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const cplx t = tilde_inner(d.members[i], d.members[j]);
      g(i, j) = t;
      g(j, i) = t;
    }
  return g;
}

/// Eigen-ensemble of rho: orthogonal subnormalized eigenvectors, one per
/// nonzero eigenvalue, in descending order of eigenvalue.
inline decomposition eigen_ensemble(const density_matrix& rho) {
  const auto ev = detail::subnormalized_eigenvectors(rho);
  decomposition d;
  d.source = ensemble_source::eigen;
  d.members.assign(ev.v.begin(), ev.v.begin() + ev.rank);
  return d;
}

/// New ensemble w_i = sum_j conj(u_ij) v_j from an isometry u (orthonormal
/// columns, row count may exceed the member count). Realizes the same rho.
inline decomposition apply_mixing(const decomposition& d, const rmat& u) {
  const int n = static_cast<int>(d.members.size());
  if (u.cols() != n) throw not_isometry("apply_mixing: column count != member count");
  if (u.rows() < n) throw not_isometry("apply_mixing: fewer rows than columns");
  if (isometry_error(u) > 1e-10)
    throw not_isometry("apply_mixing: columns are not orthonormal");
  decomposition out;
  out.source = ensemble_source::sampled;
  out.members.resize(u.rows());
  for (int i = 0; i < u.rows(); ++i) {
    pure_state w;
    for (int j = 0; j < n; ++j) {
      const cplx f = std::conj(u(i, j));
      for (int k = 0; k < 4; ++k) w.amp[k] += f * d.members[j].amp[k];
    }
    out.members[i] = w;
  }
  return out;
}

namespace detail {

inline decomposition tilde_orthogonal_from_pipeline(const tau_pipeline_result& pipe) {
  const int n = pipe.eig.rank;
  decomposition d;
  d.source = ensemble_source::tilde_orthogonal;
  d.members.resize(n);
  for (int i = 0; i < n; ++i) {
    pure_state x;
    for (int j = 0; j < n; ++j) {
      const cplx f = std::conj(pipe.tk.u(i, j));
      for (int k = 0; k < 4; ++k) x.amp[k] += f * pipe.eig.v[j].amp[k];
    }
    d.members[i] = x;
  }
  return d;
}

}  // namespace detail

/// Tilde-orthogonal ensemble {x_i}: <x_i|x_j~> = lambda_i delta_ij with the
/// lambdas descending. Built by Takagi-factorizing the tilde Gram matrix of
/// the eigen-ensemble.
inline decomposition tilde_orthogonal_ensemble(const density_matrix& rho) {
  return detail::tilde_orthogonal_from_pipeline(detail::tau_pipeline(rho));
}

/// Phase-adjusted ensemble {y_i}: y_1 = x_1 and y_j = i x_j for j > 1, which
/// turns the tilde self-products into (l1, -l2, -l3, -l4) so that the average
/// preconcurrence already equals l1 - l2 - l3 - l4.
inline decomposition phase_adjusted_ensemble(const decomposition& x) {
  decomposition y = x;
  y.source = ensemble_source::phase_adjusted;
  for (std::size_t j = 1; j < y.members.size(); ++j)
    y.members[j] = scaled(y.members[j], cplx(0.0, 1.0));
  return y;
}

namespace detail {

// Real preconcurrence of a member of the real-orthogonal mixing pipeline.
inline double real_preconcurrence(const pure_state& w) {
  return std::real(preconcurrence(w));
}

}  // namespace detail

/// Equalizes the preconcurrence of every member of the phase-adjusted
/// ensemble to the target C(rho), using positive-determinant rotations of the
/// current extreme pair. Each rotation angle is found by bisection of
/// g(phi) = c(z_a(phi)) - target on [0, pi/2], where the endpoints realize the
/// current maximum and minimum; one member is fixed per round and trace
/// conservation forces the final member onto the target.
inline decomposition equalize_preconcurrence(const decomposition& y, double target) {
  const int n = static_cast<int>(y.members.size());
  decomposition z = y;
  z.source = ensemble_source::optimal;

  std::vector<char> fixed(n, 0);
  for (int round = 0; round + 1 < n; ++round) {
    int imax = -1, imin = -1;
    double cmax = 0.0, cmin = 0.0;
    for (int i = 0; i < n; ++i) {
      if (fixed[i]) continue;
      const double c = detail::real_preconcurrence(z.members[i]);
      if (imax < 0 || c > cmax) imax = i, cmax = c;
      if (imin < 0 || c < cmin) imin = i, cmin = c;
    }
    if (cmax - cmin <= 1e-14) break;

    const pure_state wa = z.members[imax];
    const pure_state wb = z.members[imin];
    const cplx baa = detail::tilde_bilinear(wa, wa);
    const cplx bbb = detail::tilde_bilinear(wb, wb);
    const cplx bab = detail::tilde_bilinear(wa, wb);
    const double naa = norm_sq(wa);
    const double nbb = norm_sq(wb);
    const double nab_re = std::real(inner(wa, wb));

    const auto g = [&](double phi) {
      const double co = std::cos(phi), si = std::sin(phi);
      const cplx b = co * co * baa + 2.0 * co * si * bab + si * si * bbb;
      const double nn = co * co * naa + 2.0 * co * si * nab_re + si * si * nbb;
      return std::real(std::conj(b)) / nn - target;
    };

    // g(0) = cmax - target >= 0 >= cmin - target = g(pi/2), up to roundoff.
    double lo = 0.0, hi = 1.5707963267948966;
    double phi = g(lo) <= 0.0 ? lo : hi;
    if (g(lo) > 0.0 && g(hi) < 0.0) {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        phi = mid;
        if (std::abs(gm) <= 1e-15 || hi - lo < 1e-17) break;
        (gm >= 0.0 ? lo : hi) = mid;
      }
    }
    if (std::abs(g(phi)) > 1e-12)
      throw target_unreachable("equalize_preconcurrence: bisection failed to converge");

    const double co = std::cos(phi), si = std::sin(phi);
    z.members[imax] = add(scaled(wa, co), scaled(wb, si));
    z.members[imin] = add(scaled(wa, -si), scaled(wb, co));
    fixed[imax] = 1;
  }

  for (const auto& w : z.members) {
    const cplx c = preconcurrence(w);
    if (std::abs(std::real(c) - target) > 1e-10 || std::abs(std::imag(c)) > 1e-9)
      throw target_unreachable("equalize_preconcurrence: a member missed the target");
  }
  return z;
}

struct closure_phases {
  std::array<double, 4> thetas{};  // theta_1 = 0 by convention
};

namespace detail {

// Numerically robust triangle area from side lengths (Kahan's formula).
inline double triangle_area(double a, double b, double c) {
  double s[3] = {a, b, c};
  std::sort(s, s + 3);  // ascending: s[2] >= s[1] >= s[0]
  const double hi = s[2], mid = s[1], lo = s[0];
  const double t = std::max(0.0, lo - (hi - mid));
  const double prod = (hi + (mid + lo)) * t * (lo + (hi - mid)) * (hi + (mid - lo));
  return 0.25 * std::sqrt(std::max(0.0, prod));
}

}  // namespace detail

/// Phases with sum_j exp(2 i theta_j) lambda_j = 0, theta_1 = 0. Exists when
/// l1 <= l2 + l3 + l4 (within slack). Construction: fold l3 and l4 into a
/// resultant whose magnitude is the midpoint of the feasible interval, close
/// the (l1, l2, resultant) triangle, then split the resultant back into l3
/// and l4 sharing one triangle height so the components cancel exactly.
inline closure_phases solve_closure_phases(const lambda_spectrum& ls) {
  const double l1 = ls.lambdas[0], l2 = ls.lambdas[1], l3 = ls.lambdas[2],
               l4 = ls.lambdas[3];
  const double sum = l1 + l2 + l3 + l4;
  closure_phases out{};
  if (sum <= 1e-300) return out;
  const double slack = 1e-12 * std::max(1.0, sum);
  if (l1 - (l2 + l3 + l4) > slack)
    throw no_closure("solve_closure_phases: l1 exceeds l2 + l3 + l4");

  const double rlo = std::max(l1 - l2, l3 - l4);
  const double rhi = std::min(l1 + l2, l3 + l4);
  const double r = 0.5 * (rlo + std::max(rlo, rhi));

  const auto cos_clamped = [](double num, double den) {
    return den > 0.0 ? std::clamp(num / den, -1.0, 1.0) : 1.0;
  };

  // alpha_j are the full polygon angles 2 theta_j.
  const double gamma = std::acos(cos_clamped(l1 * l1 + l2 * l2 - r * r, 2.0 * l1 * l2));
  const double alpha2 = 3.141592653589793238462643383279502884 - gamma;
  const cplx w = l1 + l2 * std::polar(1.0, alpha2);
  const double reff = std::abs(w);
  const double xi = reff > 0.0 ? std::arg(-w) : 0.0;

  double alpha3 = xi, alpha4 = 0.0;
  if (l4 > 1e-14 * std::max(1.0, sum) && reff > 0.0) {
    const double h = 2.0 * detail::triangle_area(reff, l3, l4) / reff;
    const double c3 = cos_clamped(l3 * l3 + reff * reff - l4 * l4, 2.0 * l3 * reff);
    const double c4 = cos_clamped(l4 * l4 + reff * reff - l3 * l3, 2.0 * l4 * reff);
    alpha3 = xi + std::atan2(h / l3, c3);
    alpha4 = xi - std::atan2(h / l4, c4);
  }

  out.thetas = {0.0, 0.5 * alpha2, 0.5 * alpha3, 0.5 * alpha4};
  return out;
}

/// Zero-concurrence ensemble for the case l1 - l2 - l3 - l4 < 0: equal-weight
/// phase combinations of the tilde-orthogonal members (plus a zero dummy when
/// the rank is 3) whose tilde self-products all vanish by phase closure.
inline decomposition zero_concurrence_ensemble(const decomposition& x,
                                               const lambda_spectrum& ls) {
  if (ls.lambdas[0] - ls.lambdas[1] - ls.lambdas[2] - ls.lambdas[3] >= 0.0)
    throw wrong_case("zero_concurrence_ensemble: l1 - l2 - l3 - l4 is not negative");
  const int n = static_cast<int>(x.members.size());
  if (n < 3) throw wrong_case("zero_concurrence_ensemble: rank below 3 is impossible here");

  const auto ph = solve_closure_phases(ls);
  std::array<pure_state, 4> base{};  // e^{i theta_j} x_j, zero dummy for j >= n
  for (int j = 0; j < n; ++j)
    base[j] = scaled(x.members[j], std::polar(1.0, ph.thetas[j]));

  static constexpr int sign[4][4] = {
      {1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
  decomposition z;
  z.source = ensemble_source::zero_concurrence;
  for (int i = 0; i < 4; ++i) {
    pure_state m;
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) m.amp[k] += 0.5 * double(sign[i][j]) * base[j].amp[k];
    if (norm_sq(m) >= 1e-14) z.members.push_back(m);
  }
  return z;
}

/// Optimal (entanglement-minimizing) decomposition of rho: at most four pure
/// states whose average entanglement equals the closed-form value. Dispatches
/// on the sign of l1 - l2 - l3 - l4: the non-negative case equalizes the
/// preconcurrences to C(rho), the negative case builds the zero-concurrence
/// ensemble.
inline decomposition optimal_decomposition(const density_matrix& rho) {
  const auto pipe = detail::tau_pipeline(rho);
  const int n = pipe.eig.rank;

  lambda_spectrum ls;
  ls.rank = n;
  for (int i = 0; i < n; ++i) ls.lambdas[i] = pipe.tk.values[i];

  decomposition x = detail::tilde_orthogonal_from_pipeline(pipe);

  if (n == 1) {
    x.source = ensemble_source::optimal;
    return x;
  }

  const double combo = ls.lambdas[0] - ls.lambdas[1] - ls.lambdas[2] - ls.lambdas[3];
  if (combo >= 0.0) return equalize_preconcurrence(phase_adjusted_ensemble(x), combo);

  decomposition z = zero_concurrence_ensemble(x, ls);
  z.source = ensemble_source::optimal;
  return z;
}

}  // namespace eof2q

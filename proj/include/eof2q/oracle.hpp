#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "decomposition.hpp"
#include "errors.hpp"
#include "quantum.hpp"
#include "random.hpp"

namespace eof2q {

// Brute-force verification layer. Average entanglement is evaluated through
// the subsystem-entropy route so the checks stay independent of the
// concurrence formula they are probing.

struct verification_report {
  double formula_value = 0.0;
  double constructed_avg_entanglement = 0.0;
  double min_sampled_avg_entanglement = 0.0;
  double min_sampled_avg_concurrence = 0.0;
  int samples = 0;
  int violations = 0;
};

struct formula_violation : error {
  formula_violation(const char* msg, const verification_report& r)
      : error(msg), report(r) {}
  verification_report report;
};

/// Random decomposition of rho with m members, drawn from a Haar-random
/// m x n isometry applied to the eigen-ensemble (n = rank of rho).
inline decomposition random_decomposition(const density_matrix& rho, int m,
                                          std::uint64_t seed) {
  const decomposition eig = eigen_ensemble(rho);
  const int n = static_cast<int>(eig.members.size());
  if (m < n) throw too_few_members("random_decomposition: m below the rank of rho");
  if (m > kMaxMembers) throw error("random_decomposition: m exceeds 16");
  rng g(seed);
  return apply_mixing(eig, haar_isometry(m, n, g));
}

/// Probability-weighted average entanglement sum_i p_i E(w_i / |w_i|), with E
/// the subsystem entropy. Zero-norm members are skipped.
inline double average_entanglement(const decomposition& d) {
  double s = 0.0;
  for (const auto& w : d.members) {
    const double p = norm_sq(w);
    if (p <= 1e-14) continue;
    s += p * entropy_of_entanglement(scaled(w, 1.0 / std::sqrt(p)));
  }
  return s;
}

/// Probability-weighted average concurrence of a decomposition.
inline double average_concurrence(const decomposition& d) {
  double s = 0.0;
  for (const auto& w : d.members) {
    const double p = norm_sq(w);
    if (p <= 1e-14) continue;
    s += p * concurrence(scaled(w, 1.0 / std::sqrt(p)));
  }
  return s;
}

namespace detail {

// Average entanglement of the ensemble conj(u) * v without materializing a
// decomposition object; v holds the subnormalized eigenvectors.
inline double avg_entanglement_of_mixing(const rmat& u,
                                         const std::array<pure_state, 4>& v) {
  double s = 0.0;
  for (int i = 0; i < u.rows(); ++i) {
    pure_state w;
    for (int j = 0; j < u.cols(); ++j) {
      const cplx f = std::conj(u(i, j));
      for (int k = 0; k < 4; ++k) w.amp[k] += f * v[j].amp[k];
    }
    const double p = norm_sq(w);
    if (p <= 1e-14) continue;
    s += p * entropy_of_entanglement(scaled(w, 1.0 / std::sqrt(p)));
  }
  return s;
}

}  // namespace detail

/// Random-restart greedy search for the minimum average entanglement over
/// decompositions. Restart r uses m = n + (r mod (9 - n)) members, capped at
/// 8; moves are random two-column rotations or single-column phase kicks of
/// the mixing isometry. The step size decays by 0.95 on rejection and grows
/// by 1.2 (capped) on acceptance, which keeps the walk from freezing before
/// the basin is reached. The value returned is monotone non-increasing in the
/// iteration count and can never drop below eof(rho).
inline double minimize_over_decompositions(const density_matrix& rho, int restarts,
                                           int iters, std::uint64_t seed) {
  const auto ev = detail::subnormalized_eigenvectors(rho);
  const int n = ev.rank;
  double best = 2.0;

  for (int r = 0; r < restarts; ++r) {
    rng g(mix_seed(seed, std::uint64_t(r)));
    const int m = n + (n < 8 ? r % (9 - n) : 0);
    rmat u = haar_isometry(m, n, g);
    double cur = detail::avg_entanglement_of_mixing(u, ev.v);
    best = std::min(best, cur);
    if (n == 1) continue;  // unique decomposition up to phases

    double step = 0.5;
    for (int it = 0; it < iters; ++it) {
      rmat cand = u;
      if (g.uniform01() < 0.5) {
        int j = int(g.uniform01() * n) % n;
        int k = int(g.uniform01() * (n - 1)) % (n - 1);
        if (k >= j) ++k;
        const double th = step * g.gaussian();
        const cplx ph = std::polar(1.0, 6.283185307179586 * g.uniform01());
        const double c = std::cos(th), s = std::sin(th);
        for (int i = 0; i < m; ++i) {
          const cplx a = cand(i, j), b = cand(i, k);
          cand(i, j) = c * a + s * ph * b;
          cand(i, k) = -s * std::conj(ph) * a + c * b;
        }
      } else {
        const int j = int(g.uniform01() * n) % n;
        const cplx ph = std::polar(1.0, step * g.gaussian());
        for (int i = 0; i < m; ++i) cand(i, j) *= ph;
      }
      const double val = detail::avg_entanglement_of_mixing(cand, ev.v);
      if (val < cur) {
        cur = val;
        u = cand;
        step = std::min(step * 1.2, 0.8);
      } else {
        step *= 0.95;
      }
    }
    best = std::min(best, cur);
  }
  return best;
}

/// End-to-end check of the closed-form value for one density matrix:
/// (a) the constructed optimal decomposition achieves it within 1e-8, and
/// (b) no sampled decomposition undercuts it in average concurrence or
/// average entanglement beyond 1e-9. Throws formula_violation (carrying the
/// populated report) if either check fails.
inline verification_report verify_formula(const density_matrix& rho, int samples,
                                          std::uint64_t seed) {
  verification_report rep;
  rep.samples = samples;
  const double c_formula = concurrence(rho);
  rep.formula_value = eof_from_concurrence(c_formula);
  rep.constructed_avg_entanglement = average_entanglement(optimal_decomposition(rho));

  const int n = static_cast<int>(eigen_ensemble(rho).members.size());
  rep.min_sampled_avg_entanglement = 2.0;
  rep.min_sampled_avg_concurrence = 2.0;
  for (int i = 0; i < samples; ++i) {
    const int m = n + (n < 8 ? i % (9 - n) : 0);
    const decomposition d = random_decomposition(rho, m, mix_seed(seed, std::uint64_t(i)));
    const double ac = average_concurrence(d);
    const double ae = average_entanglement(d);
    rep.min_sampled_avg_concurrence = std::min(rep.min_sampled_avg_concurrence, ac);
    rep.min_sampled_avg_entanglement = std::min(rep.min_sampled_avg_entanglement, ae);
    if (ac < c_formula - 1e-9 || ae < rep.formula_value - 1e-9) ++rep.violations;
  }
  if (samples == 0) {
    rep.min_sampled_avg_entanglement = rep.constructed_avg_entanglement;
    rep.min_sampled_avg_concurrence = c_formula;
  }

  if (std::abs(rep.constructed_avg_entanglement - rep.formula_value) > 1e-8)
    throw formula_violation("verify_formula: constructed decomposition misses the formula", rep);
  if (rep.violations > 0)
    throw formula_violation("verify_formula: a sampled decomposition undercuts the formula", rep);
  return rep;
}

}  // namespace eof2q

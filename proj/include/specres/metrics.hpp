#pragma once

// Distortion functionals between a ground-truth measure rho (R atoms u_j at
// r_j) and an estimate nu (S atoms v_k at s_k):
//
//   * neighborhood partition: I_j collects the atoms of nu within radius
//     0.3298/(M-1) of r_j, I_0 the strays;
//   * e1 = max_j |u_j - sum_{k in I_j} v_k|        (local mass error)
//     e2 = sum_j sum_{k in I_j} |v_k| |r_j - s_k|^2 (localization error)
//     e3 = sum_{k in I_0} |v_k|                     (stray mass)
//   * e_lip_upper = R e1 + TV(nu)^{1/2} e2^{1/2} + e3, an upper bound on the
//     Lipschitz-dual distance between rho and nu (the exact dual norm is a
//     sup over an infinite function class and is never computed);
//   * error_inf2 = min over permutations pi of max_j |r_j - s_pi(j)|, plus
//     the matched relative l2 amplitude error; defined only for equal atom
//     counts.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "specres/measure.hpp"
#include "specres/warn.hpp"

namespace specres {

constexpr double kNeighborhoodConstant = 0.3298;

inline double neighborhood_radius(int M) {
  if (M < 2) throw std::invalid_argument("neighborhood_radius: M must be >= 2");
  return kNeighborhoodConstant / (M - 1);
}

struct NeighborhoodPartition {
  std::vector<std::vector<int>> near;  // near[j]: indices of nu-atoms within radius of r_j
  std::vector<int> far;                // indices of nu-atoms near no r_j
};

// The index sets are disjoint when min_separation(rho) >= 1/M; below that the
// same stray atom may be charged to two neighborhoods, so we warn.
inline NeighborhoodPartition neighborhood_partition(const AtomicMeasure& rho,
                                                    const AtomicMeasure& nu, int M) {
  const double radius = neighborhood_radius(M);
  if (rho.size() >= 2 && rho.min_separation() * M < 1.0)
    warn_once("neighborhood_partition",
              "neighborhood_partition: min separation below 1/M, index sets may overlap");
  NeighborhoodPartition part;
  part.near.resize(static_cast<std::size_t>(rho.size()));
  for (int k = 0; k < nu.size(); ++k) {
    bool claimed = false;
    for (int j = 0; j < rho.size(); ++j) {
      if (torus_distance(rho.atom(j).location, nu.atom(k).location) <= radius) {
        part.near[static_cast<std::size_t>(j)].push_back(k);
        claimed = true;
      }
    }
    if (!claimed) part.far.push_back(k);
  }
  return part;
}

struct AtomicErrors {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
};

inline AtomicErrors errors_e123(const AtomicMeasure& rho, const AtomicMeasure& nu, int M) {
  const NeighborhoodPartition part = neighborhood_partition(rho, nu, M);
  AtomicErrors e;
  for (int j = 0; j < rho.size(); ++j) {
    Complex local_mass = 0.0;
    for (int k : part.near[static_cast<std::size_t>(j)]) {
      const double d = torus_distance(rho.atom(j).location, nu.atom(k).location);
      local_mass += nu.atom(k).amplitude;
      e.e2 += std::abs(nu.atom(k).amplitude) * d * d;
    }
    e.e1 = std::max(e.e1, std::abs(rho.atom(j).amplitude - local_mass));
  }
  for (int k : part.far) e.e3 += std::abs(nu.atom(k).amplitude);
  return e;
}

// Upper bound for the Lipschitz-dual distance; requires M >= 1/separation(rho)
// for the partition to be disjoint (warned, not enforced).
inline double e_lip_upper(const AtomicMeasure& rho, const AtomicMeasure& nu, int M) {
  const AtomicErrors e = errors_e123(rho, nu, M);
  return rho.size() * e.e1 + std::sqrt(nu.total_variation()) * std::sqrt(e.e2) + e.e3;
}

struct MatchedError {
  double value = 0.0;            // support_error + amplitude_error
  double support_error = 0.0;    // max_j |r_j - s_pi(j)|
  double amplitude_error = 0.0;  // ||u - v_pi||_2 / ||u||_2
  std::vector<int> permutation;  // pi*: rho-atom j -> nu-atom index
};

namespace detail {

inline double matched_amplitude_error(const AtomicMeasure& rho, const AtomicMeasure& nu,
                                      const std::vector<int>& perm) {
  double num = 0.0, den = 0.0;
  for (int j = 0; j < rho.size(); ++j) {
    num += std::norm(rho.atom(j).amplitude - nu.atom(perm[static_cast<std::size_t>(j)]).amplitude);
    den += std::norm(rho.atom(j).amplitude);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

// (max distance, amplitude error, permutation) lexicographic comparison; the
// tie-breaks make the reported permutation deterministic even in symmetric
// configurations.
inline bool matched_better(double dist, double amp, const std::vector<int>& perm,
                           const MatchedError& best) {
  if (dist != best.support_error) return dist < best.support_error;
  if (amp != best.amplitude_error) return amp < best.amplitude_error;
  return perm < best.permutation;
}

inline void match_brute(const AtomicMeasure& rho, const AtomicMeasure& nu,
                        std::vector<int>& perm, std::vector<bool>& used, int j,
                        double running_max, MatchedError& best) {
  const int S = rho.size();
  if (j == S) {
    const double amp = matched_amplitude_error(rho, nu, perm);
    if (matched_better(running_max, amp, perm, best))
      best = MatchedError{running_max + amp, running_max, amp, perm};
    return;
  }
  for (int k = 0; k < S; ++k) {
    if (used[static_cast<std::size_t>(k)]) continue;
    const double d = torus_distance(rho.atom(j).location, nu.atom(k).location);
    const double next_max = std::max(running_max, d);
    if (next_max > best.support_error) continue;  // equal max still competes via tie-breaks
    used[static_cast<std::size_t>(k)] = true;
    perm[static_cast<std::size_t>(j)] = k;
    match_brute(rho, nu, perm, used, j + 1, next_max, best);
    used[static_cast<std::size_t>(k)] = false;
  }
}

}  // namespace detail

// Optimal-permutation support + amplitude error.  Exhaustive search (with
// branch-and-bound pruning) up to S = 10; larger problems align the
// circularly sorted supports and try the S order-preserving rotations, which
// is exact whenever the matching preserves torus order (true in every
// small-error regime this library targets).  `force_brute` overrides.
inline std::optional<MatchedError> error_inf2(const AtomicMeasure& rho, const AtomicMeasure& nu,
                                              bool force_brute = false) {
  if (rho.size() != nu.size()) return std::nullopt;
  const int S = rho.size();
  if (S == 0) return MatchedError{};

  MatchedError best;
  best.support_error = std::numeric_limits<double>::infinity();
  best.amplitude_error = std::numeric_limits<double>::infinity();
  best.value = std::numeric_limits<double>::infinity();

  if (S <= 10 || force_brute) {
    std::vector<int> perm(static_cast<std::size_t>(S));
    std::vector<bool> used(static_cast<std::size_t>(S), false);
    detail::match_brute(rho, nu, perm, used, 0, 0.0, best);
    return best;
  }

  // Atoms of both measures are already sorted by location.
  for (int shift = 0; shift < S; ++shift) {
    std::vector<int> perm(static_cast<std::size_t>(S));
    double dist = 0.0;
    for (int j = 0; j < S; ++j) {
      const int k = (j + shift) % S;
      perm[static_cast<std::size_t>(j)] = k;
      dist = std::max(dist, torus_distance(rho.atom(j).location, nu.atom(k).location));
    }
    const double amp = detail::matched_amplitude_error(rho, nu, perm);
    if (detail::matched_better(dist, amp, perm, best))
      best = MatchedError{dist + amp, dist, amp, perm};
  }
  return best;
}

struct ErrorReport {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double e_lip_upper = 0.0;
  std::optional<MatchedError> matched;  // absent when atom counts differ

  double e_inf2_or_nan() const noexcept {
    return matched ? matched->value : std::numeric_limits<double>::quiet_NaN();
  }
};

inline ErrorReport error_report(const AtomicMeasure& rho, const AtomicMeasure& nu, int M,
                                bool force_brute = false) {
  ErrorReport r;
  const AtomicErrors e = errors_e123(rho, nu, M);
  r.e1 = e.e1;
  r.e2 = e.e2;
  r.e3 = e.e3;
  r.e_lip_upper = rho.size() * e.e1 + std::sqrt(nu.total_variation()) * std::sqrt(e.e2) + e.e3;
  r.matched = error_inf2(rho, nu, force_brute);
  return r;
}

}  // namespace specres

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "membrane/lattice.hpp"
#include "membrane/rng.hpp"

namespace membrane {

inline constexpr std::int64_t kDefaultStepBudget = 10'000'000;

// One simple-random-walk trajectory, stopped at the first exit from the
// region. `completed` is false when the step budget was hit; callers must
// count such replicas, never drop them silently.
struct WalkPath {
  Site start{};
  std::vector<std::uint8_t> steps;  // axis * 2 + (sign > 0)
  std::int64_t exit_time = 0;       // tau: first index outside the region
  Site exit_site{};
  bool completed = true;
};

WalkPath simulate(const Site& start, int dim,
                  const std::function<bool(const Site&)>& region, Rng& rng,
                  std::int64_t step_budget = kDefaultStepBudget);

struct MonteCarloStat {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::int64_t replicas = 0;
  std::int64_t aborted = 0;  // step-budget hits, excluded from the mean
};

// Mean exit time of the open Euclidean ball of radius `radius` around
// `center`, started from `start`.
MonteCarloStat exit_time_stats(const Site& center, double radius, const Site& start,
                               int dim, std::int64_t replicas, std::uint64_t seed,
                               std::int64_t step_budget = kDefaultStepBudget);

// Exact transition probabilities P^0(X_k = y) of the d-dimensional walk by
// convolution recursion on the hyperoctahedral fundamental domain
// (sorted absolute coordinates). Exact as long as radius >= k_max.
class TransitionTable {
 public:
  TransitionTable(int dim, int k_max, int radius,
                  std::int64_t memory_budget_bytes = 1'500'000'000);

  int k_max() const { return k_max_; }
  int radius() const { return radius_; }
  int dim() const { return dim_; }

  double probability(int k, const Site& y) const;
  // Sum of P^0(X_k = y) over all y (orbit multiplicities included).
  double slice_sum(int k) const;

  static Site canonical(const Site& y, int dim);
  static std::int64_t orbit_size(const Site& canonical_site, int dim);

 private:
  std::int64_t rank_of(const Site& canonical_site) const;

  int dim_, k_max_, radius_;
  std::int64_t domain_size_;
  std::vector<std::vector<double>> slices_;  // [k][canonical rank]
  std::vector<std::vector<std::int64_t>> binom_;
};

// P^0(X_k = y) for k = 0..k_max along a single target site, via the exact
// decomposition over per-coordinate step counts: conditionally on the
// multinomial allocation of steps to coordinates, the walk is a product of
// one-dimensional walks. Runs in O(d * k_max^2) and reaches k_max ~ 1500
// in extended precision without over/underflow.
std::vector<double> point_transition_series(const Site& y, int dim, int k_max);

// Gaussian local-limit surrogate for the d = 4 walk.
inline double lclt_surrogate(double k, double dist_sq) {
  return 8.0 / (M_PI * M_PI * k * k) * std::exp(-2.0 * dist_sq / k);
}

struct LcltRow {
  int k = 0;
  Site y{};
  double probability = 0.0;
  double surrogate = 0.0;
  double deviation = 0.0;  // E(k,y): probability - surrogate where reachable, else 0
};

// Tabulates E(k, y) = P^0(X_k = y) - pbar(k, y) over the k range for each
// target, with E = 0 whenever the walk cannot reach y at time k.
std::vector<LcltRow> lclt_compare(int k_lo, int k_hi, const std::vector<Site>& ys,
                                  int dim = 4);

enum class GbarEstimator { single_walk, two_walk };

// Monte Carlo estimators of the convolution Green's function on the box:
// single-walk averages sum_{k < tau} (k+1) 1{X_k = y}; two-walk counts
// intersections of two independent killed walks. Both are unbiased.
MonteCarloStat mc_gbar(const LatticeBox& box, const Site& x, const Site& y,
                       std::int64_t replicas, GbarEstimator estimator,
                       std::uint64_t seed,
                       std::int64_t step_budget = kDefaultStepBudget);

}  // namespace membrane

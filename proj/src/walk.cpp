#include "membrane/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace membrane {

WalkPath simulate(const Site& start, int dim,
                  const std::function<bool(const Site&)>& region, Rng& rng,
                  std::int64_t step_budget) {
  if (!region(start))
    throw std::invalid_argument("simulate: start site lies outside the region");

  WalkPath path;
  path.start = start;
  Site x = start;
  for (std::int64_t k = 0;; ++k) {
    if (k >= step_budget) {
      path.completed = false;
      path.exit_time = k;
      path.exit_site = x;
      return path;
    }
    int move = rng.next_below(2 * dim);
    int axis = move >> 1;
    Coord sign = (move & 1) ? 1 : -1;
    x[static_cast<std::size_t>(axis)] += sign;
    path.steps.push_back(static_cast<std::uint8_t>(move));
    if (!region(x)) {
      path.exit_time = k + 1;
      path.exit_site = x;
      return path;
    }
  }
}

MonteCarloStat exit_time_stats(const Site& center, double radius, const Site& start,
                               int dim, std::int64_t replicas, std::uint64_t seed,
                               std::int64_t step_budget) {
  if (replicas < 100)
    throw std::invalid_argument("exit_time_stats: need at least 100 replicas");
  const double radius_sq = radius * radius;
  auto inside = [&](const Site& z) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      double diff = static_cast<double>(z[static_cast<std::size_t>(i)] -
                                        center[static_cast<std::size_t>(i)]);
      s += diff * diff;
    }
    return s < radius_sq;
  };
  if (!inside(start))
    throw std::invalid_argument("exit_time_stats: start outside the ball");

  MonteCarloStat stat;
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t r = 0; r < replicas; ++r) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(r));
    Site x = start;
    std::int64_t tau = 0;
    bool ok = true;
    while (inside(x)) {
      if (tau >= step_budget) {
        ok = false;
        break;
      }
      int move = rng.next_below(2 * dim);
      x[static_cast<std::size_t>(move >> 1)] += (move & 1) ? 1 : -1;
      ++tau;
    }
    if (!ok) {
      ++stat.aborted;
      continue;
    }
    sum += static_cast<double>(tau);
    sum_sq += static_cast<double>(tau) * static_cast<double>(tau);
    ++stat.replicas;
  }
  if (stat.replicas > 0) {
    stat.mean = sum / static_cast<double>(stat.replicas);
    double var = std::max(0.0, sum_sq / static_cast<double>(stat.replicas) -
                                   stat.mean * stat.mean);
    stat.stderr_ = std::sqrt(var / static_cast<double>(stat.replicas));
  }
  return stat;
}

// ---------------------------------------------------------------------------
// TransitionTable
// ---------------------------------------------------------------------------

Site TransitionTable::canonical(const Site& y, int dim) {
  Site c{};
  for (int i = 0; i < dim; ++i)
    c[static_cast<std::size_t>(i)] = std::abs(y[static_cast<std::size_t>(i)]);
  std::sort(c.begin(), c.begin() + dim, std::greater<Coord>());
  return c;
}

std::int64_t TransitionTable::orbit_size(const Site& c, int dim) {
  std::int64_t perms = 1;
  for (int i = 2; i <= dim; ++i) perms *= i;
  int nonzero = 0;
  for (int i = 0; i < dim; ++i)
    if (c[static_cast<std::size_t>(i)] != 0) ++nonzero;
  std::int64_t denom = 1;  // product of multiplicity factorials
  int i = 0;
  while (i < dim) {
    int j = i;
    while (j < dim && c[static_cast<std::size_t>(j)] == c[static_cast<std::size_t>(i)])
      ++j;
    for (int m = 2; m <= j - i; ++m) denom *= m;
    i = j;
  }
  return perms / denom * (std::int64_t{1} << nonzero);
}

std::int64_t TransitionTable::rank_of(const Site& c) const {
  // combinatorial number system over strictly decreasing b_i = a_i + (d-1-i)
  std::int64_t r = 0;
  for (int i = 0; i < dim_; ++i) {
    std::int64_t b = c[static_cast<std::size_t>(i)] + (dim_ - 1 - i);
    r += binom_[static_cast<std::size_t>(b)][static_cast<std::size_t>(dim_ - i)];
  }
  return r;
}

TransitionTable::TransitionTable(int dim, int k_max, int radius,
                                 std::int64_t memory_budget_bytes)
    : dim_(dim), k_max_(k_max), radius_(radius) {
  if (dim < 1 || k_max < 0 || radius < 0)
    throw std::invalid_argument("TransitionTable: bad parameters");

  const int bmax = radius + dim;
  binom_.assign(static_cast<std::size_t>(bmax) + 1,
                std::vector<std::int64_t>(static_cast<std::size_t>(dim) + 1, 0));
  for (int n = 0; n <= bmax; ++n) {
    binom_[static_cast<std::size_t>(n)][0] = 1;
    for (int k = 1; k <= dim; ++k)
      binom_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
          (n == 0) ? 0
                   : binom_[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k - 1)] +
                         binom_[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k)];
  }
  domain_size_ = binom_[static_cast<std::size_t>(radius + dim)][static_cast<std::size_t>(dim)];

  const std::int64_t bytes =
      (static_cast<std::int64_t>(k_max) + 1) * domain_size_ * 8 + domain_size_ * 2 * dim * 4;
  if (bytes > memory_budget_bytes)
    throw BudgetError("TransitionTable: k_max * |fundamental domain| exceeds memory budget");

  // enumerate the fundamental domain and precompute neighbor ranks
  std::vector<Site> states(static_cast<std::size_t>(domain_size_));
  {
    Site cur{};
    auto rec = [&](auto&& self, int pos, Coord upper) -> void {
      if (pos == dim_) {
        states[static_cast<std::size_t>(rank_of(cur))] = cur;
        return;
      }
      for (Coord v = 0; v <= upper; ++v) {
        cur[static_cast<std::size_t>(pos)] = v;
        self(self, pos + 1, v);
      }
      cur[static_cast<std::size_t>(pos)] = 0;
    };
    rec(rec, 0, static_cast<Coord>(radius));
  }

  std::vector<std::int32_t> neighbors(static_cast<std::size_t>(domain_size_) *
                                      static_cast<std::size_t>(2 * dim));
  for (std::int64_t s = 0; s < domain_size_; ++s) {
    const Site& y = states[static_cast<std::size_t>(s)];
    for (int i = 0; i < dim_; ++i)
      for (int sg = 0; sg < 2; ++sg) {
        Site z = shifted(y, i, sg ? 1 : -1);
        Site cz = canonical(z, dim_);
        std::int32_t idx = -1;
        if (cz[0] <= radius) idx = static_cast<std::int32_t>(rank_of(cz));
        neighbors[static_cast<std::size_t>(s) * static_cast<std::size_t>(2 * dim) +
                  static_cast<std::size_t>(i * 2 + sg)] = idx;
      }
  }

  slices_.assign(static_cast<std::size_t>(k_max) + 1,
                 std::vector<double>(static_cast<std::size_t>(domain_size_), 0.0));
  slices_[0][static_cast<std::size_t>(rank_of(Site{}))] = 1.0;
  const double inv2d = 1.0 / (2.0 * dim_);
  for (int k = 1; k <= k_max_; ++k) {
    const auto& prev = slices_[static_cast<std::size_t>(k - 1)];
    auto& cur = slices_[static_cast<std::size_t>(k)];
    for (std::int64_t s = 0; s < domain_size_; ++s) {
      double acc = 0.0;
      const std::int32_t* nb = &neighbors[static_cast<std::size_t>(s) *
                                          static_cast<std::size_t>(2 * dim_)];
      for (int m = 0; m < 2 * dim_; ++m)
        if (nb[m] >= 0) acc += prev[static_cast<std::size_t>(nb[m])];
      cur[static_cast<std::size_t>(s)] = inv2d * acc;
    }
  }
}

double TransitionTable::probability(int k, const Site& y) const {
  if (k < 0 || k > k_max_) throw std::out_of_range("TransitionTable: k out of range");
  Site c = canonical(y, dim_);
  if (c[0] > radius_) return 0.0;
  return slices_[static_cast<std::size_t>(k)][static_cast<std::size_t>(rank_of(c))];
}

double TransitionTable::slice_sum(int k) const {
  if (k < 0 || k > k_max_) throw std::out_of_range("TransitionTable: k out of range");
  const auto& slice = slices_[static_cast<std::size_t>(k)];
  double total = 0.0;
  Site cur{};
  auto rec = [&](auto&& self, int pos, Coord upper) -> void {
    if (pos == dim_) {
      total += slice[static_cast<std::size_t>(rank_of(cur))] *
               static_cast<double>(orbit_size(cur, dim_));
      return;
    }
    for (Coord v = 0; v <= upper; ++v) {
      cur[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, v);
    }
    cur[static_cast<std::size_t>(pos)] = 0;
  };
  rec(rec, 0, static_cast<Coord>(radius_));
  return total;
}

// ---------------------------------------------------------------------------
// Exact single-target series via per-coordinate factorization
// ---------------------------------------------------------------------------

std::vector<double> point_transition_series(const Site& y, int dim, int k_max) {
  if (k_max < 0) throw std::invalid_argument("point_transition_series: k_max < 0");
  if (k_max > 1600)
    throw BudgetError(
        "point_transition_series: k_max beyond extended-precision range (1600)");

  const std::size_t len = static_cast<std::size_t>(k_max) + 1;

  // one-dimensional pmf series at each target coordinate
  std::vector<std::vector<long double>> u(static_cast<std::size_t>(dim),
                                          std::vector<long double>(len, 0.0L));
  {
    // row index p encodes lattice position z = p - (k_max + 1)
    std::vector<long double> row(2 * static_cast<std::size_t>(k_max) + 3, 0.0L);
    std::vector<long double> next(row.size(), 0.0L);
    const std::int64_t mid = k_max + 1;
    for (int i = 0; i < dim; ++i) {
      std::fill(row.begin(), row.end(), 0.0L);
      row[static_cast<std::size_t>(mid)] = 1.0L;
      const Coord target = y[static_cast<std::size_t>(i)];
      for (int m = 0; m <= k_max; ++m) {
        if (std::abs(target) <= m)
          u[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] =
              row[static_cast<std::size_t>(mid + target)];
        if (m < k_max) {
          for (std::size_t p = 1; p + 1 < row.size(); ++p)
            next[p] = 0.5L * (row[p - 1] + row[p + 1]);
          std::swap(row, next);
        }
      }
    }
  }

  // inverse factorials
  std::vector<long double> inv_fact(len);
  inv_fact[0] = 1.0L;
  for (std::size_t m = 1; m < len; ++m)
    inv_fact[m] = inv_fact[m - 1] / static_cast<long double>(m);

  auto scaled = [&](int i) {
    std::vector<long double> v(len);
    for (std::size_t m = 0; m < len; ++m)
      v[m] = u[static_cast<std::size_t>(i)][m] * inv_fact[m];
    return v;
  };

  auto convolve = [&](const std::vector<long double>& a,
                      const std::vector<long double>& b) {
    std::vector<long double> c(len, 0.0L);
    for (std::size_t i = 0; i < len; ++i) {
      if (a[i] == 0.0L) continue;
      const std::size_t jmax = len - i;
      for (std::size_t j = 0; j < jmax; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
  };

  std::vector<long double> acc = scaled(0);
  for (int i = 1; i < dim; ++i) acc = convolve(acc, scaled(i));

  std::vector<double> out(len, 0.0);
  long double factor = 1.0L;  // k! / d^k
  for (std::size_t k = 0; k < len; ++k) {
    if (k > 0) factor *= static_cast<long double>(k) / static_cast<long double>(dim);
    out[k] = static_cast<double>(factor * acc[k]);
  }
  return out;
}

std::vector<LcltRow> lclt_compare(int k_lo, int k_hi, const std::vector<Site>& ys,
                                  int dim) {
  if (k_lo < 1 || k_hi < k_lo) throw std::invalid_argument("lclt_compare: bad k range");
  std::vector<LcltRow> rows;
  for (const Site& y : ys) {
    auto series = point_transition_series(y, dim, k_hi);
    std::int64_t l1 = 0;
    for (int i = 0; i < dim; ++i) l1 += std::abs(y[static_cast<std::size_t>(i)]);
    double dist_sq = 0.0;
    for (int i = 0; i < dim; ++i) {
      double c = static_cast<double>(y[static_cast<std::size_t>(i)]);
      dist_sq += c * c;
    }
    for (int k = k_lo; k <= k_hi; ++k) {
      LcltRow row;
      row.k = k;
      row.y = y;
      row.probability = series[static_cast<std::size_t>(k)];
      row.surrogate = lclt_surrogate(static_cast<double>(k), dist_sq);
      const bool reachable = (k >= l1) && ((k - l1) % 2 == 0);
      row.deviation = reachable ? row.probability - row.surrogate : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Monte Carlo estimators for the convolution Green's function
// ---------------------------------------------------------------------------

namespace {

// Visit counts of a killed walk, indexed by box id; `touched` enables O(path)
// reset across replicas.
struct VisitCounter {
  std::vector<std::int32_t> counts;
  std::vector<std::int64_t> touched;

  explicit VisitCounter(std::int64_t n) : counts(static_cast<std::size_t>(n), 0) {}

  void add(std::int64_t id) {
    if (counts[static_cast<std::size_t>(id)] == 0) touched.push_back(id);
    ++counts[static_cast<std::size_t>(id)];
  }
  void reset() {
    for (std::int64_t id : touched) counts[static_cast<std::size_t>(id)] = 0;
    touched.clear();
  }
};

}  // namespace

MonteCarloStat mc_gbar(const LatticeBox& box, const Site& x, const Site& y,
                       std::int64_t replicas, GbarEstimator estimator,
                       std::uint64_t seed, std::int64_t step_budget) {
  if (!box.contains(x) || !box.contains(y))
    throw std::invalid_argument("mc_gbar: x and y must lie in the box");
  const int d = box.dim();
  const std::int64_t y_id = box.index_of(y);

  MonteCarloStat stat;
  double sum = 0.0, sum_sq = 0.0;
  VisitCounter visits_x(box.site_count());
  VisitCounter visits_y(box.site_count());

  // Walks until first exit; returns false on budget hit. Visit counts cover
  // times k = 0, ..., tau-1 (the walk is outside the box at tau).
  auto run_walk = [&](Rng& rng, const Site& start, VisitCounter* counter,
                      double* weighted_hits) -> bool {
    Site cur = start;
    std::int64_t id = box.index_of(cur);
    for (std::int64_t k = 0;; ++k) {
      if (k >= step_budget) return false;
      if (counter != nullptr) counter->add(id);
      if (weighted_hits != nullptr && id == y_id)
        *weighted_hits += static_cast<double>(k + 1);
      int move = rng.next_below(2 * d);
      cur[static_cast<std::size_t>(move >> 1)] += (move & 1) ? 1 : -1;
      id = box.index_of(cur);
      if (id < 0) return true;
    }
  };

  for (std::int64_t r = 0; r < replicas; ++r) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(r));
    double value = 0.0;
    bool ok = true;
    if (estimator == GbarEstimator::single_walk) {
      ok = run_walk(rng, x, nullptr, &value);
    } else {
      visits_x.reset();
      visits_y.reset();
      ok = run_walk(rng, x, &visits_x, nullptr) && run_walk(rng, y, &visits_y, nullptr);
      if (ok) {
        for (std::int64_t id : visits_x.touched)
          value += static_cast<double>(visits_x.counts[static_cast<std::size_t>(id)]) *
                   static_cast<double>(visits_y.counts[static_cast<std::size_t>(id)]);
      }
    }
    if (!ok) {
      ++stat.aborted;
      continue;
    }
    sum += value;
    sum_sq += value * value;
    ++stat.replicas;
  }

  if (stat.replicas > 0) {
    stat.mean = sum / static_cast<double>(stat.replicas);
    double var = std::max(0.0, sum_sq / static_cast<double>(stat.replicas) -
                                   stat.mean * stat.mean);
    stat.stderr_ = std::sqrt(var / static_cast<double>(stat.replicas));
  }
  return stat;
}

}  // namespace membrane

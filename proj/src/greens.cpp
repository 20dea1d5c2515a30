#include "membrane/greens.hpp"

#include <cmath>

#include "membrane/walk.hpp"

namespace membrane {

GreensEngine::GreensEngine(const LatticeBox& box, SolverOptions opts)
    : box_(box), opts_(opts) {}

const SpdSolver& GreensEngine::laplacian_solver() const {
  std::lock_guard<std::mutex> lock(solver_mutex_);
  if (!neg_laplacian_) {
    Eigen::SparseMatrix<double> neg = -assemble_laplacian(box_).matrix;
    neg_laplacian_ = std::make_unique<SpdSolver>(neg, opts_);
  }
  return *neg_laplacian_;
}

const SpdSolver& GreensEngine::bilaplacian_solver() const {
  std::lock_guard<std::mutex> lock(solver_mutex_);
  if (!bilaplacian_) {
    bilaplacian_ =
        std::make_unique<SpdSolver>(assemble_bilaplacian(box_).matrix, opts_);
  }
  return *bilaplacian_;
}

std::shared_ptr<const Eigen::VectorXd> GreensEngine::harmonic_column(
    const Site& y) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = harmonic_cache_.find(y);
    if (it != harmonic_cache_.end()) return it->second;
  }
  std::int64_t id = box_.index_of(y);
  if (id < 0) throw std::invalid_argument("harmonic_column: y outside the box");
  const SpdSolver& solver = laplacian_solver();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(box_.site_count());
  rhs[id] = 1.0;
  auto col = std::make_shared<Eigen::VectorXd>(solver.solve(rhs));
  lap_iterations_ = solver.last_iterations();
  std::lock_guard<std::mutex> lock(cache_mutex_);
  harmonic_cache_[y] = col;
  return col;
}

std::shared_ptr<const GbarColumn> GreensEngine::gbar_column(const Site& y) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = gbar_cache_.find(y);
    if (it != gbar_cache_.end()) return it->second;
  }
  auto gamma = harmonic_column(y);
  const SpdSolver& solver = laplacian_solver();

  auto col = std::make_shared<GbarColumn>();
  col->interior = solver.solve(*gamma);
  col->boundary2 =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(box_.boundary2().size()));

  // Second-layer extension: each axial site at excess two faces exactly one
  // simple-boundary site; the zero-Laplacian condition there pins the value
  // to the negated inner neighbor.
  const auto& bdry = box_.boundary2();
  const int d = box_.dim();
  for (std::size_t b = 0; b < bdry.size(); ++b) {
    const Site& s = bdry[b];
    int axial_axis = -1;
    Coord axial_sign = 0;
    bool axial = true;
    for (int i = 0; i < d && axial; ++i) {
      Coord rel = s[static_cast<std::size_t>(i)] -
                  box_.center()[static_cast<std::size_t>(i)];
      Coord mag = std::abs(rel);
      if (mag > box_.half_width()) {
        if (mag == box_.half_width() + 2 && axial_axis < 0) {
          axial_axis = i;
          axial_sign = rel > 0 ? 1 : -1;
        } else {
          axial = false;
        }
      }
    }
    if (!axial || axial_axis < 0) continue;
    Site inner = shifted(s, axial_axis, static_cast<Coord>(-2 * axial_sign));
    std::int64_t inner_id = box_.index_of(inner);
    col->boundary2[static_cast<Eigen::Index>(b)] = -col->interior[inner_id];
  }

  std::lock_guard<std::mutex> lock(cache_mutex_);
  gbar_cache_[y] = col;
  return col;
}

std::shared_ptr<const Eigen::VectorXd> GreensEngine::biharmonic_column(
    const Site& y) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = biharmonic_cache_.find(y);
    if (it != biharmonic_cache_.end()) return it->second;
  }
  std::int64_t id = box_.index_of(y);
  if (id < 0) throw std::invalid_argument("biharmonic_column: y outside the box");
  const SpdSolver& solver = bilaplacian_solver();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(box_.site_count());
  rhs[id] = 1.0;
  auto col = std::make_shared<Eigen::VectorXd>(solver.solve(rhs));
  bil_iterations_ = solver.last_iterations();
  std::lock_guard<std::mutex> lock(cache_mutex_);
  biharmonic_cache_[y] = col;
  return col;
}

Eigen::VectorXd GreensEngine::gap_column(const Site& y) const {
  return gbar_column(y)->interior - *biharmonic_column(y);
}

double GreensEngine::harmonic_value(const Site& x, const Site& y) const {
  std::int64_t id = box_.index_of(x);
  if (id < 0) throw std::invalid_argument("harmonic_value: x outside the box");
  return (*harmonic_column(y))[id];
}

double GreensEngine::gbar_value(const Site& x, const Site& y) const {
  auto col = gbar_column(y);
  std::int64_t id = box_.index_of(x);
  if (id >= 0) return col->interior[id];
  id = box_.boundary2_index(x);
  if (id >= 0) return col->boundary2[id];
  return 0.0;
}

double GreensEngine::biharmonic_value(const Site& x, const Site& y) const {
  std::int64_t id = box_.index_of(x);
  if (id < 0) throw std::invalid_argument("biharmonic_value: x outside the box");
  return (*biharmonic_column(y))[id];
}

GapReport GreensEngine::green_gap(const Site& x, double delta) const {
  if (!box_.in_interior_region(x, delta))
    throw std::invalid_argument("green_gap: x outside the delta-interior");
  if (delta * box_.half_width() < 1.0)
    throw std::invalid_argument("green_gap: delta-interior margin below one step");

  GapReport report;
  report.x = x;
  report.delta = delta;
  report.column = gap_column(x);
  report.sup_gradient.assign(static_cast<std::size_t>(box_.dim()), 0.0);

  for (const Site& y : box_.interior_region(delta)) {
    std::int64_t id = box_.index_of(y);
    report.sup_gap = std::max(report.sup_gap, std::abs(report.column[id]));
    for (int i = 0; i < box_.dim(); ++i) {
      std::int64_t nid = box_.index_of(shifted(y, i, 1));
      double diff = std::abs(report.column[nid] - report.column[id]);
      report.sup_gradient[static_cast<std::size_t>(i)] =
          std::max(report.sup_gradient[static_cast<std::size_t>(i)], diff);
    }
  }
  for (double g : report.sup_gradient)
    report.sup_gradient_all = std::max(report.sup_gradient_all, g);
  return report;
}

// ---------------------------------------------------------------------------
// Fundamental solution
// ---------------------------------------------------------------------------

namespace {

std::int64_t l1_norm(const Site& y, int dim) {
  std::int64_t s = 0;
  for (int i = 0; i < dim; ++i) s += std::abs(y[static_cast<std::size_t>(i)]);
  return s;
}

double sq_norm(const Site& y, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    double c = static_cast<double>(y[static_cast<std::size_t>(i)]);
    s += c * c;
  }
  return s;
}

}  // namespace

FundamentalValue fundamental_a(const Site& y, int k_max, double min_kmax_coeff) {
  constexpr int d = 4;
  FundamentalValue result;
  result.k_max = k_max;

  const double dist_sq = sq_norm(y, d);
  if (dist_sq == 0.0) return result;  // a(0,0) = 0

  if (static_cast<double>(k_max) < min_kmax_coeff * dist_sq)
    throw std::invalid_argument(
        "fundamental_a: k_max too small relative to |y|^2; tail bound would "
        "dominate");

  auto p0 = point_transition_series(Site{}, d, k_max);
  auto py = point_transition_series(y, d, k_max);

  long double main = 0.0L;
  for (int k = 0; k <= k_max; ++k)
    main += static_cast<long double>(k + 1) *
            (static_cast<long double>(p0[static_cast<std::size_t>(k)]) -
             static_cast<long double>(py[static_cast<std::size_t>(k)]));

  // Tail at the admissible parities from the Gaussian surrogate. The walk is
  // bipartite: the origin lives on even times, y on times matching |y|_1.
  const int parity_y = static_cast<int>(l1_norm(y, d) & 1);
  const std::int64_t k_hi =
      std::max<std::int64_t>(1'000'000, 200 * static_cast<std::int64_t>(dist_sq));
  long double tail = 0.0L;
  for (std::int64_t k = k_max + 1; k <= k_hi; ++k) {
    const double kd = static_cast<double>(k);
    if ((k & 1) == 0)
      tail += static_cast<long double>((kd + 1.0) * lclt_surrogate(kd, 0.0));
    if ((k & 1) == parity_y)
      tail -= static_cast<long double>((kd + 1.0) * lclt_surrogate(kd, dist_sq));
  }
  // leading remainder of the paired series beyond k_hi
  const double remainder =
      8.0 * dist_sq / (M_PI * M_PI * static_cast<double>(k_hi));
  tail += static_cast<long double>(remainder);

  result.value = static_cast<double>(main + tail);
  // local-CLT error decays like k^{-3} per term, so the uncorrected mass
  // beyond k_max is of order 1/k_max; the truncation remainder adds on top.
  result.tail_bound = 4.0 / static_cast<double>(k_max) + remainder;
  return result;
}

FundamentalValue fundamental_a(const Site& x, const Site& y, int k_max,
                               double min_kmax_coeff) {
  Site diff{};
  for (int i = 0; i < kMaxDim; ++i)
    diff[static_cast<std::size_t>(i)] =
        y[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)];
  return fundamental_a(diff, k_max, min_kmax_coeff);
}

FundamentalSolutionFit fit_fundamental_solution(const std::vector<Site>& ys,
                                                int k_max) {
  FundamentalSolutionFit fit;
  fit.k_max = k_max;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const Site& y : ys) {
    FundamentalValue v = fundamental_a(y, k_max);
    fit.samples.emplace_back(y, v.value);
    fit.max_tail_bound = std::max(fit.max_tail_bound, v.tail_bound);
    double lx = 0.5 * std::log(sq_norm(y, 4));
    sx += lx;
    sy += v.value;
    sxx += lx * lx;
    sxy += lx * v.value;
  }
  const double n = static_cast<double>(ys.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit: degenerate target set");
  fit.gamma_hat = (n * sxy - sx * sy) / denom;
  fit.k_hat = (sy - fit.gamma_hat * sx) / n;
  return fit;
}

std::vector<Site> default_fundamental_targets() {
  std::vector<Site> ys;
  for (int m = 2; m <= 12; ++m) ys.push_back(make_site({m, 0, 0, 0}));
  for (int m = 2; m <= 8; ++m) ys.push_back(make_site({m, m, 0, 0}));
  for (int m = 1; m <= 6; ++m) ys.push_back(make_site({m, m, m, m}));
  return ys;
}

}  // namespace membrane

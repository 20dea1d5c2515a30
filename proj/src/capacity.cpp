#include "membrane/capacity.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "membrane/stencil.hpp"

namespace membrane {

namespace {

// Degrees of freedom of the zero-trace space: box sites off the inner
// boundary layer.
std::vector<Site> capacity_dof(const LatticeBox& box) {
  std::vector<Site> dof;
  for (std::int64_t id = 0; id < box.site_count(); ++id) {
    Site s = box.site_at(id);
    if (!box.on_inner_boundary(s)) dof.push_back(s);
  }
  return dof;
}

struct CapacityWorkspace {
  std::vector<Site> dof;
  std::unordered_map<Site, std::int64_t, SiteHash> index;
  Eigen::SparseMatrix<double> form;   // quadratic form over the dof
  std::vector<std::int64_t> obstacle; // dof indices of obstacle sites
};

CapacityWorkspace make_workspace(const LatticeBox& box,
                                 const std::vector<Site>& obstacle) {
  CapacityWorkspace w;
  w.dof = capacity_dof(box);
  w.index.reserve(w.dof.size() * 2);
  for (std::size_t k = 0; k < w.dof.size(); ++k)
    w.index.emplace(w.dof[k], static_cast<std::int64_t>(k));
  w.form = bilaplacian_on_sites(w.dof, box.dim());
  for (const Site& s : obstacle) {
    auto it = w.index.find(s);
    if (it == w.index.end())
      throw std::invalid_argument(
          "capacity: obstacle site outside the zero-trace degrees of freedom "
          "(touches the inner boundary or the exterior)");
    w.obstacle.push_back(it->second);
  }
  std::sort(w.obstacle.begin(), w.obstacle.end());
  return w;
}

// minimize the quadratic form with h fixed to `level` on the clamped set
Eigen::VectorXd equality_solve(const CapacityWorkspace& w,
                               const std::vector<char>& clamped, double level) {
  const Eigen::Index n = static_cast<Eigen::Index>(w.dof.size());
  std::vector<Eigen::Index> free_of(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> free_list;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!clamped[static_cast<std::size_t>(i)]) {
      free_of[static_cast<std::size_t>(i)] =
          static_cast<Eigen::Index>(free_list.size());
      free_list.push_back(i);
    }

  const Eigen::Index nf = static_cast<Eigen::Index>(free_list.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator itq(w.form, col); itq; ++itq) {
      const Eigen::Index row = itq.row();
      const bool row_free = !clamped[static_cast<std::size_t>(row)];
      const bool col_free = !clamped[static_cast<std::size_t>(col)];
      if (row_free && col_free) {
        trips.emplace_back(static_cast<int>(free_of[static_cast<std::size_t>(row)]),
                           static_cast<int>(free_of[static_cast<std::size_t>(col)]),
                           itq.value());
      } else if (row_free && !col_free) {
        rhs[free_of[static_cast<std::size_t>(row)]] -= level * itq.value();
      }
    }
  }
  Eigen::SparseMatrix<double> qff(static_cast<int>(nf), static_cast<int>(nf));
  qff.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(qff);
  if (llt.info() != Eigen::Success)
    throw SolverError("solve_primal: working-set factorization failed");
  Eigen::VectorXd hf = llt.solve(rhs);

  Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < nf; ++k)
    h[free_list[static_cast<std::size_t>(k)]] = hf[k];
  for (Eigen::Index i = 0; i < n; ++i)
    if (clamped[static_cast<std::size_t>(i)]) h[i] = level;
  return h;
}

Field embed_dof(const LatticeBox& box, const CapacityWorkspace& w,
                const Eigen::VectorXd& h) {
  Field f = Field::zeros(box);
  for (std::size_t k = 0; k < w.dof.size(); ++k)
    f.interior[box.index_of(w.dof[k])] = h[static_cast<Eigen::Index>(k)];
  return f;
}

KktResiduals residuals(const CapacityWorkspace& w, const Eigen::VectorXd& h,
                       double value, double level) {
  KktResiduals r;
  Eigen::VectorXd g = w.form * h;
  std::vector<char> on_obstacle(static_cast<std::size_t>(h.size()), 0);
  for (std::int64_t i : w.obstacle) on_obstacle[static_cast<std::size_t>(i)] = 1;
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (on_obstacle[static_cast<std::size_t>(i)]) {
      r.feasibility = std::max(r.feasibility, level - h[i]);
      r.complementarity = std::max(
          r.complementarity, std::abs(g[i] * (h[i] - level)) / (1.0 + value));
      // multiplier must be nonnegative
      r.stationarity = std::max(r.stationarity, std::max(0.0, -g[i]));
    } else {
      r.stationarity = std::max(r.stationarity, std::abs(g[i]));
    }
  }
  r.feasibility = std::max(0.0, r.feasibility);
  return r;
}

}  // namespace

CapacitySolution solve_primal(const LatticeBox& box,
                              const std::vector<Site>& obstacle,
                              const QpOptions& opts) {
  CapacityWorkspace w = make_workspace(box, obstacle);
  const Eigen::Index n = static_cast<Eigen::Index>(w.dof.size());

  CapacitySolution sol;
  sol.method = opts.method;

  if (w.obstacle.empty()) {
    // unconstrained minimum
    sol.h = embed_dof(box, w, Eigen::VectorXd::Zero(n));
    sol.dual_f = Eigen::VectorXd();
    return sol;
  }

  const double level = opts.obstacle_level;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n);

  if (opts.method == QpMethod::active_set) {
    std::vector<char> active(w.obstacle.size(), 1);
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
      std::vector<char> clamped(static_cast<std::size_t>(n), 0);
      for (std::size_t k = 0; k < w.obstacle.size(); ++k)
        if (active[k]) clamped[static_cast<std::size_t>(w.obstacle[k])] = 1;
      h = equality_solve(w, clamped, level);

      // optimality checks: feasibility of inactive constraints, sign of
      // multipliers on active ones
      Eigen::VectorXd g = w.form * h;
      bool changed = false;
      for (std::size_t k = 0; k < w.obstacle.size(); ++k) {
        if (!active[k] &&
            h[static_cast<Eigen::Index>(w.obstacle[k])] < level - opts.feasibility_tol) {
          active[k] = 1;
          changed = true;
        }
      }
      if (!changed) {
        double worst = -opts.stationarity_tol;
        std::ptrdiff_t worst_k = -1;
        for (std::size_t k = 0; k < w.obstacle.size(); ++k) {
          if (active[k] && g[static_cast<Eigen::Index>(w.obstacle[k])] < worst) {
            worst = g[static_cast<Eigen::Index>(w.obstacle[k])];
            worst_k = static_cast<std::ptrdiff_t>(k);
          }
        }
        if (worst_k >= 0) {
          active[static_cast<std::size_t>(worst_k)] = 0;
          changed = true;
        }
      }
      if (!changed) {
        ++it;
        break;
      }
    }
    sol.iterations = it;
    sol.converged = it < opts.max_iterations;
  } else {
    // FISTA with monotone restart on the bound-constrained problem
    // power iteration for the Lipschitz constant
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
    double lambda_max = 1.0;
    for (int i = 0; i < 60; ++i) {
      v = (w.form * v).eval();
      lambda_max = v.norm();
      v /= lambda_max;
    }
    const double step = 1.0 / (1.05 * lambda_max);

    auto project = [&](Eigen::VectorXd& x) {
      for (std::int64_t i : w.obstacle)
        x[static_cast<Eigen::Index>(i)] =
            std::max(x[static_cast<Eigen::Index>(i)], level);
    };

    project(h);
    Eigen::VectorXd y = h;
    double t = 1.0;
    double best_obj = std::numeric_limits<double>::infinity();
    int it = 0;
    bool done = false;
    for (; it < opts.max_pg_iterations && !done; ++it) {
      Eigen::VectorXd grad = w.form * y;
      Eigen::VectorXd h_next = y - step * grad;
      project(h_next);

      double obj = 0.5 * h_next.dot(w.form * h_next);
      if (obj > best_obj) {  // restart momentum
        t = 1.0;
        y = h;
        continue;
      }
      best_obj = std::min(best_obj, obj);

      double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = h_next + ((t - 1.0) / t_next) * (h_next - h);
      h = h_next;
      t = t_next;

      // once the iterate has settled, identify the active set and polish
      // with one equality solve on it
      if (it > 0 && it % 256 == 0) {
        std::vector<char> clamped(static_cast<std::size_t>(n), 0);
        for (std::int64_t i : w.obstacle)
          if (h[static_cast<Eigen::Index>(i)] <= level * (1.0 + 1e-9))
            clamped[static_cast<std::size_t>(i)] = 1;
        Eigen::VectorXd polished = equality_solve(w, clamped, level);
        double pol_obj = 0.5 * polished.dot(w.form * polished);
        KktResiduals r = residuals(w, polished, pol_obj, level);
        if (r.stationarity <= opts.stationarity_tol * (1.0 + pol_obj) &&
            r.feasibility <= opts.feasibility_tol &&
            r.complementarity <= opts.feasibility_tol) {
          h = polished;
          done = true;
        }
      }
    }
    sol.iterations = it;
    sol.converged = done || it < opts.max_pg_iterations;
  }

  sol.primal_value = 0.5 * h.dot(w.form * h);
  Eigen::VectorXd g = w.form * h;
  sol.dual_f = Eigen::VectorXd(static_cast<Eigen::Index>(w.obstacle.size()));
  for (std::size_t k = 0; k < w.obstacle.size(); ++k)
    sol.dual_f[static_cast<Eigen::Index>(k)] =
        std::max(0.0, g[static_cast<Eigen::Index>(w.obstacle[k])]);
  // dual value of the recovered multiplier
  {
    double lin = level * sol.dual_f.sum();
    double quad = 0.0;
    for (std::size_t k = 0; k < w.obstacle.size(); ++k)
      quad += sol.dual_f[static_cast<Eigen::Index>(k)] *
              h[static_cast<Eigen::Index>(w.obstacle[k])];
    sol.dual_value = lin - 0.5 * quad;
  }
  sol.kkt = residuals(w, h, sol.primal_value, level);
  sol.h = embed_dof(box, w, h);
  return sol;
}

DualSolution solve_dual(const LatticeBox& box, const std::vector<Site>& obstacle,
                        bool sign_constrained) {
  CapacityWorkspace w = make_workspace(box, obstacle);
  const Eigen::Index m = static_cast<Eigen::Index>(w.obstacle.size());

  DualSolution sol;
  sol.sign_constrained = sign_constrained;
  if (m == 0) {
    sol.f = Eigen::VectorXd();
    return sol;
  }

  // dense Green's matrix of the quadratic form restricted to the obstacle
  SolverOptions sopts;
  sopts.direct_threshold = static_cast<std::int64_t>(w.dof.size()) + 1;
  SpdSolver solver(w.form, sopts);
  Eigen::MatrixXd green(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(w.dof.size()));
    rhs[static_cast<Eigen::Index>(w.obstacle[static_cast<std::size_t>(j)])] = 1.0;
    Eigen::VectorXd col = solver.solve(rhs);
    for (Eigen::Index i = 0; i < m; ++i)
      green(i, j) = col[static_cast<Eigen::Index>(w.obstacle[static_cast<std::size_t>(i)])];
  }

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd f;
  if (!sign_constrained) {
    f = green.ldlt().solve(ones);
    sol.iterations = 1;
  } else {
    // NNLS-style active set on f >= 0
    std::vector<char> free_set(static_cast<std::size_t>(m), 1);
    const double tol = 1e-12;
    int it = 0;
    for (; it < 4 * static_cast<int>(m) + 16; ++it) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index i = 0; i < m; ++i)
        if (free_set[static_cast<std::size_t>(i)]) idx.push_back(i);
      f = Eigen::VectorXd::Zero(m);
      if (!idx.empty()) {
        Eigen::MatrixXd sub(idx.size(), idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a)
          for (std::size_t b = 0; b < idx.size(); ++b)
            sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                green(idx[a], idx[b]);
        Eigen::VectorXd sub_f =
            sub.ldlt().solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(idx.size())));
        for (std::size_t a = 0; a < idx.size(); ++a) f[idx[a]] = sub_f[static_cast<Eigen::Index>(a)];
      }

      // drop the most negative component, else check zeroed gradients
      Eigen::Index worst = -1;
      double worst_val = -tol;
      for (Eigen::Index i = 0; i < m; ++i)
        if (free_set[static_cast<std::size_t>(i)] && f[i] < worst_val) {
          worst_val = f[i];
          worst = i;
        }
      if (worst >= 0) {
        free_set[static_cast<std::size_t>(worst)] = 0;
        continue;
      }
      Eigen::VectorXd grad = ones - green * f;
      Eigen::Index best = -1;
      double best_val = tol;
      for (Eigen::Index i = 0; i < m; ++i)
        if (!free_set[static_cast<std::size_t>(i)] && grad[i] > best_val) {
          best_val = grad[i];
          best = i;
        }
      if (best >= 0) {
        free_set[static_cast<std::size_t>(best)] = 1;
        continue;
      }
      break;
    }
    sol.iterations = it;
  }

  sol.f = f;
  const double lin = ones.dot(f);
  const double quad = f.dot(green * f);
  sol.value = lin - 0.5 * quad;
  sol.rayleigh = quad > 0.0 ? lin * lin / (2.0 * quad) : 0.0;
  return sol;
}

ExtrapolationReport continuum_extrapolate(
    const std::vector<std::pair<int, double>>& values) {
  if (values.size() < 3)
    throw std::invalid_argument("continuum_extrapolate: need at least 3 values");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i].first <= values[i - 1].first)
      throw std::invalid_argument("continuum_extrapolate: N must increase");

  ExtrapolationReport report;
  report.values = values;
  for (std::size_t i = 1; i < values.size(); ++i)
    report.differences.push_back(values[i].second - values[i - 1].second);

  const double d_prev = report.differences[report.differences.size() - 2];
  const double d_last = report.differences.back();
  report.cauchy = true;
  for (std::size_t i = 1; i < report.differences.size(); ++i)
    if (std::abs(report.differences[i]) > std::abs(report.differences[i - 1]))
      report.cauchy = false;

  if (d_last == 0.0) {
    report.richardson = values.back().second;
    report.rate = 0.0;
  } else {
    const double ratio = std::abs(d_prev / d_last);
    const double n_ratio = static_cast<double>(values.back().first) /
                           static_cast<double>(values[values.size() - 2].first);
    report.rate = ratio > 1.0 ? std::log(ratio) / std::log(n_ratio) : 0.0;
    report.richardson = ratio > 1.0
                            ? values.back().second + d_last / (ratio - 1.0)
                            : values.back().second;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Tilt profiles and the relative-entropy rate
// ---------------------------------------------------------------------------

namespace {

// seventh-order smoothstep, C^3 across the junctions
double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * u * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)));
}

}  // namespace

TiltProfile TiltProfile::smooth_bump(double plateau, double support) {
  if (!(0.0 < plateau && plateau < support && support < 1.0))
    throw std::invalid_argument("smooth_bump: need 0 < plateau < support < 1");
  TiltProfile p;
  p.plateau_ = plateau;
  p.support_ = support;
  return p;
}

TiltProfile TiltProfile::from_field(Field f) {
  TiltProfile p;
  p.discrete_ = true;
  p.field_ = std::move(f);
  return p;
}

double TiltProfile::value(const Site& x, const LatticeBox& box) const {
  if (discrete_) return field_.value(x);
  const double n = static_cast<double>(box.half_width());
  double prod = 1.0;
  for (int i = 0; i < box.dim(); ++i) {
    double t = std::abs(static_cast<double>(x[static_cast<std::size_t>(i)] -
                                            box.center()[static_cast<std::size_t>(i)])) /
               n;
    prod *= 1.0 - smoothstep((t - plateau_) / (support_ - plateau_));
    if (prod == 0.0) break;
  }
  return prod;
}

Field TiltProfile::discretize(const LatticeBox& box) const {
  Field f = Field::zeros(box);
  for (std::int64_t id = 0; id < box.site_count(); ++id)
    f.interior[id] = value(box.site_at(id), box);
  const auto& bdry = box.boundary2();
  for (std::size_t b = 0; b < bdry.size(); ++b)
    f.boundary2[static_cast<Eigen::Index>(b)] = value(bdry[b], box);
  return f;
}

double entropy_rate(const TiltProfile& profile, const LatticeBox& box,
                    double amplitude) {
  Field f_n = profile.discretize(box);
  Field lap = apply_laplacian(f_n);
  return 0.5 * amplitude * amplitude * lap.interior.squaredNorm();
}

}  // namespace membrane

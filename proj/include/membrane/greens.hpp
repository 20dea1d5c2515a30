#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "membrane/field.hpp"
#include "membrane/lattice.hpp"
#include "membrane/solver.hpp"
#include "membrane/stencil.hpp"

namespace membrane {

enum class GreenKind { harmonic, convolution, biharmonic, gap };

// Convolution Green's function column together with its exterior extension:
// zero on the first exterior layer, and on each axial second-layer site the
// negated value of the facing interior site, which makes the lattice
// Laplacian vanish on the whole first layer.
struct GbarColumn {
  Eigen::VectorXd interior;
  Eigen::VectorXd boundary2;

  Field as_field(const LatticeBox& box) const {
    Field f = Field::zeros(box);
    f.interior = interior;
    f.boundary2 = boundary2;
    return f;
  }
};

struct GapReport {
  Site x{};
  double delta = 0.0;
  double sup_gap = 0.0;                // sup over the delta-interior of |H(x,.)|
  std::vector<double> sup_gradient;    // per axis, sup of |grad_i H(x,.)|
  double sup_gradient_all = 0.0;
  Eigen::VectorXd column;              // full H(x,.) on the box
};

// Column-wise Green's function computations on one box, with a concurrent
// column cache. Columns are deterministic, so duplicated computation under
// contention is benign (last writer wins).
class GreensEngine {
 public:
  explicit GreensEngine(const LatticeBox& box, SolverOptions opts = {});

  const LatticeBox& box() const { return box_; }

  // Gamma_N(., y): killed-walk visit counts; solves the Dirichlet problem.
  std::shared_ptr<const Eigen::VectorXd> harmonic_column(const Site& y) const;
  // Gbar_N(., y) = (Gamma_N * Gamma_N)(., y) with the exterior extension.
  std::shared_ptr<const GbarColumn> gbar_column(const Site& y) const;
  // G_N(., y): bilaplacian Green's function column.
  std::shared_ptr<const Eigen::VectorXd> biharmonic_column(const Site& y) const;
  // H_N(., y) = Gbar_N - G_N on the box.
  Eigen::VectorXd gap_column(const Site& y) const;

  double harmonic_value(const Site& x, const Site& y) const;
  double gbar_value(const Site& x, const Site& y) const;
  double biharmonic_value(const Site& x, const Site& y) const;

  // Sup bounds of the gap and its forward differences over the delta-interior.
  GapReport green_gap(const Site& x, double delta) const;

  int laplacian_iterations() const { return lap_iterations_; }
  int bilaplacian_iterations() const { return bil_iterations_; }

 private:
  const SpdSolver& laplacian_solver() const;
  const SpdSolver& bilaplacian_solver() const;

  const LatticeBox& box_;
  SolverOptions opts_;

  mutable std::mutex solver_mutex_;
  mutable std::unique_ptr<SpdSolver> neg_laplacian_;
  mutable std::unique_ptr<SpdSolver> bilaplacian_;
  mutable int lap_iterations_ = 0;
  mutable int bil_iterations_ = 0;

  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<Site, std::shared_ptr<const Eigen::VectorXd>, SiteHash>
      harmonic_cache_;
  mutable std::unordered_map<Site, std::shared_ptr<const GbarColumn>, SiteHash>
      gbar_cache_;
  mutable std::unordered_map<Site, std::shared_ptr<const Eigen::VectorXd>, SiteHash>
      biharmonic_cache_;
};

struct FundamentalValue {
  double value = 0.0;
  double tail_bound = 0.0;
  int k_max = 0;
};

// Fundamental solution of the lattice bilaplacian in d = 4,
//   a(0, y) = sum_k (k+1) (P(X_k = 0) - P(X_k = y)),
// evaluated by an exact truncated sum plus a local-CLT tail correction at
// the admissible parities. Requires k_max >= min_kmax_coeff * |y|^2.
FundamentalValue fundamental_a(const Site& y, int k_max,
                               double min_kmax_coeff = 8.0);

// Translation-invariant form a(x, y) = a(0, y - x).
FundamentalValue fundamental_a(const Site& x, const Site& y, int k_max,
                               double min_kmax_coeff = 8.0);

struct FundamentalSolutionFit {
  std::vector<std::pair<Site, double>> samples;
  double gamma_hat = 0.0;  // fitted slope against log |y|
  double k_hat = 0.0;      // fitted intercept
  double max_tail_bound = 0.0;
  int k_max = 0;
};

FundamentalSolutionFit fit_fundamental_solution(const std::vector<Site>& ys,
                                                int k_max);

// Default target set with |y| spanning [2, 12] across several directions.
std::vector<Site> default_fundamental_targets();

}  // namespace membrane

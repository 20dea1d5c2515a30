#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "membrane/field.hpp"
#include "membrane/lattice.hpp"
#include "membrane/solver.hpp"

namespace membrane {

struct KktResiduals {
  double stationarity = 0.0;     // |quadratic gradient| off the obstacle
  double feasibility = 0.0;      // max(0, 1 - h) on the obstacle
  double complementarity = 0.0;  // max f (h - 1) on the obstacle
};

enum class QpMethod { active_set, projected_gradient };

struct CapacitySolution {
  Field h;                    // minimizer, zero on the inner boundary and outside
  Eigen::VectorXd dual_f;     // multiplier on the obstacle sites
  double primal_value = 0.0;  // (1/2) sum (lattice Laplacian of h)^2
  double dual_value = 0.0;
  KktResiduals kkt;
  int iterations = 0;
  bool converged = true;
  QpMethod method = QpMethod::active_set;
};

struct QpOptions {
  QpMethod method = QpMethod::active_set;
  double obstacle_level = 1.0;  // constraint h >= level on the obstacle
  double stationarity_tol = 1e-10;
  double feasibility_tol = 1e-8;
  int max_iterations = 200;      // active-set outer loop
  int max_pg_iterations = 400'000;
};

// Discrete obstacle problem behind the variational capacity: minimize
// (1/2) ||lattice Laplacian of h||^2 over fields vanishing on the inner
// boundary layer and outside the box, subject to h >= 1 on the obstacle.
// On non-convergence the best iterate is returned with converged = false
// and its residuals filled in.
CapacitySolution solve_primal(const LatticeBox& box,
                              const std::vector<Site>& obstacle,
                              const QpOptions& opts = {});

struct DualSolution {
  Eigen::VectorXd f;      // density on the obstacle sites
  double value = 0.0;     // <1, f> - (1/2) <f, G f>
  double rayleigh = 0.0;  // <1, f>^2 / (2 <f, G f>)
  bool sign_constrained = true;
  int iterations = 0;
};

// Dual maximization over densities supported on the obstacle, against the
// Green's function of the primal quadratic form. Sign-constrained by
// default; the unconstrained variant solves the linear system directly.
DualSolution solve_dual(const LatticeBox& box, const std::vector<Site>& obstacle,
                        bool sign_constrained = true);

struct ExtrapolationReport {
  std::vector<std::pair<int, double>> values;  // (N, value), N increasing
  std::vector<double> differences;             // successive differences
  double richardson = 0.0;                     // extrapolated limit estimate
  double rate = 0.0;                           // fitted decay exponent
  bool cauchy = false;  // |differences| nonincreasing at the tail
};

ExtrapolationReport continuum_extrapolate(
    const std::vector<std::pair<int, double>>& values);

// Smooth profile on the continuum box [-1,1]^d: one on the obstacle region,
// zero near the boundary, C^2 in between; or an arbitrary discrete profile.
class TiltProfile {
 public:
  // Product of per-coordinate quintic smoothsteps: 1 for |t| <= plateau,
  // 0 for |t| >= support.
  static TiltProfile smooth_bump(double plateau, double support);
  // Discrete profile given directly on a box (e.g. the capacity minimizer).
  static TiltProfile from_field(Field f);

  // Value at lattice site x of the discretization f(x / N).
  double value(const Site& x, const LatticeBox& box) const;
  Field discretize(const LatticeBox& box) const;

 private:
  TiltProfile() = default;
  bool discrete_ = false;
  Field field_;
  double plateau_ = 0.0;
  double support_ = 0.0;
};

// Relative-entropy rate of the tilted field per squared log-scale:
// (a^2 / 2) * sum over the box of (lattice Laplacian of the discretized
// profile)^2. Exactly quadratic in the amplitude.
double entropy_rate(const TiltProfile& profile, const LatticeBox& box,
                    double amplitude);

}  // namespace membrane

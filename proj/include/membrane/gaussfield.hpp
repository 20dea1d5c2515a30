#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "membrane/field.hpp"
#include "membrane/lattice.hpp"
#include "membrane/solver.hpp"
#include "membrane/stencil.hpp"

namespace membrane {

enum class SampleMethod { exact_factorization, normal_equations };

struct FieldSample {
  Field field;
  std::uint64_t seed = 0;
  SampleMethod method = SampleMethod::exact_factorization;
};

// Samples the centered field with covariance equal to the bilaplacian
// Green's function. exact_factorization backsolves a sparse Cholesky factor
// (small boxes); normal_equations draws white noise on the incidence rows
// and solves the bilaplacian, which scales to large boxes via CG.
class GaussianSampler {
 public:
  GaussianSampler(const LatticeBox& box, SampleMethod method,
                  SolverOptions opts = {});

  const LatticeBox& box() const { return *box_; }
  SampleMethod method() const { return method_; }

  // Reproducible: same seed + method give bit-identical samples.
  FieldSample sample(std::uint64_t seed) const;
  // Sampling tolerance for the CG path (covariance error far below MC noise).
  FieldSample sample(std::uint64_t seed, double cg_tolerance) const;

 private:
  const LatticeBox* box_;
  SampleMethod method_;
  std::unique_ptr<SpdSolver> solver_;
  Eigen::SparseMatrix<double> incidence_t_;  // B^T, normal-equations only
  Eigen::Index noise_dim_ = 0;
};

// Conditional law of the field on a sub-box given boundary data on its thick
// boundary: Gaussian with the mean linear in the data and covariance the
// inverse restricted bilaplacian.
class ConditionalLaw {
 public:
  explicit ConditionalLaw(const LatticeBox& region, SolverOptions opts = {});

  const LatticeBox& region() const { return *region_; }

  // Boundary data aligned with region().boundary2(), read from an ambient
  // field (zero where the ambient storage does not reach).
  Eigen::VectorXd restrict_boundary(const Field& ambient) const;

  // Conditional mean on the region for the given boundary data.
  Field mean(const Eigen::VectorXd& psi) const;

  // Mean plus a zero-boundary fluctuation sample.
  FieldSample sample(const Eigen::VectorXd& psi, std::uint64_t seed,
                     SampleMethod method = SampleMethod::exact_factorization) const;

  // Coefficients h(z) over the thick boundary with
  // E(phi_x | boundary) = sum_z h(z) psi_z. One solve per site x.
  Eigen::VectorXd observable_coefficients(const Site& x) const;

  // Conditional variance of phi_x given the boundary.
  double variance(const Site& x) const;

  const SpdSolver& solver() const { return *solver_; }

 private:
  const LatticeBox* region_;
  SolverOptions opts_;
  Eigen::SparseMatrix<double> bilaplacian_;
  std::unique_ptr<SpdSolver> solver_;
};

// Conditional mean at the box center as a function of boundary data.
double box_observable(const ConditionalLaw& law, const Eigen::VectorXd& psi);

// Variance of the linear functional sum_z c_z phi_z under the conditional
// law of the region; sites outside the region are conditioned constants and
// do not contribute.
double functional_variance(const ConditionalLaw& law,
                           const std::vector<std::pair<Site, double>>& functional);

// Multiscale box hierarchy: at each level a grid of boxes with odd side
// about N^{alpha_i} separated by layers of thickness two, recursively
// restricted to the concentric half of a parent box.
struct HierarchyBox {
  Site center{};
  int level = 0;        // 1-based
  int parent = -1;      // index into the previous level's boxes, -1 at level 1
  bool in_gamma = false;
};

struct HierarchyLevel {
  double alpha = 0.0;
  int side = 0;     // odd number of sites per edge
  int spacing = 0;  // side + 2
  std::vector<HierarchyBox> boxes;
};

class BoxHierarchy {
 public:
  // Levels i = 1..K+1 with alpha_i = alpha (1 - (i-1)/K). The last level has
  // exponent zero and degenerates to single-site boxes; every earlier level
  // must have side >= 3.
  BoxHierarchy(const LatticeBox& box, double alpha, int scales_k, Site grid_offset);
  // Grid anchored at the lexicographically smallest admissible level-1 center.
  BoxHierarchy(const LatticeBox& box, double alpha, int scales_k);

  const LatticeBox& box() const { return *box_; }
  double alpha() const { return alpha_; }
  int scales() const { return scales_k_; }
  const Site& grid_offset() const { return grid_offset_; }
  const std::vector<HierarchyLevel>& levels() const { return levels_; }

  LatticeBox make_box(const HierarchyBox& b) const;

  static int round_to_odd(double v);

 private:
  void build();

  const LatticeBox* box_;
  double alpha_;
  int scales_k_;
  Site grid_offset_;
  std::vector<HierarchyLevel> levels_;
};

// Conditional variance of the difference of conditional means,
//   var( E(phi_x | inner boundary) - E(phi_center | inner boundary)
//        | outer boundary ),
// computed exactly by linear algebra on two nested concentric boxes.
double concentration_check(const LatticeBox& outer, const LatticeBox& inner,
                           const Site& x, SolverOptions opts = {});

}  // namespace membrane

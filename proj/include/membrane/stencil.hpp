#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "membrane/field.hpp"
#include "membrane/lattice.hpp"

namespace membrane {

// Closed-form constants of the d = 4 model.
struct ModelConstants {
  // gamma = 8 / pi^2
  static double gamma() { return 8.0 / (M_PI * M_PI); }
  // a_d = 2 / ((d-2) * omega_d), omega_d the unit-ball volume
  static double a_d(int d);
  // 2 * sqrt(2 * gamma) = 8 / pi in d = 4
  static double max_rate() { return 8.0 / M_PI; }
};

enum class StencilKind { laplacian, bilaplacian, squared_laplacian, incidence };

// One full-lattice stencil coupling: weight attached to the site offset.
struct StencilEntry {
  Site offset;
  double weight;
};

// Offsets and weights of the full-lattice bilaplacian: 1 + 1/(2d) at the
// center, -1/d at distance 1, 1/(4d^2) at axial distance 2, 1/(2d^2) at
// distance sqrt(2).
const std::vector<StencilEntry>& bilaplacian_stencil(int dim);

// Sparse operator over the dense site indexing of a box. For the incidence
// factor B the rows run over the enclosing box of half-width N+1 (row_box)
// while the columns stay on the original box.
struct StencilOperator {
  StencilKind kind;
  const LatticeBox* box = nullptr;
  std::shared_ptr<const LatticeBox> row_box;  // incidence only
  Eigen::SparseMatrix<double> matrix;
};

// Dirichlet restriction of the lattice Laplacian: diagonal -1, off-diagonal
// 1/(2d) per neighbor pair inside the box.
StencilOperator assemble_laplacian(const LatticeBox& box);

// Dirichlet bilaplacian: diagonal 1 + 1/(2d), -1/d at distance 1, 1/(4d^2)
// at axial distance 2, 1/(2d^2) at distance sqrt(2); symmetric positive
// definite. Differs from the squared restricted Laplacian near the boundary.
StencilOperator assemble_bilaplacian(const LatticeBox& box);

// (Delta_N)^2 as a matrix product, for comparison with the bilaplacian.
StencilOperator assemble_squared_laplacian(const LatticeBox& box);

// Incidence factor B mapping v on the box (zero-extended) to the full-lattice
// Laplacian of v restricted to the rows where it can be nonzero; B^T B equals
// the bilaplacian exactly.
StencilOperator assemble_incidence(const LatticeBox& box);

// Bilaplacian restricted to an arbitrary site set (same stencil entries,
// couplings only between listed sites). Column/row order follows the list.
Eigen::SparseMatrix<double> bilaplacian_on_sites(const std::vector<Site>& sites,
                                                 int dim);

// Dirichlet form of the bilaplacian on E_1:
//   D(v,w) = sum_{box} (Dv)(Dw) + (1/(2d)^2) * sum_{inner boundary} r(x) v w.
// The boundary weight makes D(v,v) = <bilaplacian v, v> an exact identity.
double dirichlet_form(const Field& v, const Field& w);

struct SobolevNorm {
  int k = 0;
  double value = 0.0;                // squared norm
  std::vector<double> order_terms;   // contribution of each order j = 0..k
};

// Discrete Sobolev norm: sum over orders j <= k, multi-indices |alpha| = j,
// box sites x of (N^j grad^alpha v(x))^2.
SobolevNorm sobolev_norm(const Field& v, int k);

// All multi-indices of the given exact order in `dim` coordinates.
std::vector<MultiIndex> multi_indices_of_order(int dim, int order);

inline int r_count(const LatticeBox& box, const Site& x) {
  return box.exterior_neighbor_count(x);
}

}  // namespace membrane

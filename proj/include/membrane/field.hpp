#pragma once

#include <Eigen/Dense>

#include "membrane/lattice.hpp"

namespace membrane {

// Real-valued lattice function stored on V_N and its thick exterior boundary
// layer; implicitly zero everywhere else. Membership in E_1 means the
// boundary part vanishes identically.
struct Field {
  const LatticeBox* box = nullptr;
  Eigen::VectorXd interior;   // indexed by LatticeBox::index_of
  Eigen::VectorXd boundary2;  // indexed by LatticeBox::boundary2_index

  static Field zeros(const LatticeBox& b) {
    Field f;
    f.box = &b;
    f.interior = Eigen::VectorXd::Zero(b.site_count());
    f.boundary2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(b.boundary2().size()));
    return f;
  }

  double value(const Site& x) const {
    std::int64_t id = box->index_of(x);
    if (id >= 0) return interior[id];
    id = box->boundary2_index(x);
    if (id >= 0) return boundary2[id];
    return 0.0;
  }

  bool in_e1(double tol = 0.0) const {
    return boundary2.size() == 0 || boundary2.lpNorm<Eigen::Infinity>() <= tol;
  }
};

// Forward difference in one coordinate, zero extension outside storage.
Field forward_difference(const Field& v, int axis);

// Composed forward differences per multi-index; the identity for |alpha| = 0.
Field grad(const Field& v, const MultiIndex& alpha);

// Full-lattice discrete Laplacian (1/2d normalization) evaluated at every
// stored site, sites beyond storage read as zero.
Field apply_laplacian(const Field& v);

// Sum of v*w over the box sites only.
double dot_over_box(const Field& v, const Field& w);

}  // namespace membrane

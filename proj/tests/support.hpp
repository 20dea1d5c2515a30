#pragma once

// Shared test helpers and independent oracles. Everything here stays out of
// the library on purpose: oracles must not share code with the paths they
// check.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "membrane/field.hpp"
#include "membrane/lattice.hpp"
#include "membrane/rng.hpp"
#include "membrane/stencil.hpp"

namespace membrane::test {

inline Field random_e1_field(const LatticeBox& box, Rng& rng) {
  Field f = Field::zeros(box);
  for (Eigen::Index i = 0; i < f.interior.size(); ++i)
    f.interior[i] = rng.next_gaussian();
  return f;
}

inline Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& m) {
  return Eigen::MatrixXd(m);
}

// Brute-force boundary-layer oracle: exterior sites within Euclidean
// distance `thickness` of the box, by literal minimization over all box
// sites. Quadratic cost, small boxes only.
inline std::vector<Site> boundary_layer_oracle(const LatticeBox& box,
                                               double thickness) {
  std::vector<Site> result;
  const int d = box.dim();
  const int reach = box.half_width() + static_cast<int>(thickness) + 1;

  std::vector<Site> box_sites;
  for (std::int64_t id = 0; id < box.site_count(); ++id)
    box_sites.push_back(box.site_at(id));

  Site rel{};
  for (int i = 0; i < d; ++i) rel[static_cast<std::size_t>(i)] = static_cast<Coord>(-reach);
  while (true) {
    Site abs_site = box.center();
    for (int i = 0; i < d; ++i)
      abs_site[static_cast<std::size_t>(i)] += rel[static_cast<std::size_t>(i)];
    if (!box.contains(abs_site)) {
      double best = 1e300;
      for (const Site& y : box_sites) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
          double diff = static_cast<double>(abs_site[static_cast<std::size_t>(i)] -
                                            y[static_cast<std::size_t>(i)]);
          s += diff * diff;
        }
        best = std::min(best, s);
      }
      if (std::sqrt(best) <= thickness + 1e-12) result.push_back(abs_site);
    }
    int axis = d - 1;
    for (; axis >= 0; --axis) {
      Coord& a = rel[static_cast<std::size_t>(axis)];
      if (a < reach) {
        ++a;
        break;
      }
      a = static_cast<Coord>(-reach);
    }
    if (axis < 0) break;
  }
  return result;
}

// Full-lattice sum of (lattice Laplacian of v)^2 for zero-extended fields;
// the Laplacian of an E_1 field is supported inside the storage.
inline double full_lattice_laplacian_energy(const Field& v) {
  Field lap = apply_laplacian(v);
  return lap.interior.squaredNorm() + lap.boundary2.squaredNorm();
}

struct AppendixAResult {
  int violations_a1 = 0;
  int violations_a2 = 0;
  int violations_a3 = 0;
  int fields = 0;
};

// Lemma A.1 with constant (2d)^2 against the Dirichlet form, and Lemmas
// A.2/A.3 with constant (2N+1)^2, checked on random zero-boundary fields.
inline AppendixAResult appendix_a_suite(int half_width, int dim, int n_fields,
                                        std::uint64_t seed) {
  LatticeBox box(half_width, dim);
  LatticeBox enclosing(half_width + 1, dim);
  AppendixAResult res;
  res.fields = n_fields;

  for (int trial = 0; trial < n_fields; ++trial) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(trial));
    Field v = random_e1_field(box, rng);

    double boundary_term = 0.0;
    for (const Site& x : box.inner_boundary()) {
      double val = v.interior[box.index_of(x)];
      boundary_term += box.exterior_neighbor_count(x) * val * val;
    }

    // A.1
    double lhs_a1 = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        Field g = forward_difference(forward_difference(v, i), j);
        for (std::int64_t id = 0; id < enclosing.site_count(); ++id) {
          double val = g.value(enclosing.site_at(id));
          lhs_a1 += val * val;
        }
      }
    double dd = dirichlet_form(v, v);
    if (lhs_a1 > (2.0 * dim) * (2.0 * dim) * dd * (1.0 + 1e-12))
      ++res.violations_a1;

    // A.2 / A.3, per coordinate
    const double c = static_cast<double>(2 * half_width + 1);
    double sum_v2 = v.interior.squaredNorm();
    for (int i = 0; i < dim; ++i) {
      Field g1 = forward_difference(v, i);
      Field g2 = forward_difference(g1, i);
      double sum_g1 = 0.0, sum_g2 = 0.0;
      for (std::int64_t id = 0; id < box.site_count(); ++id) {
        sum_g1 += g1.interior[id] * g1.interior[id];
        sum_g2 += g2.interior[id] * g2.interior[id];
      }
      if (sum_v2 > c * c * (sum_g1 + boundary_term) * (1.0 + 1e-12))
        ++res.violations_a2;
      if (sum_g1 > c * c * (sum_g2 + boundary_term) * (1.0 + 1e-12))
        ++res.violations_a3;
    }
  }
  return res;
}

}  // namespace membrane::test

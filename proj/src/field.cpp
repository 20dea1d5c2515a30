#include "membrane/field.hpp"

namespace membrane {

Field forward_difference(const Field& v, int axis) {
  const LatticeBox& b = *v.box;
  Field out = Field::zeros(b);
  for (std::int64_t id = 0; id < b.site_count(); ++id) {
    Site x = b.site_at(id);
    out.interior[id] = v.value(shifted(x, axis, 1)) - v.interior[id];
  }
  const auto& bd = b.boundary2();
  for (std::size_t k = 0; k < bd.size(); ++k) {
    out.boundary2[static_cast<Eigen::Index>(k)] =
        v.value(shifted(bd[k], axis, 1)) - v.boundary2[static_cast<Eigen::Index>(k)];
  }
  return out;
}

Field grad(const Field& v, const MultiIndex& alpha) {
  Field cur = v;
  for (int i = 0; i < v.box->dim(); ++i)
    for (int rep = 0; rep < alpha.alpha[static_cast<std::size_t>(i)]; ++rep)
      cur = forward_difference(cur, i);
  return cur;
}

Field apply_laplacian(const Field& v) {
  const LatticeBox& b = *v.box;
  const int d = b.dim();
  const double inv2d = 1.0 / (2.0 * d);
  Field out = Field::zeros(b);

  auto stencil = [&](const Site& x, double center) {
    double acc = -2.0 * d * center;
    for (int i = 0; i < d; ++i) {
      acc += v.value(shifted(x, i, 1));
      acc += v.value(shifted(x, i, -1));
    }
    return inv2d * acc;
  };

  for (std::int64_t id = 0; id < b.site_count(); ++id)
    out.interior[id] = stencil(b.site_at(id), v.interior[id]);
  const auto& bd = b.boundary2();
  for (std::size_t k = 0; k < bd.size(); ++k)
    out.boundary2[static_cast<Eigen::Index>(k)] =
        stencil(bd[k], v.boundary2[static_cast<Eigen::Index>(k)]);
  return out;
}

double dot_over_box(const Field& v, const Field& w) {
  return v.interior.dot(w.interior);
}

}  // namespace membrane

#include "membrane/stencil.hpp"

#include <cmath>
#include <mutex>
#include <unordered_map>

namespace membrane {

double ModelConstants::a_d(int d) {
  if (d < 3) throw std::invalid_argument("a_d requires d >= 3");
  // omega_d = pi^{d/2} / Gamma(d/2 + 1)
  double omega = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  return 2.0 / ((d - 2) * omega);
}

const std::vector<StencilEntry>& bilaplacian_stencil(int d) {
  static std::vector<std::vector<StencilEntry>> cache(kMaxDim + 1);
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto& entries = cache[static_cast<std::size_t>(d)];
  if (!entries.empty()) return entries;

  const double dd = static_cast<double>(d);
  entries.push_back({Site{}, 1.0 + 1.0 / (2.0 * dd)});
  for (int i = 0; i < d; ++i) {
    for (int s : {-1, 1}) {
      entries.push_back({shifted(Site{}, i, static_cast<Coord>(s)), -1.0 / dd});
      entries.push_back({shifted(Site{}, i, static_cast<Coord>(2 * s)),
                         1.0 / (4.0 * dd * dd)});
    }
    for (int j = i + 1; j < d; ++j)
      for (int si : {-1, 1})
        for (int sj : {-1, 1}) {
          Site o = shifted(Site{}, i, static_cast<Coord>(si));
          o = shifted(o, j, static_cast<Coord>(sj));
          entries.push_back({o, 1.0 / (2.0 * dd * dd)});
        }
  }
  return entries;
}

namespace {

Site add_sites(const Site& a, const Site& b) {
  Site r = a;
  for (int i = 0; i < kMaxDim; ++i) r[static_cast<std::size_t>(i)] += b[static_cast<std::size_t>(i)];
  return r;
}

}  // namespace

StencilOperator assemble_laplacian(const LatticeBox& box) {
  const int d = box.dim();
  const double off = 1.0 / (2.0 * d);
  const std::int64_t n = box.site_count();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * (2 * d + 1));
  for (std::int64_t row = 0; row < n; ++row) {
    Site x = box.site_at(row);
    trips.emplace_back(static_cast<int>(row), static_cast<int>(row), -1.0);
    for (int i = 0; i < d; ++i)
      for (int s : {-1, 1}) {
        std::int64_t col = box.index_of(shifted(x, i, static_cast<Coord>(s)));
        if (col >= 0)
          trips.emplace_back(static_cast<int>(row), static_cast<int>(col), off);
      }
  }
  StencilOperator op;
  op.kind = StencilKind::laplacian;
  op.box = &box;
  op.matrix.resize(static_cast<int>(n), static_cast<int>(n));
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  return op;
}

Eigen::SparseMatrix<double> bilaplacian_on_sites(const std::vector<Site>& sites,
                                                 int dim) {
  std::unordered_map<Site, std::int64_t, SiteHash> index;
  index.reserve(sites.size() * 2);
  for (std::size_t k = 0; k < sites.size(); ++k)
    index.emplace(sites[k], static_cast<std::int64_t>(k));

  const auto stencil = bilaplacian_stencil(dim);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(sites.size() * stencil.size());
  for (std::size_t row = 0; row < sites.size(); ++row) {
    for (const auto& e : stencil) {
      auto it = index.find(add_sites(sites[row], e.offset));
      if (it != index.end())
        trips.emplace_back(static_cast<int>(row), static_cast<int>(it->second),
                           e.weight);
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<int>(sites.size()),
                                static_cast<int>(sites.size()));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

StencilOperator assemble_bilaplacian(const LatticeBox& box) {
  const std::int64_t n = box.site_count();
  const auto stencil = bilaplacian_stencil(box.dim());

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * stencil.size());
  for (std::int64_t row = 0; row < n; ++row) {
    Site x = box.site_at(row);
    for (const auto& e : stencil) {
      std::int64_t col = box.index_of(add_sites(x, e.offset));
      if (col >= 0)
        trips.emplace_back(static_cast<int>(row), static_cast<int>(col), e.weight);
    }
  }
  StencilOperator op;
  op.kind = StencilKind::bilaplacian;
  op.box = &box;
  op.matrix.resize(static_cast<int>(n), static_cast<int>(n));
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  return op;
}

StencilOperator assemble_squared_laplacian(const LatticeBox& box) {
  StencilOperator lap = assemble_laplacian(box);
  StencilOperator op;
  op.kind = StencilKind::squared_laplacian;
  op.box = &box;
  op.matrix = (lap.matrix * lap.matrix).pruned();
  return op;
}

StencilOperator assemble_incidence(const LatticeBox& box) {
  const int d = box.dim();
  const double off = 1.0 / (2.0 * d);
  auto rows = std::make_shared<LatticeBox>(box.half_width() + 1, d, box.center(),
                                           kDefaultSiteBudget * 4);

  std::vector<Eigen::Triplet<double>> trips;
  for (std::int64_t row = 0; row < rows->site_count(); ++row) {
    Site x = rows->site_at(row);
    std::int64_t self = box.index_of(x);
    if (self >= 0)
      trips.emplace_back(static_cast<int>(row), static_cast<int>(self), -1.0);
    for (int i = 0; i < d; ++i)
      for (int s : {-1, 1}) {
        std::int64_t col = box.index_of(shifted(x, i, static_cast<Coord>(s)));
        if (col >= 0)
          trips.emplace_back(static_cast<int>(row), static_cast<int>(col), off);
      }
  }
  StencilOperator op;
  op.kind = StencilKind::incidence;
  op.box = &box;
  op.row_box = rows;
  op.matrix.resize(static_cast<int>(rows->site_count()),
                   static_cast<int>(box.site_count()));
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  return op;
}

double dirichlet_form(const Field& v, const Field& w) {
  if (v.box != w.box)
    throw std::invalid_argument("dirichlet_form: fields live on different boxes");
  const LatticeBox& box = *v.box;
  const int d = box.dim();

  Field dv = apply_laplacian(v);
  Field dw = apply_laplacian(w);
  double bulk = dv.interior.dot(dw.interior);

  double bdry = 0.0;
  for (const Site& x : box.inner_boundary()) {
    std::int64_t id = box.index_of(x);
    bdry += box.exterior_neighbor_count(x) * v.interior[id] * w.interior[id];
  }
  return bulk + bdry / (4.0 * d * d);
}

std::vector<MultiIndex> multi_indices_of_order(int dim, int order) {
  std::vector<MultiIndex> out;
  MultiIndex cur;
  // depth-first distribution of `order` among `dim` slots
  auto rec = [&](auto&& self, int axis, int remaining) -> void {
    if (axis == dim - 1) {
      cur.alpha[static_cast<std::size_t>(axis)] = static_cast<std::uint8_t>(remaining);
      out.push_back(cur);
      return;
    }
    for (int take = 0; take <= remaining; ++take) {
      cur.alpha[static_cast<std::size_t>(axis)] = static_cast<std::uint8_t>(take);
      self(self, axis + 1, remaining - take);
    }
    cur.alpha[static_cast<std::size_t>(axis)] = 0;
  };
  rec(rec, 0, order);
  return out;
}

SobolevNorm sobolev_norm(const Field& v, int k) {
  if (k < 0) throw std::invalid_argument("sobolev_norm: k must be >= 0");
  const LatticeBox& box = *v.box;
  const double n = static_cast<double>(box.half_width());

  SobolevNorm result;
  result.k = k;
  result.order_terms.assign(static_cast<std::size_t>(k) + 1, 0.0);
  for (int j = 0; j <= k; ++j) {
    double scale = std::pow(n, j);
    double term = 0.0;
    for (const MultiIndex& alpha : multi_indices_of_order(box.dim(), j)) {
      Field g = grad(v, alpha);
      term += scale * scale * g.interior.squaredNorm();
    }
    result.order_terms[static_cast<std::size_t>(j)] = term;
    result.value += term;
  }
  return result;
}

}  // namespace membrane

#include "membrane/gaussfield.hpp"

#include <cmath>
#include <mutex>

#include "membrane/rng.hpp"

namespace membrane {

GaussianSampler::GaussianSampler(const LatticeBox& box, SampleMethod method,
                                 SolverOptions opts)
    : box_(&box), method_(method) {
  if (method_ == SampleMethod::exact_factorization) {
    if (box.site_count() > opts.direct_threshold)
      throw std::invalid_argument(
          "GaussianSampler: exact factorization needs a direct Cholesky factor; "
          "box exceeds the direct threshold, use normal_equations");
    solver_ = std::make_unique<SpdSolver>(assemble_bilaplacian(box).matrix, opts);
    return;
  }
  StencilOperator b = assemble_incidence(box);
  incidence_t_ = b.matrix.transpose();
  noise_dim_ = b.matrix.rows();
  solver_ = std::make_unique<SpdSolver>(assemble_bilaplacian(box).matrix, opts);
}

FieldSample GaussianSampler::sample(std::uint64_t seed) const {
  return sample(seed, 0.0);
}

FieldSample GaussianSampler::sample(std::uint64_t seed, double cg_tolerance) const {
  Rng rng(seed);
  FieldSample out;
  out.seed = seed;
  out.method = method_;
  out.field = Field::zeros(*box_);

  if (method_ == SampleMethod::exact_factorization) {
    Eigen::VectorXd z(box_->site_count());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.next_gaussian();
    out.field.interior = solver_->backsolve_upper(z);
    return out;
  }

  Eigen::VectorXd z(noise_dim_);
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.next_gaussian();
  Eigen::VectorXd rhs = incidence_t_ * z;
  out.field.interior = cg_tolerance > 0.0 ? solver_->solve(rhs, cg_tolerance)
                                          : solver_->solve(rhs);
  return out;
}

// ---------------------------------------------------------------------------
// ConditionalLaw
// ---------------------------------------------------------------------------

ConditionalLaw::ConditionalLaw(const LatticeBox& region, SolverOptions opts)
    : region_(&region), opts_(opts) {
  bilaplacian_ = assemble_bilaplacian(region).matrix;
  solver_ = std::make_unique<SpdSolver>(bilaplacian_, opts);
}

Eigen::VectorXd ConditionalLaw::restrict_boundary(const Field& ambient) const {
  const auto& bdry = region_->boundary2();
  Eigen::VectorXd psi(static_cast<Eigen::Index>(bdry.size()));
  for (std::size_t b = 0; b < bdry.size(); ++b)
    psi[static_cast<Eigen::Index>(b)] = ambient.value(bdry[b]);
  return psi;
}

Field ConditionalLaw::mean(const Eigen::VectorXd& psi) const {
  const auto& bdry = region_->boundary2();
  if (psi.size() != static_cast<Eigen::Index>(bdry.size()))
    throw std::invalid_argument("ConditionalLaw::mean: boundary data size mismatch");

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(region_->site_count());
  const auto& stencil = bilaplacian_stencil(region_->dim());
  for (std::size_t b = 0; b < bdry.size(); ++b) {
    const double v = psi[static_cast<Eigen::Index>(b)];
    if (v == 0.0) continue;
    for (const auto& e : stencil) {
      Site y = bdry[b];
      for (int i = 0; i < region_->dim(); ++i)
        y[static_cast<std::size_t>(i)] += e.offset[static_cast<std::size_t>(i)];
      std::int64_t id = region_->index_of(y);
      if (id >= 0) rhs[id] += e.weight * v;
    }
  }

  Field out = Field::zeros(*region_);
  out.interior = -solver_->solve(rhs);
  return out;
}

FieldSample ConditionalLaw::sample(const Eigen::VectorXd& psi, std::uint64_t seed,
                                   SampleMethod method) const {
  GaussianSampler sampler(*region_, method, opts_);
  FieldSample s = sampler.sample(seed);
  s.field.interior += mean(psi).interior;
  return s;
}

Eigen::VectorXd ConditionalLaw::observable_coefficients(const Site& x) const {
  std::int64_t id = region_->index_of(x);
  if (id < 0)
    throw std::invalid_argument("observable_coefficients: site outside the region");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(region_->site_count());
  rhs[id] = 1.0;
  Eigen::VectorXd g = solver_->solve(rhs);

  const auto& bdry = region_->boundary2();
  const auto& stencil = bilaplacian_stencil(region_->dim());
  Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bdry.size()));
  for (std::size_t b = 0; b < bdry.size(); ++b) {
    double acc = 0.0;
    for (const auto& e : stencil) {
      Site y = bdry[b];
      for (int i = 0; i < region_->dim(); ++i)
        y[static_cast<std::size_t>(i)] += e.offset[static_cast<std::size_t>(i)];
      std::int64_t yid = region_->index_of(y);
      if (yid >= 0) acc += e.weight * g[yid];
    }
    h[static_cast<Eigen::Index>(b)] = -acc;
  }
  return h;
}

double ConditionalLaw::variance(const Site& x) const {
  std::int64_t id = region_->index_of(x);
  if (id < 0) throw std::invalid_argument("variance: site outside the region");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(region_->site_count());
  rhs[id] = 1.0;
  return solver_->solve(rhs)[id];
}

double box_observable(const ConditionalLaw& law, const Eigen::VectorXd& psi) {
  Field m = law.mean(psi);
  return m.interior[law.region().index_of(law.region().center())];
}

double functional_variance(const ConditionalLaw& law,
                           const std::vector<std::pair<Site, double>>& functional) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(law.region().site_count());
  bool any = false;
  for (const auto& [site, weight] : functional) {
    std::int64_t id = law.region().index_of(site);
    if (id >= 0) {
      c[id] += weight;
      any = true;
    }
  }
  if (!any) return 0.0;
  return c.dot(law.solver().solve(c));
}

// ---------------------------------------------------------------------------
// BoxHierarchy
// ---------------------------------------------------------------------------

int BoxHierarchy::round_to_odd(double v) {
  if (v <= 1.0) return 1;
  // nearest odd integer, ties upward
  double k = std::floor((v - 1.0) / 2.0);
  int lo = static_cast<int>(2.0 * k) + 1;
  int hi = lo + 2;
  return (v - lo < hi - v) ? lo : hi;
}

BoxHierarchy::BoxHierarchy(const LatticeBox& box, double alpha, int scales_k,
                           Site grid_offset)
    : box_(&box), alpha_(alpha), scales_k_(scales_k), grid_offset_(grid_offset) {
  build();
}

BoxHierarchy::BoxHierarchy(const LatticeBox& box, double alpha, int scales_k)
    : box_(&box), alpha_(alpha), scales_k_(scales_k) {
  const int side1 =
      round_to_odd(std::pow(static_cast<double>(box.half_width()), alpha));
  const int h1 = (side1 - 1) / 2;
  grid_offset_ = box.center();
  for (int i = 0; i < box.dim(); ++i)
    grid_offset_[static_cast<std::size_t>(i)] +=
        -static_cast<Coord>(box.half_width()) + static_cast<Coord>(h1);
  build();
}

void BoxHierarchy::build() {
  if (alpha_ <= 0.5 || alpha_ >= 1.0)
    throw std::invalid_argument("BoxHierarchy: alpha must lie in (1/2, 1)");
  if (scales_k_ < 1) throw std::invalid_argument("BoxHierarchy: K must be >= 1");

  const int d = box_->dim();
  const double n = static_cast<double>(box_->half_width());

  for (int level = 1; level <= scales_k_ + 1; ++level) {
    HierarchyLevel lv;
    lv.alpha = alpha_ * (1.0 - static_cast<double>(level - 1) /
                                   static_cast<double>(scales_k_));
    lv.side = round_to_odd(std::pow(n, lv.alpha));
    if (lv.side < 3 && level <= scales_k_)
      throw std::invalid_argument("BoxHierarchy: degenerate level " +
                                  std::to_string(level) + " (box side " +
                                  std::to_string(lv.side) + " < 3)");
    lv.spacing = lv.side + 2;
    const int h = (lv.side - 1) / 2;

    // admissible grid centers per coordinate
    std::vector<std::vector<Coord>> axes(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const Coord lo = box_->center()[static_cast<std::size_t>(i)] -
                       static_cast<Coord>(box_->half_width()) + static_cast<Coord>(h);
      const Coord hi = box_->center()[static_cast<std::size_t>(i)] +
                       static_cast<Coord>(box_->half_width()) - static_cast<Coord>(h);
      const Coord x0 = grid_offset_[static_cast<std::size_t>(i)];
      Coord j_lo = static_cast<Coord>(
          std::ceil(static_cast<double>(lo - x0) / lv.spacing));
      Coord j_hi = static_cast<Coord>(
          std::floor(static_cast<double>(hi - x0) / lv.spacing));
      for (Coord j = j_lo; j <= j_hi; ++j)
        axes[static_cast<std::size_t>(i)].push_back(x0 + j * lv.spacing);
    }

    // cartesian product
    std::vector<Site> centers;
    Site cur{};
    auto rec = [&](auto&& self, int axis) -> void {
      if (axis == d) {
        centers.push_back(cur);
        return;
      }
      for (Coord c : axes[static_cast<std::size_t>(axis)]) {
        cur[static_cast<std::size_t>(axis)] = c;
        self(self, axis + 1);
      }
    };
    rec(rec, 0);

    const HierarchyLevel* prev = levels_.empty() ? nullptr : &levels_.back();
    const int prev_half = prev ? (prev->side - 1) / 2 : 0;
    for (const Site& c : centers) {
      HierarchyBox hb;
      hb.center = c;
      hb.level = level;
      if (level == 1) {
        hb.in_gamma = true;
      } else {
        for (std::size_t p = 0; p < prev->boxes.size(); ++p) {
          if (!prev->boxes[p].in_gamma) continue;
          bool inside_half = true;
          for (int i = 0; i < d && inside_half; ++i) {
            Coord diff = std::abs(c[static_cast<std::size_t>(i)] -
                                  prev->boxes[p].center[static_cast<std::size_t>(i)]);
            if (diff + h > prev_half / 2) inside_half = false;
          }
          if (inside_half) {
            hb.in_gamma = true;
            hb.parent = static_cast<int>(p);
            break;
          }
        }
      }
      lv.boxes.push_back(hb);
    }
    levels_.push_back(std::move(lv));
  }
}

LatticeBox BoxHierarchy::make_box(const HierarchyBox& b) const {
  const HierarchyLevel& lv = levels_[static_cast<std::size_t>(b.level - 1)];
  return LatticeBox((lv.side - 1) / 2, box_->dim(), b.center);
}

// ---------------------------------------------------------------------------
// Concentration of conditional means
// ---------------------------------------------------------------------------

double concentration_check(const LatticeBox& outer, const LatticeBox& inner,
                           const Site& x, SolverOptions opts) {
  if (inner.center() != outer.center())
    throw std::invalid_argument("concentration_check: boxes must share center");
  if (inner.half_width() + 2 > outer.half_width())
    throw std::invalid_argument(
        "concentration_check: inner thick boundary must lie inside the outer box");
  if (!inner.contains(x))
    throw std::invalid_argument("concentration_check: x outside the inner box");

  ConditionalLaw inner_law(inner, opts);
  Eigen::VectorXd hx = inner_law.observable_coefficients(x);
  Eigen::VectorXd hc = inner_law.observable_coefficients(inner.center());

  std::vector<std::pair<Site, double>> functional;
  const auto& bdry = inner.boundary2();
  for (std::size_t b = 0; b < bdry.size(); ++b) {
    double w = hx[static_cast<Eigen::Index>(b)] - hc[static_cast<Eigen::Index>(b)];
    if (w != 0.0) functional.emplace_back(bdry[b], w);
  }

  ConditionalLaw outer_law(outer, opts);
  return functional_variance(outer_law, functional);
}

}  // namespace membrane

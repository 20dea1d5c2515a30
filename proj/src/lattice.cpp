#include "membrane/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace membrane {

namespace {

std::int64_t checked_pow(std::int64_t base, int exp, std::int64_t limit) {
  std::int64_t v = 1;
  for (int i = 0; i < exp; ++i) {
    if (v > limit / base) return limit + 1;
    v *= base;
  }
  return v;
}

}  // namespace

LatticeBox::LatticeBox(int half_width, int dim, Site center,
                       std::int64_t site_budget)
    : half_width_(half_width), dim_(dim), center_(center) {
  if (half_width < 0) throw std::invalid_argument("LatticeBox: half_width must be >= 0");
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("LatticeBox: dim must be in [1, " +
                                std::to_string(kMaxDim) + "]");
  for (int i = dim; i < kMaxDim; ++i)
    if (center_[static_cast<std::size_t>(i)] != 0)
      throw std::invalid_argument("LatticeBox: center has nonzero padding coordinate");

  side_ = 2 * static_cast<std::int64_t>(half_width) + 1;
  site_count_ = checked_pow(side_, dim, site_budget);
  if (site_count_ > site_budget)
    throw BudgetError("LatticeBox: (2N+1)^d = " + std::to_string(side_) + "^" +
                      std::to_string(dim) + " exceeds site budget " +
                      std::to_string(site_budget) + "; reduce N or d");

  lookup_side_ = side_ + 4;
  std::int64_t lookup_count = checked_pow(lookup_side_, dim, 1'000'000'000);
  if (lookup_count > 1'000'000'000)
    throw BudgetError("LatticeBox: bounding-box lookup table too large");
  lookup_.assign(static_cast<std::size_t>(lookup_count), -1);

  build_boundaries();
}

void LatticeBox::build_boundaries() {
  // Scan the bounding box [-(N+2), N+2]^d around the center in lexicographic
  // order; classify each site by its per-coordinate excess over the box.
  const int d = dim_;
  const Coord reach = static_cast<Coord>(half_width_ + 2);
  Site rel{};
  for (int i = 0; i < d; ++i) rel[static_cast<std::size_t>(i)] = -reach;

  std::int64_t cell = 0;
  const std::int64_t total = [&] {
    std::int64_t t = 1;
    for (int i = 0; i < d; ++i) t *= lookup_side_;
    return t;
  }();

  for (; cell < total; ++cell) {
    std::int64_t excess_sq = 0;
    bool inside = true;
    for (int i = 0; i < d; ++i) {
      Coord a = rel[static_cast<std::size_t>(i)];
      Coord mag = std::abs(a);
      if (mag > half_width_) {
        inside = false;
        Coord e = mag - static_cast<Coord>(half_width_);
        excess_sq += static_cast<std::int64_t>(e) * e;
      }
    }

    Site abs_site = center_;
    for (int i = 0; i < d; ++i)
      abs_site[static_cast<std::size_t>(i)] += rel[static_cast<std::size_t>(i)];

    if (inside) {
      std::int64_t id = 0;
      for (int i = 0; i < d; ++i)
        id = id * side_ + (rel[static_cast<std::size_t>(i)] + half_width_);
      lookup_[static_cast<std::size_t>(cell)] = static_cast<std::int32_t>(id);
      bool inner = false;
      for (int i = 0; i < d; ++i)
        if (std::abs(rel[static_cast<std::size_t>(i)]) == half_width_) inner = true;
      if (inner) inner_boundary_.push_back(abs_site);
    } else if (excess_sq <= 4) {
      lookup_[static_cast<std::size_t>(cell)] =
          static_cast<std::int32_t>(site_count_ + static_cast<std::int64_t>(boundary2_.size()));
      boundary2_.push_back(abs_site);
      if (excess_sq <= 1) boundary1_.push_back(abs_site);
    }

    // advance lexicographic counter
    for (int i = d - 1; i >= 0; --i) {
      Coord& a = rel[static_cast<std::size_t>(i)];
      if (a < reach) {
        ++a;
        break;
      }
      a = -reach;
    }
  }
}

bool LatticeBox::contains(const Site& x) const {
  for (int i = 0; i < dim_; ++i) {
    Coord a = x[static_cast<std::size_t>(i)] - center_[static_cast<std::size_t>(i)];
    if (a < -half_width_ || a > half_width_) return false;
  }
  return true;
}

std::int64_t LatticeBox::index_of(const Site& x) const {
  std::int64_t id = 0;
  for (int i = 0; i < dim_; ++i) {
    Coord a = x[static_cast<std::size_t>(i)] - center_[static_cast<std::size_t>(i)];
    if (a < -half_width_ || a > half_width_) return -1;
    id = id * side_ + (a + half_width_);
  }
  return id;
}

Site LatticeBox::site_at(std::int64_t id) const {
  Site s = center_;
  for (int i = dim_ - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] += static_cast<Coord>(id % side_) - half_width_;
    id /= side_;
  }
  return s;
}

std::int64_t LatticeBox::boundary2_index(const Site& x) const {
  const Coord reach = static_cast<Coord>(half_width_ + 2);
  std::int64_t cell = 0;
  for (int i = 0; i < dim_; ++i) {
    Coord a = x[static_cast<std::size_t>(i)] - center_[static_cast<std::size_t>(i)];
    if (a < -reach || a > reach) return -1;
    cell = cell * lookup_side_ + (a + reach);
  }
  std::int32_t code = lookup_[static_cast<std::size_t>(cell)];
  if (code < site_count_) return -1;
  return code - site_count_;
}

bool LatticeBox::on_inner_boundary(const Site& x) const {
  if (!contains(x)) return false;
  for (int i = 0; i < dim_; ++i)
    if (std::abs(x[static_cast<std::size_t>(i)] - center_[static_cast<std::size_t>(i)]) ==
        half_width_)
      return true;
  return false;
}

int LatticeBox::exterior_neighbor_count(const Site& x) const {
  if (!on_inner_boundary(x))
    throw std::invalid_argument("exterior_neighbor_count: site not on inner boundary");
  int r = 0;
  for (int i = 0; i < dim_; ++i)
    if (std::abs(x[static_cast<std::size_t>(i)] - center_[static_cast<std::size_t>(i)]) ==
        half_width_)
      ++r;
  return r;
}

double LatticeBox::dist_to_complement(const Site& x) const {
  if (!contains(x)) return 0.0;
  Coord max_mag = 0;
  for (int i = 0; i < dim_; ++i)
    max_mag = std::max(max_mag,
                       std::abs(x[static_cast<std::size_t>(i)] -
                                center_[static_cast<std::size_t>(i)]));
  return static_cast<double>(half_width_ + 1 - max_mag);
}

double LatticeBox::dist_to_box(const Site& x) const {
  std::int64_t excess_sq = 0;
  for (int i = 0; i < dim_; ++i) {
    Coord mag = std::abs(x[static_cast<std::size_t>(i)] -
                         center_[static_cast<std::size_t>(i)]);
    if (mag > half_width_) {
      Coord e = mag - static_cast<Coord>(half_width_);
      excess_sq += static_cast<std::int64_t>(e) * e;
    }
  }
  return std::sqrt(static_cast<double>(excess_sq));
}

bool LatticeBox::in_interior_region(const Site& x, double delta) const {
  if (delta <= 0.0 || delta >= 0.5)
    throw std::invalid_argument("interior_region: delta must lie in (0, 1/2)");
  if (!contains(x)) return false;
  return dist_to_complement(x) >= delta * static_cast<double>(half_width_);
}

std::vector<Site> LatticeBox::interior_region(double delta) const {
  if (delta <= 0.0 || delta >= 0.5)
    throw std::invalid_argument("interior_region: delta must lie in (0, 1/2)");
  const double threshold = delta * static_cast<double>(half_width_);
  std::vector<Site> out;
  for (std::int64_t id = 0; id < site_count_; ++id) {
    Site s = site_at(id);
    if (dist_to_complement(s) >= threshold) out.push_back(s);
  }
  return out;
}

}  // namespace membrane

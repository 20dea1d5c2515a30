#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace membrane {

inline constexpr int kMaxDim = 8;
inline constexpr std::int64_t kDefaultSiteBudget = 4'000'000;

using Coord = std::int32_t;

// Lattice site in Z^d. Coordinates beyond the active dimension are kept at
// zero so that comparison, hashing and arithmetic work uniformly.
using Site = std::array<Coord, kMaxDim>;

inline Site make_site(std::initializer_list<Coord> coords) {
  Site s{};
  int i = 0;
  for (Coord c : coords) s[static_cast<std::size_t>(i++)] = c;
  return s;
}

inline Site origin_site() { return Site{}; }

inline Site shifted(Site s, int axis, Coord step) {
  s[static_cast<std::size_t>(axis)] += step;
  return s;
}

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (Coord c : s) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(c));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Multi-index for composed forward differences. alpha = 0 is the identity.
struct MultiIndex {
  std::array<std::uint8_t, kMaxDim> alpha{};

  int order() const {
    int sum = 0;
    for (auto a : alpha) sum += a;
    return sum;
  }

  static MultiIndex unit(int axis, std::uint8_t power = 1) {
    MultiIndex m;
    m.alpha[static_cast<std::size_t>(axis)] = power;
    return m;
  }
};

class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Geometry of the centered box V = {x : |x_i - c_i| <= N}, its boundary
// layers and the lexicographic site indexing. Immutable after construction
// and safe to share between threads.
//
// Distances are Euclidean throughout: the exterior boundary layer of
// thickness k is the set of exterior sites within Euclidean distance k of
// the box, which for k = 2 is exactly the set of exterior sites reachable
// by the bilaplacian stencil.
class LatticeBox {
 public:
  LatticeBox(int half_width, int dim, Site center = Site{},
             std::int64_t site_budget = kDefaultSiteBudget);

  int half_width() const { return half_width_; }
  int dim() const { return dim_; }
  const Site& center() const { return center_; }
  std::int64_t site_count() const { return site_count_; }

  bool contains(const Site& x) const;
  // Lexicographic dense id in [0, site_count), or -1 if outside the box.
  std::int64_t index_of(const Site& x) const;
  Site site_at(std::int64_t id) const;

  // Exterior layers (lexicographically ordered).
  const std::vector<Site>& boundary1() const { return boundary1_; }
  const std::vector<Site>& boundary2() const { return boundary2_; }
  std::int64_t boundary2_index(const Site& x) const;

  // Inner boundary: sites of the box at distance <= 1 from the complement.
  const std::vector<Site>& inner_boundary() const { return inner_boundary_; }
  bool on_inner_boundary(const Site& x) const;

  // r(x): number of exterior unit neighbors. Requires x on the inner boundary.
  int exterior_neighbor_count(const Site& x) const;

  // Euclidean distance from an interior site to the complement.
  double dist_to_complement(const Site& x) const;
  // Euclidean distance from an exterior site to the box.
  double dist_to_box(const Site& x) const;

  // V^delta: sites at distance >= delta*N from the complement, 0 < delta < 1/2.
  std::vector<Site> interior_region(double delta) const;
  bool in_interior_region(const Site& x, double delta) const;

 private:
  void build_boundaries();

  int half_width_;
  int dim_;
  Site center_;
  std::int64_t site_count_;
  std::int64_t side_;

  std::vector<Site> boundary1_;
  std::vector<Site> boundary2_;
  std::vector<Site> inner_boundary_;

  // Dense lookup over the bounding box [c - (N+2), c + (N+2)]^d.
  // Value: interior id, site_count_ + boundary2 id, or -1.
  std::vector<std::int32_t> lookup_;
  std::int64_t lookup_side_;
};

// Spec-facing alias for the constructor.
inline LatticeBox build_box(int half_width, int dim,
                            std::int64_t site_budget = kDefaultSiteBudget) {
  return LatticeBox(half_width, dim, Site{}, site_budget);
}

}  // namespace membrane

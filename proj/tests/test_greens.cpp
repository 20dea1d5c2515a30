#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "membrane/greens.hpp"
#include "support.hpp"

using namespace membrane;
using membrane::test::dense;

TEST_CASE("singleton box closed forms") {
  LatticeBox box(0, 4);
  GreensEngine greens(box);
  CHECK(greens.harmonic_value(Site{}, Site{}) == doctest::Approx(1.0));
  CHECK(greens.gbar_value(Site{}, Site{}) == doctest::Approx(1.0));
  CHECK(greens.biharmonic_value(Site{}, Site{}) ==
        doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(greens.gap_column(Site{})[0] == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("harmonic green symmetry and positivity") {
  LatticeBox box(2, 2);
  GreensEngine greens(box);
  std::vector<Site> sites = {Site{}, make_site({1, 0}), make_site({-2, 1}),
                             make_site({2, 2})};
  for (const Site& x : sites)
    for (const Site& y : sites) {
      double a = greens.harmonic_value(x, y);
      double b = greens.harmonic_value(y, x);
      CHECK(a == doctest::Approx(b).epsilon(1e-10));
      CHECK(a >= 0.0);
    }
  for (const Site& x : sites)
    CHECK(greens.harmonic_value(x, x) >= 1.0);
}

TEST_CASE("harmonic green is monotone in the domain") {
  LatticeBox small(2, 2), large(3, 2);
  GreensEngine gs(small), gl(large);
  for (std::int64_t i = 0; i < small.site_count(); ++i) {
    Site x = small.site_at(i);
    double vs = gs.harmonic_value(x, Site{});
    double vl = gl.harmonic_value(x, Site{});
    CHECK(vs <= vl + 1e-12);
  }
}

TEST_CASE("harmonic green equals killed-walk visit counts") {
  LatticeBox box(1, 2);
  GreensEngine greens(box);
  // Monte Carlo oracle: expected visits in y before exit
  const Site y = make_site({1, 0});
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < n; ++r) {
    Rng rng = Rng::derive(404, static_cast<std::uint64_t>(r));
    Site cur{};
    double visits = 0.0;
    while (box.contains(cur)) {
      if (cur == y) visits += 1.0;
      int move = rng.next_below(4);
      cur[static_cast<std::size_t>(move >> 1)] += (move & 1) ? 1 : -1;
    }
    sum += visits;
    sum_sq += visits * visits;
  }
  double mean = sum / n;
  double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(greens.harmonic_value(Site{}, y) - mean) <= 4.0 * se);
}

TEST_CASE("gbar columns") {
  SUBCASE("extension satisfies the defining boundary conditions") {
    LatticeBox box(2, 2);
    GreensEngine greens(box);
    auto col = greens.gbar_column(Site{});
    Field f = col->as_field(box);

    // zero on the first exterior layer (every non-axial boundary2 site)
    for (const Site& s : box.boundary1())
      CHECK(f.value(s) == 0.0);

    // lattice Laplacian vanishes on the simple boundary
    Field lap = apply_laplacian(f);
    for (const Site& s : box.boundary1())
      CHECK(std::abs(lap.value(s)) <= 1e-12);
  }

  SUBCASE("bilaplacian residual reproduces the Kronecker delta, d=4") {
    LatticeBox box(2, 4);
    GreensEngine greens(box);
    const Site x = make_site({1, 0, -1, 0});
    Field f = greens.gbar_column(x)->as_field(box);
    Field lap2 = apply_laplacian(apply_laplacian(f));
    for (std::int64_t id = 0; id < box.site_count(); ++id) {
      double expected = box.site_at(id) == x ? 1.0 : 0.0;
      CHECK(std::abs(lap2.interior[id] - expected) <= 1e-9);
    }
  }

  SUBCASE("symmetry on tabulated pairs") {
    LatticeBox box(2, 2);
    GreensEngine greens(box);
    std::vector<Site> sites = {Site{}, make_site({1, -1}), make_site({0, 2})};
    for (const Site& x : sites)
      for (const Site& y : sites)
        CHECK(greens.gbar_value(x, y) ==
              doctest::Approx(greens.gbar_value(y, x)).epsilon(1e-10));
  }
}

TEST_CASE("biharmonic green against the dense inverse") {
  for (auto [n, d] : {std::pair{1, 4}, {2, 2}}) {
    LatticeBox box(n, d);
    GreensEngine greens(box);
    Eigen::MatrixXd inv = dense(assemble_bilaplacian(box).matrix).inverse();
    for (const Site& y : {Site{}, box.site_at(0)}) {
      auto col = greens.biharmonic_column(y);
      Eigen::VectorXd oracle = inv.col(box.index_of(y));
      CHECK((*col - oracle).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
  }
}

TEST_CASE("biharmonic residual and diagonal monotonicity") {
  SUBCASE("stencil residual is the delta") {
    LatticeBox box(2, 4);
    GreensEngine greens(box);
    Field f = Field::zeros(box);
    f.interior = *greens.biharmonic_column(Site{});
    Field lap2 = apply_laplacian(apply_laplacian(f));
    for (std::int64_t id = 0; id < box.site_count(); ++id) {
      double expected = box.site_at(id) == Site{} ? 1.0 : 0.0;
      CHECK(std::abs(lap2.interior[id] - expected) <= 1e-9);
    }
  }

  SUBCASE("variance at the center grows with the box") {
    double prev = 0.0;
    for (int n = 1; n <= 3; ++n) {
      LatticeBox box(n, 4);
      GreensEngine greens(box);
      double var = greens.biharmonic_value(Site{}, Site{});
      CHECK(var > prev);
      prev = var;
    }
  }
}

TEST_CASE("green gap report") {
  LatticeBox box(4, 2);
  GreensEngine greens(box);
  GapReport rep = greens.green_gap(Site{}, 0.3);
  CHECK(rep.sup_gap > 0.0);
  CHECK(rep.sup_gradient.size() == 2);
  CHECK(rep.sup_gradient_all <= rep.sup_gap * 2.0 + 1.0);
  CHECK_THROWS_AS(greens.green_gap(make_site({4, 0}), 0.3), std::invalid_argument);
}

TEST_CASE("fundamental solution") {
  SUBCASE("zero at the origin") {
    FundamentalValue v = fundamental_a(Site{}, 100);
    CHECK(v.value == 0.0);
  }

  SUBCASE("translation identity is exact") {
    Site x = make_site({3, -1, 2, 0});
    Site y = make_site({5, -1, 2, 0});
    FundamentalValue a = fundamental_a(x, y, 64);
    FundamentalValue b = fundamental_a(make_site({2, 0, 0, 0}), 64);
    CHECK(a.value == b.value);
  }

  SUBCASE("k_max guard") {
    CHECK_THROWS_AS(fundamental_a(make_site({10, 0, 0, 0}), 100),
                    std::invalid_argument);
  }

  SUBCASE("logarithmic growth with the expected slope, small radii") {
    std::vector<Site> ys;
    for (int m = 2; m <= 6; ++m) ys.push_back(make_site({m, 0, 0, 0}));
    for (int m = 2; m <= 4; ++m) ys.push_back(make_site({m, m, 0, 0}));
    ys.push_back(make_site({1, 1, 1, 1}));
    ys.push_back(make_site({2, 2, 2, 2}));
    ys.push_back(make_site({3, 3, 3, 3}));
    auto fit = fit_fundamental_solution(ys, 8 * 36);
    CHECK(std::abs(fit.gamma_hat - ModelConstants::gamma()) <=
          0.1 * ModelConstants::gamma());
  }
}

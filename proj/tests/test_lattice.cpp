#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "membrane/lattice.hpp"
#include "support.hpp"

using namespace membrane;
using membrane::test::boundary_layer_oracle;

TEST_CASE("box site counts and enumeration") {
  LatticeBox b1(1, 1);
  CHECK(b1.site_count() == 3);
  CHECK(b1.site_at(0) == make_site({-1}));
  CHECK(b1.site_at(2) == make_site({1}));

  LatticeBox b2(2, 4);
  CHECK(b2.site_count() == 625);

  LatticeBox singleton(0, 4);
  CHECK(singleton.site_count() == 1);
  CHECK(singleton.contains(Site{}));
}

TEST_CASE("boundary layers match the enumeration oracle") {
  SUBCASE("d=1, N=2") {
    LatticeBox box(2, 1);
    std::vector<Site> expected = {make_site({-4}), make_site({-3}), make_site({3}),
                                  make_site({4})};
    CHECK(box.boundary2() == expected);
  }
  SUBCASE("oracle comparison across dimensions") {
    for (auto [n, d] : {std::pair{2, 1}, {2, 2}, {1, 3}, {1, 4}}) {
      LatticeBox box(n, d);
      auto oracle1 = boundary_layer_oracle(box, 1.0);
      auto oracle2 = boundary_layer_oracle(box, 2.0);
      CHECK(box.boundary1() == oracle1);
      CHECK(box.boundary2() == oracle2);
    }
  }
}

TEST_CASE("boundary2 covers the bilaplacian stencil reach") {
  for (auto [n, d] : {std::pair{1, 2}, {2, 2}, {1, 4}}) {
    LatticeBox box(n, d);
    const auto& stencil = bilaplacian_stencil(d);
    for (std::int64_t id = 0; id < box.site_count(); ++id) {
      Site x = box.site_at(id);
      for (const auto& e : stencil) {
        Site y = x;
        for (int i = 0; i < d; ++i)
          y[static_cast<std::size_t>(i)] += e.offset[static_cast<std::size_t>(i)];
        if (!box.contains(y)) CHECK(box.boundary2_index(y) >= 0);
      }
    }
    CHECK(box.boundary2().size() >= box.boundary1().size());
  }
}

TEST_CASE("inner boundary and exterior neighbor counts") {
  LatticeBox box(2, 2);
  for (const Site& x : box.inner_boundary()) {
    int r = box.exterior_neighbor_count(x);
    CHECK(r >= 1);
    CHECK(r <= 2);
    // oracle: count unit neighbors outside the box
    int expected = 0;
    for (int i = 0; i < 2; ++i)
      for (int s : {-1, 1})
        if (!box.contains(shifted(x, i, static_cast<Coord>(s)))) ++expected;
    CHECK(r == expected);
  }
  LatticeBox b4(2, 4);
  CHECK(b4.exterior_neighbor_count(make_site({2, 2, 2, 2})) == 4);
  CHECK(b4.exterior_neighbor_count(make_site({2, 0, 0, 0})) == 1);
  CHECK_THROWS_AS(b4.exterior_neighbor_count(Site{}), std::invalid_argument);
}

TEST_CASE("interior region") {
  SUBCASE("small delta keeps every site") {
    LatticeBox box(3, 2);
    double delta = 1.0 / (4.0 * 3.0);
    CHECK(box.interior_region(delta).size() ==
          static_cast<std::size_t>(box.site_count()));
  }
  SUBCASE("d=1, N=4, delta=0.5: |x| <= 3") {
    LatticeBox box(4, 1);
    auto region = box.interior_region(0.4999999);
    std::vector<Site> expected;
    for (int x = -3; x <= 3; ++x) expected.push_back(make_site({x}));
    CHECK(region == expected);

    // enumeration oracle with literal Euclidean distance to the complement
    for (int x = -4; x <= 4; ++x) {
      double best = 1e300;
      for (int z = -30; z <= 30; ++z) {
        if (z >= -4 && z <= 4) continue;
        best = std::min(best, std::abs(static_cast<double>(z - x)));
      }
      bool in = best >= 0.4999999 * 4.0;
      CHECK(box.in_interior_region(make_site({x}), 0.4999999) == in);
    }
  }
  SUBCASE("monotone in delta") {
    LatticeBox box(6, 2);
    auto r1 = box.interior_region(0.15);
    auto r2 = box.interior_region(0.45);
    CHECK(r2.size() <= r1.size());
    for (const Site& s : r2)
      CHECK(std::find(r1.begin(), r1.end(), s) != r1.end());
  }
  SUBCASE("delta out of range") {
    LatticeBox box(2, 2);
    CHECK_THROWS_AS(box.interior_region(0.0), std::invalid_argument);
    CHECK_THROWS_AS(box.interior_region(0.5), std::invalid_argument);
  }
}

TEST_CASE("budget errors") {
  CHECK_THROWS_AS(LatticeBox(100, 4), BudgetError);
  CHECK_NOTHROW(LatticeBox(100, 2));
}

TEST_CASE("deterministic rebuild") {
  LatticeBox a(3, 3), b(3, 3);
  CHECK(a.site_count() == b.site_count());
  for (std::int64_t id = 0; id < a.site_count(); ++id)
    CHECK(a.site_at(id) == b.site_at(id));
  CHECK(a.boundary2() == b.boundary2());
}

TEST_CASE("offset boxes") {
  Site c = make_site({5, -3});
  LatticeBox box(2, 2, c);
  CHECK(box.contains(c));
  CHECK(box.contains(make_site({7, -1})));
  CHECK(!box.contains(make_site({8, -3})));
  CHECK(box.index_of(make_site({3, -5})) == 0);
}

TEST_CASE("forward differences") {
  LatticeBox box(3, 2);

  SUBCASE("constants have vanishing differences") {
    Field v = Field::zeros(box);
    v.interior.setConstant(2.5);
    v.boundary2.setConstant(2.5);
    MultiIndex a = MultiIndex::unit(0);
    Field g = grad(v, a);
    for (std::int64_t id = 0; id < box.site_count(); ++id)
      CHECK(g.interior[id] == doctest::Approx(0.0));
  }

  SUBCASE("coordinate field has unit difference") {
    Field v = Field::zeros(box);
    for (std::int64_t id = 0; id < box.site_count(); ++id)
      v.interior[id] = static_cast<double>(box.site_at(id)[0]);
    const auto& bd = box.boundary2();
    for (std::size_t k = 0; k < bd.size(); ++k)
      v.boundary2[static_cast<Eigen::Index>(k)] = static_cast<double>(bd[k][0]);
    Field g = grad(v, MultiIndex::unit(0));
    for (std::int64_t id = 0; id < box.site_count(); ++id)
      CHECK(g.interior[id] == doctest::Approx(1.0));
  }

  SUBCASE("mixed second difference of x1*x2 is one") {
    Field v = Field::zeros(box);
    for (std::int64_t id = 0; id < box.site_count(); ++id) {
      Site s = box.site_at(id);
      v.interior[id] = static_cast<double>(s[0]) * static_cast<double>(s[1]);
    }
    const auto& bd = box.boundary2();
    for (std::size_t k = 0; k < bd.size(); ++k)
      v.boundary2[static_cast<Eigen::Index>(k)] =
          static_cast<double>(bd[k][0]) * static_cast<double>(bd[k][1]);
    MultiIndex a;
    a.alpha[0] = 1;
    a.alpha[1] = 1;
    Field g = grad(v, a);
    for (std::int64_t id = 0; id < box.site_count(); ++id)
      CHECK(g.interior[id] == doctest::Approx(1.0));
  }

  SUBCASE("identity at order zero") {
    Rng rng(7);
    Field v = membrane::test::random_e1_field(box, rng);
    Field g = grad(v, MultiIndex{});
    CHECK((g.interior - v.interior).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("difference operators commute and are linear on E_1") {
  LatticeBox box(3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng = Rng::derive(99, static_cast<std::uint64_t>(trial));
    Field v = membrane::test::random_e1_field(box, rng);
    Field w = membrane::test::random_e1_field(box, rng);

    Field g01 = forward_difference(forward_difference(v, 0), 1);
    Field g10 = forward_difference(forward_difference(v, 1), 0);
    double scale = g01.interior.lpNorm<Eigen::Infinity>();
    CHECK((g01.interior - g10.interior).lpNorm<Eigen::Infinity>() <=
          1e-14 * std::max(1.0, scale));

    // linearity
    Field lin = Field::zeros(box);
    lin.interior = 2.0 * v.interior - 3.0 * w.interior;
    Field g_lin = forward_difference(lin, 2);
    Field g_sep = Field::zeros(box);
    g_sep.interior = 2.0 * forward_difference(v, 2).interior -
                     3.0 * forward_difference(w, 2).interior;
    double s2 = g_lin.interior.lpNorm<Eigen::Infinity>();
    CHECK((g_lin.interior - g_sep.interior).lpNorm<Eigen::Infinity>() <=
          1e-14 * std::max(1.0, s2));
  }
}

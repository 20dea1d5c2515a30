#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "membrane/greens.hpp"
#include "membrane/walk.hpp"
#include "support.hpp"

using namespace membrane;

TEST_CASE("simulate basics") {
  SUBCASE("singleton region exits on the first step") {
    auto region = [](const Site& s) { return s == Site{}; };
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      WalkPath p = simulate(Site{}, 4, region, rng);
      CHECK(p.exit_time == 1);
      CHECK(p.completed);
      CHECK(p.start == Site{});
    }
  }

  SUBCASE("start outside rejected") {
    auto region = [](const Site& s) { return s == Site{}; };
    Rng rng(1);
    CHECK_THROWS_AS(simulate(make_site({1}), 1, region, rng), std::invalid_argument);
  }

  SUBCASE("step budget abort flags the path") {
    auto everywhere = [](const Site&) { return true; };
    Rng rng(2);
    WalkPath p = simulate(Site{}, 2, everywhere, rng, 100);
    CHECK(!p.completed);
    CHECK(p.exit_time == 100);
  }

  SUBCASE("exit sides are symmetric in d=1") {
    LatticeBox box(1, 1);
    auto region = [&](const Site& s) { return box.contains(s); };
    int left = 0, right = 0;
    const int n = 100000;
    for (int r = 0; r < n; ++r) {
      Rng rng = Rng::derive(77, static_cast<std::uint64_t>(r));
      WalkPath p = simulate(Site{}, 1, region, rng);
      (p.exit_site[0] < 0 ? left : right)++;
    }
    double phat = static_cast<double>(right) / n;
    double se = std::sqrt(0.25 / n);
    CHECK(std::abs(phat - 0.5) <= 3.0 * se);
  }
}

TEST_CASE("exit time statistics against the two-sided bound") {
  SUBCASE("center start, radius 10, d=4") {
    auto stat = exit_time_stats(Site{}, 10.0, Site{}, 4, 10000, 42);
    CHECK(stat.aborted == 0);
    CHECK(stat.mean + 4.0 * stat.stderr_ >= 100.0);
    CHECK(stat.mean - 4.0 * stat.stderr_ <= 121.0);
  }
  SUBCASE("off-center start subtracts the displacement") {
    Site start = make_site({5, 0, 0, 0});
    auto stat = exit_time_stats(Site{}, 10.0, start, 4, 10000, 43);
    CHECK(stat.mean + 4.0 * stat.stderr_ >= 100.0 - 25.0);
    CHECK(stat.mean - 4.0 * stat.stderr_ <= 121.0 - 25.0);
  }
  SUBCASE("radius 1 gives mean in [1, 4]") {
    auto stat = exit_time_stats(Site{}, 1.0, Site{}, 4, 1000, 44);
    CHECK(stat.mean + 4.0 * stat.stderr_ >= 1.0);
    CHECK(stat.mean - 4.0 * stat.stderr_ <= 4.0);
  }
  SUBCASE("too few replicas rejected") {
    CHECK_THROWS_AS(exit_time_stats(Site{}, 5.0, Site{}, 4, 50, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("transition table") {
  TransitionTable table(4, 8, 8);

  SUBCASE("time zero") { CHECK(table.probability(0, Site{}) == 1.0); }

  SUBCASE("single and double steps") {
    CHECK(table.probability(1, make_site({1, 0, 0, 0})) == doctest::Approx(0.125));
    CHECK(table.probability(2, Site{}) == doctest::Approx(0.125));
  }

  SUBCASE("slice sums are one") {
    for (int k = 0; k <= 8; ++k)
      CHECK(table.slice_sum(k) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("parity zeros exact") {
    CHECK(table.probability(3, Site{}) == 0.0);
    CHECK(table.probability(4, make_site({1, 0, 0, 0})) == 0.0);
    CHECK(table.probability(2, make_site({1, 1, 1, 0})) == 0.0);
  }

  SUBCASE("hyperoctahedral symmetry exact") {
    Site a = make_site({2, 1, 0, -1});
    Site b = make_site({-1, 0, 2, 1});
    Site c = make_site({1, -2, 1, 0});
    CHECK(table.probability(6, a) == table.probability(6, b));
    CHECK(table.probability(6, a) == table.probability(6, c));
  }

  SUBCASE("memory budget enforced") {
    CHECK_THROWS_AS(TransitionTable(4, 400, 400), BudgetError);
  }
}

TEST_CASE("factorized point series agrees with the table") {
  TransitionTable table(4, 12, 12);
  for (const Site& y : {Site{}, make_site({1, 0, 0, 0}), make_site({2, 1, 1, 0}),
                        make_site({3, 2, 1, 0}), make_site({1, 1, 1, 1})}) {
    auto series = point_transition_series(y, 4, 12);
    for (int k = 0; k <= 12; ++k)
      CHECK(series[static_cast<std::size_t>(k)] ==
            doctest::Approx(table.probability(k, y)).epsilon(1e-13));
  }
}

TEST_CASE("one-dimensional series matches binomial weights") {
  auto series = point_transition_series(make_site({1}), 1, 7);
  CHECK(series[1] == doctest::Approx(0.5));
  CHECK(series[3] == doctest::Approx(3.0 / 8.0));
  CHECK(series[5] == doctest::Approx(10.0 / 32.0));
  CHECK(series[2] == 0.0);
}

TEST_CASE("local CLT comparison") {
  SUBCASE("surrogate formula at the origin") {
    CHECK(lclt_surrogate(10.0, 0.0) == doctest::Approx(0.008105694691).epsilon(1e-9));
  }

  SUBCASE("deviation is zero off-parity") {
    auto rows = lclt_compare(3, 6, {make_site({1, 0, 0, 0})});
    for (const auto& r : rows) {
      if ((r.k % 2) == 0) CHECK(r.deviation == 0.0);
    }
  }

  SUBCASE("scaled deviation at the origin stays bounded") {
    auto rows = lclt_compare(20, 60, {Site{}});
    double at_20 = 0.0;
    double worst = 0.0;
    for (const auto& r : rows) {
      if (r.k % 2 != 0) continue;
      double scaled = std::abs(r.deviation) * std::pow(r.k, 3.0);
      if (r.k == 20) at_20 = scaled;
      worst = std::max(worst, scaled);
    }
    CHECK(at_20 > 0.0);
    CHECK(worst <= 2.0 * at_20);
  }
}

TEST_CASE("monte carlo gbar estimators") {
  SUBCASE("singleton box: both estimators return exactly one") {
    LatticeBox box(0, 4);
    for (auto est : {GbarEstimator::single_walk, GbarEstimator::two_walk}) {
      auto stat = mc_gbar(box, Site{}, Site{}, 500, est, 7);
      CHECK(stat.mean == 1.0);
      CHECK(stat.stderr_ == 0.0);
      CHECK(stat.aborted == 0);
    }
  }

  SUBCASE("agreement with the convolution oracle, d=2") {
    LatticeBox box(2, 2);
    GreensEngine greens(box);
    double exact = greens.gbar_value(Site{}, Site{});
    for (auto est : {GbarEstimator::single_walk, GbarEstimator::two_walk}) {
      auto stat = mc_gbar(box, Site{}, Site{}, 40000, est, 2025);
      CHECK(std::abs(stat.mean - exact) <= 4.0 * stat.stderr_);
    }
  }

  SUBCASE("the two estimators agree within joint error bars") {
    LatticeBox box(2, 2);
    auto a = mc_gbar(box, Site{}, make_site({1, 0}), 40000,
                     GbarEstimator::single_walk, 31);
    auto b = mc_gbar(box, Site{}, make_site({1, 0}), 40000,
                     GbarEstimator::two_walk, 32);
    double joint = std::hypot(a.stderr_, b.stderr_);
    CHECK(std::abs(a.mean - b.mean) <= 4.0 * joint);
  }
}

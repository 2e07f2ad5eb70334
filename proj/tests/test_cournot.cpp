#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "robusteq/cournot.hpp"
#include "robusteq/equilibrium.hpp"
#include "robusteq/worstcase.hpp"

using namespace robusteq;
using testgames::cournot_case1;
using testgames::cournot_case2;
using testgames::cournot_case3_balanced;
using testgames::cournot_ref;

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(validate(cournot_ref(0.9)));
  auto bad = cournot_ref(0.9);
  SUBCASE("nominal off the segment") {
    bad.gamma_hat = 0.9;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  }
  SUBCASE("slope ordering") {
    bad.b_lo = 1.1;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  }
  SUBCASE("uniqueness condition") {
    bad = CournotParams{10.0, 0.3, 0.8, 0.2, 0.4, 0.65, 0.95, 0.5};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  }
  SUBCASE("negative parameter") {
    bad.a = -1.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  }
  SUBCASE("delta out of range") {
    bad.delta = 1.5;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  }
}

TEST_CASE("scaled slopes") {
  auto s = scaled_params(cournot_ref(0.9));
  CHECK(s.b_hi == doctest::Approx(0.96).epsilon(1e-12));
  CHECK(s.b_lo == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(s.gamma_hi == doctest::Approx(1.34).epsilon(1e-12));
  CHECK(s.gamma_lo == doctest::Approx(0.26).epsilon(1e-12));
  auto s0 = scaled_params(cournot_ref(0.0));
  CHECK(s0.b_hi == 0.6);
  CHECK(s0.b_lo == 0.6);
  CHECK(s0.gamma_hi == 0.8);
  CHECK(s0.gamma_lo == 0.8);
  auto s1 = scaled_params(cournot_ref(1.0));
  CHECK(s1.b_hi == 1.0);
  CHECK(s1.gamma_lo == 0.2);
}

TEST_CASE("branch thresholds") {
  auto t = thresholds(cournot_ref(0.9));
  CHECK(t.q_lo == doctest::Approx(3.184713).epsilon(1e-6));
  CHECK(t.q_hi == doctest::Approx(4.854369).epsilon(1e-6));
  CHECK(t.q_m == doctest::Approx(7.462687).epsilon(1e-6));
  CHECK(t.q_lo <= t.q_hi);
  CHECK(t.q_hi < t.q_m);

  // the middle branch collapses as the level vanishes
  auto t0 = thresholds(cournot_ref(1e-9));
  CHECK(std::abs(t0.q_lo - t0.q_hi) <= 1e-6);
}

TEST_CASE("robust reaction") {
  auto p = cournot_ref(0.9);
  CHECK(robust_reaction(p, 0.0) == doctest::Approx(10.0 / 1.92).epsilon(1e-9));
  CHECK(robust_reaction(p, 4.0) == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(robust_reaction(p, 7.5) == 0.0);
  CHECK_THROWS_AS(robust_reaction(p, -1.0), std::invalid_argument);
}

TEST_CASE("reaction approaches the nominal line as the level vanishes") {
  for (auto p : {cournot_ref(1e-9), cournot_case1(1e-9), cournot_case3_balanced(1e-9)}) {
    for (int j = 0; j <= 50; ++j) {
      double q = j * 0.24;
      REQUIRE(std::abs(robust_reaction(p, q) - nominal_reaction(p, q)) <= 1e-6);
    }
  }
  // level exactly zero routes to the nominal line
  CHECK(robust_reaction(cournot_ref(0.0), 2.0) == nominal_reaction(cournot_ref(0.0), 2.0));
}

TEST_CASE("nominal fixed point") {
  auto [q1, q2] = nominal_nash(cournot_ref(0.9));
  CHECK(q1 == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(q2 == q1);
  auto [c1, c2] = nominal_nash(cournot_case1(1.0));
  CHECK(c1 == doctest::Approx(4.0).epsilon(1e-12));
  auto zero = cournot_ref(0.9);
  zero.a = 0.0;
  CHECK(nominal_nash(zero).first == 0.0);
}

TEST_CASE("threshold level") {
  auto ds = delta_star(cournot_ref(0.9));
  CHECK(ds.value == doctest::Approx(1.0 / 1.4).epsilon(1e-9));
  CHECK(ds.interior);

  // numerator vanishes when gamma_hi equals twice b_lo
  CournotParams flat{10.0, 0.7, 0.7, 0.5, 0.9, 0.4, 1.0, 0.5};
  auto ds0 = delta_star(flat);
  CHECK(ds0.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(ds0.interior);

  // negative value flags the absence of an interior threshold
  CournotParams neg{10.0, 0.8, 0.85, 0.6, 1.0, 0.6, 1.1, 0.5};
  auto dsn = delta_star(neg);
  CHECK(dsn.value < 0.0);
  CHECK_FALSE(dsn.interior);

  CHECK_THROWS_AS(delta_star(cournot_case1(0.5)), std::invalid_argument);
}

TEST_CASE("equilibrium census by case") {
  SUBCASE("wide own-slope range: unique symmetric point") {
    auto set = roe_set(cournot_case1(1.0));
    CHECK(set.label == CournotCase::one);
    REQUIRE(set.points.size() == 1);
    CHECK(set.points[0][0] == doctest::Approx(10.0 / 3.5).epsilon(1e-9));
  }
  SUBCASE("balanced ranges: diagonal continuum") {
    auto set = roe_set(cournot_case2(0.8));
    CHECK(set.label == CournotCase::two);
    CHECK(set.has_segment);
    CHECK(set.segment_lo[0] == doctest::Approx(10.0 / 2.32).epsilon(1e-9));
    CHECK(set.segment_hi[0] == doctest::Approx(10.0 / 1.68).epsilon(1e-9));
    CHECK(set.segment_lo[0] == set.segment_lo[1]);
  }
  SUBCASE("below the threshold: unique symmetric point") {
    auto set = roe_set(cournot_ref(0.5));
    CHECK(set.label == CournotCase::three_i);
    REQUIRE(set.points.size() == 1);
    CHECK(set.points[0][0] == doctest::Approx(10.0 / 1.9).epsilon(1e-9));
  }
  SUBCASE("at the threshold: cross-diagonal continuum") {
    auto set = roe_set(cournot_case3_balanced(0.5));
    CHECK(set.label == CournotCase::three_ii);
    CHECK(set.has_segment);
    CHECK(set.segment_lo[0] + set.segment_lo[1] == doctest::Approx(12.5).epsilon(1e-9));
    CHECK(set.segment_lo[0] == doctest::Approx(8.0 / 1.44).epsilon(1e-9));
  }
  SUBCASE("above the threshold: symmetric point plus a mirrored pair") {
    auto set = roe_set(cournot_ref(0.9));
    CHECK(set.label == CournotCase::three_iii);
    REQUIRE(set.points.size() == 3);
    CHECK(set.points[0][0] == doctest::Approx(4.016064).epsilon(1e-6));
    CHECK(set.points[0][1] == doctest::Approx(6.024096).epsilon(1e-6));
    CHECK(set.points[1][0] == doctest::Approx(5.494505).epsilon(1e-6));
    CHECK(set.points[1][1] == doctest::Approx(5.494505).epsilon(1e-6));
    CHECK(set.points[2][0] == doctest::Approx(6.024096).epsilon(1e-6));
    CHECK(set.points[2][1] == doctest::Approx(4.016064).epsilon(1e-6));
  }
  SUBCASE("level zero is rejected") {
    CHECK_THROWS_AS(roe_set(cournot_ref(0.0)), std::invalid_argument);
  }
}

TEST_CASE("census collapses to the nominal point as the level vanishes") {
  for (auto p : {cournot_ref(1e-9), cournot_case1(1e-9), cournot_case2(1e-9)}) {
    auto set = roe_set(p);
    double nash = nominal_nash(p).first;
    if (set.has_segment) {
      CHECK(std::abs(set.segment_lo[0] - nash) <= 1e-5);
      CHECK(std::abs(set.segment_hi[0] - nash) <= 1e-5);
    }
    for (const auto& pt : set.points) {
      CHECK(std::abs(pt[0] - nash) <= 1e-5);
      CHECK(std::abs(pt[1] - nash) <= 1e-5);
    }
  }
}

TEST_CASE("case partition is exhaustive and exclusive") {
  std::mt19937 rng(3u);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  int seen = 0;
  for (int trial = 0; trial < 400; ++trial) {
    CournotParams p;
    p.a = 1.0 + 9.0 * unit(rng);
    p.b_lo = 0.1 + 0.5 * unit(rng);
    p.b_hi = p.b_lo + 0.2 + unit(rng);
    p.gamma_lo = 0.5 * unit(rng);
    p.gamma_hi = p.gamma_lo + 0.2 + unit(rng);
    double t = unit(rng);  // nominal point's position along the segment
    p.b_hat = p.b_hi + t * (p.b_lo - p.b_hi);
    p.gamma_hat = p.gamma_lo + t * (p.gamma_hi - p.gamma_lo);
    p.delta = unit(rng);
    if (!(2.0 * p.b_hat > p.gamma_hat)) continue;
    ++seen;
    auto set = roe_set(p);  // exactly one label, no throw
    auto th = thresholds(p);
    REQUIRE(th.q_lo <= th.q_hi + 1e-12);
    REQUIRE(th.q_hi < th.q_m);
    bool segment_case =
        set.label == CournotCase::two || set.label == CournotCase::three_ii;
    CHECK(set.has_segment == segment_case);
    if (!segment_case) CHECK_FALSE(set.points.empty());
  }
  CHECK(seen > 200);
}

TEST_CASE("worst-case profit") {
  auto p = cournot_ref(0.9);
  CHECK(worst_case_profit(p, 0.0, 3.0) == 0.0);
  auto set = roe_set(p);
  double q3 = set.points[0][0], q4 = set.points[0][1], q2 = set.points[1][0];
  double rho_high = worst_case_profit(p, q4, q3);
  double rho_sym = worst_case_profit(p, q2, q2);
  double rho_low = worst_case_profit(p, q3, q4);
  CHECK(rho_high >= rho_sym + 1e-9);
  CHECK(rho_sym >= rho_low + 1e-9);
  CHECK(rho_low < rho_high - 1e-9);  // the smaller producer guarantees less
}

TEST_CASE("closed forms match the generic solver") {
  auto p = cournot_ref(0.9);
  Game g = to_game(p);
  SUBCASE("reaction grid") {
    for (int j = 0; j <= 40; ++j) {
      double q = 8.0 * j / 40.0;
      double opp[1] = {q};
      REQUIRE(std::abs(best_reply_maximin(g, 0, opp) - robust_reaction(p, q)) <= 1e-6);
    }
  }
  SUBCASE("equilibrium set") {
    auto set = roe_set(p);
    auto result = find_roe(g);
    REQUIRE(result.equilibria.size() == set.points.size());
    for (std::size_t k = 0; k < set.points.size(); ++k) {
      CHECK(std::abs(result.equilibria[k].profile[0] - set.points[k][0]) <= 1e-6);
      CHECK(std::abs(result.equilibria[k].profile[1] - set.points[k][1]) <= 1e-6);
    }
  }
  SUBCASE("worst-case profit equals the generic worst case") {
    double x[2] = {4.4, 6.1};
    CHECK(rho(g, 0, x) == doctest::Approx(worst_case_profit(p, 4.4, 6.1)).epsilon(1e-12));
    CHECK(rho(g, 1, x) == doctest::Approx(worst_case_profit(p, 6.1, 4.4)).epsilon(1e-12));
  }
}

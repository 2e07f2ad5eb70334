#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "robusteq/cournot.hpp"
#include "robusteq/game.hpp"

using namespace robusteq;

TEST_CASE("loads the reference two-player game") {
  Game g = load_game(testgames::quad_duopoly_json());
  CHECK(g.players() == 2);
  CHECK(g.action(0).lo == 0.0);
  CHECK(g.action(0).hi == 1.8);
  CHECK(g.delta(0) == 1.0);
  CHECK(g.uncertainty(0).vertices.size() == 2);
  CHECK(g.uncertainty(1).nominal[0] == 0.6);
  double x[2] = {1.0, 0.0};
  double alpha[1] = {0.6};
  CHECK(g.payoff_at(0, alpha, x) == doctest::Approx(1.0));
}

TEST_CASE("rejects malformed game files") {
  auto reject = [](const std::string& text, const char* needle) {
    try {
      load_game(text);
      FAIL_CHECK("expected GameFormatError for ", needle);
    } catch (const GameFormatError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  std::string base = testgames::quad_duopoly_json();

  SUBCASE("delta out of range") {
    std::string bad = base;
    bad.replace(bad.find("\"delta\": 1.0"), 12, "\"delta\": 1.5");
    reject(bad, "delta out of range");
  }
  SUBCASE("unknown variable") {
    std::string bad = base;
    bad.replace(bad.find("(1 - x1)*x1"), 11, "(1 - x3)*x1");
    reject(bad, "unknown variable");
  }
  SUBCASE("unknown key") {
    std::string bad = base;
    bad.insert(bad.find("\"players\""), "\"color\": 3, ");
    reject(bad, "unknown key");
  }
  SUBCASE("missing field") {
    std::string bad = base;
    auto pos = bad.find(",\n     \"uncertainty\": {\"vertices\": [[0.1],[0.8]], \"nominal\": [0.6]}");
    REQUIRE(pos != std::string::npos);
    bad.erase(pos, std::string(",\n     \"uncertainty\": {\"vertices\": [[0.1],[0.8]], \"nominal\": [0.6]}").size());
    reject(bad, "missing key 'uncertainty'");
  }
  SUBCASE("vertex dimension mismatch") {
    std::string bad = base;
    bad.replace(bad.find("[[0.1],[0.8]]"), 13, "[[0.1],[0.8, 0.2]]");
    reject(bad, "dimension mismatch");
  }
  SUBCASE("bad expression") {
    std::string bad = base;
    bad.replace(bad.find("x1*(1 - x2)"), 11, "x1*(1 -- )");
    reject(bad, "payoff const");
  }
  SUBCASE("duplicate param") {
    std::string bad = base;
    bad.replace(bad.find("[{\"param\": 1, \"coeff\": \"(1 - x1)*x1\"}]"), 38,
                "[{\"param\": 1, \"coeff\": \"x1\"}, {\"param\": 1, \"coeff\": \"x1\"}]");
    reject(bad, "repeats param");
  }
  SUBCASE("param out of range") {
    std::string bad = base;
    bad.replace(bad.find("\"param\": 1"), 10, "\"param\": 2");
    reject(bad, "outside [1, 1]");
  }
  SUBCASE("not json") { reject("{]", "invalid JSON"); }
}

TEST_CASE("scale_uncertainty blends toward the nominal point") {
  UncertaintyPolytope p;
  p.vertices = {{0.1}, {0.8}};
  p.nominal = {0.6};
  SUBCASE("level 0 collapses exactly") {
    auto s = scale_uncertainty(p, 0.0);
    CHECK(s[0][0] == 0.6);
    CHECK(s[1][0] == 0.6);
  }
  SUBCASE("level 1 is the identity") {
    auto s = scale_uncertainty(p, 1.0);
    CHECK(s[0][0] == 0.1);
    CHECK(s[1][0] == 0.8);
  }
  SUBCASE("level 0.5 blends") {
    auto s = scale_uncertainty(p, 0.5);
    CHECK(s[0][0] == doctest::Approx(0.35).epsilon(1e-15));
    CHECK(s[1][0] == doctest::Approx(0.70).epsilon(1e-15));
  }
  SUBCASE("out-of-range level") { CHECK_THROWS_AS(scale_uncertainty(p, 1.2), GameFormatError); }
}

TEST_CASE("hull membership") {
  UncertaintyPolytope seg;
  seg.vertices = {{0.1}, {0.8}};
  seg.nominal = {0.6};
  CHECK(hull_membership(seg));
  seg.nominal = {0.9};
  CHECK_FALSE(hull_membership(seg));

  UncertaintyPolytope plane;
  plane.vertices = {{1.0, 0.2}, {0.2, 1.4}};
  plane.nominal = {0.6, 0.8};
  CHECK(hull_membership(plane));
  plane.nominal = {0.6, 0.9};  // off the segment
  CHECK_FALSE(hull_membership(plane));

  UncertaintyPolytope tri;
  tri.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  tri.nominal = {0.25, 0.25};
  CHECK(hull_membership(tri));
  tri.nominal = {0.6, 0.6};
  CHECK_FALSE(hull_membership(tri));
}

TEST_CASE("scaled hulls nest as the level grows") {
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto check_nesting = [&](const UncertaintyPolytope& p) {
    const double levels[] = {0.0, 0.3, 0.7, 1.0};
    for (double d1 : levels)
      for (double d2 : levels) {
        if (!(d1 < d2)) continue;
        auto inner = scale_uncertainty(p, d1);
        auto outer = scale_uncertainty(p, d2);
        for (int s = 0; s < 50; ++s) {
          // random convex combination of the inner vertices
          std::vector<double> w(inner.size());
          double total = 0.0;
          for (auto& v : w) total += v = -std::log(1.0 - unit(rng));
          std::vector<double> point(p.nominal.size(), 0.0);
          for (std::size_t j = 0; j < inner.size(); ++j)
            for (std::size_t k = 0; k < point.size(); ++k)
              point[k] += (w[j] / total) * inner[j][k];
          REQUIRE(point_in_hull(outer, point, 1e-12));
        }
      }
  };
  UncertaintyPolytope seg;
  seg.vertices = {{0.1}, {0.8}};
  seg.nominal = {0.6};
  check_nesting(seg);

  UncertaintyPolytope plane;
  plane.vertices = {{1.0, 0.2}, {0.2, 1.4}};
  plane.nominal = {0.6, 0.8};
  check_nesting(plane);
}

TEST_CASE("validator accepts the reference game") {
  Game g = testgames::quad_duopoly(1.0);
  CHECK(validate_assumptions(g, 50).empty());
  CHECK(payoff_strictly_concave(g, 50));
}

TEST_CASE("validator flags convex own-action payoffs") {
  std::vector<ActionInterval> actions(2, ActionInterval{0.0, 1.0});
  std::vector<PayoffForm> payoffs(2);
  payoffs[0].constant = parse_expression("x1^2");
  payoffs[1].constant = parse_expression("x2*(1 - x1)");
  UncertaintyPolytope poly;
  poly.vertices = {{0.5}};
  poly.nominal = {0.5};
  Game g(std::move(actions), std::move(payoffs), {poly, poly}, {0.5, 0.5});
  auto findings = validate_assumptions(g, 20);
  REQUIRE_FALSE(findings.empty());
  CHECK(findings[0].code == "concavity");
  CHECK(findings[0].player == 1);
  CHECK_FALSE(payoff_strictly_concave(g, 20));
}

TEST_CASE("validator flags a nominal point outside the hull") {
  Game g = testgames::quad_duopoly(1.0);
  UncertaintyPolytope off;
  off.vertices = {{0.1}, {0.8}};
  off.nominal = {0.9};
  Game bad({g.action(0), g.action(1)}, {g.payoff(0), g.payoff(1)}, {off, off}, {1.0, 1.0});
  auto findings = validate_assumptions(bad, 10);
  REQUIRE(findings.size() >= 2);
  CHECK(findings[0].code == "hull-membership");
}

TEST_CASE("linear payoffs are concave but not strictly") {
  std::vector<ActionInterval> actions(2, ActionInterval{0.0, 1.0});
  std::vector<PayoffForm> payoffs(2);
  payoffs[0].constant = parse_expression("x1*(1 - x2)");
  payoffs[1].constant = parse_expression("x2*(1 - x1)");
  UncertaintyPolytope poly;
  poly.vertices = {{0.5}};
  poly.nominal = {0.5};
  Game g(std::move(actions), std::move(payoffs), {poly, poly}, {0.0, 0.0});
  CHECK(validate_assumptions(g, 20).empty());
  CHECK_FALSE(payoff_strictly_concave(g, 20));
}

TEST_CASE("with_delta rebuilds scaled vertex sets") {
  Game g = testgames::quad_duopoly(1.0);
  Game g0 = g.with_delta(0.0);
  CHECK(g0.scaled_vertices(0)[0][0] == 0.6);
  CHECK(g0.scaled_vertices(0)[1][0] == 0.6);
  CHECK(g.scaled_vertices(0)[0][0] == 0.1);  // original untouched
  CHECK_THROWS_AS(g.with_delta(2.0), GameFormatError);
}

// Shared test fixtures: reference games built programmatically and
// independent closed-form oracles used to freeze expected values.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "robusteq/cournot.hpp"
#include "robusteq/game.hpp"

namespace testgames {

// Two players on [0, 1.8] with payoff x_i*(1 - x_j) + a*x_i*(1 - x_i),
// the single uncertain coefficient a on [0.1, 0.8] with nominal 0.6.
inline robusteq::Game quad_duopoly(double delta) {
  using namespace robusteq;
  std::vector<ActionInterval> actions(2, ActionInterval{0.0, 1.8});
  std::vector<PayoffForm> payoffs(2);
  payoffs[0].constant = parse_expression("x1*(1 - x2)");
  payoffs[0].terms.push_back({1, parse_expression("(1 - x1)*x1")});
  payoffs[1].constant = parse_expression("x2*(1 - x1)");
  payoffs[1].terms.push_back({1, parse_expression("(1 - x2)*x2")});
  UncertaintyPolytope poly;
  poly.vertices = {{0.1}, {0.8}};
  poly.nominal = {0.6};
  std::vector<UncertaintyPolytope> uncertainty(2, poly);
  return Game(std::move(actions), std::move(payoffs), std::move(uncertainty),
              std::vector<double>(2, delta));
}

inline const char* quad_duopoly_json() {
  return R"json({
  "players": 2,
  "player": [
    {"action": [0.0, 1.8],
     "payoff": {"const": "x1*(1 - x2)", "terms": [{"param": 1, "coeff": "(1 - x1)*x1"}]},
     "uncertainty": {"vertices": [[0.1],[0.8]], "nominal": [0.6]},
     "delta": 1.0},
    {"action": [0.0, 1.8],
     "payoff": {"const": "x2*(1 - x1)", "terms": [{"param": 1, "coeff": "(1 - x2)*x2"}]},
     "uncertainty": {"vertices": [[0.1],[0.8]], "nominal": [0.6]},
     "delta": 1.0}
  ]
})json";
}

// Closed-form worst-case best reply for quad_duopoly: the worst case is the
// low coefficient left of the sign change at x = 1 and the high coefficient
// right of it, so the reply is the better of the two projected stationary
// points.
inline double quad_duopoly_reply(double delta, double y) {
  const double alo = 0.6 - 0.5 * delta;
  const double ahi = 0.6 + 0.2 * delta;
  auto rho = [&](double x) {
    double c = x * (1.0 - x);
    return x * (1.0 - y) + std::min(alo * c, ahi * c);
  };
  double ca = std::clamp((1.0 - y + alo) / (2.0 * alo), 0.0, 1.0);
  double cb = std::clamp((1.0 - y + ahi) / (2.0 * ahi), 1.0, 1.8);
  double ra = rho(ca), rb = rho(cb);
  if (ra == rb) return std::min(ca, cb);
  return ra > rb ? ca : cb;
}

// Fixed points of the composed closed-form replies at delta = 1, derived
// branch by branch: symmetric stationary point 11/12; the kink/plateau
// pairs (1, 1/2); the cross-branch pair (1/17, 37/34); and the corner pair
// (0, 9/8).
inline std::vector<std::array<double, 2>> quad_duopoly_roe_full() {
  return {{0.0, 1.125},
          {1.0 / 17.0, 37.0 / 34.0},
          {0.5, 1.0},
          {11.0 / 12.0, 11.0 / 12.0},
          {1.0, 0.5},
          {37.0 / 34.0, 1.0 / 17.0},
          {1.125, 0.0}};
}

// Max of the nominal payoff over the own action against a fixed opponent:
// (1.6 - y)^2 / 2.4 while the stationary point is interior.
inline double quad_duopoly_nominal_max(double y) {
  double c = 1.6 - y;
  return c * c / 2.4;
}

// Three symmetric players on [0, 1.5] with an uncertain own-quadratic
// coefficient; unique equilibrium at every level.
inline robusteq::Game three_player_game(double delta) {
  using namespace robusteq;
  std::vector<ActionInterval> actions(3, ActionInterval{0.0, 1.5});
  std::vector<PayoffForm> payoffs(3);
  payoffs[0].constant = parse_expression("x1*(1.5 - 0.5*(x2 + x3))");
  payoffs[0].terms.push_back({1, parse_expression("(1 - x1)*x1")});
  payoffs[1].constant = parse_expression("x2*(1.5 - 0.5*(x1 + x3))");
  payoffs[1].terms.push_back({1, parse_expression("(1 - x2)*x2")});
  payoffs[2].constant = parse_expression("x3*(1.5 - 0.5*(x1 + x2))");
  payoffs[2].terms.push_back({1, parse_expression("(1 - x3)*x3")});
  UncertaintyPolytope poly;
  poly.vertices = {{0.3}, {0.9}};
  poly.nominal = {0.6};
  std::vector<UncertaintyPolytope> uncertainty(3, poly);
  return Game(std::move(actions), std::move(payoffs), std::move(uncertainty),
              std::vector<double>(3, delta));
}

// Duopoly parameter sets, one per equilibrium regime.
inline robusteq::CournotParams cournot_ref(double delta) {  // coexistence shape
  return {10.0, 0.6, 0.8, 0.2, 1.0, 0.2, 1.4, delta};
}

inline robusteq::CournotParams cournot_case1(double delta) {
  return {10.0, 1.0, 0.5, 0.3, 1.7, 0.1, 0.9, delta};
}

inline robusteq::CournotParams cournot_case2(double delta) {
  return {10.0, 0.6, 0.8, 0.2, 1.0, 0.4, 1.2, delta};
}

// gamma_hi - 2*b_lo equals 2*b_hat - gamma_hat here, so the threshold level
// is exactly 1/2 and the scaled slopes satisfy gamma_hi(1/2) = 2*b_lo(1/2);
// the closed forms and the generic solver agree in every sub-case.
inline robusteq::CournotParams cournot_case3_balanced(double delta) {
  return {10.0, 0.6, 0.55, 0.2, 1.0, 0.05, 1.05, delta};
}

}  // namespace testgames

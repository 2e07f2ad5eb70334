#pragma once

#include <array>
#include <utility>
#include <vector>

#include "robusteq/game.hpp"

namespace robusteq {

// Symmetric duopoly with profit (a - gamma*q_opp - b*q_i)*q_i, the slope
// pair (b, gamma) uncertain on the segment joining (b_hi, gamma_lo) and
// (b_lo, gamma_hi), and nominal point (b_hat, gamma_hat) on that segment.
struct CournotParams {
  double a = 0.0;
  double b_hat = 0.0;
  double gamma_hat = 0.0;
  double b_lo = 0.0;
  double b_hi = 0.0;
  double gamma_lo = 0.0;
  double gamma_hi = 0.0;
  double delta = 0.0;
};

// Throws std::invalid_argument on any violated restriction: nonnegative
// parameters, b_hi > b_lo, gamma_hi > gamma_lo, 2*b_hat > gamma_hat,
// nominal on the segment, delta in [0,1].
void validate(const CournotParams& p);

struct ScaledSlopes {
  double b_hi = 0.0, b_lo = 0.0, gamma_hi = 0.0, gamma_lo = 0.0;
};

// The four affine blends (1-delta)*nominal + delta*extreme.
ScaledSlopes scaled_params(const CournotParams& p);

struct Thresholds {
  double q_lo = 0.0, q_hi = 0.0, q_m = 0.0;
};

// Branch boundaries of the robust reaction; requires delta > 0.
Thresholds thresholds(const CournotParams& p);

// Piecewise robust reaction. delta = 0 routes to the nominal reaction.
double robust_reaction(const CournotParams& p, double q_opp);

// Downward-sloping nominal reaction a/(2*b_hat) - gamma_hat/(2*b_hat)*q.
double nominal_reaction(const CournotParams& p, double q_opp);

// Unique symmetric equilibrium of the nominal duopoly, a/(2*b_hat + gamma_hat).
std::pair<double, double> nominal_nash(const CournotParams& p);

struct DeltaStar {
  double value = 0.0;
  bool interior = false;  // value > 0, i.e. 2*b_lo < gamma_hi
};

// Threshold level separating the unique-equilibrium regime from the
// coexistence regime; defined for gamma_hi - gamma_lo > b_hi - b_lo.
DeltaStar delta_star(const CournotParams& p);

enum class CournotCase { one, two, three_i, three_ii, three_iii };

const char* to_string(CournotCase c);

struct CournotRoeSet {
  CournotCase label = CournotCase::one;
  std::vector<std::array<double, 2>> points;
  bool has_segment = false;
  std::array<double, 2> segment_lo{0.0, 0.0};
  std::array<double, 2> segment_hi{0.0, 0.0};
};

// Closed-form equilibrium census by case; requires delta > 0.
CournotRoeSet roe_set(const CournotParams& p);

// Profit minimized over the two scaled segment endpoints.
double worst_case_profit(const CournotParams& p, double q_i, double q_opp);

// The same duopoly as a generic two-player game with a two-vertex
// uncertainty segment per firm. q_max bounds the action interval; pass 0
// to use a/(2*min(b_hat, b_lo)), which no reaction value ever exceeds.
Game to_game(const CournotParams& p, double q_max = 0.0);

}  // namespace robusteq

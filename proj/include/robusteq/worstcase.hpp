#pragma once

#include <span>
#include <vector>

#include "robusteq/game.hpp"

namespace robusteq {

// Vertices within this distance of the minimum count as active.
inline constexpr double kActiveTol = 1e-9;

struct WorstCase {
  double value = 0.0;
  std::vector<int> active;  // indices into the scaled vertex set
};

// rho^delta_i(x): minimum of f_i over the corners of W^delta_i. Exact for
// payoffs affine in the uncertain parameters.
WorstCase worst_case_payoff(const Game& g, int i, std::span<const double> x);

// Value-only fast path.
double rho(const Game& g, int i, std::span<const double> x);

// Splices (x_i, x_minus) into a full profile; x_minus lists the opponents
// in player order.
std::vector<double> splice_profile(int players, int i, double xi,
                                   std::span<const double> x_minus);
std::vector<double> drop_player(std::span<const double> x, int i);

struct CornerReply {
  enum class Status { certified, no_corner_certified, ambiguous_tie };
  Status status = Status::no_corner_certified;
  double action = 0.0;  // meaningful when certified
};

// Corner-point best reply: per scaled vertex alpha, g = argmax of
// f_i(alpha | ., x_minus) over A_i (stationary point projected onto the
// interval), certified when alpha is a global worst case at g; the
// certified replies combine through the pairwise-subtraction formula.
// no_corner_certified signals a maximin optimum at a kink (caller falls
// back to best_reply_maximin); ambiguous_tie signals three or more corners
// certifying distinct replies, where the combination formula is undefined.
CornerReply best_reply_corner(const Game& g, int i, std::span<const double> x_minus);

// argmax of rho^delta_i over A_i by grid scan plus golden-section
// refinement; rho is concave in the own action, so the refined point is the
// global maximizer. Grid ties resolve toward the smaller action.
double best_reply_maximin(const Game& g, int i, std::span<const double> x_minus,
                          int grid = 1025, double xtol = 1e-10);

struct FrontierVertex {
  bool active = false;
  std::vector<std::vector<double>> profiles;  // sampled profiles where it attains the min
};

struct FrontierReport {
  std::vector<FrontierVertex> vertices;
};

// Evaluates active vertex sets on the full action-profile grid
// (`resolution` points per player). A vertex is on the worst-case frontier
// iff it is active somewhere.
FrontierReport worst_case_frontier(const Game& g, int i, int resolution);

}  // namespace robusteq

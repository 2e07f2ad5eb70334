#pragma once

#include <span>
#include <utility>
#include <vector>

#include "robusteq/equilibrium.hpp"
#include "robusteq/game.hpp"

namespace robusteq {

struct PathStep {
  double delta = 0.0;
  std::vector<double> profile;
  double residual = 0.0;
  double epsilon = 0.0;  // max opportunity cost at this level
};

struct PathReport {
  enum class Status { reached_zero, broken };
  std::vector<PathStep> steps;  // delta strictly decreasing
  Status status = Status::broken;
  double break_delta = 0.0;  // localized disappearance level when broken
  bool counterpart = false;  // reached zero and the endpoint verifies as a
                             // fixed point of the nominal game
  double step = 0.0;
  double jump_tol = 0.0;
};

struct TraceOptions {
  double step = 0.01;
  double jump_tol = 0.1;
  double tol = 1e-8;
  double start_tol = 1e-6;  // residual accepted for the starting profile
  int grid = 1025;
};

// Full equilibrium census at each level; all players share the level.
// `deltas` must be ascending.
std::vector<std::pair<double, FindRoeResult>> sweep_delta(const Game& g,
                                                          std::span<const double> deltas,
                                                          const FindRoeOptions& options = {});

// Walks the uncertainty level down from start_delta in `step` decrements,
// re-solving locally near the previous profile. Breaks when no equilibrium
// survives within jump_tol; the disappearance level is then localized by
// bisection to 1e-4.
PathReport trace_equilibrium(const Game& g, std::span<const double> start_profile,
                             double start_delta, const TraceOptions& options = {});

// The (delta, epsilon) sequence along a path that reached level zero.
// Throws std::invalid_argument when the path lacks a counterpart and
// std::runtime_error when the final cost fails to vanish
// (last > max(1e-6, 2 * previous)).
std::vector<std::pair<double, double>> cost_continuity_probe(const Game& g,
                                                             const PathReport& path);

}  // namespace robusteq

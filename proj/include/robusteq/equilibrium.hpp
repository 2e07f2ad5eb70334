#pragma once

#include <span>
#include <utility>
#include <vector>

#include "robusteq/game.hpp"

namespace robusteq {

struct EquilibriumReport {
  enum class Kind { point, interval };
  Kind kind = Kind::point;
  std::vector<double> profile;     // the point, or the interval's lower endpoint
  std::vector<double> profile_hi;  // interval upper endpoint; empty for points
  double residual = 0.0;           // max_i |x_i - R_i(x_-i)|
  std::vector<double> costs;       // per-player opportunity costs (>= 0)
  double epsilon = 0.0;            // max of costs

  bool is_interval() const { return kind == Kind::interval; }
};

struct FindRoeOptions {
  int grid = 1025;
  double tol = 1e-8;
  double dedupe = 1e-6;
};

struct FindRoeResult {
  std::vector<EquilibriumReport> equilibria;  // sorted lexicographically
  std::vector<int> unconverged_starts;        // multi-start diagnostics (n >= 3)
};

// Enumerates the fixed points of the worst-case best replies. Two players:
// exhaustive sign scan of x1 - R1(R2(x1)) with bisection refinement; runs of
// three or more near-zero grid residuals become one interval report. Three
// or more players: damped best-response iteration from 64 low-discrepancy
// starts, deduplicated.
FindRoeResult find_roe(const Game& g, const FindRoeOptions& options = {});

// Residual of the fixed-point condition at x; first element is true when
// the residual is at most tol.
std::pair<bool, double> verify_roe(const Game& g, std::span<const double> x, double tol);

// Nominal-payoff gap between the nominal best reply and the robust best
// reply against fixed opponents; clamped at zero.
double opportunity_cost(const Game& g, int i, std::span<const double> x_minus);

// Max over players of the opportunity cost at an equilibrium profile.
// Throws std::invalid_argument when x is not an equilibrium at verify_tol.
double epsilon_of_roe(const Game& g, std::span<const double> x, double verify_tol = 1e-6);

// Whether no own-action deviation improves the nominal payoff by more than
// eps (slack 1e-9); deviation maxima by grid plus golden section.
bool verify_epsilon_nash(const Game& g, std::span<const double> x, double eps, int grid = 1025);

// delta_i * max_{x_i} [rho^0_i - rho^1_i], the linear-in-delta excess bound
// on the opportunity cost.
double cost_upper_bound(const Game& g, int i, std::span<const double> x_minus);

// A robust game certifying an approximate equilibrium of `nominal` as
// exact: payoffs drop by the uncertain parameter away from the anchor
// profile, the uncertainty interval is [0, H], and delta = eps / H.
struct EmbeddingCertificate {
  Game nominal;
  std::vector<double> anchor;
  double eps = 0.0;
  double H = 0.0;
  double delta = 0.0;
  double verification_residual = 0.0;
};

// Worst-case payoff of the certificate's constructed game.
double embedded_worst_case(const EmbeddingCertificate& cert, int i, std::span<const double> x);

// Builds the certificate and verifies on a grid that no deviation improves
// the constructed worst-case payoff by more than 1e-9. Preconditions: x is
// an eps-approximate equilibrium of `nominal` (all deltas zero), and
// H > eps > 0 or eps = 0.
EmbeddingCertificate embed_epsilon_nash(const Game& nominal, std::span<const double> x,
                                        double eps, double H, int grid = 1025);

}  // namespace robusteq

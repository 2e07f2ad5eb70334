#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "robusteq/expr.hpp"

namespace robusteq {

// Game file rejected: schema violation, bad expression, out-of-range value.
class GameFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-player scalar action bounds A_i = [lo, hi].
struct ActionInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Extreme points of the uncertainty set plus its nominal point.
struct UncertaintyPolytope {
  std::vector<std::vector<double>> vertices;
  std::vector<double> nominal;

  std::size_t dimension() const { return nominal.size(); }
};

struct PayoffTerm {
  int param = 0;  // 1-based index into the player's parameter vector
  Expression coeff;
};

// f_i(alpha; x) = constant(x) + sum_k alpha_k * terms[k].coeff(x).
struct PayoffForm {
  Expression constant;
  std::vector<PayoffTerm> terms;
};

// One robust game: interval actions, payoffs affine in the uncertain
// parameters, a vertex-described uncertainty set and an uncertainty level
// per player. Immutable after construction; all queries are const and safe
// to run concurrently.
class Game {
 public:
  Game(std::vector<ActionInterval> actions, std::vector<PayoffForm> payoffs,
       std::vector<UncertaintyPolytope> uncertainty, std::vector<double> deltas);

  int players() const { return n_; }
  const ActionInterval& action(int i) const { return actions_[static_cast<std::size_t>(i)]; }
  const PayoffForm& payoff(int i) const { return payoffs_[static_cast<std::size_t>(i)]; }
  const UncertaintyPolytope& uncertainty(int i) const {
    return uncertainty_[static_cast<std::size_t>(i)];
  }
  double delta(int i) const { return deltas_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& deltas() const { return deltas_; }

  // Corners of W^delta_i, i.e. the delta-blended vertex set.
  const std::vector<std::vector<double>>& scaled_vertices(int i) const {
    return scaled_[static_cast<std::size_t>(i)];
  }

  // f_i(alpha; x) for an explicit parameter vector.
  double payoff_at(int i, std::span<const double> alpha, std::span<const double> x) const;
  // f_i at the nominal parameter point.
  double nominal_payoff(int i, std::span<const double> x) const;

  // Evaluates the constant and every term coefficient once for a profile;
  // coeffs is resized to the number of terms.
  void eval_coefficients(int i, std::span<const double> x, double& constant,
                         std::vector<double>& coeffs) const;

  Game with_delta(double delta_all) const;
  Game with_deltas(std::vector<double> deltas) const;

 private:
  int n_ = 0;
  std::vector<ActionInterval> actions_;
  std::vector<PayoffForm> payoffs_;
  std::vector<UncertaintyPolytope> uncertainty_;
  std::vector<double> deltas_;
  std::vector<std::vector<std::vector<double>>> scaled_;
};

// W^delta corners: delta*v + (1-delta)*nominal for each vertex v.
std::vector<std::vector<double>> scale_uncertainty(const UncertaintyPolytope& p, double delta);

// Whether `point` is a convex combination of `vertices`, decided by direct
// enumeration of affine subsets (Caratheodory) with a small linear solve.
bool point_in_hull(const std::vector<std::vector<double>>& vertices,
                   std::span<const double> point, double tol = 1e-9);

// Whether the nominal point lies in the convex hull of the vertices.
bool hull_membership(const UncertaintyPolytope& p, double tol = 1e-9);

// Parses and structurally validates a game file (UTF-8 JSON; unknown keys
// rejected). Throws GameFormatError naming the offending field.
Game load_game(std::string_view contents);

struct Finding {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  int player = 0;  // 1-based
  std::string code;
  std::string message;
};

// Checks the regularity hypotheses the solver relies on: valid action
// intervals, nominal point inside the hull, and concavity of the payoff in
// the player's own action at every scaled vertex (second differences on a
// `samples`-point grid against `samples` opponent profiles).
std::vector<Finding> validate_assumptions(const Game& g, int samples);

// True when every own-action second difference is strictly negative
// (below -1e-9) at every scaled vertex; implies strictly concave
// worst-case payoffs.
bool payoff_strictly_concave(const Game& g, int samples);

}  // namespace robusteq

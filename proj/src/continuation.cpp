#include "robusteq/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "robusteq/numeric.hpp"
#include "robusteq/worstcase.hpp"

namespace robusteq {

namespace {

double profile_jump(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

// Nearest equilibrium to `anchor` at the given game, searched within
// jump_tol of the anchor. Two players: scan of x1 - R1(R2(x1)) over the
// window around anchor[0]; more players: damped iteration from the anchor.
std::optional<std::vector<double>> resolve_near(const Game& g, std::span<const double> anchor,
                                                const TraceOptions& opt) {
  const int n = g.players();
  if (n == 2) {
    const auto& a1 = g.action(0);
    double lo = std::max(a1.lo, anchor[0] - opt.jump_tol);
    double hi = std::min(a1.hi, anchor[0] + opt.jump_tol);
    if (!(hi >= lo)) return std::nullopt;
    auto phi = [&](double x1) {
      double opp1[1] = {x1};
      double x2 = best_reply_maximin(g, 1, opp1, opt.grid);
      double opp0[1] = {x2};
      return x1 - best_reply_maximin(g, 0, opp0, opt.grid);
    };
    const int kWindow = 65;
    std::vector<double> xs, fs;
    for (int j = 0; j < kWindow; ++j) {
      double x = kWindow == 1 ? lo : lo + (hi - lo) * j / (kWindow - 1);
      xs.push_back(x);
      fs.push_back(phi(x));
    }
    std::vector<double> candidates;
    for (int j = 0; j < kWindow; ++j)
      if (std::abs(fs[static_cast<std::size_t>(j)]) <= opt.tol)
        candidates.push_back(xs[static_cast<std::size_t>(j)]);
    for (int j = 0; j + 1 < kWindow; ++j) {
      double f0 = fs[static_cast<std::size_t>(j)], f1 = fs[static_cast<std::size_t>(j + 1)];
      if (std::abs(f0) <= opt.tol || std::abs(f1) <= opt.tol) continue;
      if ((f0 > 0.0) == (f1 > 0.0)) continue;
      double a = xs[static_cast<std::size_t>(j)], b = xs[static_cast<std::size_t>(j + 1)];
      double flo = f0;
      for (int it = 0; it < 200 && b - a > opt.tol * 1e-2; ++it) {
        double mid = 0.5 * (a + b);
        double fm = phi(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
          a = mid;
          flo = fm;
        } else {
          b = mid;
        }
      }
      double root = 0.5 * (a + b);
      if (std::abs(phi(root)) <= opt.tol) candidates.push_back(root);
    }
    std::optional<std::vector<double>> best;
    double best_dist = opt.jump_tol;
    for (double x1 : candidates) {
      double opp1[1] = {x1};
      double x2 = best_reply_maximin(g, 1, opp1, opt.grid);
      std::vector<double> x = {x1, x2};
      if (!verify_roe(g, x, opt.tol).first) continue;
      double d = profile_jump(x, anchor);
      if (d <= best_dist) {
        best_dist = d;
        best = std::move(x);
      }
    }
    return best;
  }

  // Damped best-response iteration warm-started at the anchor.
  std::vector<double> x(anchor.begin(), anchor.end());
  for (int iter = 0; iter < 10000; ++iter) {
    double move = 0.0;
    std::vector<double> next(x);
    for (int i = 0; i < n; ++i) {
      std::vector<double> x_minus = drop_player(x, i);
      double r = best_reply_maximin(g, i, x_minus, opt.grid);
      next[static_cast<std::size_t>(i)] =
          x[static_cast<std::size_t>(i)] + 0.5 * (r - x[static_cast<std::size_t>(i)]);
      move = std::max(move,
                      std::abs(next[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]));
    }
    x = std::move(next);
    if (move <= opt.tol * 0.1) break;
  }
  if (!verify_roe(g, x, opt.tol).first) return std::nullopt;
  if (profile_jump(x, anchor) > opt.jump_tol) return std::nullopt;
  return x;
}

double epsilon_at(const Game& g, std::span<const double> x) {
  double eps = 0.0;
  for (int i = 0; i < g.players(); ++i) {
    std::vector<double> x_minus = drop_player(x, i);
    eps = std::max(eps, opportunity_cost(g, i, x_minus));
  }
  return eps;
}

}  // namespace

std::vector<std::pair<double, FindRoeResult>> sweep_delta(const Game& g,
                                                          std::span<const double> deltas,
                                                          const FindRoeOptions& options) {
  for (std::size_t k = 1; k < deltas.size(); ++k)
    if (deltas[k] < deltas[k - 1])
      throw std::invalid_argument("sweep_delta: levels must be ascending");
  std::vector<std::pair<double, FindRoeResult>> out;
  out.reserve(deltas.size());
  for (double d : deltas) out.emplace_back(d, find_roe(g.with_delta(d), options));
  return out;
}

PathReport trace_equilibrium(const Game& g, std::span<const double> start_profile,
                             double start_delta, const TraceOptions& options) {
  if (!(start_delta >= 0.0 && start_delta <= 1.0))
    throw std::invalid_argument("trace: start_delta out of range");
  PathReport report;
  report.step = options.step;
  report.jump_tol = options.jump_tol;

  Game start_game = g.with_delta(start_delta);
  auto [ok, residual] = verify_roe(start_game, start_profile, options.start_tol);
  if (!ok)
    throw std::invalid_argument("trace: start profile is not an equilibrium (residual " +
                                std::to_string(residual) + ")");
  std::vector<double> current(start_profile.begin(), start_profile.end());
  report.steps.push_back(
      {start_delta, current, residual, epsilon_at(start_game, current)});

  double level = start_delta;
  while (level > 0.0) {
    double next = level - options.step;
    if (next < options.step * 0.5) next = 0.0;
    Game stage = g.with_delta(next);
    auto solved = resolve_near(stage, current, options);
    if (!solved) {
      // Localize the disappearance level between the last good and the
      // first bad level.
      double good = level, bad = next;
      while (good - bad > 1e-4) {
        double mid = 0.5 * (good + bad);
        if (resolve_near(g.with_delta(mid), current, options))
          good = mid;
        else
          bad = mid;
      }
      report.status = PathReport::Status::broken;
      report.break_delta = 0.5 * (good + bad);
      report.counterpart = false;
      return report;
    }
    current = std::move(*solved);
    Game stage_game = g.with_delta(next);
    double step_residual = verify_roe(stage_game, current, options.tol).second;
    report.steps.push_back({next, current, step_residual, epsilon_at(stage_game, current)});
    level = next;
  }

  report.status = PathReport::Status::reached_zero;
  report.break_delta = 0.0;
  Game nominal = g.with_delta(0.0);
  report.counterpart = verify_epsilon_nash(nominal, current, 1e-8, options.grid);
  return report;
}

std::vector<std::pair<double, double>> cost_continuity_probe(const Game& g,
                                                             const PathReport& path) {
  (void)g;
  if (!path.counterpart)
    throw std::invalid_argument("cost_continuity_probe: path has no counterpart");
  std::vector<std::pair<double, double>> out;
  out.reserve(path.steps.size());
  for (const auto& s : path.steps) out.emplace_back(s.delta, s.epsilon);
  if (out.size() >= 2) {
    double last = out.back().second;
    double prev = out[out.size() - 2].second;
    if (last > std::max(1e-6, 2.0 * prev))
      throw std::runtime_error("cost_continuity_probe: cost failed to vanish at level zero");
  }
  return out;
}

}  // namespace robusteq

#include "robusteq/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "robusteq/numeric.hpp"
#include "robusteq/worstcase.hpp"

namespace robusteq {

namespace {

bool profile_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

double profile_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

// x1 - R1(R2(x1)) for two-player games; out_x2 receives R2(x1).
double composed_residual(const Game& g, double x1, int grid, double* out_x2) {
  double opp1[1] = {x1};
  double x2 = best_reply_maximin(g, 1, opp1, grid);
  double opp0[1] = {x2};
  double r1 = best_reply_maximin(g, 0, opp0, grid);
  if (out_x2) *out_x2 = x2;
  return x1 - r1;
}

void attach_costs(const Game& g, EquilibriumReport& report) {
  // Interval reports carry costs at the midpoint profile.
  std::vector<double> x = report.profile;
  if (report.is_interval())
    for (std::size_t k = 0; k < x.size(); ++k)
      x[k] = 0.5 * (report.profile[k] + report.profile_hi[k]);
  report.costs.resize(static_cast<std::size_t>(g.players()));
  for (int i = 0; i < g.players(); ++i) {
    std::vector<double> x_minus = drop_player(x, i);
    report.costs[static_cast<std::size_t>(i)] = opportunity_cost(g, i, x_minus);
  }
  report.epsilon = *std::max_element(report.costs.begin(), report.costs.end());
}

// Bisects phi to a sign change within xtol. Both endpoints are assumed to
// bracket a root.
template <class F>
double bisect(F&& phi, double lo, double hi, double flo, double xtol) {
  for (int iter = 0; iter < 200 && hi - lo > xtol; ++iter) {
    double mid = 0.5 * (lo + hi);
    double fm = phi(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Boundary of the |phi| <= tol region between an inside and an outside point.
template <class F>
double edge_bisect(F&& phi, double inside, double outside, double tol, double xtol) {
  for (int iter = 0; iter < 200 && std::abs(outside - inside) > xtol; ++iter) {
    double mid = 0.5 * (inside + outside);
    if (std::abs(phi(mid)) <= tol)
      inside = mid;
    else
      outside = mid;
  }
  return inside;
}

FindRoeResult find_roe_two_player(const Game& g, const FindRoeOptions& opt) {
  const auto& a1 = g.action(0);
  const int n = std::max(opt.grid, 9);
  std::vector<double> xs(static_cast<std::size_t>(n)), phis(static_cast<std::size_t>(n));
  auto phi = [&](double x1) { return composed_residual(g, x1, opt.grid, nullptr); };
  for (int j = 0; j < n; ++j) {
    double x = a1.lo + (a1.hi - a1.lo) * j / (n - 1);
    xs[static_cast<std::size_t>(j)] = x;
    phis[static_cast<std::size_t>(j)] = phi(x);
  }

  struct Interval {
    double lo, hi;
  };
  std::vector<double> roots;
  std::vector<Interval> intervals;

  // Near-zero runs: three or more consecutive grid hits form a continuum,
  // shorter runs are isolated roots.
  std::vector<bool> near(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    near[static_cast<std::size_t>(j)] = std::abs(phis[static_cast<std::size_t>(j)]) <= opt.tol;
  int j = 0;
  while (j < n) {
    if (!near[static_cast<std::size_t>(j)]) {
      ++j;
      continue;
    }
    int k = j;
    while (k + 1 < n && near[static_cast<std::size_t>(k + 1)]) ++k;
    const int run = k - j + 1;
    if (run >= 3) {
      double lo = xs[static_cast<std::size_t>(j)];
      double hi = xs[static_cast<std::size_t>(k)];
      if (j > 0) lo = edge_bisect(phi, lo, xs[static_cast<std::size_t>(j - 1)], opt.tol, 1e-10);
      if (k + 1 < n) hi = edge_bisect(phi, hi, xs[static_cast<std::size_t>(k + 1)], opt.tol, 1e-10);
      intervals.push_back({lo, hi});
    } else {
      int best = j;
      for (int m = j; m <= k; ++m)
        if (std::abs(phis[static_cast<std::size_t>(m)]) <
            std::abs(phis[static_cast<std::size_t>(best)]))
          best = m;
      roots.push_back(xs[static_cast<std::size_t>(best)]);
    }
    j = k + 1;
  }

  // Sign changes between grid points outside near-zero runs.
  for (int m = 0; m + 1 < n; ++m) {
    if (near[static_cast<std::size_t>(m)] || near[static_cast<std::size_t>(m + 1)]) continue;
    double f0 = phis[static_cast<std::size_t>(m)];
    double f1 = phis[static_cast<std::size_t>(m + 1)];
    if ((f0 > 0.0) == (f1 > 0.0)) continue;
    double root = bisect(phi, xs[static_cast<std::size_t>(m)], xs[static_cast<std::size_t>(m + 1)],
                         f0, opt.tol * 1e-2);
    if (std::abs(phi(root)) <= opt.tol) roots.push_back(root);
  }

  // Drop roots swallowed by an interval, then dedupe.
  std::vector<double> kept;
  for (double r : roots) {
    bool inside = false;
    for (const auto& iv : intervals)
      if (r >= iv.lo - opt.dedupe && r <= iv.hi + opt.dedupe) inside = true;
    if (!inside) kept.push_back(r);
  }
  std::sort(kept.begin(), kept.end());
  std::vector<double> unique_roots;
  for (double r : kept)
    if (unique_roots.empty() || r - unique_roots.back() > opt.dedupe) unique_roots.push_back(r);

  FindRoeResult result;
  for (double x1 : unique_roots) {
    double x2 = 0.0;
    composed_residual(g, x1, opt.grid, &x2);
    EquilibriumReport rep;
    rep.kind = EquilibriumReport::Kind::point;
    rep.profile = {x1, x2};
    auto [ok, residual] = verify_roe(g, rep.profile, opt.tol);
    if (!ok) continue;
    rep.residual = residual;
    attach_costs(g, rep);
    result.equilibria.push_back(std::move(rep));
  }
  for (const auto& iv : intervals) {
    EquilibriumReport rep;
    rep.kind = EquilibriumReport::Kind::interval;
    double lo2 = 0.0, hi2 = 0.0;
    composed_residual(g, iv.lo, opt.grid, &lo2);
    composed_residual(g, iv.hi, opt.grid, &hi2);
    rep.profile = {iv.lo, lo2};
    rep.profile_hi = {iv.hi, hi2};
    double residual = 0.0;
    for (double t : {0.0, 0.5, 1.0}) {
      std::vector<double> x = {iv.lo + t * (iv.hi - iv.lo), 0.0};
      composed_residual(g, x[0], opt.grid, &x[1]);
      residual = std::max(residual, verify_roe(g, x, opt.tol).second);
    }
    rep.residual = residual;
    attach_costs(g, rep);
    result.equilibria.push_back(std::move(rep));
  }
  std::sort(result.equilibria.begin(), result.equilibria.end(),
            [](const EquilibriumReport& a, const EquilibriumReport& b) {
              return profile_less(a.profile, b.profile);
            });
  return result;
}

FindRoeResult find_roe_multi_player(const Game& g, const FindRoeOptions& opt) {
  static const int bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  const int n = g.players();
  const int kStarts = 64;
  const int kMaxIters = 10000;
  const double kDamping = 0.5;

  FindRoeResult result;
  std::vector<std::vector<double>> found;
  for (int s = 0; s < kStarts; ++s) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto& a = g.action(i);
      x[static_cast<std::size_t>(i)] = a.lo + halton(s + 1, bases[i % 10]) * (a.hi - a.lo);
    }
    bool converged = false;
    for (int iter = 0; iter < kMaxIters; ++iter) {
      double move = 0.0;
      std::vector<double> next(x);
      for (int i = 0; i < n; ++i) {
        std::vector<double> x_minus = drop_player(x, i);
        double r = best_reply_maximin(g, i, x_minus, opt.grid);
        next[static_cast<std::size_t>(i)] =
            x[static_cast<std::size_t>(i)] +
            kDamping * (r - x[static_cast<std::size_t>(i)]);
        move = std::max(move, std::abs(next[static_cast<std::size_t>(i)] -
                                       x[static_cast<std::size_t>(i)]));
      }
      x = std::move(next);
      if (move <= opt.tol * 0.1) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      result.unconverged_starts.push_back(s);
      continue;
    }
    auto [ok, residual] = verify_roe(g, x, opt.tol);
    if (!ok) continue;
    bool duplicate = false;
    for (const auto& f : found)
      if (profile_distance(f, x) <= opt.dedupe) duplicate = true;
    if (duplicate) continue;
    found.push_back(x);
    EquilibriumReport rep;
    rep.kind = EquilibriumReport::Kind::point;
    rep.profile = x;
    rep.residual = residual;
    attach_costs(g, rep);
    result.equilibria.push_back(std::move(rep));
  }
  std::sort(result.equilibria.begin(), result.equilibria.end(),
            [](const EquilibriumReport& a, const EquilibriumReport& b) {
              return profile_less(a.profile, b.profile);
            });
  return result;
}

}  // namespace

FindRoeResult find_roe(const Game& g, const FindRoeOptions& options) {
  if (g.players() == 1) {
    // Degenerate but well-defined: the single player's maximin action.
    FindRoeResult result;
    EquilibriumReport rep;
    rep.profile = {best_reply_maximin(g, 0, {}, options.grid)};
    rep.residual = 0.0;
    attach_costs(g, rep);
    result.equilibria.push_back(std::move(rep));
    return result;
  }
  if (g.players() == 2) return find_roe_two_player(g, options);
  return find_roe_multi_player(g, options);
}

std::pair<bool, double> verify_roe(const Game& g, std::span<const double> x, double tol) {
  double residual = 0.0;
  for (int i = 0; i < g.players(); ++i) {
    std::vector<double> x_minus = drop_player(x, i);
    double r = best_reply_maximin(g, i, x_minus);
    residual = std::max(residual, std::abs(x[static_cast<std::size_t>(i)] - r));
  }
  return {residual <= tol, residual};
}

double opportunity_cost(const Game& g, int i, std::span<const double> x_minus) {
  const auto& a = g.action(i);
  std::vector<double> x = splice_profile(g.players(), i, a.lo, x_minus);
  auto nominal = [&](double xi) {
    x[static_cast<std::size_t>(i)] = xi;
    return g.nominal_payoff(i, x);
  };
  MaxResult nominal_best = maximize_concave_1d(nominal, a.lo, a.hi);
  double robust_reply = best_reply_maximin(g, i, x_minus);
  double cost = nominal_best.value - nominal(robust_reply);
  return cost < 0.0 ? 0.0 : cost;
}

double epsilon_of_roe(const Game& g, std::span<const double> x, double verify_tol) {
  auto [ok, residual] = verify_roe(g, x, verify_tol);
  if (!ok)
    throw std::invalid_argument("profile is not an equilibrium (residual " +
                                std::to_string(residual) + ")");
  double eps = 0.0;
  for (int i = 0; i < g.players(); ++i) {
    std::vector<double> x_minus = drop_player(x, i);
    eps = std::max(eps, opportunity_cost(g, i, x_minus));
  }
  return eps;
}

bool verify_epsilon_nash(const Game& g, std::span<const double> x, double eps, int grid) {
  const double slack = 1e-9;
  for (int i = 0; i < g.players(); ++i) {
    const auto& a = g.action(i);
    std::vector<double> probe(x.begin(), x.end());
    auto nominal = [&](double xi) {
      probe[static_cast<std::size_t>(i)] = xi;
      return g.nominal_payoff(i, probe);
    };
    double here = nominal(x[static_cast<std::size_t>(i)]);
    double best = maximize_on_interval(nominal, a.lo, a.hi, grid).value;
    if (here < best - eps - slack) return false;
  }
  return true;
}

double cost_upper_bound(const Game& g, int i, std::span<const double> x_minus) {
  const Game g0 = g.with_delta(0.0);
  const Game g1 = g.with_delta(1.0);
  const auto& a = g.action(i);
  std::vector<double> x = splice_profile(g.players(), i, a.lo, x_minus);
  auto excess = [&](double xi) {
    x[static_cast<std::size_t>(i)] = xi;
    return rho(g0, i, x) - rho(g1, i, x);
  };
  double bound = maximize_on_interval(excess, a.lo, a.hi).value;
  return g.delta(i) * bound;
}

double embedded_worst_case(const EmbeddingCertificate& cert, int i, std::span<const double> x) {
  double v = cert.nominal.nominal_payoff(i, x);
  // Exact point exception: the payoff penalty applies away from the anchor.
  if (x[static_cast<std::size_t>(i)] != cert.anchor[static_cast<std::size_t>(i)])
    v -= cert.delta * cert.H;
  return v;
}

EmbeddingCertificate embed_epsilon_nash(const Game& nominal, std::span<const double> x,
                                        double eps, double H, int grid) {
  for (int i = 0; i < nominal.players(); ++i)
    if (nominal.delta(i) != 0.0)
      throw std::invalid_argument("embedding expects a game with all uncertainty levels zero");
  if (eps < 0.0) throw std::invalid_argument("eps must be nonnegative");
  if (eps > 0.0 && !(H > eps))
    throw std::invalid_argument("H must exceed eps");
  if (H <= 0.0) throw std::invalid_argument("H must be positive");
  if (!verify_epsilon_nash(nominal, x, eps, grid))
    throw std::invalid_argument("profile is not an eps-approximate equilibrium at the given eps");

  EmbeddingCertificate cert{nominal, std::vector<double>(x.begin(), x.end()), eps, H,
                            eps == 0.0 ? 0.0 : eps / H, 0.0};

  // Direct fixed-point verification on the grid: no own-action deviation may
  // improve the constructed worst-case payoff by more than 1e-9.
  double worst_gain = 0.0;
  for (int i = 0; i < nominal.players(); ++i) {
    const auto& a = nominal.action(i);
    std::vector<double> probe(x.begin(), x.end());
    double here = embedded_worst_case(cert, i, probe);
    for (int j = 0; j < grid; ++j) {
      probe[static_cast<std::size_t>(i)] = a.lo + (a.hi - a.lo) * j / (grid - 1);
      worst_gain = std::max(worst_gain, embedded_worst_case(cert, i, probe) - here);
    }
  }
  cert.verification_residual = worst_gain;
  if (worst_gain > 1e-9)
    throw std::invalid_argument("embedding verification failed (gain " +
                                std::to_string(worst_gain) + ")");
  return cert;
}

}  // namespace robusteq

#include "robusteq/worstcase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "robusteq/numeric.hpp"

namespace robusteq {

namespace {

void check_profile(const Game& g, std::span<const double> x) {
  if (static_cast<int>(x.size()) != g.players())
    throw std::invalid_argument("profile length does not match player count");
  for (int j = 0; j < g.players(); ++j) {
    const auto& a = g.action(j);
    double v = x[static_cast<std::size_t>(j)];
    if (v < a.lo - 1e-9 || v > a.hi + 1e-9)
      throw std::invalid_argument("profile outside action interval for player " +
                                  std::to_string(j + 1));
  }
}

// Worst case over the scaled vertices given pre-evaluated coefficients.
double min_over_vertices(const std::vector<std::vector<double>>& verts,
                         const std::vector<int>& params, double constant,
                         const std::vector<double>& coeffs, std::vector<int>* active) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> values;
  if (active) values.reserve(verts.size());
  for (const auto& v : verts) {
    double val = constant;
    for (std::size_t k = 0; k < params.size(); ++k)
      val += v[static_cast<std::size_t>(params[k] - 1)] * coeffs[k];
    if (active) values.push_back(val);
    if (val < best) best = val;
  }
  if (active) {
    active->clear();
    for (std::size_t j = 0; j < values.size(); ++j)
      if (values[j] <= best + kActiveTol) active->push_back(static_cast<int>(j));
  }
  return best;
}

std::vector<int> term_params(const Game& g, int i) {
  std::vector<int> params;
  for (const auto& t : g.payoff(i).terms) params.push_back(t.param);
  return params;
}

}  // namespace

std::vector<double> splice_profile(int players, int i, double xi,
                                   std::span<const double> x_minus) {
  if (static_cast<int>(x_minus.size()) != players - 1)
    throw std::invalid_argument("opponent profile length must be players - 1");
  std::vector<double> x(static_cast<std::size_t>(players));
  int k = 0;
  for (int j = 0; j < players; ++j)
    x[static_cast<std::size_t>(j)] = (j == i) ? xi : x_minus[static_cast<std::size_t>(k++)];
  return x;
}

std::vector<double> drop_player(std::span<const double> x, int i) {
  std::vector<double> out;
  out.reserve(x.size() - 1);
  for (std::size_t j = 0; j < x.size(); ++j)
    if (static_cast<int>(j) != i) out.push_back(x[j]);
  return out;
}

WorstCase worst_case_payoff(const Game& g, int i, std::span<const double> x) {
  check_profile(g, x);
  double constant;
  std::vector<double> coeffs;
  g.eval_coefficients(i, x, constant, coeffs);
  WorstCase wc;
  wc.value = min_over_vertices(g.scaled_vertices(i), term_params(g, i), constant, coeffs,
                               &wc.active);
  return wc;
}

double rho(const Game& g, int i, std::span<const double> x) {
  double constant;
  std::vector<double> coeffs;
  g.eval_coefficients(i, x, constant, coeffs);
  return min_over_vertices(g.scaled_vertices(i), term_params(g, i), constant, coeffs, nullptr);
}

double best_reply_maximin(const Game& g, int i, std::span<const double> x_minus, int grid,
                          double xtol) {
  const auto& a = g.action(i);
  std::vector<double> x = splice_profile(g.players(), i, a.lo, x_minus);
  const auto params = term_params(g, i);
  const auto& verts = g.scaled_vertices(i);
  double constant;
  std::vector<double> coeffs;
  auto f = [&](double xi) {
    x[static_cast<std::size_t>(i)] = xi;
    g.eval_coefficients(i, x, constant, coeffs);
    return min_over_vertices(verts, params, constant, coeffs, nullptr);
  };
  return maximize_on_interval(f, a.lo, a.hi, grid, xtol).x;
}

CornerReply best_reply_corner(const Game& g, int i, std::span<const double> x_minus) {
  const auto& a = g.action(i);
  std::vector<double> x = splice_profile(g.players(), i, a.lo, x_minus);
  const auto params = term_params(g, i);
  const auto& verts = g.scaled_vertices(i);

  // Step 2: per-corner unconstrained best reply, projected onto A_i.
  std::vector<double> replies(verts.size());
  for (std::size_t vi = 0; vi < verts.size(); ++vi) {
    auto f = [&](double xi) {
      x[static_cast<std::size_t>(i)] = xi;
      return g.payoff_at(i, verts[vi], x);
    };
    replies[vi] = maximize_concave_1d(f, a.lo, a.hi).x;
  }

  // Step 3: a corner certifies iff it is a global worst case at its own reply.
  std::vector<std::size_t> certified;
  std::vector<int> active;
  double constant;
  std::vector<double> coeffs;
  for (std::size_t vi = 0; vi < verts.size(); ++vi) {
    x[static_cast<std::size_t>(i)] = replies[vi];
    g.eval_coefficients(i, x, constant, coeffs);
    min_over_vertices(verts, params, constant, coeffs, &active);
    if (std::find(active.begin(), active.end(), static_cast<int>(vi)) != active.end())
      certified.push_back(vi);
  }

  CornerReply result;
  if (certified.empty()) {
    result.status = CornerReply::Status::no_corner_certified;
    return result;
  }
  bool all_equal = true;
  for (std::size_t k = 1; k < certified.size(); ++k)
    if (std::abs(replies[certified[k]] - replies[certified[0]]) > 1e-9) all_equal = false;
  if (certified.size() > 2 && !all_equal) {
    result.status = CornerReply::Status::ambiguous_tie;
    return result;
  }
  result.status = CornerReply::Status::certified;
  if (certified.size() > 2) {
    // The pairwise-subtraction formula telescopes to zero here; the corners
    // agree, so return the common reply.
    result.action = replies[certified[0]];
    return result;
  }
  // Step 4: sum of certified replies minus the later reply of each
  // certified pair.
  double sum = 0.0;
  for (std::size_t vi : certified) sum += replies[vi];
  for (std::size_t p = 0; p < certified.size(); ++p)
    for (std::size_t q = p + 1; q < certified.size(); ++q) sum -= replies[certified[p]];
  result.action = sum;
  return result;
}

FrontierReport worst_case_frontier(const Game& g, int i, int resolution) {
  if (resolution < 2) throw std::invalid_argument("frontier resolution must be >= 2");
  const int n = g.players();
  const auto& verts = g.scaled_vertices(i);
  FrontierReport report;
  report.vertices.resize(verts.size());

  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  const auto params = term_params(g, i);
  double constant;
  std::vector<double> coeffs;
  std::vector<int> active;
  while (true) {
    for (int j = 0; j < n; ++j) {
      const auto& a = g.action(j);
      x[static_cast<std::size_t>(j)] =
          a.lo + (a.hi - a.lo) * idx[static_cast<std::size_t>(j)] / (resolution - 1);
    }
    g.eval_coefficients(i, x, constant, coeffs);
    min_over_vertices(verts, params, constant, coeffs, &active);
    for (int v : active) {
      auto& fv = report.vertices[static_cast<std::size_t>(v)];
      fv.active = true;
      fv.profiles.push_back(x);
    }
    int j = 0;
    for (; j < n; ++j) {
      if (++idx[static_cast<std::size_t>(j)] < resolution) break;
      idx[static_cast<std::size_t>(j)] = 0;
    }
    if (j == n) break;
  }
  return report;
}

}  // namespace robusteq

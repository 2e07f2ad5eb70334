#include "robusteq/game.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "robusteq/numeric.hpp"

namespace robusteq {

namespace {

std::string player_tag(int i) { return "player " + std::to_string(i + 1); }

void check_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw GameFormatError(what + " must be finite");
}

}  // namespace

Game::Game(std::vector<ActionInterval> actions, std::vector<PayoffForm> payoffs,
           std::vector<UncertaintyPolytope> uncertainty, std::vector<double> deltas)
    : actions_(std::move(actions)),
      payoffs_(std::move(payoffs)),
      uncertainty_(std::move(uncertainty)),
      deltas_(std::move(deltas)) {
  n_ = static_cast<int>(actions_.size());
  if (n_ < 1) throw GameFormatError("game needs at least one player");
  if (payoffs_.size() != actions_.size() || uncertainty_.size() != actions_.size() ||
      deltas_.size() != actions_.size())
    throw GameFormatError("per-player lists must all have length equal to the player count");

  for (int i = 0; i < n_; ++i) {
    const auto& a = actions_[static_cast<std::size_t>(i)];
    check_finite(a.lo, player_tag(i) + " action bound");
    check_finite(a.hi, player_tag(i) + " action bound");
    if (a.lo > a.hi) throw GameFormatError(player_tag(i) + " action interval has lo > hi");

    const auto& u = uncertainty_[static_cast<std::size_t>(i)];
    if (u.vertices.empty())
      throw GameFormatError(player_tag(i) + " uncertainty set needs at least one vertex");
    const std::size_t dim = u.nominal.size();
    if (dim == 0) throw GameFormatError(player_tag(i) + " nominal point is empty");
    for (const auto& v : u.vertices)
      if (v.size() != dim)
        throw GameFormatError(player_tag(i) + " uncertainty vertex dimension mismatch");
    for (double c : u.nominal) check_finite(c, player_tag(i) + " nominal coordinate");
    for (const auto& v : u.vertices)
      for (double c : v) check_finite(c, player_tag(i) + " vertex coordinate");

    double d = deltas_[static_cast<std::size_t>(i)];
    if (!(d >= 0.0 && d <= 1.0)) throw GameFormatError(player_tag(i) + ": delta out of range");

    const auto& pf = payoffs_[static_cast<std::size_t>(i)];
    std::set<int> seen;
    for (const auto& term : pf.terms) {
      if (term.param < 1 || term.param > static_cast<int>(dim))
        throw GameFormatError(player_tag(i) + " payoff term param " +
                              std::to_string(term.param) + " outside [1, " +
                              std::to_string(dim) + "]");
      if (!seen.insert(term.param).second)
        throw GameFormatError(player_tag(i) + " payoff repeats param " +
                              std::to_string(term.param));
    }
    if (pf.constant.max_variable_index() > n_)
      throw GameFormatError(player_tag(i) + " payoff references unknown variable x" +
                            std::to_string(pf.constant.max_variable_index()));
    for (const auto& term : pf.terms)
      if (term.coeff.max_variable_index() > n_)
        throw GameFormatError(player_tag(i) + " payoff references unknown variable x" +
                              std::to_string(term.coeff.max_variable_index()));
  }

  scaled_.reserve(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i)
    scaled_.push_back(scale_uncertainty(uncertainty_[static_cast<std::size_t>(i)],
                                        deltas_[static_cast<std::size_t>(i)]));
}

double Game::payoff_at(int i, std::span<const double> alpha, std::span<const double> x) const {
  const auto& pf = payoffs_[static_cast<std::size_t>(i)];
  double v = pf.constant.evaluate(x);
  for (const auto& term : pf.terms)
    v += alpha[static_cast<std::size_t>(term.param - 1)] * term.coeff.evaluate(x);
  return v;
}

double Game::nominal_payoff(int i, std::span<const double> x) const {
  return payoff_at(i, uncertainty_[static_cast<std::size_t>(i)].nominal, x);
}

void Game::eval_coefficients(int i, std::span<const double> x, double& constant,
                             std::vector<double>& coeffs) const {
  const auto& pf = payoffs_[static_cast<std::size_t>(i)];
  constant = pf.constant.evaluate(x);
  coeffs.resize(pf.terms.size());
  for (std::size_t k = 0; k < pf.terms.size(); ++k)
    coeffs[k] = pf.terms[k].coeff.evaluate(x);
}

Game Game::with_delta(double delta_all) const {
  return with_deltas(std::vector<double>(static_cast<std::size_t>(n_), delta_all));
}

Game Game::with_deltas(std::vector<double> deltas) const {
  return Game(actions_, payoffs_, uncertainty_, std::move(deltas));
}

std::vector<std::vector<double>> scale_uncertainty(const UncertaintyPolytope& p, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw GameFormatError("delta out of range");
  std::vector<std::vector<double>> out;
  out.reserve(p.vertices.size());
  for (const auto& v : p.vertices) {
    std::vector<double> w(p.nominal.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
      // delta = 0 must reproduce the nominal point bit-exactly.
      w[k] = delta == 0.0 ? p.nominal[k] : delta * v[k] + (1.0 - delta) * p.nominal[k];
    }
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

// Solves the m x m system M*lambda = rhs in place. Returns false when a
// pivot underflows (degenerate subset).
bool solve_dense(std::vector<std::vector<double>>& M, std::vector<double>& rhs) {
  const std::size_t m = rhs.size();
  double scale = 0.0;
  for (const auto& row : M)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(M[r][col]) > std::abs(M[pivot][col])) pivot = r;
    if (std::abs(M[pivot][col]) < 1e-13 * scale) return false;
    std::swap(M[pivot], M[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t r = col + 1; r < m; ++r) {
      double f = M[r][col] / M[col][col];
      for (std::size_t c = col; c < m; ++c) M[r][c] -= f * M[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t col = m; col-- > 0;) {
    double v = rhs[col];
    for (std::size_t c = col + 1; c < m; ++c) v -= M[col][c] * rhs[c];
    rhs[col] = v / M[col][col];
  }
  return true;
}

// Tests whether `point` is a convex combination of the subset of vertices
// selected by `idx`, via least squares on the coordinates-plus-ones system.
bool subset_contains(const std::vector<std::vector<double>>& verts,
                     const std::vector<std::size_t>& idx, std::span<const double> point,
                     double tol, double scale) {
  const std::size_t d = point.size();
  const std::size_t m = idx.size();
  const std::size_t rows = d + 1;
  // A is rows x m: vertex coordinates stacked over a row of ones.
  auto a_at = [&](std::size_t r, std::size_t c) {
    return r < d ? verts[idx[c]][r] : 1.0;
  };
  auto b_at = [&](std::size_t r) { return r < d ? point[r] : 1.0; };
  std::vector<std::vector<double>> M(m, std::vector<double>(m, 0.0));
  std::vector<double> rhs(m, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c1 = 0; c1 < m; ++c1) {
      double arc1 = a_at(r, c1);
      rhs[c1] += arc1 * b_at(r);
      for (std::size_t c2 = 0; c2 < m; ++c2) M[c1][c2] += arc1 * a_at(r, c2);
    }
  if (!solve_dense(M, rhs)) return false;
  for (double lambda : rhs)
    if (lambda < -tol) return false;
  for (std::size_t r = 0; r < rows; ++r) {
    double v = 0.0;
    for (std::size_t c = 0; c < m; ++c) v += a_at(r, c) * rhs[c];
    if (std::abs(v - b_at(r)) > tol * scale) return false;
  }
  return true;
}

}  // namespace

bool point_in_hull(const std::vector<std::vector<double>>& vertices,
                   std::span<const double> point, double tol) {
  if (vertices.empty()) return false;
  const std::size_t d = point.size();
  for (const auto& v : vertices)
    if (v.size() != d) throw std::invalid_argument("hull test: dimension mismatch");
  double scale = 1.0;
  for (double c : point) scale = std::max(scale, std::abs(c));

  // Single vertices first, then affine subsets up to dimension + 1
  // (Caratheodory bound).
  for (const auto& v : vertices) {
    bool equal = true;
    for (std::size_t k = 0; k < d && equal; ++k)
      equal = std::abs(v[k] - point[k]) <= tol * scale;
    if (equal) return true;
  }
  const std::size_t max_size = std::min(vertices.size(), d + 1);
  for (std::size_t m = 2; m <= max_size; ++m) {
    std::vector<std::size_t> idx(m);
    for (std::size_t k = 0; k < m; ++k) idx[k] = k;
    while (true) {
      if (subset_contains(vertices, idx, point, tol, scale)) return true;
      // next combination
      std::size_t k = m;
      while (k-- > 0) {
        if (idx[k] + (m - k) < vertices.size()) {
          ++idx[k];
          for (std::size_t j = k + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
          break;
        }
        if (k == 0) goto next_size;
      }
    }
  next_size:;
  }
  return false;
}

bool hull_membership(const UncertaintyPolytope& p, double tol) {
  return point_in_hull(p.vertices, p.nominal, tol);
}

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        ok = true;
        break;
      }
    if (!ok) throw GameFormatError("unknown key '" + item.key() + "' in " + context);
  }
  for (const char* key : allowed)
    if (!obj.contains(key))
      throw GameFormatError("missing key '" + std::string(key) + "' in " + context);
}

double as_number(const json& j, const std::string& context) {
  if (!j.is_number()) throw GameFormatError(context + " must be a number");
  return j.get<double>();
}

Expression parse_payoff_expr(const json& j, const std::string& context) {
  if (!j.is_string()) throw GameFormatError(context + " must be an expression string");
  try {
    return parse_expression(j.get<std::string>());
  } catch (const ParseError& e) {
    throw GameFormatError(context + ": " + e.what());
  }
}

}  // namespace

Game load_game(std::string_view contents) {
  json root;
  try {
    root = json::parse(contents);
  } catch (const json::parse_error& e) {
    throw GameFormatError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw GameFormatError("top level must be an object");
  require_keys(root, {"players", "player"}, "top level");
  if (!root["players"].is_number_integer())
    throw GameFormatError("'players' must be an integer");
  const int n = root["players"].get<int>();
  if (n < 1) throw GameFormatError("'players' must be at least 1");
  const json& arr = root["player"];
  if (!arr.is_array() || static_cast<int>(arr.size()) != n)
    throw GameFormatError("'player' must be an array of length 'players'");

  std::vector<ActionInterval> actions;
  std::vector<PayoffForm> payoffs;
  std::vector<UncertaintyPolytope> uncertainty;
  std::vector<double> deltas;
  for (int i = 0; i < n; ++i) {
    const std::string ctx = player_tag(i);
    const json& p = arr[static_cast<std::size_t>(i)];
    if (!p.is_object()) throw GameFormatError(ctx + " entry must be an object");
    require_keys(p, {"action", "payoff", "uncertainty", "delta"}, ctx);

    const json& act = p["action"];
    if (!act.is_array() || act.size() != 2)
      throw GameFormatError(ctx + " 'action' must be [lo, hi]");
    actions.push_back({as_number(act[0], ctx + " action lo"),
                       as_number(act[1], ctx + " action hi")});

    const json& pay = p["payoff"];
    if (!pay.is_object()) throw GameFormatError(ctx + " 'payoff' must be an object");
    require_keys(pay, {"const", "terms"}, ctx + " payoff");
    PayoffForm form;
    form.constant = parse_payoff_expr(pay["const"], ctx + " payoff const");
    const json& terms = pay["terms"];
    if (!terms.is_array()) throw GameFormatError(ctx + " payoff 'terms' must be an array");
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const std::string tctx = ctx + " payoff term " + std::to_string(t + 1);
      const json& term = terms[t];
      if (!term.is_object()) throw GameFormatError(tctx + " must be an object");
      require_keys(term, {"param", "coeff"}, tctx);
      if (!term["param"].is_number_integer())
        throw GameFormatError(tctx + " 'param' must be an integer");
      PayoffTerm pt;
      pt.param = term["param"].get<int>();
      pt.coeff = parse_payoff_expr(term["coeff"], tctx + " coeff");
      form.terms.push_back(std::move(pt));
    }
    payoffs.push_back(std::move(form));

    const json& unc = p["uncertainty"];
    if (!unc.is_object()) throw GameFormatError(ctx + " 'uncertainty' must be an object");
    require_keys(unc, {"vertices", "nominal"}, ctx + " uncertainty");
    UncertaintyPolytope poly;
    const json& verts = unc["vertices"];
    if (!verts.is_array() || verts.empty())
      throw GameFormatError(ctx + " 'vertices' must be a non-empty array");
    for (const json& v : verts) {
      if (!v.is_array() || v.empty())
        throw GameFormatError(ctx + " each vertex must be a non-empty array");
      std::vector<double> vec;
      for (const json& c : v) vec.push_back(as_number(c, ctx + " vertex coordinate"));
      poly.vertices.push_back(std::move(vec));
    }
    const json& nom = unc["nominal"];
    if (!nom.is_array() || nom.empty())
      throw GameFormatError(ctx + " 'nominal' must be a non-empty array");
    for (const json& c : nom) poly.nominal.push_back(as_number(c, ctx + " nominal coordinate"));
    uncertainty.push_back(std::move(poly));

    deltas.push_back(as_number(p["delta"], ctx + " delta"));
  }
  return Game(std::move(actions), std::move(payoffs), std::move(uncertainty), std::move(deltas));
}

namespace {

// Opponent profiles for the regularity checks: deterministic low-discrepancy
// points in the opponents' action box.
std::vector<std::vector<double>> opponent_profiles(const Game& g, int i, int samples) {
  static const int bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    std::vector<double> x(static_cast<std::size_t>(g.players()), 0.0);
    int axis = 0;
    for (int j = 0; j < g.players(); ++j) {
      if (j == i) continue;
      const auto& a = g.action(j);
      double u = halton(s + 1, bases[axis % 10]);
      x[static_cast<std::size_t>(j)] = a.lo + u * (a.hi - a.lo);
      ++axis;
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

std::vector<Finding> validate_assumptions(const Game& g, int samples) {
  if (samples < 3) throw std::invalid_argument("validate_assumptions: samples must be >= 3");
  std::vector<Finding> findings;
  const double tol = 1e-9;
  for (int i = 0; i < g.players(); ++i) {
    const auto& a = g.action(i);
    if (!(a.lo <= a.hi) || !std::isfinite(a.lo) || !std::isfinite(a.hi)) {
      findings.push_back({Finding::Severity::error, i + 1, "action-interval",
                          player_tag(i) + " action interval invalid"});
      continue;
    }
    if (!hull_membership(g.uncertainty(i)))
      findings.push_back({Finding::Severity::error, i + 1, "hull-membership",
                          player_tag(i) + " nominal point lies outside the vertex hull"});

    if (a.hi == a.lo) continue;
    const double h = (a.hi - a.lo) / (samples - 1);
    auto profiles = opponent_profiles(g, i, samples);
    const auto& verts = g.scaled_vertices(i);
    std::vector<double> x;
    for (std::size_t vi = 0; vi < verts.size(); ++vi) {
      for (std::size_t s = 0; s < profiles.size(); ++s) {
        x = profiles[s];
        auto f = [&](double xi) {
          x[static_cast<std::size_t>(i)] = xi;
          return g.payoff_at(i, verts[vi], x);
        };
        double prev = f(a.lo), cur = f(a.lo + h);
        for (int j = 1; j + 1 < samples; ++j) {
          double next = f(a.lo + h * (j + 1));
          double second = prev - 2.0 * cur + next;
          if (second > tol) {
            findings.push_back(
                {Finding::Severity::error, i + 1, "concavity",
                 player_tag(i) + " payoff is not concave in its own action at vertex " +
                     std::to_string(vi) + ", opponent sample " + std::to_string(s) +
                     ", x" + std::to_string(i + 1) + " = " + std::to_string(a.lo + h * j)});
            goto next_vertex;  // one finding per (vertex, player) is enough detail
          }
          prev = cur;
          cur = next;
        }
      }
    next_vertex:;
    }
  }
  return findings;
}

bool payoff_strictly_concave(const Game& g, int samples) {
  if (samples < 3) throw std::invalid_argument("payoff_strictly_concave: samples must be >= 3");
  const double margin = -1e-9;
  for (int i = 0; i < g.players(); ++i) {
    const auto& a = g.action(i);
    if (!(a.hi > a.lo)) return false;
    const double h = (a.hi - a.lo) / (samples - 1);
    auto profiles = opponent_profiles(g, i, samples);
    std::vector<double> x;
    for (const auto& vert : g.scaled_vertices(i)) {
      for (const auto& prof : profiles) {
        x = prof;
        auto f = [&](double xi) {
          x[static_cast<std::size_t>(i)] = xi;
          return g.payoff_at(i, vert, x);
        };
        double prev = f(a.lo), cur = f(a.lo + h);
        for (int j = 1; j + 1 < samples; ++j) {
          double next = f(a.lo + h * (j + 1));
          if (prev - 2.0 * cur + next > margin) return false;
          prev = cur;
          cur = next;
        }
      }
    }
  }
  return true;
}

}  // namespace robusteq

#include "robusteq/cournot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace robusteq {

namespace {

constexpr double kCaseTol = 1e-12;

double segment_gamma(const CournotParams& p, double b) {
  // The uncertainty segment in the (b, gamma) plane.
  return (p.gamma_hi * p.b_hi - p.b_lo * p.gamma_lo) / (p.b_hi - p.b_lo) -
         (p.gamma_hi - p.gamma_lo) / (p.b_hi - p.b_lo) * b;
}

}  // namespace

void validate(const CournotParams& p) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("cournot: " + msg); };
  for (double v : {p.a, p.b_hat, p.gamma_hat, p.b_lo, p.b_hi, p.gamma_lo, p.gamma_hi})
    if (!(v >= 0.0) || !std::isfinite(v)) fail("parameters must be nonnegative and finite");
  if (!(p.b_hi > p.b_lo)) fail("b_hi must exceed b_lo");
  if (!(p.gamma_hi > p.gamma_lo)) fail("gamma_hi must exceed gamma_lo");
  if (!(2.0 * p.b_hat > p.gamma_hat)) fail("2*b_hat must exceed gamma_hat");
  if (p.b_hat < p.b_lo - 1e-12 || p.b_hat > p.b_hi + 1e-12)
    fail("b_hat must lie between b_lo and b_hi");
  if (std::abs(segment_gamma(p, p.b_hat) - p.gamma_hat) > 1e-9)
    fail("(b_hat, gamma_hat) must lie on the uncertainty segment");
  if (!(p.delta >= 0.0 && p.delta <= 1.0)) fail("delta out of range");
}

ScaledSlopes scaled_params(const CournotParams& p) {
  validate(p);
  const double d = p.delta;
  return {(1.0 - d) * p.b_hat + d * p.b_hi, (1.0 - d) * p.b_hat + d * p.b_lo,
          (1.0 - d) * p.gamma_hat + d * p.gamma_hi, (1.0 - d) * p.gamma_hat + d * p.gamma_lo};
}

Thresholds thresholds(const CournotParams& p) {
  validate(p);
  if (!(p.delta > 0.0)) throw std::invalid_argument("cournot: thresholds need delta > 0");
  const ScaledSlopes s = scaled_params(p);
  const double db = p.b_hi - p.b_lo;
  const double dg = p.gamma_hi - p.gamma_lo;
  Thresholds t;
  t.q_lo = p.a * db / (2.0 * s.b_hi * dg + s.gamma_lo * db);
  t.q_hi = p.a * db / (2.0 * s.b_lo * dg + s.gamma_hi * db);
  t.q_m = p.a / s.gamma_hi;
  return t;
}

double nominal_reaction(const CournotParams& p, double q_opp) {
  validate(p);
  if (q_opp < 0.0) throw std::invalid_argument("cournot: q_opp must be nonnegative");
  double r = (p.a - p.gamma_hat * q_opp) / (2.0 * p.b_hat);
  return r > 0.0 ? r : 0.0;
}

double robust_reaction(const CournotParams& p, double q_opp) {
  validate(p);
  if (q_opp < 0.0) throw std::invalid_argument("cournot: q_opp must be nonnegative");
  if (p.delta == 0.0) return nominal_reaction(p, q_opp);
  const ScaledSlopes s = scaled_params(p);
  const Thresholds t = thresholds(p);
  if (q_opp < t.q_lo) return (p.a - s.gamma_lo * q_opp) / (2.0 * s.b_hi);
  if (q_opp <= t.q_hi)
    return (p.gamma_hi - p.gamma_lo) / (p.b_hi - p.b_lo) * q_opp;
  if (q_opp < t.q_m) return (p.a - s.gamma_hi * q_opp) / (2.0 * s.b_lo);
  return 0.0;
}

std::pair<double, double> nominal_nash(const CournotParams& p) {
  validate(p);
  double q = p.a / (2.0 * p.b_hat + p.gamma_hat);
  return {q, q};
}

DeltaStar delta_star(const CournotParams& p) {
  validate(p);
  if (!(p.gamma_hi - p.gamma_lo > p.b_hi - p.b_lo + kCaseTol))
    throw std::invalid_argument(
        "cournot: delta_star requires gamma_hi - gamma_lo > b_hi - b_lo");
  DeltaStar out;
  out.value = (p.gamma_hi - 2.0 * p.b_lo) /
              (p.gamma_hi - 2.0 * p.b_lo + 2.0 * p.b_hat - p.gamma_hat);
  out.interior = out.value > 0.0;
  return out;
}

const char* to_string(CournotCase c) {
  switch (c) {
    case CournotCase::one: return "1";
    case CournotCase::two: return "2";
    case CournotCase::three_i: return "3i";
    case CournotCase::three_ii: return "3ii";
    case CournotCase::three_iii: return "3iii";
  }
  return "?";
}

CournotRoeSet roe_set(const CournotParams& p) {
  validate(p);
  if (!(p.delta > 0.0)) throw std::invalid_argument("cournot: roe_set needs delta > 0");
  const ScaledSlopes s = scaled_params(p);
  const double db = p.b_hi - p.b_lo;
  const double dg = p.gamma_hi - p.gamma_lo;
  CournotRoeSet set;
  if (db > dg + kCaseTol) {
    set.label = CournotCase::one;
    double q = p.a / (2.0 * s.b_hi + s.gamma_lo);
    set.points.push_back({q, q});
    return set;
  }
  if (std::abs(db - dg) <= kCaseTol) {
    set.label = CournotCase::two;
    const Thresholds t = thresholds(p);
    set.has_segment = true;
    set.segment_lo = {t.q_lo, t.q_lo};
    set.segment_hi = {t.q_hi, t.q_hi};
    return set;
  }
  const DeltaStar ds = delta_star(p);
  const double q2 = p.a / (2.0 * s.b_lo + s.gamma_hi);
  if (p.delta < ds.value - kCaseTol) {
    set.label = CournotCase::three_i;
    set.points.push_back({q2, q2});
    return set;
  }
  if (std::abs(p.delta - ds.value) <= kCaseTol) {
    set.label = CournotCase::three_ii;
    const Thresholds t = thresholds(p);
    const double total = p.a / (2.0 * s.b_lo);  // partner output is total - q
    set.has_segment = true;
    set.segment_lo = {t.q_hi, total - t.q_hi};
    set.segment_hi = {total - t.q_hi, t.q_hi};
    return set;
  }
  set.label = CournotCase::three_iii;
  const double denom = 2.0 * s.b_lo * db + s.gamma_hi * dg;
  const double q3 = p.a * db / denom;
  const double q4 = p.a * dg / denom;
  set.points.push_back({q2, q2});
  set.points.push_back({q3, q4});
  set.points.push_back({q4, q3});
  std::sort(set.points.begin(), set.points.end());
  return set;
}

double worst_case_profit(const CournotParams& p, double q_i, double q_opp) {
  validate(p);
  if (q_i < 0.0 || q_opp < 0.0)
    throw std::invalid_argument("cournot: quantities must be nonnegative");
  const ScaledSlopes s = scaled_params(p);
  double at_high_b = (p.a - s.gamma_lo * q_opp - s.b_hi * q_i) * q_i;
  double at_low_b = (p.a - s.gamma_hi * q_opp - s.b_lo * q_i) * q_i;
  return std::min(at_high_b, at_low_b);
}

Game to_game(const CournotParams& p, double q_max) {
  validate(p);
  if (q_max <= 0.0) {
    double b_min = std::min(p.b_hat, p.b_lo);
    if (!(b_min > 0.0))
      throw std::invalid_argument("cournot: to_game needs an explicit q_max when b_lo is 0");
    q_max = p.a / (2.0 * b_min);
  }
  char buf[64];
  auto fmt = [&](const char* pattern, int i) {
    std::snprintf(buf, sizeof buf, pattern, i);
    return std::string(buf);
  };
  std::vector<ActionInterval> actions(2, ActionInterval{0.0, q_max});
  std::vector<PayoffForm> payoffs;
  for (int i = 1; i <= 2; ++i) {
    int j = 3 - i;
    PayoffForm form;
    std::snprintf(buf, sizeof buf, "%.17g*x%d", p.a, i);
    form.constant = parse_expression(buf);
    form.terms.push_back({1, parse_expression(fmt("-x%d^2", i))});         // own-slope b
    std::snprintf(buf, sizeof buf, "-x%d*x%d", i, j);                      // substitutability
    form.terms.push_back({2, parse_expression(buf)});
    payoffs.push_back(std::move(form));
  }
  UncertaintyPolytope poly;
  poly.vertices = {{p.b_hi, p.gamma_lo}, {p.b_lo, p.gamma_hi}};
  poly.nominal = {p.b_hat, p.gamma_hat};
  std::vector<UncertaintyPolytope> uncertainty(2, poly);
  std::vector<double> deltas(2, p.delta);
  return Game(std::move(actions), std::move(payoffs), std::move(uncertainty), std::move(deltas));
}

}  // namespace robusteq

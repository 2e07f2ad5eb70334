#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace robusteq {

struct MaxResult {
  double x = 0.0;
  double value = 0.0;
};

namespace detail {

// Golden-section refinement of a maximum inside [lo, hi]. Returns the best
// point seen; for a unimodal function this is the maximizer to within xtol.
template <class F>
MaxResult golden_max(F&& f, double lo, double hi, double xtol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  MaxResult best = fc >= fd ? MaxResult{c, fc} : MaxResult{d, fd};
  while (b - a > xtol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      if (fc > best.value) best = {c, fc};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      if (fd > best.value) best = {d, fd};
    }
  }
  return best;
}

}  // namespace detail

// Grid scan followed by golden-section refinement on the bracketing
// interval. Exact for concave (hence unimodal) objectives; grid ties
// resolve toward the smaller x.
template <class F>
MaxResult maximize_on_interval(F&& f, double lo, double hi, int grid_points = 1025,
                               double xtol = 1e-10) {
  if (!(hi > lo)) return {lo, f(lo)};
  if (grid_points < 3) grid_points = 3;
  const double span = hi - lo;
  int best_j = 0;
  double best_val = f(lo);
  for (int j = 1; j < grid_points; ++j) {
    double x = (j == grid_points - 1) ? hi : lo + span * j / (grid_points - 1);
    double v = f(x);
    if (v > best_val) {
      best_val = v;
      best_j = j;
    }
  }
  auto grid_x = [&](int j) {
    if (j <= 0) return lo;
    if (j >= grid_points - 1) return hi;
    return lo + span * j / (grid_points - 1);
  };
  double a = grid_x(best_j - 1);
  double b = grid_x(best_j + 1);
  MaxResult refined = detail::golden_max(f, a, b, xtol);
  // Ties go to the grid point, which sits no further right than the
  // refined point of an equal-valued plateau.
  MaxResult result = refined.value > best_val ? refined : MaxResult{grid_x(best_j), best_val};

  // Value comparisons alone locate a smooth maximum only to
  // ~sqrt(eps)*scale; a parabola through three straddling points recovers
  // the stationary point of the locally quadratic piece.
  const double h = std::max(span * 1e-5, 1e-12);
  if (result.x - h > lo && result.x + h < hi) {
    double fm = f(result.x - h);
    double fp = f(result.x + h);
    double denom = fm - 2.0 * result.value + fp;
    if (denom < 0.0) {
      double step = 0.5 * h * (fm - fp) / denom;
      if (std::abs(step) <= h) {
        double xq = result.x + step;
        double fq = f(xq);
        double scale = std::max({1.0, std::abs(result.value), std::abs(fq)});
        if (fq >= result.value - 1e-13 * scale) result = {xq, fq};
      }
    }
  }
  return result;
}

struct QuadraticProbe {
  bool is_quadratic = false;
  double a2 = 0.0;       // second divided difference (half the x^2 curvature)
  double vertex_x = 0.0; // stationary point, meaningful when a2 != 0
};

// Samples f at five equispaced points and checks whether a quadratic through
// the 1st, 3rd and 5th reproduces the other two.
template <class F>
QuadraticProbe probe_quadratic(F&& f, double lo, double hi) {
  QuadraticProbe probe;
  if (!(hi > lo)) return probe;
  double t[5], y[5];
  for (int k = 0; k < 5; ++k) {
    t[k] = lo + (hi - lo) * k / 4.0;
    y[k] = f(t[k]);
  }
  const double c0 = y[0];
  const double c1 = (y[2] - y[0]) / (t[2] - t[0]);
  const double c2 = ((y[4] - y[2]) / (t[4] - t[2]) - c1) / (t[4] - t[0]);
  auto p = [&](double x) { return c0 + c1 * (x - t[0]) + c2 * (x - t[0]) * (x - t[2]); };
  double scale = 1.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  if (std::abs(p(t[1]) - y[1]) > 1e-9 * scale || std::abs(p(t[3]) - y[3]) > 1e-9 * scale)
    return probe;
  probe.is_quadratic = true;
  probe.a2 = c2;
  if (c2 != 0.0) probe.vertex_x = (t[0] + t[2]) / 2.0 - c1 / (2.0 * c2);
  return probe;
}

// 1-D concave maximization. Quadratic objectives resolve exactly via the
// projected stationary point; anything else falls back to grid + golden
// section.
template <class F>
MaxResult maximize_concave_1d(F&& f, double lo, double hi, int grid_points = 1025,
                              double xtol = 1e-10) {
  if (!(hi > lo)) return {lo, f(lo)};
  QuadraticProbe probe = probe_quadratic(f, lo, hi);
  if (probe.is_quadratic) {
    const double curvature_floor = 1e-12;
    if (probe.a2 < -curvature_floor) {
      double x = std::clamp(probe.vertex_x, lo, hi);
      return {x, f(x)};
    }
    // Affine or convex: the maximum sits at an endpoint.
    double flo = f(lo), fhi = f(hi);
    return fhi > flo ? MaxResult{hi, fhi} : MaxResult{lo, flo};
  }
  return maximize_on_interval(f, lo, hi, grid_points, xtol);
}

// Deterministic low-discrepancy sequence (radical inverse).
inline double halton(int index, int base) {
  double result = 0.0;
  double f = 1.0;
  int i = index;
  while (i > 0) {
    f /= base;
    result += f * (i % base);
    i /= base;
  }
  return result;
}

inline double clamp_to(double x, double lo, double hi) { return std::clamp(x, lo, hi); }

}  // namespace robusteq

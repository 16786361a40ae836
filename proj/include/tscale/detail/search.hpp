#pragma once

// One-dimensional search primitives shared by the tuning rules.

#include <cmath>
#include <cstddef>
#include <vector>

namespace tscale::detail {

struct SearchResult {
  double x;
  double value;
  int iterations;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
template <class F>
SearchResult golden_section_maximize(F&& f, double lo, double hi, double tol,
                                     int max_iter = 500) {
  constexpr double inv_phi = 0.6180339887498948482045868343656381;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  int it = 0;
  while (hi - lo > tol && it < max_iter) {
    ++it;
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? SearchResult{x1, f1, it} : SearchResult{x2, f2, it};
}

/// Bisection for a sign change of g on [lo, hi]; g(lo) and g(hi) must have
/// opposite signs. Stops when the bracket is a few ulp wide.
template <class G>
SearchResult bisect(G&& g, double lo, double hi, int max_iter = 400) {
  double glo = g(lo);
  int it = 0;
  while (it < max_iter) {
    ++it;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return {mid, gm, it};
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  const double x = 0.5 * (lo + hi);
  return {x, g(x), it};
}

/// Scan a grid, then refine the best interior bracket by golden section.
/// Suitable for objectives that are not known to be unimodal on the whole
/// range but are smooth near their maximum.
template <class F>
SearchResult scan_then_maximize(F&& f, const std::vector<double>& grid, double tol) {
  std::size_t best = 0;
  double best_value = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[best + 1 < grid.size() ? best + 1 : best];
  auto refined = golden_section_maximize(f, lo, hi, tol);
  refined.iterations += static_cast<int>(grid.size());
  if (refined.value < best_value) return {grid[best], best_value, refined.iterations};
  return refined;
}

inline std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  std::vector<double> grid(count);
  const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo * std::exp(ratio * static_cast<double>(i));
  grid.back() = hi;
  return grid;
}

}  // namespace tscale::detail

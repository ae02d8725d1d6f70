// One-dimensional root bracketing and maximization.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>

namespace amamm {

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Grows [lo, hi] geometrically (both ends, by `factor`) until g changes sign.
// Expects g decreasing, i.e. g(lo) > 0 > g(hi). Requires 0 < lo < hi.
std::optional<Bracket> expand_decreasing_bracket(const std::function<double(double)>& g, Bracket start,
                                                 double factor, int max_expansions);

// Bisection in log space for a decreasing function with g(lo) > 0 > g(hi).
// Stops when the relative bracket width drops to rel_tol, the bracket is at
// floating-point resolution, or max_iter is reached.
RootResult bisect_log(const std::function<double(double)>& g, Bracket bracket, double rel_tol,
                      int max_iter);

struct ArgMax {
  double x = 0.0;
  double value = 0.0;
};

// Maximizes phi on [lo, hi]: evaluates a uniform grid of n points, then
// refines by golden-section search on the cells adjacent to the best point.
// Ties on the grid resolve to the smallest x; refinement only moves the point
// when it strictly improves the value.
ArgMax grid_golden_max(const std::function<double(double)>& phi, double lo, double hi, std::size_t n,
                       double x_tol = 1e-14);

}  // namespace amamm

#include "amamm/scalar_search.hpp"

#include <stdexcept>

namespace amamm {

std::optional<Bracket> expand_decreasing_bracket(const std::function<double(double)>& g, Bracket b,
                                                 double factor, int max_expansions) {
  if (!(b.lo > 0.0) || !(b.hi > b.lo) || !(factor > 1.0)) {
    throw std::invalid_argument("expand_decreasing_bracket: need 0 < lo < hi and factor > 1");
  }
  for (int i = 0; i <= max_expansions; ++i) {
    const bool lo_ok = g(b.lo) > 0.0;
    const bool hi_ok = g(b.hi) < 0.0;
    if (lo_ok && hi_ok) return b;
    if (!lo_ok) b.lo /= factor;
    if (!hi_ok) b.hi *= factor;
    if (!(b.lo > 0.0) || !std::isfinite(b.hi)) break;
  }
  return std::nullopt;
}

RootResult bisect_log(const std::function<double(double)>& g, Bracket b, double rel_tol, int max_iter) {
  RootResult out;
  double lo = b.lo, hi = b.hi;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (!(mid > lo && mid < hi)) break;
    const double v = g(mid);
    if (v == 0.0) {
      lo = hi = mid;
      break;
    }
    (v > 0.0 ? lo : hi) = mid;
    if (hi - lo <= rel_tol * lo) break;
  }
  const double glo = g(lo), ghi = g(hi);
  if (std::abs(glo) <= std::abs(ghi)) {
    out.root = lo;
    out.residual = glo;
  } else {
    out.root = hi;
    out.residual = ghi;
  }
  return out;
}

ArgMax grid_golden_max(const std::function<double(double)>& phi, double lo, double hi, std::size_t n,
                       double x_tol) {
  if (!(hi >= lo)) throw std::invalid_argument("grid_golden_max: empty interval");
  if (hi == lo || n < 2) return {lo, phi(lo)};

  const double h = (hi - lo) / static_cast<double>(n - 1);
  std::size_t best = 0;
  double best_val = phi(lo);
  for (std::size_t i = 1; i < n; ++i) {
    const double v = phi(lo + h * static_cast<double>(i));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  ArgMax out{lo + h * static_cast<double>(best), best_val};

  double a = best == 0 ? lo : lo + h * static_cast<double>(best - 1);
  double b = best + 1 >= n ? hi : lo + h * static_cast<double>(best + 1);
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < 200 && (b - a) > x_tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = phi(d);
    }
  }
  const double x = fc >= fd ? c : d;
  const double v = fc >= fd ? fc : fd;
  if (v > out.value) out = {x, v};
  return out;
}

}  // namespace amamm

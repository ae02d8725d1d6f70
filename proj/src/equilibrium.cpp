#include "amamm/equilibrium.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "amamm/amm_core.hpp"
#include "amamm/scalar_search.hpp"

namespace amamm {
namespace {

void require_fee_in_range(double fee, const MarketParams& params, const char* what) {
  if (!(fee >= 0.0) || fee > params.f_max) {
    throw std::domain_error(std::string(what) + ": fee outside [0, f_max]");
  }
}

bool sampled_decreasing(const std::function<double(double)>& g, double lo, double hi, int points) {
  double prev = g(lo);
  const double step = std::log(hi / lo) / points;
  for (int i = 1; i <= points; ++i) {
    const double v = g(lo * std::exp(step * i));
    if (!(v < prev)) return false;
    prev = v;
  }
  return true;
}

}  // namespace

std::string to_string(EquilibriumStatus status) {
  switch (status) {
    case EquilibriumStatus::interior: return "interior";
    case EquilibriumStatus::zero_fee_boundary: return "zero_fee_boundary";
    case EquilibriumStatus::no_demand: return "no_demand";
    case EquilibriumStatus::bracket_failure: return "bracket_failure";
  }
  return "unknown";
}

double lp_pnl_ff(double fee, double liquidity, const MarketParams& params, double price) {
  const double value = pool_value(liquidity, price);
  return fee * noise_volume(fee, liquidity, params) - ap0(fee, params) * value - params.r * value;
}

double ff_excess_return(double fee, double liquidity, const MarketParams& params, double price) {
  return fee * noise_volume_per_value(fee, liquidity, params, price) - ap0(fee, params) - params.r;
}

FFEquilibrium solve_ff_liquidity(double fee, const MarketParams& params, const SolverConfig& solver) {
  FFEquilibrium out;
  out.fee = fee;
  if (params.c0 == 0.0) {
    // ap0 does not depend on the demand constants; validate the rest.
    MarketParams rest = params;
    rest.c0 = 1.0;
    rest.validate();
    require_fee_in_range(fee, rest, "solve_ff_liquidity");
    out.status = EquilibriumStatus::no_demand;
    out.residual = ap0(fee, rest) + params.r;
    return out;
  }
  params.validate();
  require_fee_in_range(fee, params, "solve_ff_liquidity");
  if (fee == 0.0) {
    out.status = EquilibriumStatus::zero_fee_boundary;
    out.residual = ap0(0.0, params) + params.r;
    return out;
  }

  auto g = [&](double L) { return ff_excess_return(fee, L, params, solver.price); };
  const auto bracket = expand_decreasing_bracket(g, {solver.bracket_lo, solver.bracket_hi},
                                                 solver.bracket_factor, solver.max_expansions);
  if (!bracket) {
    out.status = EquilibriumStatus::bracket_failure;
    return out;
  }
  const RootResult root = bisect_log(g, *bracket, solver.rel_tol, solver.max_iter);
  out.liquidity = root.root;
  out.residual = std::abs(root.residual);
  out.iterations = root.iterations;
  out.bracket_lo = bracket->lo;
  out.bracket_hi = bracket->hi;
  out.monotone = sampled_decreasing(g, bracket->lo, bracket->hi, 64);
  return out;
}

FeeChoice manager_fee_choice(double liquidity, const MarketParams& params, const SolverConfig& solver) {
  params.validate();
  auto phi = [&](double f) {
    return f * noise_volume_per_value(f, liquidity, params, solver.price) - ae0(f, params);
  };
  const ArgMax best = grid_golden_max(phi, 0.0, params.f_max, solver.fee_grid);
  return {best.x, best.value};
}

ManagerPnl mgr_pnl_am(double rent, double liquidity, const MarketParams& params, const SolverConfig& solver) {
  if (!(liquidity > 0.0)) throw std::domain_error("mgr_pnl_am: liquidity must be positive");
  const FeeChoice choice = manager_fee_choice(liquidity, params, solver);
  const double value = pool_value(liquidity, solver.price);
  return {(choice.value + ap0(0.0, params)) * value - rent, choice.fee};
}

double lp_pnl_am(double rent, double liquidity, const MarketParams& params, double price) {
  if (!(liquidity > 0.0)) throw std::domain_error("lp_pnl_am: liquidity must be positive");
  return rent - (ap0(0.0, params) + params.r) * pool_value(liquidity, price);
}

double revenue_optimal_fee(double liquidity, const MarketParams& params, const SolverConfig& solver) {
  if (!(liquidity > 0.0)) throw std::domain_error("revenue_optimal_fee: liquidity must be positive");
  params.validate();
  auto revenue = [&](double f) { return f * noise_volume_per_value(f, liquidity, params, solver.price); };
  return grid_golden_max(revenue, 0.0, params.f_max, solver.fee_grid).x;
}

double revenue_optimal_fee_closed_form(const MarketParams& params) {
  return std::min(1.0 / params.c1, params.f_max);
}

FFMaximum max_ff_liquidity(const MarketParams& params, const SolverConfig& solver) {
  auto liquidity_at = [&](double f) {
    const FFEquilibrium eq = solve_ff_liquidity(f, params, solver);
    return eq.status == EquilibriumStatus::interior ? eq.liquidity : 0.0;
  };
  const ArgMax best = grid_golden_max(liquidity_at, 0.0, params.f_max, solver.fee_grid);
  return {best.x, best.value};
}

AMEquilibrium solve_am_equilibrium(const MarketParams& params, const SolverConfig& solver) {
  params.validate();
  AMEquilibrium out;
  auto g = [&](double L) { return manager_fee_choice(L, params, solver).value - params.r; };
  const auto bracket = expand_decreasing_bracket(g, {solver.bracket_lo, solver.bracket_hi},
                                                 solver.bracket_factor, solver.max_expansions);
  if (!bracket) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "am equilibrium: G_am did not change sign; G(lo=%g)=%g, G(hi=%g)=%g after expansion",
                  solver.bracket_lo, g(solver.bracket_lo), solver.bracket_hi, g(solver.bracket_hi));
    out.diagnostics = buf;
    return out;
  }
  const RootResult root = bisect_log(g, *bracket, solver.rel_tol, solver.max_iter);
  out.L_star = root.root;
  out.residual = std::abs(root.residual);
  out.converged = true;

  const double adverse = ap0(0.0, params) + params.r;
  out.R_star = adverse * pool_value(out.L_star, solver.price);
  out.f_star = manager_fee_choice(out.L_star, params, solver).fee;
  out.f_opt = revenue_optimal_fee(out.L_star, params, solver);

  const FFMaximum ff = max_ff_liquidity(params, solver);
  out.L_max = ff.liquidity;
  out.f_ff = ff.fee;
  out.R_max = adverse * pool_value(out.L_max, solver.price);
  return out;
}

DominanceReport dominance_report(const MarketParams& params, std::size_t n_grid, const SolverConfig& solver) {
  if (n_grid < 16) throw std::invalid_argument("dominance_report: n_grid must be at least 16");
  DominanceReport report;
  report.am = solve_am_equilibrium(params, solver);
  if (!report.am.converged) return report;

  const AMEquilibrium& am = report.am;
  bool all_ok = true;
  for (std::size_t i = 0; i < n_grid; ++i) {
    DominanceRow row;
    row.fee = params.f_max * static_cast<double>(i) / static_cast<double>(n_grid - 1);
    const FFEquilibrium ff = solve_ff_liquidity(row.fee, params, solver);
    row.status = ff.status;
    row.L_ff = ff.liquidity;
    row.dominated = am.L_star > row.L_ff;
    if (ff.status == EquilibriumStatus::interior) {
      row.margin = (ap0(row.fee, params) - ae0(row.fee, params)) * pool_value(row.L_ff, solver.price);
      all_ok = all_ok && row.margin > 0.0;
    } else if (ff.status == EquilibriumStatus::bracket_failure) {
      all_ok = false;
    }
    all_ok = all_ok && row.dominated;
    report.rows.push_back(row);
  }

  report.headline_margin = (ap0(am.f_ff, params) - ae0(am.f_ff, params)) * pool_value(am.L_max, solver.price);
  report.f_ff_positive = am.f_ff > 0.0;
  report.lp_residual = std::abs(lp_pnl_am(am.R_star, am.L_star, params, solver.price)) / am.R_star;
  report.mgr_residual = std::abs(mgr_pnl_am(am.R_star, am.L_star, params, solver).rate) / am.R_star;
  report.holds = all_ok && report.f_ff_positive && report.headline_margin > 0.0 && am.L_star > am.L_max;
  return report;
}

std::string dominance_csv(const DominanceReport& report) {
  std::string out = "f,L_ff,L_star,R_star,f_star,f_opt,margin\n";
  char buf[512];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.fee, row.L_ff,
                  report.am.L_star, report.am.R_star, report.am.f_star, report.am.f_opt, row.margin);
    out += buf;
  }
  return out;
}

}  // namespace amamm

// Competitive equilibria of the fixed-fee pool and the auction-managed pool,
// and the liquidity-dominance comparison between them.
//
// All P&L values are rates per day in numéraire at reference price P (default
// 1); the price only enters through V(L) = 2 sqrt(P) L.
#pragma once

#include <string>
#include <vector>

#include "amamm/market_model.hpp"

namespace amamm {

struct SolverConfig {
  double rel_tol = 1e-10;
  int max_iter = 200;
  std::size_t fee_grid = 2048;
  double bracket_factor = 10.0;
  int max_expansions = 400;
  // Initial liquidity bracket before expansion.
  double bracket_lo = 1.0;
  double bracket_hi = 10.0;
  double price = 1.0;
};

/// Pi_LP_ff(f, L) = f H(f, L) - AP0(f) V(L) - r V(L).
double lp_pnl_ff(double fee, double liquidity, const MarketParams& params, double price = 1.0);

/// G(L) = f H0(f, L) - AP0(f) - r, the per-value LP profit in a fixed-fee pool.
double ff_excess_return(double fee, double liquidity, const MarketParams& params, double price = 1.0);

enum class EquilibriumStatus {
  interior,           // positive root found
  zero_fee_boundary,  // f = 0: no fee revenue, G < 0 for all L, L_ff = 0
  no_demand,          // c0 = 0: G < 0 for all L, L_ff = 0
  bracket_failure,    // G never changed sign within the expansion budget
};

std::string to_string(EquilibriumStatus status);

struct FFEquilibrium {
  double fee = 0.0;
  double liquidity = 0.0;
  double residual = 0.0;  // |G(L_ff)|
  EquilibriumStatus status = EquilibriumStatus::interior;
  int iterations = 0;
  // G sampled strictly decreasing across the bracket (uniqueness check).
  bool monotone = false;
  // Bracket [lo, hi] used for the final bisection (interior solutions only).
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

FFEquilibrium solve_ff_liquidity(double fee, const MarketParams& params, const SolverConfig& solver = {});

struct FeeChoice {
  double fee = 0.0;
  double value = 0.0;
};

// argmax over [0, f_max] of f H0(f, L) - AE0(f), with its value.
FeeChoice manager_fee_choice(double liquidity, const MarketParams& params, const SolverConfig& solver = {});

struct ManagerPnl {
  double rate = 0.0;
  double fee = 0.0;
};

/// Pi_MGR_am(R, L) = max_f {f H0 + AP0(0) - AE0(f)} V(L) - R, and the maximizing fee.
ManagerPnl mgr_pnl_am(double rent, double liquidity, const MarketParams& params,
                      const SolverConfig& solver = {});

/// Pi_LP_am(R, L) = R - (AP0(0) + r) V(L).
double lp_pnl_am(double rent, double liquidity, const MarketParams& params, double price = 1.0);

/// argmax over [0, f_max] of f H0(f, L), the pure noise-revenue optimum.
double revenue_optimal_fee(double liquidity, const MarketParams& params, const SolverConfig& solver = {});

// For H = c0 L^alpha e^{-c1 f} the revenue optimum is min(1/c1, f_max).
double revenue_optimal_fee_closed_form(const MarketParams& params);

struct FFMaximum {
  double fee = 0.0;        // fee maximizing L_ff
  double liquidity = 0.0;  // L_max
};

// max over [0, f_max] of L_ff(f).
FFMaximum max_ff_liquidity(const MarketParams& params, const SolverConfig& solver = {});

struct AMEquilibrium {
  double L_star = 0.0;
  double R_star = 0.0;
  double f_star = 0.0;
  double f_opt = 0.0;
  double L_max = 0.0;
  double R_max = 0.0;
  double f_ff = 0.0;  // fixed fee attaining L_max
  double residual = 0.0;
  bool converged = false;
  std::string diagnostics;
};

AMEquilibrium solve_am_equilibrium(const MarketParams& params, const SolverConfig& solver = {});

struct DominanceRow {
  double fee = 0.0;
  double L_ff = 0.0;
  EquilibriumStatus status = EquilibriumStatus::interior;
  // (AP0(f) - AE0(f)) V(L_ff(f)): lower bound on the manager's profit when
  // paying the rent that sustains L_ff(f).
  double margin = 0.0;
  bool dominated = false;  // L* > L_ff(f)
};

struct DominanceReport {
  AMEquilibrium am;
  std::vector<DominanceRow> rows;
  // (AP0(f_ff) - AE0(f_ff)) V(L_max) at the ff-optimal fee.
  double headline_margin = 0.0;
  // Zero-profit residuals of the am equilibrium.
  double lp_residual = 0.0;
  double mgr_residual = 0.0;
  bool f_ff_positive = false;
  bool holds = false;
};

// Tabulates L_ff on an n_grid-point fee grid over [0, f_max] against L*.
// f = 0 is a boundary equilibrium and does not enter the dominance verdict.
DominanceReport dominance_report(const MarketParams& params, std::size_t n_grid,
                                 const SolverConfig& solver = {});

// CSV with header f,L_ff,L_star,R_star,f_star,f_opt,margin.
std::string dominance_csv(const DominanceReport& report);

}  // namespace amamm

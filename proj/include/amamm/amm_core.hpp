// Constant-product pool mechanics.
//
// Prices are numéraire (y) per unit of risky asset (x). A pool holding
// reserves (x, y) has liquidity L = sqrt(x*y) and spot price y/x. Swap fees
// are paid to an external recipient (the pool manager), so L never changes
// under trading.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace amamm {

class AmmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Holdings {
  double x = 0.0;
  double y = 0.0;
};

struct PoolState {
  double reserve_x = 0.0;
  double reserve_y = 0.0;
  double liquidity = 0.0;
  double swap_fee = 0.0;
  double fee_cap = 0.0;
  double withdrawal_fee = 0.0;

  double spot_price() const { return reserve_y / reserve_x; }

  // Throws AmmError if any structural invariant is broken.
  void check_invariants() const;
};

// Pool positioned at `price` with liquidity L.
PoolState make_pool(double liquidity, double price, double swap_fee, double fee_cap,
                    double withdrawal_fee = 0.0);

/// V(L) = 2 sqrt(P) L, the value of the reserves at price P.
double pool_value(double liquidity, double price);

/// Reserves of a pool with liquidity L whose implied price is P.
Holdings pool_holdings(double liquidity, double price);

enum class Side { buy_x, sell_x };

struct TradeResult {
  double amount_in = 0.0;   // gross, input-asset units
  double amount_out = 0.0;  // output-asset units
  double fee_paid = 0.0;    // numéraire
  PoolState new_pool;
};

// Exact-input swap with a linear proportional fee taken from the input. For
// sell_x the fee is valued at the pre-trade spot price.
TradeResult swap_exact_in(const PoolState& pool, Side side, double amount_in, double fee);

// Trade that moves the pool's implied price to a target, with the fee charged
// in log space: purchases of x pay (e^fee - 1) on the numéraire input, sales of
// x forgo (1 - e^-fee) of the numéraire proceeds.
TradeResult trade_to_price(const PoolState& pool, double target_price, double fee);

struct ArbTrade {
  TradeResult trade;
  double profit = 0.0;  // arbitrageur profit at the true price, numéraire
  double mispricing = 0.0;
};

/// Log mispricing z = ln(P / spot).
double log_mispricing(const PoolState& pool, double true_price);

// Fee-paying arbitrage: trades until the mispricing equals the fee. Returns
// nullopt when |z| <= fee.
std::optional<ArbTrade> arb_trade_to_band(const PoolState& pool, double true_price, double fee);

struct ArbExcess {
  double plus = 0.0;   // A+: z > f, arbitrageur buys x
  double minus = 0.0;  // A-: z < -f, arbitrageur sells x
  double total() const { return plus + minus; }
};

// A+(P, z) + A-(P, z) in simplified exponential form.
ArbExcess arb_excess_instant(double liquidity, double price, double z, double fee);

// Same quantity evaluated from reserve differences; kept for cross-checking.
ArbExcess arb_excess_from_reserves(double liquidity, double price, double z, double fee);

/// Withdrawal fee 1 - 2 sqrt(rho)/(1 + rho) that makes a strategic exit ahead
/// of a gross price move rho unprofitable. rho < 1 is folded to 1/rho.
double withdrawal_fee_required(double price_ratio);

struct WithdrawalValues {
  double v_now = 0.0;
  double v_after = 0.0;
};

// Value of L units of liquidity when the true price is rho * p_amm, before and
// after the manager arbitrages the pool to the true price.
WithdrawalValues strategic_withdrawal_values(double liquidity, double p_amm, double price_ratio);

}  // namespace amamm

#include "amamm/amm_core.hpp"

#include <cmath>
#include <stdexcept>

namespace amamm {
namespace {

void require_price(double price, const char* what) {
  if (!(price > 0.0) || !std::isfinite(price)) {
    throw std::domain_error(std::string(what) + ": price must be positive and finite");
  }
}

void require_liquidity(double liquidity, const char* what) {
  if (!(liquidity >= 0.0) || !std::isfinite(liquidity)) {
    throw std::domain_error(std::string(what) + ": liquidity must be non-negative");
  }
}

PoolState with_reserves(const PoolState& pool, const Holdings& h) {
  PoolState out = pool;
  out.reserve_x = h.x;
  out.reserve_y = h.y;
  return out;
}

// e^{u/2} - 2 + e^{-u/2}, without cancellation for small u.
double cosh_gap(double u) {
  const double s = std::sinh(u / 4.0);
  return 4.0 * s * s;
}

}  // namespace

void PoolState::check_invariants() const {
  if (!(reserve_x > 0.0) || !(reserve_y > 0.0)) {
    throw AmmError("pool reserves must be positive");
  }
  if (std::abs(liquidity - std::sqrt(reserve_x * reserve_y)) > 1e-12 * liquidity) {
    throw AmmError("pool liquidity does not match sqrt(x*y)");
  }
  if (swap_fee < 0.0 || swap_fee > fee_cap) {
    throw AmmError("swap fee outside [0, fee_cap]");
  }
}

PoolState make_pool(double liquidity, double price, double swap_fee, double fee_cap,
                    double withdrawal_fee) {
  require_price(price, "make_pool");
  if (!(liquidity > 0.0)) throw std::domain_error("make_pool: liquidity must be positive");
  const Holdings h = pool_holdings(liquidity, price);
  PoolState pool{h.x, h.y, liquidity, swap_fee, fee_cap, withdrawal_fee};
  pool.check_invariants();
  return pool;
}

double pool_value(double liquidity, double price) {
  require_price(price, "pool_value");
  require_liquidity(liquidity, "pool_value");
  return 2.0 * std::sqrt(price) * liquidity;
}

Holdings pool_holdings(double liquidity, double price) {
  require_price(price, "pool_holdings");
  require_liquidity(liquidity, "pool_holdings");
  const double root = std::sqrt(price);
  return {liquidity / root, liquidity * root};
}

TradeResult swap_exact_in(const PoolState& pool, Side side, double amount_in, double fee) {
  if (!(amount_in > 0.0) || !std::isfinite(amount_in)) {
    throw AmmError("swap_exact_in: amount_in must be positive and finite");
  }
  if (fee < 0.0 || fee > pool.fee_cap) {
    throw AmmError("swap_exact_in: fee outside [0, fee_cap]");
  }
  const double k = pool.liquidity * pool.liquidity;
  const double net = amount_in * (1.0 - fee);

  TradeResult result;
  result.amount_in = amount_in;
  if (side == Side::buy_x) {
    const double new_y = pool.reserve_y + net;
    const double new_x = k / new_y;
    if (!(new_x > 0.0) || !std::isfinite(new_y)) {
      throw AmmError("swap_exact_in: trade would exhaust the x reserve");
    }
    result.amount_out = pool.reserve_x - new_x;
    result.fee_paid = fee * amount_in;
    result.new_pool = with_reserves(pool, {new_x, new_y});
  } else {
    const double new_x = pool.reserve_x + net;
    const double new_y = k / new_x;
    if (!(new_y > 0.0) || !std::isfinite(new_x)) {
      throw AmmError("swap_exact_in: trade would exhaust the y reserve");
    }
    result.amount_out = pool.reserve_y - new_y;
    result.fee_paid = fee * amount_in * pool.spot_price();
    result.new_pool = with_reserves(pool, {new_x, new_y});
  }
  return result;
}

TradeResult trade_to_price(const PoolState& pool, double target_price, double fee) {
  require_price(target_price, "trade_to_price");
  if (fee < 0.0) throw AmmError("trade_to_price: negative fee");
  const Holdings target = pool_holdings(pool.liquidity, target_price);

  TradeResult result;
  result.new_pool = with_reserves(pool, target);
  if (target.y >= pool.reserve_y) {
    // Buy x with numéraire.
    const double net_in = target.y - pool.reserve_y;
    result.amount_in = net_in * std::exp(fee);
    result.fee_paid = net_in * std::expm1(fee);
    result.amount_out = pool.reserve_x - target.x;
  } else {
    // Sell x for numéraire.
    const double gross_out = pool.reserve_y - target.y;
    result.amount_in = target.x - pool.reserve_x;
    result.amount_out = gross_out * std::exp(-fee);
    result.fee_paid = -gross_out * std::expm1(-fee);
  }
  return result;
}

double log_mispricing(const PoolState& pool, double true_price) {
  require_price(true_price, "log_mispricing");
  return std::log(true_price / pool.spot_price());
}

std::optional<ArbTrade> arb_trade_to_band(const PoolState& pool, double true_price, double fee) {
  const double z = log_mispricing(pool, true_price);
  if (std::abs(z) <= fee) return std::nullopt;

  ArbTrade arb;
  arb.mispricing = z;
  if (z > fee) {
    arb.trade = trade_to_price(pool, true_price * std::exp(-fee), fee);
    arb.profit = true_price * arb.trade.amount_out - arb.trade.amount_in;
  } else {
    arb.trade = trade_to_price(pool, true_price * std::exp(fee), fee);
    arb.profit = arb.trade.amount_out - true_price * arb.trade.amount_in;
  }
  return arb;
}

ArbExcess arb_excess_instant(double liquidity, double price, double z, double fee) {
  const double value = pool_value(liquidity, price);
  ArbExcess out;
  if (z > fee) {
    out.plus = 0.5 * value * std::exp(fee / 2.0) * cosh_gap(z - fee);
  } else if (z < -fee) {
    out.minus = 0.5 * value * std::exp(-fee / 2.0) * cosh_gap(z + fee);
  }
  return out;
}

ArbExcess arb_excess_from_reserves(double liquidity, double price, double z, double fee) {
  require_price(price, "arb_excess_from_reserves");
  const Holdings now = pool_holdings(liquidity, price * std::exp(-z));
  ArbExcess out;
  if (z > fee) {
    const Holdings edge = pool_holdings(liquidity, price * std::exp(-fee));
    out.plus = price * (now.x - edge.x) + std::exp(fee) * (now.y - edge.y);
  } else if (z < -fee) {
    const Holdings edge = pool_holdings(liquidity, price * std::exp(fee));
    out.minus = price * (now.x - edge.x) + std::exp(-fee) * (now.y - edge.y);
  }
  return out;
}

double withdrawal_fee_required(double price_ratio) {
  if (!(price_ratio > 0.0) || !std::isfinite(price_ratio)) {
    throw std::domain_error("withdrawal_fee_required: price ratio must be positive");
  }
  const double rho = price_ratio < 1.0 ? 1.0 / price_ratio : price_ratio;
  // 1 - 2 sqrt(rho)/(1 + rho) == (sqrt(rho) - 1)^2 / (1 + rho)
  const double gap = std::sqrt(rho) - 1.0;
  return gap * gap / (1.0 + rho);
}

WithdrawalValues strategic_withdrawal_values(double liquidity, double p_amm, double price_ratio) {
  require_price(p_amm, "strategic_withdrawal_values");
  if (!(price_ratio > 0.0)) {
    throw std::domain_error("strategic_withdrawal_values: price ratio must be positive");
  }
  const double root = std::sqrt(p_amm);
  return {(1.0 + price_ratio) * root * liquidity, 2.0 * std::sqrt(price_ratio * p_amm) * liquidity};
}

}  // namespace amamm

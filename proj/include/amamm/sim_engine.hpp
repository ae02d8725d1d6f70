// Block-level simulation of an auction-managed constant-product pool.
//
// Each block: the auction advances (fixing the manager, fee and rent), the
// fundamental price takes a GBM step over an exponential interblock time, an
// outside arbitrageur trades to the fee band if the mispricing exceeds the fee,
// the manager corrects the rest at zero fee, and noise traders pay
// f * H(f, L) * tau in fees. LP P&L is measured hedged, so an LP's loss in a
// block is the value its reserves give up to arbitrageurs at the block price.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "amamm/auction.hpp"
#include "amamm/market_model.hpp"

namespace amamm {

enum class ManagerPolicy { fixed, optimal };
enum class LpPolicy { static_supply, zero_profit };

struct InitialBid {
  std::string bidder;
  Amount rent = 0;
  Amount deposit = 0;
};

struct SimConfig {
  int schema_version = 1;
  std::uint64_t horizon_blocks = 10'000;
  std::uint64_t seed = 1;
  MarketParams market;
  AuctionParams auction;
  ManagerPolicy manager_policy = ManagerPolicy::fixed;
  double manager_fee = 0.003;
  LpPolicy lp_policy = LpPolicy::static_supply;
  double initial_liquidity = 1.0;
  double initial_price = 1.0;
  Amount initial_shares = 1'000'000'000;
  std::vector<InitialBid> initial_bids;
  bool record_blocks = false;

  void validate() const;  // throws std::invalid_argument
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON config schema (schema_version 1); unknown keys are rejected.
MarketParams market_params_from_json(const nlohmann::json& j);
AuctionParams auction_params_from_json(const nlohmann::json& j, const MarketParams& market);
SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& config);

struct BlockRecord {
  std::uint64_t block = 0;
  double tau = 0.0;
  double z = 0.0;  // pre-trade log mispricing
  double fee = 0.0;
  double arb_profit = 0.0;  // total value lost by LPs to arbitrage, numéraire
  double excess = 0.0;      // part captured by outside arbitrageurs
  double noise_fees = 0.0;
  double rent = 0.0;
};

struct SimReport {
  std::uint64_t blocks = 0;
  std::uint64_t managed_blocks = 0;
  std::uint64_t no_trade_blocks = 0;  // managed blocks with |z| <= f

  // Rates per unit pool value per day over managed blocks. ap0_hat measures
  // the full adverse selection (AP0 at zero fee, since the manager resets the
  // mispricing each block); ae0_hat the part leaked to outside arbitrageurs.
  double ap0_hat = 0.0;
  double ap0_se = 0.0;
  double ae0_hat = 0.0;
  double ae0_se = 0.0;
  double ap0_expected = 0.0;  // AP0(0)
  double ae0_expected = 0.0;  // mean of AE0(f) over managed blocks

  double manager_fee_revenue = 0.0;
  double manager_arb_profit = 0.0;
  double manager_rent_paid = 0.0;
  double manager_withdrawal_fees = 0.0;

  double lp_rent_received = 0.0;
  double lp_adverse_selection = 0.0;
  double lp_capital_charge = 0.0;
  double lp_fee_income = 0.0;  // unmanaged blocks only
  double lp_withdrawal_fees_paid = 0.0;

  double external_arb_profit = 0.0;
  double noise_volume = 0.0;
  double noise_fees_paid = 0.0;

  std::uint64_t usurps = 0;
  std::uint64_t depletions = 0;
  std::uint64_t activations = 0;

  // Per-block value identity: LP change (fees less adverse selection) +
  // manager arb and fee income + external arb profit - noise fees paid must
  // vanish. Drift is the signed running sum.
  double max_block_residual = 0.0;
  double residual_drift = 0.0;
  double max_post_block_z = 0.0;  // managed blocks

  double final_price = 0.0;
  double final_liquidity = 0.0;

  std::vector<BlockRecord> records;

  double manager_pnl() const;
  double lp_pnl() const;
};

nlohmann::json to_json(const SimReport& report);
std::string block_records_csv(const SimReport& report);

SimReport run_sim(const SimConfig& config);

struct WithdrawalAttackRow {
  double price_ratio = 1.0;
  double v_now = 0.0;
  double v_after = 0.0;
  double gross_gain = 0.0;  // v_now - v_after
  double net_gain = 0.0;    // v_now (1 - w) - v_after
};

struct WithdrawalAttackReport {
  double withdrawal_fee = 0.0;
  double required_fee = 0.0;  // withdrawal_fee_required(1 + f_max)
  std::vector<WithdrawalAttackRow> rows;
  double max_net_gain = 0.0;
  // Largest net gain over simulated block moves with ratio within the cap.
  double max_simulated_gain = 0.0;
  std::uint64_t simulated_moves = 0;
  bool protected_within_cap = false;
};

// An LP with one unit of liquidity sees the true price jump by a ratio rho and
// may exit (paying the withdrawal fee) before the manager's zero-fee arbitrage.
// Evaluates a grid of ratios in [1/(1+f_max), 1+f_max] plus the per-block
// moves of a simulated price path.
WithdrawalAttackReport run_strategic_withdrawal_attack(const SimConfig& config, std::size_t n_grid = 201);

std::string withdrawal_attack_csv(const WithdrawalAttackReport& report);

class ReplayError : public std::runtime_error {
 public:
  ReplayError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ReplayResult {
  std::string trace_csv;
  AuctionState final_state;
};

// Replays a line-delimited JSON auction scenario. Rejected actions appear in
// the trace with their status code; malformed lines throw ReplayError.
ReplayResult replay_auction(std::istream& scenario);
ReplayResult replay_auction_file(const std::string& path);

}  // namespace amamm

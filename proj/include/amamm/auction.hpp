// Harberger-lease auction for the pool manager role.
//
// Bids quote a rent R per block and post a deposit D (a multiple of R, at
// least R*K). A bid activates K blocks after submission and, on activation,
// usurps the current manager. The manager pays R per block out of its deposit
// to LP share holders through a rent-per-share accumulator, and may set the
// swap fee for the next block up to the fee cap.
//
// All rent, deposit and share amounts are integers in pool-share units, so the
// ledger identities hold exactly.
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace amamm {

using Amount = std::int64_t;
using BlockHeight = std::int64_t;
__extension__ using Accumulator = unsigned __int128;

struct AuctionParams {
  BlockHeight K = 5;
  double min_increment_factor = 1.10;
  double fee_cap = 0.05;
  double default_fee = 0.05;
  double withdrawal_fee = 0.0;
};

struct Bid {
  std::string bidder;
  Amount rent = 0;
  Amount deposit = 0;
  BlockHeight submitted_at = 0;
  BlockHeight active_from = 0;
};

enum class AuctionStatus {
  accepted,
  invalid_amount,
  deposit_not_multiple,
  deposit_too_small,
  increment_too_small,
  bidder_has_live_bid,
  not_bid_owner,
  would_violate_coverage,
  not_manager,
  fee_above_cap,
  fee_negative,
  unknown_lp,
  insufficient_shares,
};

std::string_view to_string(AuctionStatus status);

enum class AuctionEventKind {
  bid_submitted,
  bid_activated,
  usurped,
  refund,
  rent_paid,
  depleted,
  fee_set,
  fee_effective,
  deposit_reduced,
  deposit_topped_up,
  liquidity_added,
  liquidity_removed,
  withdrawal_fee,
  rent_claimed,
};

std::string_view to_string(AuctionEventKind kind);

struct AuctionEvent {
  BlockHeight block = 0;
  AuctionEventKind kind = AuctionEventKind::bid_submitted;
  std::string actor;
  std::string counterparty;
  Amount amount = 0;
  double fee = 0.0;
};

struct AuctionOutcome {
  AuctionStatus status = AuctionStatus::accepted;
  std::vector<AuctionEvent> events;
  Amount amount = 0;  // claim_rent / remove_liquidity payout

  bool ok() const { return status == AuctionStatus::accepted; }
};

struct RentLedger {
  Amount deposits_posted = 0;
  Amount rent_distributed = 0;
  Amount refunds = 0;
  Amount orphan_rent = 0;  // rent charged while no LP shares existed
  Amount rent_claimed = 0;
  std::map<std::string, Amount> bidder_credits;  // refunds owed to bidders
};

struct LpPosition {
  Amount shares = 0;
  Accumulator snapshot = 0;
  Accumulator owed_scaled = 0;
};

class AuctionState {
 public:
  static constexpr Accumulator kAccumulatorScale = 1'000'000'000'000'000'000ull;  // 1e18

  explicit AuctionState(AuctionParams params = {});

  AuctionOutcome submit_bid(const std::string& bidder, Amount rent, Amount deposit);
  AuctionOutcome reduce_deposit(const std::string& bidder, Amount amount);
  AuctionOutcome top_up(const std::string& bidder, Amount amount);
  AuctionOutcome set_fee(const std::string& bidder, double fee);

  // Moves to the next block: activates due bids (each usurps the manager),
  // fixes the block's fee, charges rent and retires a depleted manager.
  std::vector<AuctionEvent> advance_block();

  AuctionOutcome add_liquidity(const std::string& lp, Amount shares);
  // Burns `shares` from the LP; the withdrawal fee portion is transferred to
  // the manager's LP position, or burned for the remaining LPs when there is
  // no manager. `amount` of the outcome is the net shares withdrawn.
  AuctionOutcome remove_liquidity(const std::string& lp, Amount shares);
  AuctionOutcome claim_rent(const std::string& lp);

  BlockHeight current_block() const { return block_; }
  const AuctionParams& params() const { return params_; }
  const std::optional<Bid>& top_bid() const { return top_; }
  // Highest pending bid, if any.
  const Bid* next_bid() const { return pending_.empty() ? nullptr : &pending_.back(); }
  const std::deque<Bid>& pending_bids() const { return pending_; }
  std::optional<std::string> manager() const;
  // Bidder that paid rent for the current block.
  const std::optional<std::string>& block_manager() const { return block_manager_; }
  double effective_fee() const { return effective_fee_; }
  double manager_fee_next_block() const { return next_fee_; }
  Amount total_shares() const { return total_shares_; }
  Amount shares_of(const std::string& lp) const;
  Amount claimable(const std::string& lp) const;
  Accumulator rent_per_share() const { return accumulator_; }
  const RentLedger& ledger() const { return ledger_; }
  Amount remaining_deposits() const;

  // Canonical JSON serialization; equal states serialize to equal bytes.
  std::string serialize() const;

  // Ledger conservation, deposit multiples, coverage and fee-cap checks.
  // Empty when every invariant holds.
  std::vector<std::string> invariant_violations() const;

 private:
  AuctionEvent event(AuctionEventKind kind, std::string actor, std::string counterparty = {},
                     Amount amount = 0, double fee = 0.0) const;
  bool owns_live_bid(const std::string& bidder) const;
  Bid* find_bid(const std::string& bidder);
  void settle(LpPosition& pos) const;
  void distribute(Amount amount);
  void credit(const std::string& bidder, Amount amount);

  AuctionParams params_;
  std::int64_t increment_bps_;
  BlockHeight block_ = 0;
  std::optional<Bid> top_;
  std::deque<Bid> pending_;
  std::optional<std::string> block_manager_;
  double effective_fee_;
  double next_fee_;
  Accumulator accumulator_ = 0;
  Amount total_shares_ = 0;
  std::map<std::string, LpPosition> lps_;
  RentLedger ledger_;
};

}  // namespace amamm

#include "amamm/auction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace amamm {
namespace {

__extension__ using Wide = __int128;

std::string u128_to_string(Accumulator v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

nlohmann::json bid_json(const Bid& b) {
  return {{"bidder", b.bidder},
          {"rent", b.rent},
          {"deposit", b.deposit},
          {"submitted_at", b.submitted_at},
          {"active_from", b.active_from}};
}

}  // namespace

std::string_view to_string(AuctionStatus status) {
  switch (status) {
    case AuctionStatus::accepted: return "accepted";
    case AuctionStatus::invalid_amount: return "invalid_amount";
    case AuctionStatus::deposit_not_multiple: return "deposit_not_multiple";
    case AuctionStatus::deposit_too_small: return "deposit_too_small";
    case AuctionStatus::increment_too_small: return "increment_too_small";
    case AuctionStatus::bidder_has_live_bid: return "bidder_has_live_bid";
    case AuctionStatus::not_bid_owner: return "not_bid_owner";
    case AuctionStatus::would_violate_coverage: return "would_violate_coverage";
    case AuctionStatus::not_manager: return "not_manager";
    case AuctionStatus::fee_above_cap: return "fee_above_cap";
    case AuctionStatus::fee_negative: return "fee_negative";
    case AuctionStatus::unknown_lp: return "unknown_lp";
    case AuctionStatus::insufficient_shares: return "insufficient_shares";
  }
  return "unknown";
}

std::string_view to_string(AuctionEventKind kind) {
  switch (kind) {
    case AuctionEventKind::bid_submitted: return "bid_submitted";
    case AuctionEventKind::bid_activated: return "bid_activated";
    case AuctionEventKind::usurped: return "usurped";
    case AuctionEventKind::refund: return "refund";
    case AuctionEventKind::rent_paid: return "rent_paid";
    case AuctionEventKind::depleted: return "depleted";
    case AuctionEventKind::fee_set: return "fee_set";
    case AuctionEventKind::fee_effective: return "fee_effective";
    case AuctionEventKind::deposit_reduced: return "deposit_reduced";
    case AuctionEventKind::deposit_topped_up: return "deposit_topped_up";
    case AuctionEventKind::liquidity_added: return "liquidity_added";
    case AuctionEventKind::liquidity_removed: return "liquidity_removed";
    case AuctionEventKind::withdrawal_fee: return "withdrawal_fee";
    case AuctionEventKind::rent_claimed: return "rent_claimed";
  }
  return "unknown";
}

AuctionState::AuctionState(AuctionParams params)
    : params_(params),
      increment_bps_(std::llround(params.min_increment_factor * 10000.0)),
      effective_fee_(params.default_fee),
      next_fee_(params.default_fee) {
  if (params_.K < 1) throw std::invalid_argument("AuctionParams: K must be at least 1");
  if (increment_bps_ < 10000) throw std::invalid_argument("AuctionParams: increment factor below 1");
  if (!(params_.fee_cap >= 0.0) || !(params_.default_fee >= 0.0) || params_.default_fee > params_.fee_cap) {
    throw std::invalid_argument("AuctionParams: default fee must lie in [0, fee_cap]");
  }
  if (!(params_.withdrawal_fee >= 0.0 && params_.withdrawal_fee < 1.0)) {
    throw std::invalid_argument("AuctionParams: withdrawal fee must lie in [0, 1)");
  }
}

AuctionEvent AuctionState::event(AuctionEventKind kind, std::string actor, std::string counterparty,
                                 Amount amount, double fee) const {
  return {block_, kind, std::move(actor), std::move(counterparty), amount, fee};
}

bool AuctionState::owns_live_bid(const std::string& bidder) const {
  if (top_ && top_->bidder == bidder) return true;
  return std::any_of(pending_.begin(), pending_.end(), [&](const Bid& b) { return b.bidder == bidder; });
}

Bid* AuctionState::find_bid(const std::string& bidder) {
  if (top_ && top_->bidder == bidder) return &*top_;
  for (auto& b : pending_) {
    if (b.bidder == bidder) return &b;
  }
  return nullptr;
}

std::optional<std::string> AuctionState::manager() const {
  if (top_) return top_->bidder;
  return std::nullopt;
}

void AuctionState::credit(const std::string& bidder, Amount amount) {
  if (amount == 0) return;
  ledger_.bidder_credits[bidder] += amount;
  ledger_.refunds += amount;
}

AuctionOutcome AuctionState::submit_bid(const std::string& bidder, Amount rent, Amount deposit) {
  AuctionOutcome out;
  if (rent <= 0 || deposit <= 0) {
    out.status = AuctionStatus::invalid_amount;
  } else if (deposit % rent != 0) {
    out.status = AuctionStatus::deposit_not_multiple;
  } else if (deposit / rent < params_.K) {
    out.status = AuctionStatus::deposit_too_small;
  } else if (owns_live_bid(bidder)) {
    out.status = AuctionStatus::bidder_has_live_bid;
  } else {
    // Must beat the manager and every pending bid by the increment; equal
    // rent never displaces an earlier bid.
    auto beats = [&](Amount incumbent) {
      return rent > incumbent && static_cast<Wide>(rent) * 10000 >= static_cast<Wide>(incumbent) * increment_bps_;
    };
    if ((top_ && !beats(top_->rent)) || (!pending_.empty() && !beats(pending_.back().rent))) {
      out.status = AuctionStatus::increment_too_small;
    }
  }
  if (!out.ok()) return out;

  pending_.push_back({bidder, rent, deposit, block_, block_ + params_.K});
  ledger_.deposits_posted += deposit;
  out.events.push_back(event(AuctionEventKind::bid_submitted, bidder, {}, deposit));
  return out;
}

AuctionOutcome AuctionState::reduce_deposit(const std::string& bidder, Amount amount) {
  AuctionOutcome out;
  Bid* bid = find_bid(bidder);
  if (!bid) {
    out.status = AuctionStatus::not_bid_owner;
    return out;
  }
  if (amount <= 0 || amount > bid->deposit) {
    out.status = AuctionStatus::invalid_amount;
    return out;
  }
  const Amount remaining = bid->deposit - amount;
  // The manager must stay funded for K blocks; a pending bid must keep R*K so
  // the manager sequence already locked in for the next K blocks cannot change.
  // With both floors in place D_top/R_top + D_next/R_next >= K always holds.
  if (static_cast<Wide>(remaining) < static_cast<Wide>(bid->rent) * params_.K) {
    out.status = AuctionStatus::would_violate_coverage;
    return out;
  }
  if (amount % bid->rent != 0) {
    out.status = AuctionStatus::deposit_not_multiple;
    return out;
  }
  bid->deposit = remaining;
  credit(bidder, amount);
  out.events.push_back(event(AuctionEventKind::deposit_reduced, bidder, {}, amount));
  return out;
}

AuctionOutcome AuctionState::top_up(const std::string& bidder, Amount amount) {
  AuctionOutcome out;
  Bid* bid = find_bid(bidder);
  if (!bid) {
    out.status = AuctionStatus::not_bid_owner;
  } else if (amount <= 0) {
    out.status = AuctionStatus::invalid_amount;
  } else if (amount % bid->rent != 0) {
    out.status = AuctionStatus::deposit_not_multiple;
  } else {
    bid->deposit += amount;
    ledger_.deposits_posted += amount;
    out.events.push_back(event(AuctionEventKind::deposit_topped_up, bidder, {}, amount));
  }
  return out;
}

AuctionOutcome AuctionState::set_fee(const std::string& bidder, double fee) {
  AuctionOutcome out;
  if (!top_ || top_->bidder != bidder) {
    out.status = AuctionStatus::not_manager;
  } else if (!(fee >= 0.0)) {
    out.status = AuctionStatus::fee_negative;
  } else if (fee > params_.fee_cap) {
    out.status = AuctionStatus::fee_above_cap;
  } else {
    next_fee_ = fee;
    out.events.push_back(event(AuctionEventKind::fee_set, bidder, {}, 0, fee));
  }
  return out;
}

std::vector<AuctionEvent> AuctionState::advance_block() {
  std::vector<AuctionEvent> events;
  ++block_;

  while (!pending_.empty() && pending_.front().active_from <= block_) {
    Bid incoming = std::move(pending_.front());
    pending_.pop_front();
    events.push_back(event(AuctionEventKind::bid_activated, incoming.bidder, {}, incoming.rent));
    if (top_) {
      events.push_back(event(AuctionEventKind::usurped, incoming.bidder, top_->bidder, top_->deposit));
      if (top_->deposit > 0) {
        events.push_back(event(AuctionEventKind::refund, top_->bidder, {}, top_->deposit));
        credit(top_->bidder, top_->deposit);
      }
    }
    top_ = std::move(incoming);
  }

  const std::optional<std::string> previous = block_manager_;
  block_manager_ = manager();
  if (!block_manager_ || block_manager_ != previous) next_fee_ = params_.default_fee;
  effective_fee_ = next_fee_;
  events.push_back(event(AuctionEventKind::fee_effective, block_manager_.value_or(""), {}, 0, effective_fee_));

  if (top_) {
    const Amount rent = top_->rent;
    top_->deposit -= rent;
    distribute(rent);
    events.push_back(event(AuctionEventKind::rent_paid, top_->bidder, {}, rent));
    if (top_->deposit == 0) {
      events.push_back(event(AuctionEventKind::depleted, top_->bidder));
      top_.reset();
    }
  }
  return events;
}

void AuctionState::distribute(Amount amount) {
  ledger_.rent_distributed += amount;
  if (total_shares_ > 0) {
    accumulator_ += static_cast<Accumulator>(amount) * kAccumulatorScale / static_cast<Accumulator>(total_shares_);
  } else {
    ledger_.orphan_rent += amount;
  }
}

void AuctionState::settle(LpPosition& pos) const {
  pos.owed_scaled += static_cast<Accumulator>(pos.shares) * (accumulator_ - pos.snapshot);
  pos.snapshot = accumulator_;
}

AuctionOutcome AuctionState::add_liquidity(const std::string& lp, Amount shares) {
  AuctionOutcome out;
  if (shares <= 0) {
    out.status = AuctionStatus::invalid_amount;
    return out;
  }
  LpPosition& pos = lps_[lp];
  settle(pos);
  pos.shares += shares;
  total_shares_ += shares;
  out.events.push_back(event(AuctionEventKind::liquidity_added, lp, {}, shares));
  return out;
}

AuctionOutcome AuctionState::remove_liquidity(const std::string& lp, Amount shares) {
  AuctionOutcome out;
  auto it = lps_.find(lp);
  if (it == lps_.end()) {
    out.status = AuctionStatus::unknown_lp;
    return out;
  }
  if (shares <= 0) {
    out.status = AuctionStatus::invalid_amount;
    return out;
  }
  if (shares > it->second.shares) {
    out.status = AuctionStatus::insufficient_shares;
    return out;
  }
  settle(it->second);
  it->second.shares -= shares;
  total_shares_ -= shares;

  const Amount fee = std::min<Amount>(
      shares, static_cast<Amount>(std::ceil(static_cast<double>(shares) * params_.withdrawal_fee)));
  out.amount = shares - fee;
  out.events.push_back(event(AuctionEventKind::liquidity_removed, lp, {}, out.amount));
  if (fee > 0) {
    // Fee shares go to the manager; with no manager they are burned, which
    // accrues their value to the remaining LPs.
    const std::string recipient = block_manager_.value_or("");
    if (block_manager_) {
      LpPosition& mgr = lps_[recipient];
      settle(mgr);
      mgr.shares += fee;
      total_shares_ += fee;
    }
    out.events.push_back(event(AuctionEventKind::withdrawal_fee, lp, recipient, fee));
  }
  return out;
}

AuctionOutcome AuctionState::claim_rent(const std::string& lp) {
  AuctionOutcome out;
  auto it = lps_.find(lp);
  if (it == lps_.end()) {
    out.status = AuctionStatus::unknown_lp;
    return out;
  }
  settle(it->second);
  out.amount = static_cast<Amount>(it->second.owed_scaled / kAccumulatorScale);
  it->second.owed_scaled %= kAccumulatorScale;
  ledger_.rent_claimed += out.amount;
  out.events.push_back(event(AuctionEventKind::rent_claimed, lp, {}, out.amount));
  return out;
}

Amount AuctionState::shares_of(const std::string& lp) const {
  auto it = lps_.find(lp);
  return it == lps_.end() ? 0 : it->second.shares;
}

Amount AuctionState::claimable(const std::string& lp) const {
  auto it = lps_.find(lp);
  if (it == lps_.end()) return 0;
  LpPosition pos = it->second;
  settle(pos);
  return static_cast<Amount>(pos.owed_scaled / kAccumulatorScale);
}

Amount AuctionState::remaining_deposits() const {
  Amount sum = top_ ? top_->deposit : 0;
  for (const auto& b : pending_) sum += b.deposit;
  return sum;
}

std::string AuctionState::serialize() const {
  nlohmann::json j;
  j["block"] = block_;
  j["params"] = {{"K", params_.K},
                 {"increment_bps", increment_bps_},
                 {"fee_cap", params_.fee_cap},
                 {"default_fee", params_.default_fee},
                 {"withdrawal_fee", params_.withdrawal_fee}};
  j["top"] = top_ ? bid_json(*top_) : nlohmann::json(nullptr);
  j["pending"] = nlohmann::json::array();
  for (const auto& b : pending_) j["pending"].push_back(bid_json(b));
  j["block_manager"] = block_manager_ ? nlohmann::json(*block_manager_) : nlohmann::json(nullptr);
  j["effective_fee"] = effective_fee_;
  j["next_fee"] = next_fee_;
  j["accumulator"] = u128_to_string(accumulator_);
  j["total_shares"] = total_shares_;
  nlohmann::json lps = nlohmann::json::object();
  for (const auto& [id, pos] : lps_) {
    lps[id] = {{"shares", pos.shares},
               {"snapshot", u128_to_string(pos.snapshot)},
               {"owed_scaled", u128_to_string(pos.owed_scaled)}};
  }
  j["lps"] = lps;
  j["ledger"] = {{"deposits_posted", ledger_.deposits_posted},
                 {"rent_distributed", ledger_.rent_distributed},
                 {"refunds", ledger_.refunds},
                 {"orphan_rent", ledger_.orphan_rent},
                 {"rent_claimed", ledger_.rent_claimed},
                 {"bidder_credits", ledger_.bidder_credits}};
  return j.dump();
}

std::vector<std::string> AuctionState::invariant_violations() const {
  std::vector<std::string> v;
  if (ledger_.deposits_posted != ledger_.rent_distributed + ledger_.refunds + remaining_deposits()) {
    v.push_back("conservation: deposits posted != rent distributed + refunds + remaining deposits");
  }
  if (top_) {
    if (top_->deposit <= 0) v.push_back("top bid deposit is not positive");
    if (top_->deposit % top_->rent != 0) v.push_back("top bid deposit is not a multiple of its rent");
  }
  for (const auto& b : pending_) {
    if (b.deposit % b.rent != 0) v.push_back("pending deposit is not a multiple of its rent");
    if (static_cast<Wide>(b.deposit) < static_cast<Wide>(b.rent) * params_.K) v.push_back("pending deposit below R*K");
    if (b.active_from != b.submitted_at + params_.K) v.push_back("pending bid activation is not submission + K");
  }
  if (const Bid* next = next_bid()) {
    const Wide top_d = top_ ? top_->deposit : 0;
    const Wide top_r = top_ ? top_->rent : 1;
    if (top_d < top_r * params_.K &&
        top_d * next->rent + static_cast<Wide>(next->deposit) * top_r < static_cast<Wide>(params_.K) * top_r * next->rent) {
      v.push_back("coverage: D_top/R_top + D_next/R_next < K");
    }
  }
  if (effective_fee_ > params_.fee_cap || next_fee_ > params_.fee_cap) v.push_back("fee above cap");
  if (ledger_.rent_claimed > ledger_.rent_distributed - ledger_.orphan_rent) v.push_back("claims exceed distributed rent");
  Amount shares = 0;
  for (const auto& [id, pos] : lps_) shares += pos.shares;
  if (shares != total_shares_) v.push_back("LP shares do not sum to total shares");
  return v;
}

}  // namespace amamm

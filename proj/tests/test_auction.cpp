#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "amamm/auction.hpp"
#include "auction_fuzz.hpp"

using namespace amamm;

namespace {

bool has_event(const std::vector<AuctionEvent>& events, AuctionEventKind kind) {
  return std::any_of(events.begin(), events.end(), [&](const AuctionEvent& e) { return e.kind == kind; });
}

void advance(AuctionState& st, int n) {
  for (int i = 0; i < n; ++i) st.advance_block();
}

}  // namespace

TEST_CASE("bid submission rules") {
  AuctionState st;  // K = 5, increment 1.10
  SUBCASE("exact R*K deposit is accepted") {
    const AuctionOutcome o = st.submit_bid("alice", 10, 50);
    CHECK(o.ok());
    REQUIRE(st.next_bid() != nullptr);
    CHECK(st.next_bid()->active_from == 5);
    CHECK(st.next_bid()->submitted_at == 0);
  }
  SUBCASE("deposit must be a multiple of R") {
    CHECK(st.submit_bid("alice", 10, 55).status == AuctionStatus::deposit_not_multiple);
  }
  SUBCASE("deposit must cover K blocks") {
    CHECK(st.submit_bid("alice", 10, 40).status == AuctionStatus::deposit_too_small);
  }
  SUBCASE("non-positive amounts") {
    CHECK(st.submit_bid("alice", 0, 50).status == AuctionStatus::invalid_amount);
    CHECK(st.submit_bid("alice", 10, -50).status == AuctionStatus::invalid_amount);
  }
  SUBCASE("increment rule against the manager") {
    REQUIRE(st.submit_bid("alice", 100, 500).ok());
    advance(st, 5);
    REQUIRE(st.manager() == "alice");
    // R_top = 100: 105 is below 110 and rejected; 110 is exactly the increment.
    CHECK(st.submit_bid("bob", 105, 525).status == AuctionStatus::increment_too_small);
    CHECK(st.submit_bid("bob", 110, 550).ok());
  }
  SUBCASE("increment rule with rent 10 and a 10.5 challenger, in integer units") {
    // Rent is integral, so R = 10 vs 10.5 is expressed as 100 vs 105.
    REQUIRE(st.submit_bid("alice", 100, 1000).ok());
    CHECK(st.submit_bid("bob", 105, 1050).status == AuctionStatus::increment_too_small);
  }
  SUBCASE("increment rule against pending bids and equal rent") {
    REQUIRE(st.submit_bid("alice", 10, 50).ok());
    CHECK(st.submit_bid("bob", 10, 50).status == AuctionStatus::increment_too_small);
    CHECK(st.submit_bid("bob", 11, 55).ok());
    CHECK(st.submit_bid("cy", 12, 60).status == AuctionStatus::increment_too_small);
  }
  SUBCASE("one live bid per bidder") {
    REQUIRE(st.submit_bid("alice", 10, 50).ok());
    CHECK(st.submit_bid("alice", 20, 100).status == AuctionStatus::bidder_has_live_bid);
  }
}

TEST_CASE("deposit reductions keep the floors") {
  AuctionState st;
  REQUIRE(st.submit_bid("alice", 10, 100).ok());
  advance(st, 5);
  REQUIRE(st.manager() == "alice");
  const Amount d = st.top_bid()->deposit;  // 100 - 10 rent = 90

  SUBCASE("top: down to exactly R*K") {
    CHECK(st.reduce_deposit("alice", d - 50).ok());
    CHECK(st.top_bid()->deposit == 50);
    CHECK(st.ledger().bidder_credits.at("alice") == d - 50);
  }
  SUBCASE("top: one unit below the floor") {
    CHECK(st.reduce_deposit("alice", d - 49).status == AuctionStatus::would_violate_coverage);
  }
  SUBCASE("top: reduce by 50 from 100, then by 51 rejected") {
    AuctionState s2;
    REQUIRE(s2.submit_bid("zed", 10, 100).ok());
    CHECK(s2.reduce_deposit("zed", 51).status == AuctionStatus::would_violate_coverage);
    CHECK(s2.reduce_deposit("zed", 50).ok());
  }
  SUBCASE("non-owner") {
    CHECK(st.reduce_deposit("bob", 10).status == AuctionStatus::not_bid_owner);
  }
  SUBCASE("next bid while the top covers fewer than K blocks") {
    // Bring the manager to D/R = 3, then a challenger with R = 20 must keep
    // D_next >= 40 so that 3 + D_next/20 >= 5; this implementation's floor
    // R*K = 100 is stricter.
    AuctionState s2;
    REQUIRE(s2.submit_bid("alice", 10, 50).ok());
    advance(s2, 5);
    advance(s2, 1);
    REQUIRE(s2.top_bid()->deposit == 30);
    REQUIRE(s2.submit_bid("bob", 20, 200).ok());
    CHECK(s2.reduce_deposit("bob", 180).status == AuctionStatus::would_violate_coverage);  // leaves 20 < 40
    CHECK(s2.reduce_deposit("bob", 161).status == AuctionStatus::would_violate_coverage);  // leaves 39
    CHECK(s2.reduce_deposit("bob", 100).ok());
    CHECK(s2.invariant_violations().empty());
  }
}

TEST_CASE("top-ups") {
  AuctionState st;
  REQUIRE(st.submit_bid("alice", 10, 50).ok());
  CHECK(st.top_up("alice", 25).status == AuctionStatus::deposit_not_multiple);
  CHECK(st.top_up("alice", 30).ok());
  CHECK(st.next_bid()->deposit == 80);
  CHECK(st.top_up("bob", 10).status == AuctionStatus::not_bid_owner);
}

TEST_CASE("K-block activation delay") {
  AuctionState st;
  REQUIRE(st.add_liquidity("lp", 100).ok());
  REQUIRE(st.submit_bid("alice", 10, 1000).ok());
  advance(st, 5);
  REQUIRE(st.block_manager() == "alice");
  advance(st, 2);  // block 7
  REQUIRE(st.submit_bid("bob", 11, 110).ok());
  for (int n = 8; n < 12; ++n) {
    st.advance_block();
    CHECK(st.block_manager() == "alice");
  }
  const auto events = st.advance_block();  // block 12
  CHECK(st.current_block() == 12);
  CHECK(st.block_manager() == "bob");
  CHECK(has_event(events, AuctionEventKind::usurped));
  CHECK(has_event(events, AuctionEventKind::refund));
  CHECK(st.ledger().bidder_credits.at("alice") == 1000 - 7 * 10);
  CHECK(st.invariant_violations().empty());
}

TEST_CASE("deposit depletion") {
  AuctionParams params;
  params.K = 3;
  AuctionState st(params);
  REQUIRE(st.add_liquidity("lp", 10).ok());
  REQUIRE(st.submit_bid("alice", 7, 21).ok());
  advance(st, 2);
  CHECK_FALSE(st.manager().has_value());
  st.advance_block();  // block 3: activation and first rent
  CHECK(st.block_manager() == "alice");
  st.advance_block();
  const auto last = st.advance_block();  // third rent payment
  CHECK(has_event(last, AuctionEventKind::depleted));
  CHECK_FALSE(st.top_bid().has_value());
  CHECK(st.ledger().rent_distributed == 21);
  const auto after = st.advance_block();
  CHECK_FALSE(st.block_manager().has_value());
  CHECK_FALSE(has_event(after, AuctionEventKind::rent_paid));
  CHECK(st.effective_fee() == params.default_fee);

  // A waiting challenger takes over once its delay has elapsed.
  REQUIRE(st.submit_bid("bob", 8, 24).ok());
  advance(st, 2);
  CHECK_FALSE(st.block_manager().has_value());
  const auto act = st.advance_block();
  CHECK(st.block_manager() == "bob");
  CHECK(has_event(act, AuctionEventKind::bid_activated));
}

TEST_CASE("empty auction") {
  AuctionState st;
  for (int i = 0; i < 10; ++i) {
    const auto ev = st.advance_block();
    CHECK_FALSE(has_event(ev, AuctionEventKind::rent_paid));
    CHECK(st.effective_fee() == st.params().default_fee);
  }
  CHECK(st.ledger().rent_distributed == 0);
}

TEST_CASE("fee setting") {
  AuctionState st;
  REQUIRE(st.submit_bid("alice", 10, 100).ok());
  advance(st, 5);
  CHECK(st.set_fee("alice", 0.05).ok());
  CHECK(st.set_fee("alice", std::nextafter(0.05, 1.0)).status == AuctionStatus::fee_above_cap);
  CHECK(st.set_fee("alice", -0.001).status == AuctionStatus::fee_negative);
  CHECK(st.set_fee("bob", 0.01).status == AuctionStatus::not_manager);

  REQUIRE(st.set_fee("alice", 0.003).ok());
  CHECK(st.effective_fee() == st.params().default_fee);  // not retroactive
  st.advance_block();
  CHECK(st.effective_fee() == 0.003);
  st.advance_block();
  CHECK(st.effective_fee() == 0.003);
}

TEST_CASE("rent streaming and claims") {
  SUBCASE("single LP over 10 blocks") {
    AuctionState st;
    REQUIRE(st.add_liquidity("lp", 1000).ok());
    REQUIRE(st.submit_bid("alice", 7, 700).ok());
    advance(st, 4);
    advance(st, 10);
    CHECK(st.claim_rent("lp").amount == 70);
    CHECK(st.claim_rent("lp").amount == 0);
  }
  SUBCASE("two LPs split 50/50") {
    AuctionState st;
    REQUIRE(st.add_liquidity("a", 500).ok());
    REQUIRE(st.add_liquidity("b", 500).ok());
    REQUIRE(st.submit_bid("alice", 8, 800).ok());
    advance(st, 4);
    advance(st, 10);
    CHECK(st.claim_rent("a").amount == 40);
    CHECK(st.claim_rent("b").amount == 40);
  }
  SUBCASE("an LP entering mid-stream earns only later rent") {
    // a holds 100 shares for 6 blocks alone, then b adds 300: 6*12 + 4*12/4
    // for a and 4*12*3/4 for b.
    AuctionState st;
    REQUIRE(st.add_liquidity("a", 100).ok());
    REQUIRE(st.submit_bid("alice", 12, 1200).ok());
    advance(st, 4);
    advance(st, 6);
    REQUIRE(st.add_liquidity("b", 300).ok());
    advance(st, 4);
    CHECK(st.claim_rent("a").amount == 72 + 12);
    CHECK(st.claim_rent("b").amount == 36);
  }
  SUBCASE("unknown LP") {
    AuctionState st;
    CHECK(st.claim_rent("ghost").status == AuctionStatus::unknown_lp);
  }
}

TEST_CASE("withdrawal fee routing") {
  AuctionParams params;
  params.withdrawal_fee = 0.01;
  AuctionState st(params);
  REQUIRE(st.add_liquidity("lp", 1000).ok());
  SUBCASE("no manager: fee shares are burned") {
    const AuctionOutcome o = st.remove_liquidity("lp", 200);
    CHECK(o.amount == 198);
    CHECK(st.total_shares() == 800);
  }
  SUBCASE("fee shares go to the manager") {
    REQUIRE(st.submit_bid("alice", 10, 100).ok());
    advance(st, 5);
    const AuctionOutcome o = st.remove_liquidity("lp", 250);
    CHECK(o.amount == 247);  // ceil(2.5) = 3
    CHECK(st.shares_of("alice") == 3);
    CHECK(st.total_shares() == 753);
  }
  CHECK(st.remove_liquidity("lp", 5000).status == AuctionStatus::insufficient_shares);
  CHECK(st.remove_liquidity("ghost", 1).status == AuctionStatus::unknown_lp);
}

TEST_CASE("serialization is canonical") {
  AuctionState a, b;
  for (AuctionState* st : {&a, &b}) {
    st->add_liquidity("lp", 10);
    st->submit_bid("alice", 3, 30);
    advance(*st, 7);
  }
  CHECK(a.serialize() == b.serialize());
  b.advance_block();
  CHECK(a.serialize() != b.serialize());
}

TEST_CASE("randomized schedules uphold every invariant") {
  int rejections_seen = 0;
  for (std::uint64_t seed = 1; seed <= 2000; ++seed) {
    const testing::Schedule s = testing::random_schedule(seed);
    const testing::RunResult r = testing::run_schedule(s);
    CAPTURE(seed);
    REQUIRE(r.violations.empty());
    CHECK(testing::run_schedule(s).final_state == r.final_state);
    const BlockHeight cut = static_cast<BlockHeight>(seed % static_cast<std::uint64_t>(s.horizon));
    CHECK(testing::lock_in_mismatches(s, cut, seed * 7919) == 0);
    AuctionState st(s.params);
    for (const auto& act : s.actions) {
      while (st.current_block() < act.block) st.advance_block();
      if (!testing::apply(st, act).ok()) ++rejections_seen;
    }
  }
  CHECK(rejections_seen > 100);
}

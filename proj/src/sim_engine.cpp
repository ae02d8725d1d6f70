#include "amamm/sim_engine.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "amamm/amm_core.hpp"
#include "amamm/equilibrium.hpp"
#include "running_moments.hpp"

namespace amamm {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

const char* to_string(ManagerPolicy p) { return p == ManagerPolicy::fixed ? "fixed" : "optimal"; }
const char* to_string(LpPolicy p) { return p == LpPolicy::static_supply ? "static" : "zero_profit"; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Caches the manager's optimal fee; it depends on the block state only through
// V(L) = 2 sqrt(P) L, so small price moves reuse the previous answer.
class OptimalFeePolicy {
 public:
  explicit OptimalFeePolicy(const MarketParams& params) : params_(params) { solver_.fee_grid = 256; }

  double fee(double liquidity, double price) {
    const double key = std::log(pool_value(liquidity, price));
    if (!valid_ || std::abs(key - key_) > 1e-3) {
      solver_.price = price;
      fee_ = manager_fee_choice(liquidity, params_, solver_).fee;
      key_ = key;
      valid_ = true;
    }
    return fee_;
  }

 private:
  MarketParams params_;
  SolverConfig solver_;
  bool valid_ = false;
  double key_ = 0.0;
  double fee_ = 0.0;
};

}  // namespace

void SimConfig::validate() const {
  if (schema_version != 1) throw std::invalid_argument("config: unsupported schema_version");
  if (horizon_blocks < 1) throw std::invalid_argument("config: horizon_blocks must be at least 1");
  if (const std::string err = market.validation_error(); !err.empty()) {
    throw std::invalid_argument("config.market: " + err);
  }
  AuctionState probe(auction);  // throws on invalid auction params
  if (auction.fee_cap > market.f_max) throw std::invalid_argument("config.auction: fee_cap above f_max");
  if (!(manager_fee >= 0.0) || manager_fee > auction.fee_cap) {
    throw std::invalid_argument("config.sim: manager_fee must lie in [0, fee_cap]");
  }
  if (!(initial_liquidity > 0.0) || !std::isfinite(initial_liquidity)) {
    throw std::invalid_argument("config.sim: initial_liquidity must be positive");
  }
  if (!(initial_price > 0.0) || !std::isfinite(initial_price)) {
    throw std::invalid_argument("config.sim: initial_price must be positive");
  }
  if (initial_shares < 1) throw std::invalid_argument("config.sim: initial_shares must be positive");
  for (const auto& bid : initial_bids) {
    if (bid.bidder.empty()) throw std::invalid_argument("config.sim.initial_bids: empty bidder");
    if (bid.rent <= 0 || bid.deposit <= 0) {
      throw std::invalid_argument("config.sim.initial_bids: rent and deposit must be positive");
    }
  }
}

MarketParams market_params_from_json(const json& j) {
  const std::string where = "market";
  reject_unknown_keys(j, {"sigma", "delta_t", "r", "f_max", "c0", "c1", "alpha"}, where);
  MarketParams p;
  read(j, "sigma", p.sigma, where);
  read(j, "delta_t", p.delta_t, where);
  read(j, "r", p.r, where);
  read(j, "f_max", p.f_max, where);
  read(j, "c0", p.c0, where);
  read(j, "c1", p.c1, where);
  read(j, "alpha", p.alpha, where);
  return p;
}

AuctionParams auction_params_from_json(const json& j, const MarketParams& market) {
  const std::string where = "auction";
  reject_unknown_keys(j, {"K", "min_increment_factor", "fee_cap", "default_fee", "withdrawal_fee"}, where);
  AuctionParams p;
  p.fee_cap = market.f_max;
  read(j, "K", p.K, where);
  read(j, "min_increment_factor", p.min_increment_factor, where);
  read(j, "fee_cap", p.fee_cap, where);
  p.default_fee = p.fee_cap;
  read(j, "default_fee", p.default_fee, where);
  if (j.contains("withdrawal_fee") && j.at("withdrawal_fee").is_string()) {
    if (j.at("withdrawal_fee").get<std::string>() != "auto") {
      throw ConfigError("auction.withdrawal_fee: expected a number or \"auto\"");
    }
    p.withdrawal_fee = withdrawal_fee_required(1.0 + p.fee_cap);
  } else {
    read(j, "withdrawal_fee", p.withdrawal_fee, where);
  }
  return p;
}

SimConfig sim_config_from_json(const json& j) {
  reject_unknown_keys(j, {"schema_version", "market", "auction", "sim", "experiment"}, "config");
  SimConfig c;
  if (!j.contains("schema_version")) throw ConfigError("config: missing schema_version");
  read(j, "schema_version", c.schema_version, "config");
  if (c.schema_version != 1) throw ConfigError("config: unsupported schema_version " + std::to_string(c.schema_version));
  c.market = market_params_from_json(j.value("market", json::object()));
  c.auction = auction_params_from_json(j.value("auction", json::object()), c.market);

  const json sim = j.value("sim", json::object());
  const std::string where = "sim";
  reject_unknown_keys(sim,
                      {"horizon_blocks", "seed", "manager_policy", "manager_fee", "lp_policy",
                       "initial_liquidity", "initial_price", "initial_shares", "initial_bids", "record_blocks"},
                      where);
  read(sim, "horizon_blocks", c.horizon_blocks, where);
  read(sim, "seed", c.seed, where);
  std::string policy = to_string(c.manager_policy);
  read(sim, "manager_policy", policy, where);
  if (policy == "fixed") {
    c.manager_policy = ManagerPolicy::fixed;
  } else if (policy == "optimal") {
    c.manager_policy = ManagerPolicy::optimal;
  } else {
    throw ConfigError("sim.manager_policy: expected \"fixed\" or \"optimal\"");
  }
  read(sim, "manager_fee", c.manager_fee, where);
  std::string lp = to_string(c.lp_policy);
  read(sim, "lp_policy", lp, where);
  if (lp == "static") {
    c.lp_policy = LpPolicy::static_supply;
  } else if (lp == "zero_profit") {
    c.lp_policy = LpPolicy::zero_profit;
  } else {
    throw ConfigError("sim.lp_policy: expected \"static\" or \"zero_profit\"");
  }
  read(sim, "initial_liquidity", c.initial_liquidity, where);
  read(sim, "initial_price", c.initial_price, where);
  read(sim, "initial_shares", c.initial_shares, where);
  read(sim, "record_blocks", c.record_blocks, where);
  if (sim.contains("initial_bids")) {
    const json& bids = sim.at("initial_bids");
    if (!bids.is_array()) throw ConfigError("sim.initial_bids: expected an array");
    for (const auto& b : bids) {
      reject_unknown_keys(b, {"bidder", "R", "D"}, "sim.initial_bids[]");
      InitialBid bid;
      read(b, "bidder", bid.bidder, "sim.initial_bids[]");
      read(b, "R", bid.rent, "sim.initial_bids[]");
      read(b, "D", bid.deposit, "sim.initial_bids[]");
      c.initial_bids.push_back(bid);
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json to_json(const SimConfig& c) {
  json bids = json::array();
  for (const auto& b : c.initial_bids) bids.push_back({{"bidder", b.bidder}, {"R", b.rent}, {"D", b.deposit}});
  return {{"schema_version", c.schema_version},
          {"market",
           {{"sigma", c.market.sigma},
            {"delta_t", c.market.delta_t},
            {"r", c.market.r},
            {"f_max", c.market.f_max},
            {"c0", c.market.c0},
            {"c1", c.market.c1},
            {"alpha", c.market.alpha}}},
          {"auction",
           {{"K", c.auction.K},
            {"min_increment_factor", c.auction.min_increment_factor},
            {"fee_cap", c.auction.fee_cap},
            {"default_fee", c.auction.default_fee},
            {"withdrawal_fee", c.auction.withdrawal_fee}}},
          {"sim",
           {{"horizon_blocks", c.horizon_blocks},
            {"seed", c.seed},
            {"manager_policy", to_string(c.manager_policy)},
            {"manager_fee", c.manager_fee},
            {"lp_policy", to_string(c.lp_policy)},
            {"initial_liquidity", c.initial_liquidity},
            {"initial_price", c.initial_price},
            {"initial_shares", c.initial_shares},
            {"initial_bids", bids},
            {"record_blocks", c.record_blocks}}}};
}

double SimReport::manager_pnl() const {
  return manager_fee_revenue + manager_arb_profit - manager_rent_paid + manager_withdrawal_fees;
}

double SimReport::lp_pnl() const {
  return lp_rent_received - lp_adverse_selection - lp_capital_charge + lp_fee_income - lp_withdrawal_fees_paid;
}

json to_json(const SimReport& r) {
  return {{"blocks", r.blocks},
          {"managed_blocks", r.managed_blocks},
          {"no_trade_blocks", r.no_trade_blocks},
          {"rates",
           {{"ap0_hat", r.ap0_hat},
            {"ap0_se", r.ap0_se},
            {"ap0_expected", r.ap0_expected},
            {"ae0_hat", r.ae0_hat},
            {"ae0_se", r.ae0_se},
            {"ae0_expected", r.ae0_expected}}},
          {"manager",
           {{"fee_revenue", r.manager_fee_revenue},
            {"arb_profit", r.manager_arb_profit},
            {"rent_paid", r.manager_rent_paid},
            {"withdrawal_fees", r.manager_withdrawal_fees},
            {"total", r.manager_pnl()}}},
          {"lp",
           {{"rent_received", r.lp_rent_received},
            {"adverse_selection", r.lp_adverse_selection},
            {"capital_charge", r.lp_capital_charge},
            {"fee_income", r.lp_fee_income},
            {"withdrawal_fees_paid", r.lp_withdrawal_fees_paid},
            {"total", r.lp_pnl()}}},
          {"external_arb_profit", r.external_arb_profit},
          {"noise", {{"volume", r.noise_volume}, {"fees_paid", r.noise_fees_paid}}},
          {"events", {{"usurps", r.usurps}, {"depletions", r.depletions}, {"activations", r.activations}}},
          {"accounting",
           {{"max_block_residual", r.max_block_residual},
            {"residual_drift", r.residual_drift},
            {"max_post_block_z", r.max_post_block_z}}},
          {"final_price", r.final_price},
          {"final_liquidity", r.final_liquidity}};
}

std::string block_records_csv(const SimReport& report) {
  std::string out = "block,tau,z,fee,arb_profit,excess,noise_fees,rent\n";
  char buf[320];
  for (const auto& b : report.records) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(b.block), b.tau, b.z, b.fee, b.arb_profit, b.excess,
                  b.noise_fees, b.rent);
    out += buf;
  }
  return out;
}

SimReport run_sim(const SimConfig& config) {
  config.validate();
  const MarketParams& mp = config.market;

  // The share registry carries no withdrawal fee: the simulator books that fee
  // in numéraire below, like the rent.
  AuctionParams registry_params = config.auction;
  registry_params.withdrawal_fee = 0.0;
  AuctionState auction(registry_params);
  const std::string lps = "lps";
  auction.add_liquidity(lps, config.initial_shares);
  for (const auto& bid : config.initial_bids) {
    const AuctionOutcome o = auction.submit_bid(bid.bidder, bid.rent, bid.deposit);
    if (!o.ok()) {
      throw ConfigError("sim.initial_bids: bid by " + bid.bidder + " rejected: " + std::string(to_string(o.status)));
    }
  }

  const double liquidity_per_share = config.initial_liquidity / static_cast<double>(config.initial_shares);
  double liquidity = config.initial_liquidity;
  double price = config.initial_price;
  PoolState pool = make_pool(liquidity, price, config.auction.default_fee, config.auction.fee_cap);
  const CounterRng rng(config.seed, 0);
  OptimalFeePolicy optimal(mp);
  const double adverse_rate = ap0(0.0, mp) + mp.r;

  SimReport rep;
  rep.ap0_expected = ap0(0.0, mp);
  detail::RunningMoments adverse_m, excess_m;
  double ae0_expected_sum = 0.0;

  for (std::uint64_t i = 0; i < config.horizon_blocks; ++i) {
    const std::vector<AuctionEvent> events = auction.advance_block();
    const Amount shares = auction.total_shares();
    Amount rent_shares = 0;
    for (const auto& e : events) {
      switch (e.kind) {
        case AuctionEventKind::rent_paid: rent_shares += e.amount; break;
        case AuctionEventKind::usurped: ++rep.usurps; break;
        case AuctionEventKind::depleted: ++rep.depletions; break;
        case AuctionEventKind::bid_activated: ++rep.activations; break;
        default: break;
      }
    }
    const bool managed = auction.block_manager().has_value();
    const double fee = auction.effective_fee();
    pool.swap_fee = fee;

    const MispricingSample s = sample_block(mp, rng, i);
    price *= std::exp(s.z);
    const double value = pool_value(liquidity, price);
    const double z = log_mispricing(pool, price);
    const double lp_value_before = price * pool.reserve_x + pool.reserve_y;

    double ext_profit = 0.0, arb_fee = 0.0;
    if (const auto arb = arb_trade_to_band(pool, price, fee)) {
      ext_profit = arb->profit;
      arb_fee = arb->trade.fee_paid;
      pool = arb->trade.new_pool;
    }
    double correction = 0.0;
    if (managed) {
      const TradeResult t = trade_to_price(pool, price, 0.0);
      correction = t.new_pool.reserve_y >= pool.reserve_y ? price * t.amount_out - t.amount_in
                                                          : t.amount_out - price * t.amount_in;
      pool = t.new_pool;
    }
    const double adverse = lp_value_before - (price * pool.reserve_x + pool.reserve_y);

    const double noise = noise_volume(fee, liquidity, mp) * s.tau;
    const double noise_fees = fee * noise;
    const double rent = shares > 0 ? static_cast<double>(rent_shares) * value / static_cast<double>(shares) : 0.0;

    double lp_fees = 0.0, mgr_arb = 0.0, mgr_fees = 0.0;
    if (managed) {
      mgr_arb = correction + arb_fee;
      mgr_fees = noise_fees;
      rep.manager_fee_revenue += noise_fees;
      rep.manager_rent_paid += rent;
      ++rep.managed_blocks;
      if (std::abs(z) <= fee) ++rep.no_trade_blocks;
      adverse_m.add(adverse / value);
      excess_m.add(ext_profit / value);
      ae0_expected_sum += ae0(fee, mp);
      rep.max_post_block_z = std::max(rep.max_post_block_z, std::abs(log_mispricing(pool, price)));
    } else {
      lp_fees = arb_fee + noise_fees;
    }
    rep.manager_arb_profit += mgr_arb;
    rep.external_arb_profit += ext_profit;
    rep.lp_adverse_selection += adverse;
    rep.lp_fee_income += lp_fees;
    rep.lp_rent_received += rent;
    rep.lp_capital_charge += mp.r * value * s.tau;
    rep.noise_volume += noise;
    rep.noise_fees_paid += noise_fees;

    // LP, manager, outside arbitrageur and noise traders; rent and withdrawal
    // fees move value between the first two and are left out.
    const double residual = (lp_fees - adverse) + (mgr_arb + mgr_fees) + ext_profit - noise_fees;
    rep.residual_drift += residual;
    rep.max_block_residual = std::max(rep.max_block_residual, std::abs(residual));

    if (config.record_blocks) {
      rep.records.push_back({static_cast<std::uint64_t>(auction.current_block()), s.tau, z, fee, adverse,
                             ext_profit, noise_fees, rent});
    }

    // Decisions for the next block use only what is known now.
    if (const auto mgr = auction.manager()) {
      const double next_fee =
          config.manager_policy == ManagerPolicy::fixed ? config.manager_fee : optimal.fee(liquidity, price);
      auction.set_fee(*mgr, std::min(next_fee, config.auction.fee_cap));
    }
    if (config.lp_policy == LpPolicy::zero_profit && auction.top_bid()) {
      const double target = static_cast<double>(auction.top_bid()->rent) / (adverse_rate * mp.delta_t);
      const Amount want = std::max<Amount>(1, static_cast<Amount>(std::llround(std::min(target, 1e15))));
      const Amount have = auction.total_shares();
      if (want != have) {
        if (want > have) {
          auction.add_liquidity(lps, want - have);
        } else {
          const double exit_value = static_cast<double>(have - want) * value / static_cast<double>(have);
          const double wfee = config.auction.withdrawal_fee * exit_value;
          rep.lp_withdrawal_fees_paid += wfee;
          rep.manager_withdrawal_fees += wfee;
          auction.remove_liquidity(lps, have - want);
        }
        const double new_liquidity = liquidity_per_share * static_cast<double>(auction.total_shares());
        const double scale = new_liquidity / liquidity;
        pool.reserve_x *= scale;
        pool.reserve_y *= scale;
        pool.liquidity = new_liquidity;
        liquidity = new_liquidity;
      }
    }
  }

  rep.blocks = config.horizon_blocks;
  const double inv_dt = 1.0 / mp.delta_t;
  rep.ap0_hat = adverse_m.mean() * inv_dt;
  rep.ap0_se = adverse_m.standard_error() * inv_dt;
  rep.ae0_hat = excess_m.mean() * inv_dt;
  rep.ae0_se = excess_m.standard_error() * inv_dt;
  rep.ae0_expected = rep.managed_blocks ? ae0_expected_sum / static_cast<double>(rep.managed_blocks) : 0.0;
  rep.final_price = price;
  rep.final_liquidity = liquidity;
  return rep;
}

WithdrawalAttackReport run_strategic_withdrawal_attack(const SimConfig& config, std::size_t n_grid) {
  config.validate();
  if (n_grid < 3) throw std::invalid_argument("withdrawal attack: grid needs at least 3 points");
  WithdrawalAttackReport rep;
  const double w = config.auction.withdrawal_fee;
  const double cap = config.market.f_max;
  rep.withdrawal_fee = w;
  rep.required_fee = withdrawal_fee_required(1.0 + cap);

  auto evaluate = [&](double rho) {
    const WithdrawalValues v = strategic_withdrawal_values(1.0, config.initial_price, rho);
    WithdrawalAttackRow row;
    row.price_ratio = rho;
    row.v_now = v.v_now;
    row.v_after = v.v_after;
    row.gross_gain = v.v_now - v.v_after;
    row.net_gain = v.v_now * (1.0 - w) - v.v_after;
    return row;
  };

  // Log-spaced ratios from 1/(1+cap) to 1+cap; the endpoints and 1 are exact.
  const double top = std::log1p(cap);
  const std::size_t half = n_grid / 2;
  for (std::size_t i = 0; i < n_grid; ++i) {
    double rho;
    if (i == 0) {
      rho = 1.0 / (1.0 + cap);
    } else if (i == n_grid - 1) {
      rho = 1.0 + cap;
    } else if (i == half) {
      rho = 1.0;
    } else {
      rho = std::exp(top * (2.0 * static_cast<double>(i) / static_cast<double>(n_grid - 1) - 1.0));
    }
    rep.rows.push_back(evaluate(rho));
    rep.max_net_gain = i == 0 ? rep.rows.back().net_gain : std::max(rep.max_net_gain, rep.rows.back().net_gain);
  }

  // Block moves of a simulated path, as the LP would see them just before the
  // manager's correction.
  const CounterRng rng(config.seed, 2);
  rep.max_simulated_gain = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < config.horizon_blocks; ++i) {
    const double rho = std::exp(sample_block(config.market, rng, i).z);
    if (rho > 1.0 + cap || rho < 1.0 / (1.0 + cap)) continue;
    ++rep.simulated_moves;
    rep.max_simulated_gain = std::max(rep.max_simulated_gain, evaluate(rho).net_gain);
  }
  if (rep.simulated_moves == 0) rep.max_simulated_gain = 0.0;

  rep.protected_within_cap = rep.max_net_gain <= 1e-12 && rep.max_simulated_gain <= 1e-12;
  return rep;
}

std::string withdrawal_attack_csv(const WithdrawalAttackReport& report) {
  std::string out = "price_ratio,v_now,v_after,withdrawal_fee,gross_gain,net_gain\n";
  for (const auto& r : report.rows) {
    out += fmt(r.price_ratio) + "," + fmt(r.v_now) + "," + fmt(r.v_after) + "," + fmt(report.withdrawal_fee) + "," +
           fmt(r.gross_gain) + "," + fmt(r.net_gain) + "\n";
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class TraceWriter {
 public:
  void write(std::size_t line, BlockHeight block, const std::string& action, AuctionStatus status,
             const std::vector<AuctionEvent>& events) {
    if (events.empty()) {
      row(line, block, action, status, nullptr);
    } else {
      for (const auto& e : events) row(line, block, action, status, &e);
    }
  }
  std::string str() const { return out_; }

 private:
  void row(std::size_t line, BlockHeight block, const std::string& action, AuctionStatus status,
           const AuctionEvent* e) {
    out_ += std::to_string(seq_++) + "," + std::to_string(line) + "," + std::to_string(block) + "," + action + "," +
            std::string(to_string(status)) + ",";
    if (e) {
      out_ += std::string(to_string(e->kind)) + "," + csv_field(e->actor) + "," + csv_field(e->counterparty) + "," +
              std::to_string(e->amount) + "," + fmt(e->fee);
    } else {
      out_ += ",,,,";
    }
    out_ += "\n";
  }

  std::string out_ = "seq,line,block,action,status,event,actor,counterparty,amount,fee\n";
  std::uint64_t seq_ = 0;
};

template <typename T>
T field(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) throw ReplayError(line, std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ReplayError(line, std::string("field \"") + key + "\" has the wrong type");
  }
}

}  // namespace

ReplayResult replay_auction(std::istream& scenario) {
  std::optional<AuctionState> state;
  TraceWriter trace;
  std::string text;
  std::size_t line = 0;
  std::size_t actions = 0;

  auto advance = [&](std::size_t at) {
    const std::vector<AuctionEvent> events = state->advance_block();
    trace.write(at, state->current_block(), "advance", AuctionStatus::accepted, events);
  };

  while (std::getline(scenario, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ReplayError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ReplayError(line, "expected a JSON object");
    const auto action = field<std::string>(j, "action", line);

    if (action == "config") {
      if (actions > 0) throw ReplayError(line, "config must be the first action");
      try {
        state.emplace(auction_params_from_json(j.at("params"), MarketParams{}));
      } catch (const std::exception& e) {
        throw ReplayError(line, std::string("bad config: ") + e.what());
      }
      ++actions;
      continue;
    }
    if (!state) state.emplace(AuctionParams{});
    ++actions;

    if (j.contains("block")) {
      const auto target = field<BlockHeight>(j, "block", line);
      if (target < state->current_block()) {
        throw ReplayError(line, "block " + std::to_string(target) + " is before current block " +
                                    std::to_string(state->current_block()));
      }
      while (state->current_block() < target) advance(line);
    }

    AuctionOutcome out;
    if (action == "advance") {
      const auto n = j.contains("blocks") ? field<std::int64_t>(j, "blocks", line) : (j.contains("block") ? 0 : 1);
      if (n < 0) throw ReplayError(line, "negative block count");
      for (std::int64_t k = 0; k < n; ++k) advance(line);
      continue;
    } else if (action == "submit_bid") {
      out = state->submit_bid(field<std::string>(j, "bidder", line), field<Amount>(j, "R", line),
                              field<Amount>(j, "D", line));
    } else if (action == "reduce_deposit") {
      out = state->reduce_deposit(field<std::string>(j, "bidder", line), field<Amount>(j, "amount", line));
    } else if (action == "top_up") {
      out = state->top_up(field<std::string>(j, "bidder", line), field<Amount>(j, "amount", line));
    } else if (action == "set_fee") {
      out = state->set_fee(field<std::string>(j, "bidder", line), field<double>(j, "f", line));
    } else if (action == "add_liquidity") {
      out = state->add_liquidity(field<std::string>(j, "lp", line), field<Amount>(j, "shares", line));
    } else if (action == "remove_liquidity") {
      out = state->remove_liquidity(field<std::string>(j, "lp", line), field<Amount>(j, "shares", line));
    } else if (action == "claim_rent") {
      out = state->claim_rent(field<std::string>(j, "lp", line));
    } else {
      throw ReplayError(line, "unknown action \"" + action + "\"");
    }
    trace.write(line, state->current_block(), action, out.status, out.events);
  }
  if (scenario.bad()) throw ReplayError(line, "read error");
  if (!state) state.emplace(AuctionParams{});
  return {trace.str(), *state};
}

ReplayResult replay_auction_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  return replay_auction(in);
}

}  // namespace amamm

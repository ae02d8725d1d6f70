#include "amamm/cli.hpp"

#include <CLI11.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "amamm/amm_core.hpp"
#include "amamm/equilibrium.hpp"
#include "amamm/market_model.hpp"
#include "amamm/sim_engine.hpp"

namespace amamm {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string fees;
  std::optional<std::uint64_t> samples;
  std::optional<std::size_t> grid;
  std::string scenario;
  double corrupt_sigma = 1.0;  // negative-control hook for mc-validate
};

struct LoadedConfig {
  SimConfig sim;
  json experiment = json::object();
  std::string hash = "none";
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(std::string("cannot open ") + what + ": " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedConfig load_config(const Options& opt) {
  LoadedConfig lc;
  if (opt.config.empty()) return lc;
  const std::string text = read_file(opt.config, "config file");
  lc.hash = fnv1a_64_hex(text);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(opt.config + ": " + e.what());
  }
  try {
    lc.sim = sim_config_from_json(j);
  } catch (const ConfigError& e) {
    throw UsageError(opt.config + ": " + e.what());
  }
  if (j.contains("experiment")) {
    lc.experiment = j.at("experiment");
    if (!lc.experiment.is_object()) throw UsageError(opt.config + ": experiment must be an object");
    for (const auto& [key, value] : lc.experiment.items()) {
      if (key != "fees" && key != "samples" && key != "grid" && key != "seed") {
        throw UsageError(opt.config + ": experiment: unknown key \"" + key + "\"");
      }
    }
  }
  return lc;
}

std::vector<double> parse_fee_list(const std::string& text) {
  std::vector<double> fees;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || errno != 0 || *end != '\0' || !std::isfinite(v)) {
      throw UsageError("--fees: cannot parse \"" + item + "\"");
    }
    fees.push_back(v);
  }
  if (fees.empty()) throw UsageError("--fees: empty list");
  return fees;
}

template <typename T>
T experiment_value(const LoadedConfig& lc, const char* key, const std::optional<T>& flag, T fallback) {
  if (flag) return *flag;
  if (lc.experiment.contains(key)) {
    try {
      return lc.experiment.at(key).get<T>();
    } catch (const json::exception&) {
      throw UsageError(std::string("experiment.") + key + ": wrong type");
    }
  }
  return fallback;
}

std::vector<double> fee_list(const Options& opt, const LoadedConfig& lc, std::vector<double> fallback) {
  if (!opt.fees.empty()) return parse_fee_list(opt.fees);
  if (lc.experiment.contains("fees")) {
    try {
      return lc.experiment.at("fees").get<std::vector<double>>();
    } catch (const json::exception&) {
      throw UsageError("experiment.fees: expected an array of numbers");
    }
  }
  return fallback;
}

void require_valid(const MarketParams& params) {
  if (const std::string e = params.validation_error(); !e.empty()) throw UsageError("invalid market params: " + e);
}

void require_fees_in_range(const std::vector<double>& fees, const MarketParams& params) {
  for (double f : fees) {
    if (!(f >= 0.0) || f > params.f_max) throw UsageError("fee " + fmt(f) + " outside [0, f_max]");
  }
}

// Sends each named output either to a file under --out or to stdout.
class Sink {
 public:
  Sink(const Options& opt, std::ostream& out) : dir_(opt.out_dir), out_(out) {}

  bool to_stdout() const { return dir_.empty(); }

  std::string path_for(const std::string& name) const {
    return dir_.empty() ? "-" : (std::filesystem::path(dir_) / name).string();
  }

  void write(const std::string& name, const std::string& content) {
    if (dir_.empty()) {
      out_ << content;
      return;
    }
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    const std::string path = path_for(name);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write output: " + path);
    f << content;
  }

 private:
  std::string dir_;
  std::ostream& out_;
};

json manifest_json(const RunManifest& m) {
  return {{"command", m.command},
          {"config_hash", m.config_hash},
          {"seed", m.seed},
          {"version", m.version},
          {"outputs", m.outputs}};
}

RunManifest make_manifest(const std::string& command, const LoadedConfig& lc, std::uint64_t seed, const Sink& sink,
                          const std::vector<std::string>& names) {
  RunManifest m;
  m.command = command;
  m.config_hash = lc.hash;
  m.seed = seed;
  // Bare file names keep the manifest independent of where outputs land.
  for (const auto& n : names) m.outputs.push_back(sink.to_stdout() ? "-" : n);
  return m;
}

int cmd_formulas(const Options& opt, std::ostream& out) {
  const LoadedConfig lc = load_config(opt);
  const MarketParams& p = lc.sim.market;
  require_valid(p);
  std::vector<double> fees;
  if (!opt.fees.empty() || lc.experiment.contains("fees")) {
    fees = fee_list(opt, lc, {});
  } else {
    const std::size_t n = experiment_value<std::size_t>(lc, "grid", opt.grid, 51);
    if (n < 2) throw UsageError("--grid must be at least 2");
    for (std::size_t i = 0; i < n; ++i) fees.push_back(p.f_max * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  require_fees_in_range(fees, p);

  Sink sink(opt, out);
  const RunManifest m = make_manifest("formulas", lc, 0, sink, {"formulas.csv"});
  std::string csv = m.header_line() + "\nf,ap0,ae0,ratio,H0\n";
  for (double f : fees) {
    const double h0 = noise_volume_per_value(f, lc.sim.initial_liquidity, p, lc.sim.initial_price);
    csv += fmt(f) + "," + fmt(ap0(f, p)) + "," + fmt(ae0(f, p)) + "," + fmt(excess_ratio(f, p)) + "," + fmt(h0) + "\n";
  }
  sink.write("formulas.csv", csv);
  return kExitOk;
}

int cmd_mc_validate(const Options& opt, std::ostream& out, std::ostream& err) {
  const LoadedConfig lc = load_config(opt);
  const MarketParams& p = lc.sim.market;
  require_valid(p);
  const auto n = experiment_value<std::uint64_t>(lc, "samples", opt.samples, 1'000'000);
  if (n < kMinMcSamples) throw UsageError("--samples must be at least 10000");
  const std::vector<double> fees = fee_list(opt, lc, {0.0, 0.001, 0.003, 0.01});
  require_fees_in_range(fees, p);
  McOptions mc;
  mc.seed = experiment_value<std::uint64_t>(lc, "seed", opt.seed, mc.seed);

  // The closed forms are evaluated with a possibly perturbed sigma so that the
  // gate can be shown to fail.
  MarketParams closed = p;
  closed.sigma *= opt.corrupt_sigma;

  Sink sink(opt, out);
  const RunManifest m = make_manifest("mc-validate", lc, mc.seed, sink, {"mc_validate.csv"});
  std::string csv = m.header_line() +
                    "\nf,n,ap0_closed,ap0_mc,ap0_se,ap0_z,ae0_closed,ae0_mc,ae0_se,ae0_z,pass\n";
  bool all_pass = true;
  for (double f : fees) {
    const McRates r = mc_rates(f, p, n, mc);
    const double ap = ap0(f, closed), ae = ae0(f, closed);
    auto zscore = [](double est, double ref, double se) { return se > 0.0 ? (est - ref) / se : (est == ref ? 0.0 : INFINITY); };
    const double zp = zscore(r.ap0_hat, ap, r.ap0_se);
    const double ze = zscore(r.ae0_hat, ae, r.ae0_se);
    const bool pass = std::abs(zp) <= 3.0 && std::abs(ze) <= 3.0;
    all_pass = all_pass && pass;
    csv += fmt(f) + "," + std::to_string(n) + "," + fmt(ap) + "," + fmt(r.ap0_hat) + "," + fmt(r.ap0_se) + "," +
           fmt(zp) + "," + fmt(ae) + "," + fmt(r.ae0_hat) + "," + fmt(r.ae0_se) + "," + fmt(ze) + "," +
           (pass ? "1" : "0") + "\n";
  }
  sink.write("mc_validate.csv", csv);
  if (!all_pass) err << "mc-validate: at least one estimate is more than 3 standard errors from the closed form\n";
  return all_pass ? kExitOk : kExitValidationFailed;
}

int cmd_equilibrium(const Options& opt, std::ostream& out, std::ostream& err) {
  const LoadedConfig lc = load_config(opt);
  const MarketParams& p = lc.sim.market;
  require_valid(p);
  const std::size_t grid = experiment_value<std::size_t>(lc, "grid", opt.grid, 64);
  if (grid < 16) throw UsageError("--grid must be at least 16");

  const DominanceReport rep = dominance_report(p, grid);
  if (!rep.am.converged) {
    err << "equilibrium: solver failure: " << rep.am.diagnostics << "\n";
    return kExitSolverFailure;
  }
  for (const auto& row : rep.rows) {
    if (row.status == EquilibriumStatus::bracket_failure) {
      err << "equilibrium: fixed-fee solver could not bracket a root at f=" << fmt(row.fee) << "\n";
      return kExitSolverFailure;
    }
  }

  Sink sink(opt, out);
  const RunManifest m = make_manifest("equilibrium", lc, 0, sink, {"dominance.csv", "equilibrium_summary.json"});
  json summary = {{"manifest", manifest_json(m)},
                  {"L_star", rep.am.L_star},
                  {"R_star", rep.am.R_star},
                  {"f_star", rep.am.f_star},
                  {"f_opt", rep.am.f_opt},
                  {"L_max", rep.am.L_max},
                  {"R_max", rep.am.R_max},
                  {"f_ff", rep.am.f_ff},
                  {"headline_margin", rep.headline_margin},
                  {"lp_residual", rep.lp_residual},
                  {"mgr_residual", rep.mgr_residual},
                  {"grid", grid},
                  {"holds", rep.holds}};
  sink.write("dominance.csv", m.header_line() + "\n" + dominance_csv(rep));
  if (opt.out_dir.empty()) {
    err << summary.dump(2) << "\n";
  } else {
    sink.write("equilibrium_summary.json", summary.dump(2) + "\n");
  }
  if (!rep.holds) err << "equilibrium: dominance does not hold on the grid\n";
  return rep.holds ? kExitOk : kExitValidationFailed;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  if (opt.config.empty()) throw UsageError("simulate requires --config");
  LoadedConfig lc = load_config(opt);
  if (opt.seed) lc.sim.seed = *opt.seed;

  Sink sink(opt, out);
  std::vector<std::string> names = {"sim_report.json"};
  if (lc.sim.record_blocks) names.push_back("sim_blocks.csv");
  const RunManifest m = make_manifest("simulate", lc, lc.sim.seed, sink, names);
  const SimReport rep = run_sim(lc.sim);
  json j = to_json(rep);
  j["manifest"] = manifest_json(m);
  j["config"] = to_json(lc.sim);
  sink.write("sim_report.json", j.dump(2) + "\n");
  if (lc.sim.record_blocks) sink.write("sim_blocks.csv", m.header_line() + "\n" + block_records_csv(rep));
  return kExitOk;
}

int cmd_replay(const Options& opt, std::ostream& out) {
  const std::string text = read_file(opt.scenario, "scenario file");
  LoadedConfig lc;
  lc.hash = fnv1a_64_hex(text);
  std::istringstream in(text);
  ReplayResult result;
  try {
    result = replay_auction(in);
  } catch (const ReplayError& e) {
    throw UsageError(opt.scenario + ": " + e.what());
  }
  Sink sink(opt, out);
  std::vector<std::string> names = {"replay_trace.csv"};
  if (!opt.out_dir.empty()) names.push_back("replay_state.json");
  const RunManifest m = make_manifest("replay", lc, 0, sink, names);
  sink.write("replay_trace.csv", m.header_line() + "\n" + result.trace_csv);
  if (!opt.out_dir.empty()) sink.write("replay_state.json", result.final_state.serialize() + "\n");
  return kExitOk;
}

int cmd_withdrawal(const Options& opt, std::ostream& out, std::ostream& err) {
  LoadedConfig lc = load_config(opt);
  if (opt.config.empty()) lc.sim.auction.withdrawal_fee = withdrawal_fee_required(1.0 + lc.sim.market.f_max);
  if (opt.seed) lc.sim.seed = *opt.seed;
  const std::size_t grid = experiment_value<std::size_t>(lc, "grid", opt.grid, 201);
  if (grid < 3) throw UsageError("--grid must be at least 3");

  Sink sink(opt, out);
  const RunManifest m = make_manifest("withdrawal", lc, lc.sim.seed, sink, {"withdrawal_attack.csv"});
  const WithdrawalAttackReport rep = run_strategic_withdrawal_attack(lc.sim, grid);
  sink.write("withdrawal_attack.csv", m.header_line() + "\n" + withdrawal_attack_csv(rep));
  err << "withdrawal: fee " << fmt(rep.withdrawal_fee) << ", required " << fmt(rep.required_fee)
      << ", max grid gain " << fmt(rep.max_net_gain) << ", max simulated gain " << fmt(rep.max_simulated_gain)
      << " over " << rep.simulated_moves << " moves\n";
  return rep.protected_within_cap ? kExitOk : kExitValidationFailed;
}

}  // namespace

std::string fnv1a_64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunManifest::header_line() const { return "# manifest " + manifest_json(*this).dump(); }

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Auction-managed AMM toolkit: formulas, Monte-Carlo checks, equilibria, simulation, auction replay"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON config file");
    sub->add_option("--out", opt.out_dir, "Output directory (default: stdout)");
  };

  auto* formulas = app.add_subcommand("formulas", "Tabulate AP0, AE0, their ratio and H0 over a fee grid");
  add_common(formulas);
  formulas->add_option("--fees", opt.fees, "Comma-separated fee list");
  formulas->add_option("--grid", opt.grid, "Number of evenly spaced fees in [0, f_max]");

  auto* mc = app.add_subcommand("mc-validate", "Compare Monte-Carlo rates with the closed forms");
  add_common(mc);
  mc->add_option("--fees", opt.fees, "Comma-separated fee list");
  mc->add_option("--samples", opt.samples, "Samples per fee (at least 10000)");
  mc->add_option("--seed", opt.seed, "RNG seed");
  mc->add_option("--corrupt-sigma", opt.corrupt_sigma)->group("");

  auto* eq = app.add_subcommand("equilibrium", "Solve both equilibria and report liquidity dominance");
  add_common(eq);
  eq->add_option("--grid", opt.grid, "Number of fees in the dominance grid");

  auto* sim = app.add_subcommand("simulate", "Run the block-level simulation");
  add_common(sim);
  sim->add_option("--seed", opt.seed, "Override the config seed");

  auto* replay = app.add_subcommand("replay", "Replay a JSON-lines auction scenario");
  replay->add_option("scenario", opt.scenario, "Scenario file")->required();
  replay->add_option("--out", opt.out_dir, "Output directory (default: stdout)");

  auto* wd = app.add_subcommand("withdrawal", "Strategic-withdrawal attack against the withdrawal fee");
  add_common(wd);
  wd->add_option("--grid", opt.grid, "Number of price ratios");
  wd->add_option("--seed", opt.seed, "Override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (formulas->parsed()) return cmd_formulas(opt, out);
    if (mc->parsed()) return cmd_mc_validate(opt, out, err);
    if (eq->parsed()) return cmd_equilibrium(opt, out, err);
    if (sim->parsed()) return cmd_simulate(opt, out);
    if (replay->parsed()) return cmd_replay(opt, out);
    if (wd->parsed()) return cmd_withdrawal(opt, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace amamm

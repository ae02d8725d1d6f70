#include "amamm/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "amamm/amm_core.hpp"
#include "running_moments.hpp"

namespace amamm {
namespace {

void require_fee(double fee, const char* what) {
  if (!(fee >= 0.0) || !std::isfinite(fee)) {
    throw std::domain_error(std::string(what) + ": fee must be non-negative");
  }
}

// (e^{f/2} + e^{-f/2}) / (2 (1 - sigma^2 dt / 8)): expected profit given a trade.
double conditional_trade_value(double fee, const MarketParams& params) {
  return std::cosh(fee / 2.0) / (1.0 - params.sigma * params.sigma * params.delta_t / 8.0);
}

double cosh_gap(double u) {
  const double s = std::sinh(u / 4.0);
  return 4.0 * s * s;
}

using detail::RunningMoments;

}  // namespace

std::string MarketParams::validation_error() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) return "sigma must be non-negative";
  if (!(delta_t > 0.0) || !std::isfinite(delta_t)) return "delta_t must be positive";
  if (!(sigma * sigma * delta_t < 8.0)) return "validity condition sigma^2 * delta_t < 8 violated";
  if (!(r >= 0.0) || !std::isfinite(r)) return "r must be non-negative";
  if (!(f_max >= 0.0) || !std::isfinite(f_max)) return "f_max must be non-negative";
  if (!(c0 > 0.0) || !std::isfinite(c0)) return "c0 must be positive";
  if (!(c1 > 0.0) || !std::isfinite(c1)) return "c1 must be positive";
  if (!(alpha > 0.0 && alpha < 1.0)) return "alpha must lie strictly inside (0, 1)";
  return {};
}

void MarketParams::validate() const {
  if (auto err = validation_error(); !err.empty()) throw std::domain_error("MarketParams: " + err);
}

MarketParams reference_params() { return {}; }

double noise_volume(double fee, double liquidity, const MarketParams& params) {
  require_fee(fee, "noise_volume");
  if (!(liquidity >= 0.0)) throw std::domain_error("noise_volume: liquidity must be non-negative");
  return params.c0 * std::pow(liquidity, params.alpha) * std::exp(-params.c1 * fee);
}

double noise_volume_per_value(double fee, double liquidity, const MarketParams& params,
                              double price) {
  return noise_volume(fee, liquidity, params) / pool_value(liquidity, price);
}

double fee_to_vol_ratio(double fee, const MarketParams& params) {
  return fee / (params.sigma * std::sqrt(params.delta_t / 2.0));
}

double ap0(double fee, const MarketParams& params) {
  require_fee(fee, "ap0");
  params.validate();
  if (params.sigma == 0.0) return 0.0;
  const double kappa = fee_to_vol_ratio(fee, params);
  return params.sigma * params.sigma / 8.0 / (1.0 + kappa) * conditional_trade_value(fee, params);
}

double ae0(double fee, const MarketParams& params) {
  require_fee(fee, "ae0");
  params.validate();
  if (params.sigma == 0.0) return 0.0;
  const double kappa = fee_to_vol_ratio(fee, params);
  return params.sigma * params.sigma / 8.0 * std::exp(-kappa) * conditional_trade_value(fee, params);
}

double excess_ratio(double fee, const MarketParams& params) {
  require_fee(fee, "excess_ratio");
  params.validate();
  if (params.sigma == 0.0) return fee == 0.0 ? 1.0 : 0.0;
  const double kappa = fee_to_vol_ratio(fee, params);
  return (1.0 + kappa) * std::exp(-kappa);
}

double conditional_excess(double sigma, double tau, double fee, ExcessSide side) {
  require_fee(fee, "conditional_excess");
  if (!(tau >= 0.0) || !(sigma >= 0.0)) {
    throw std::domain_error("conditional_excess: sigma and tau must be non-negative");
  }
  const double s = sigma * std::sqrt(tau);
  if (s == 0.0) return 0.0;
  const double growth = std::exp(s * s / 8.0);
  const double lo = fee / s;
  // E[A+/V | tau] = e^{s^2/8} Phi(s/2 - f/s) / 2 - e^{f/2} Phi(-f/s)
  //               + e^f e^{s^2/8} Phi(-s/2 - f/s) / 2
  const double plus = 0.25 * growth * std::erfc((lo - s / 2.0) / std::sqrt(2.0)) -
                      0.5 * std::exp(fee / 2.0) * std::erfc(lo / std::sqrt(2.0)) +
                      0.25 * std::exp(fee) * growth * std::erfc((lo + s / 2.0) / std::sqrt(2.0));
  const double value = std::max(0.0, plus);
  return side == ExcessSide::plus ? value : std::exp(-fee) * value;
}

double excess_per_value(double z, double fee, ExcessSide side) {
  if (side == ExcessSide::plus) {
    return z > fee ? 0.5 * std::exp(fee / 2.0) * cosh_gap(z - fee) : 0.0;
  }
  return z < -fee ? 0.5 * std::exp(-fee / 2.0) * cosh_gap(z + fee) : 0.0;
}

double full_correction_per_value(double z) { return 0.5 * cosh_gap(z); }

MispricingSample sample_block(const MarketParams& params, const CounterRng& rng, std::uint64_t index) {
  const auto u = rng.uniform_pair(index);
  MispricingSample s;
  s.tau = exponential_from_uniform(u[0], params.delta_t);
  s.z = params.sigma * std::sqrt(s.tau) * standard_normal_from_uniform(u[1]);
  return s;
}

McRates mc_rates(double fee, const MarketParams& params, std::uint64_t n_samples,
                 const McOptions& options) {
  require_fee(fee, "mc_rates");
  params.validate();
  if (n_samples < kMinMcSamples) throw std::invalid_argument("mc_rates: n_samples below 10^4");
  if (options.batches < 2 || options.batches > n_samples) {
    throw std::invalid_argument("mc_rates: batch count must lie in [2, n_samples]");
  }

  const double inv_dt = 1.0 / params.delta_t;
  McRates out;
  out.n_samples = n_samples;

  // Fresh-start blocks: the manager resets z to 0 before every block.
  const CounterRng fresh(options.seed, 0);
  RunningMoments excess, lvr;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const double z = sample_block(params, fresh, i).z;
    excess.add(excess_per_value(z, fee, ExcessSide::plus) + excess_per_value(z, fee, ExcessSide::minus));
    lvr.add(full_correction_per_value(z));
  }
  out.ae0_hat = excess.mean() * inv_dt;
  out.ae0_se = excess.standard_error() * inv_dt;
  out.lvr_hat = lvr.mean() * inv_dt;
  out.lvr_se = lvr.standard_error() * inv_dt;

  // Fixed-fee chain: arbitrageurs push the mispricing back to the band edge.
  std::uint64_t burn_in = options.burn_in;
  if (burn_in == 0) {
    const double step = params.sigma * std::sqrt(params.delta_t);
    const double mixing = step > 0.0 ? std::pow(2.0 * fee / step, 2) : 0.0;
    burn_in = static_cast<std::uint64_t>(std::clamp(20.0 * mixing, 1000.0, 1e6));
  }
  const CounterRng chain_rng(options.seed, 1);
  double z = 0.0;
  auto step_chain = [&](std::uint64_t index) {
    z += sample_block(params, chain_rng, index).z;
    double profit = 0.0;
    if (z > fee) {
      profit = excess_per_value(z, fee, ExcessSide::plus);
      z = fee;
    } else if (z < -fee) {
      profit = excess_per_value(z, fee, ExcessSide::minus);
      z = -fee;
    }
    return profit;
  };
  for (std::uint64_t i = 0; i < burn_in; ++i) step_chain(i);

  const std::uint64_t batch_len = n_samples / options.batches;
  RunningMoments batch_means;
  double total = 0.0, batch_sum = 0.0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const double p = step_chain(burn_in + i);
    total += p;
    if (i < batch_len * options.batches) {
      batch_sum += p;
      if ((i + 1) % batch_len == 0) {
        batch_means.add(batch_sum / static_cast<double>(batch_len));
        batch_sum = 0.0;
      }
    }
  }
  out.ap0_hat = total / static_cast<double>(n_samples) * inv_dt;
  out.ap0_se = batch_means.standard_error() * inv_dt;
  return out;
}

}  // namespace amamm

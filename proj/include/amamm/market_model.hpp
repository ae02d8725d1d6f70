// Closed-form market model: noise-trader demand, arbitrage profit and
// arbitrage excess rates, and the stochastic block/mispricing primitives used
// to verify them by simulation.
//
// Time is measured in days: sigma is per sqrt(day), delta_t in days, r per
// day. Every rate returned here is per unit of pool value per day.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amamm/rng.hpp"

namespace amamm {

struct MarketParams {
  double sigma = 0.05;
  double delta_t = 0.01;
  double r = 1e-4;
  double f_max = 0.05;
  double c0 = 25.0;
  double c1 = 120.0;
  double alpha = 0.5;

  // Empty string when valid, otherwise the first violated constraint.
  std::string validation_error() const;
  void validate() const;  // throws std::domain_error
};

// Reference parameters used throughout the test and acceptance suites.
MarketParams reference_params();

/// H(f, L) = c0 L^alpha exp(-c1 f): noise volume in numéraire per day.
double noise_volume(double fee, double liquidity, const MarketParams& params);

/// H0(f, L) = H(f, L) / V(L), with V evaluated at `price`.
double noise_volume_per_value(double fee, double liquidity, const MarketParams& params,
                              double price = 1.0);

/// kappa = f / (sigma sqrt(dt/2)).
double fee_to_vol_ratio(double fee, const MarketParams& params);

/// AP0(f): arbitrage profit rate of a fixed-fee pool.
double ap0(double fee, const MarketParams& params);

/// AE0(f): arbitrage excess rate, i.e. profit leaked to outside arbitrageurs
/// when the manager resets the mispricing every block.
double ae0(double fee, const MarketParams& params);

/// AE0/AP0 = (1 + kappa) e^-kappa.
double excess_ratio(double fee, const MarketParams& params);

enum class ExcessSide { plus, minus };

// E[A±/V | tau] for z ~ N(0, sigma^2 tau), in closed form via erf.
double conditional_excess(double sigma, double tau, double fee, ExcessSide side);

// A±/V at a given log mispricing; the integrand behind conditional_excess.
double excess_per_value(double z, double fee, ExcessSide side);

// Value transferred to arbitrageurs per unit pool value when the mispricing z
// is fully corrected at zero fee: (e^{z/2} - 2 + e^{-z/2}) / 2.
double full_correction_per_value(double z);

struct MispricingSample {
  double tau = 0.0;
  double z = 0.0;
};

// Draw `index` of the (seed, stream) sequence: tau ~ Exp(mean dt), z ~ N(0, sigma^2 tau).
MispricingSample sample_block(const MarketParams& params, const CounterRng& rng, std::uint64_t index);

struct McRates {
  double ap0_hat = 0.0;
  double ap0_se = 0.0;
  double ae0_hat = 0.0;
  double ae0_se = 0.0;
  // Zero-fee full-correction rate; estimates AP0(0) whatever the fee.
  double lvr_hat = 0.0;
  double lvr_se = 0.0;
  std::uint64_t n_samples = 0;
};

struct McOptions {
  std::uint64_t seed = 20240601;
  std::size_t batches = 100;
  std::uint64_t burn_in = 0;  // 0 selects a default from the band mixing time
};

// Monte-Carlo estimates of AP0(f) and AE0(f).
//
// ae0_hat and lvr_hat average iid blocks starting from zero mispricing.
// ap0_hat follows one fixed-fee chain in which arbitrageurs trade only to the
// band edge and the residual mispricing carries into the next block; its
// standard error comes from batch means.
McRates mc_rates(double fee, const MarketParams& params, std::uint64_t n_samples,
                 const McOptions& options = {});

inline constexpr std::uint64_t kMinMcSamples = 10'000;

}  // namespace amamm

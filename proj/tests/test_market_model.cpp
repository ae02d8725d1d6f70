#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

#include "amamm/market_model.hpp"

using namespace amamm;
using boost::math::quadrature::gauss_kronrod;

namespace {

// E[A±/V | tau] by adaptive quadrature of the excess integrand against the
// N(0, sigma^2 tau) density. The integrand is written out here from the
// excess definition, not taken from the library.
double quadrature_excess(double sigma, double tau, double f, ExcessSide side) {
  const double s = sigma * std::sqrt(tau);
  const double sgn = side == ExcessSide::plus ? 1.0 : -1.0;
  auto g = [&](double u) {  // u = |z| beyond the band, z = sgn (f + u)
    const double z = sgn * (f + u);
    const double a = 0.5 * std::exp(sgn * f / 2.0) * (std::exp(u / 2.0) - 2.0 + std::exp(-u / 2.0));
    return a * std::exp(-z * z / (2.0 * s * s)) / (s * std::sqrt(2.0 * M_PI));
  };
  return gauss_kronrod<double, 61>::integrate(g, 0.0, 40.0 * s, 15, 1e-12);
}

double tau_integrated_excess_rate(double fee, const MarketParams& p) {
  auto g = [&](double tau) {
    if (tau <= 0.0) return 0.0;
    const double both = conditional_excess(p.sigma, tau, fee, ExcessSide::plus) +
                        conditional_excess(p.sigma, tau, fee, ExcessSide::minus);
    return both * std::exp(-tau / p.delta_t) / p.delta_t;
  };
  return gauss_kronrod<double, 61>::integrate(g, 0.0, 80.0 * p.delta_t, 12, 1e-11) / p.delta_t;
}

}  // namespace

TEST_CASE("noise demand") {
  MarketParams p = reference_params();
  p.c0 = 1.0;
  CHECK(noise_volume(0.0, 1.0, p) == 1.0);
  p = reference_params();
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> fd(0.0, 0.05), ld(-6.0, 6.0);
  for (int i = 0; i < 500; ++i) {
    const double f = fd(gen), L = std::exp(ld(gen));
    CHECK(noise_volume(f, L, p) / noise_volume(0.0, L, p) == doctest::Approx(std::exp(-p.c1 * f)).epsilon(1e-13));
    CHECK(noise_volume_per_value(f, 2.0 * L, p) < noise_volume_per_value(f, L, p));
  }
  // H0 grows without bound as L -> 0.
  double prev = 0.0;
  for (int k = 0; k <= 12; ++k) {
    const double h0 = noise_volume_per_value(0.01, std::pow(10.0, -k), p);
    CHECK(h0 > prev);
    prev = h0;
  }
  CHECK(prev > 1e6);
  // H decreasing in f.
  for (int i = 1; i < 100; ++i) CHECK(noise_volume(0.0005 * i, 3.0, p) < noise_volume(0.0005 * (i - 1), 3.0, p));
}

TEST_CASE("closed-form rates match independent high-precision values") {
  // 30-digit evaluations of the published formulas at the reference params.
  const MarketParams p = reference_params();
  struct Row {
    double f, ap0, ae0;
  };
  const Row rows[] = {
      {0.0, 0.00031250097656555176735, 0.00031250097656555176735},
      {0.001, 0.0002436004138226395947, 0.00023551273930498417426},
      {0.003, 0.00016905413653303863001, 0.00013376447199534303218},
      {0.01, 0.000081627486341826280456, 0.000018470834404272349491},
      {0.05, 0.000020644289945283858144, 2.2549432579803899782e-10},
  };
  for (const Row& r : rows) {
    CAPTURE(r.f);
    CHECK(std::abs(ap0(r.f, p) / r.ap0 - 1.0) <= 1e-13);
    CHECK(std::abs(ae0(r.f, p) / r.ae0 - 1.0) <= 1e-12);
  }
}

TEST_CASE("rate identities and limits") {
  MarketParams p = reference_params();
  const double s2 = p.sigma * p.sigma;
  CHECK(ap0(0.0, p) == doctest::Approx(s2 / 8.0 / (1.0 - s2 * p.delta_t / 8.0)).epsilon(1e-15));
  CHECK(ae0(0.0, p) == ap0(0.0, p));
  p.delta_t = 1e-12;
  CHECK(ap0(0.0, p) == doctest::Approx(s2 / 8.0).epsilon(1e-12));

  p = reference_params();
  const double kappa_one = p.sigma * std::sqrt(p.delta_t / 2.0);
  CHECK(fee_to_vol_ratio(kappa_one, p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(excess_ratio(kappa_one, p) == doctest::Approx(0.7357588823428847).epsilon(1e-13));
  CHECK(excess_ratio(0.0, p) == 1.0);

  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> sd(0.005, 0.2), dd(0.001, 0.1), fd(0.0, 0.05);
  for (int i = 0; i < 500; ++i) {
    p.sigma = sd(gen);
    p.delta_t = dd(gen);
    const double f = fd(gen);
    CHECK(std::abs(excess_ratio(f, p) * ap0(f, p) - ae0(f, p)) <= 1e-12 * ae0(f, p) + 1e-300);
  }
}

TEST_CASE("monotonicity and strict excess dominance on a dense grid") {
  const MarketParams p = reference_params();
  double prev_ap = ap0(0.0, p), prev_ae = ae0(0.0, p);
  for (int i = 1; i <= 5000; ++i) {
    const double f = p.f_max * i / 5000.0;
    const double a = ap0(f, p), e = ae0(f, p);
    CHECK(a < prev_ap);
    CHECK(e < prev_ae);
    CHECK(e < a);
    prev_ap = a;
    prev_ae = e;
  }
}

TEST_CASE("parameter validation") {
  MarketParams p = reference_params();
  CHECK(p.validation_error().empty());
  p.sigma = 2.0;
  p.delta_t = 2.0;  // sigma^2 dt = 8
  CHECK_FALSE(p.validation_error().empty());
  CHECK_THROWS_AS(ap0(0.0, p), std::domain_error);
  CHECK_THROWS_AS(ae0(0.0, p), std::domain_error);
  p = reference_params();
  p.alpha = 1.0;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  p = reference_params();
  CHECK_THROWS_AS(ap0(-0.001, p), std::domain_error);
  p.sigma = 0.0;
  CHECK(ap0(0.01, p) == 0.0);
  CHECK(ae0(0.01, p) == 0.0);
}

TEST_CASE("conditional excess equals 30-digit quadrature values") {
  struct Row {
    double sigma, tau, f, plus, minus;
  };
  const Row rows[] = {
      {0.05, 0.01, 0.003, 5.4159201597907406773e-7, 5.3996967465987145633e-7},
      {0.05, 0.01, 0.0, 1.5625024414087931335e-6, 1.5625024414087931335e-6},
      {0.02, 0.03, 0.001, 4.6245866536081024792e-7, 4.6199643784772493911e-7},
      {0.5, 2.0, 0.2, 0.022093863944528520987, 0.018088925865706306794},
  };
  for (const Row& r : rows) {
    CAPTURE(r.sigma);
    CAPTURE(r.f);
    // The closed form subtracts O(1) erfc terms, so its error is a few ulps
    // absolute rather than relative to the (small) result.
    CHECK(std::abs(conditional_excess(r.sigma, r.tau, r.f, ExcessSide::plus) - r.plus) <= 1e-11 * r.plus + 5e-16);
    CHECK(std::abs(conditional_excess(r.sigma, r.tau, r.f, ExcessSide::minus) - r.minus) <= 1e-11 * r.minus + 5e-16);
  }
}

TEST_CASE("conditional excess equals adaptive quadrature on random inputs") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> sd(0.005, 0.3), td(0.0005, 0.2), fd(0.0, 0.05);
  for (int i = 0; i < 300; ++i) {
    const double sigma = sd(gen), tau = td(gen), f = fd(gen);
    for (ExcessSide side : {ExcessSide::plus, ExcessSide::minus}) {
      const double closed = conditional_excess(sigma, tau, f, side);
      CHECK(closed >= 0.0);
      CHECK(std::abs(closed - quadrature_excess(sigma, tau, f, side)) <= 1e-8);
    }
  }
  CHECK(conditional_excess(0.05, 1e-14, 0.003, ExcessSide::plus) == 0.0);
  CHECK(conditional_excess(0.0, 0.01, 0.003, ExcessSide::minus) == 0.0);
}

TEST_CASE("integrating the conditional excess over block times reproduces AE0") {
  for (double sigma : {0.02, 0.05}) {
    for (double dt : {0.005, 0.01}) {
      MarketParams p = reference_params();
      p.sigma = sigma;
      p.delta_t = dt;
      for (double f : {0.0, 0.001, 0.003, 0.01, 0.05}) {
        CAPTURE(f);
        const double expected = ae0(f, p);
        const double integrated = tau_integrated_excess_rate(f, p);
        if (expected > 1e-200) CHECK(std::abs(integrated / expected - 1.0) <= 1e-6);
      }
    }
  }
}

TEST_CASE("full correction integrand") {
  CHECK(full_correction_per_value(0.0) == 0.0);
  CHECK(full_correction_per_value(0.1) == full_correction_per_value(-0.1));
  CHECK(full_correction_per_value(0.1) ==
        doctest::Approx(0.5 * (std::exp(0.05) - 2.0 + std::exp(-0.05))).epsilon(1e-12));
  CHECK(excess_per_value(0.01, 0.01, ExcessSide::plus) == 0.0);
  CHECK(excess_per_value(-0.02, 0.01, ExcessSide::plus) == 0.0);
  CHECK(excess_per_value(0.0, 0.0, ExcessSide::minus) == 0.0);
}

TEST_CASE("block samples") {
  const MarketParams p = reference_params();
  const CounterRng rng(99, 0);
  const int n = 1000000;
  double tau_sum = 0.0, w_sum = 0.0, w_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const MispricingSample s = sample_block(p, rng, i);
    REQUIRE(s.tau > 0.0);
    tau_sum += s.tau;
    const double w = s.z / std::sqrt(s.tau);
    w_sum += w;
    w_sq += w * w;
  }
  CHECK(std::abs(tau_sum / n - p.delta_t) <= 4.0 * p.delta_t / std::sqrt(double(n)));
  const double var = w_sq / n - (w_sum / n) * (w_sum / n);
  // Var of the sample variance of a normal is 2 sigma^4 / n.
  CHECK(std::abs(var - p.sigma * p.sigma) <= 4.0 * std::sqrt(2.0 / n) * p.sigma * p.sigma);

  const MispricingSample a = sample_block(p, rng, 12345), b = sample_block(p, CounterRng(99, 0), 12345);
  CHECK(a.tau == b.tau);
  CHECK(a.z == b.z);
}

TEST_CASE("Monte-Carlo rates") {
  const MarketParams p = reference_params();
  SUBCASE("reference fee within 3 standard errors") {
    const McRates r = mc_rates(0.003, p, 1000000);
    CHECK(std::abs(r.ap0_hat - ap0(0.003, p)) <= 3.0 * r.ap0_se);
    CHECK(std::abs(r.ae0_hat - ae0(0.003, p)) <= 3.0 * r.ae0_se);
    CHECK(std::abs(r.lvr_hat - ap0(0.0, p)) <= 3.0 * r.lvr_se);
    CHECK(r.n_samples == 1000000);
  }
  SUBCASE("zero fee: excess equals profit") {
    const McRates r = mc_rates(0.0, p, 200000);
    CHECK(std::abs(r.ae0_hat - r.ap0_hat) <= 3.0 * std::hypot(r.ae0_se, r.ap0_se));
  }
  SUBCASE("large fee: no excess") {
    const double f = 20.0 * p.sigma * std::sqrt(p.delta_t / 2.0);
    const McRates r = mc_rates(f, p, 100000);
    CHECK(r.ae0_hat <= 3.0 * r.ae0_se + 1e-300);
  }
  SUBCASE("sample floor and determinism") {
    CHECK_THROWS_AS(mc_rates(0.003, p, 9999), std::invalid_argument);
    const McRates a = mc_rates(0.003, p, 20000), b = mc_rates(0.003, p, 20000);
    CHECK(a.ap0_hat == b.ap0_hat);
    CHECK(a.ae0_se == b.ae0_se);
  }
}

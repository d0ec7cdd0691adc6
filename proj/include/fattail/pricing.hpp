#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fattail/distributions.hpp"
#include "fattail/sampler.hpp"

namespace fattail {

enum class OptionKind { vanilla, knock_out };

/// European call; knock-out contracts are up-and-out with barrier U > S0.
struct OptionContract {
  OptionKind kind = OptionKind::vanilla;
  double strike = 150.0;
  double barrier = std::numeric_limits<double>::infinity();
  double maturity = 0.03;
  double rate = 0.01;
  double spot = 150.0;
  double sigma = 0.1;

  void validate() const;
};

struct PriceEstimate {
  double price = 0.0;
  double mc_error = 0.0;  // population std of discounted payoffs / sqrt(M)
  std::size_t paths = 0;
  std::string model;
  /// e^{-rT} mean S(T); equals S0 when discounted prices are martingales.
  double discounted_terminal_mean = 0.0;
};

struct PricingOptions {
  double dt = 1e-3;
  double bound = default_support_bound;
  unsigned threads = 0;
};

double bs_call_analytic(const OptionContract& contract);

/// Number of Euler steps T / dt; throws ConfigError unless integral.
std::size_t steps_for_maturity(double maturity, double dt);

/// Risk-neutral Monte Carlo price: S follows the multiplicative Euler walk
/// with mu = r and standardized shocks of `shock_model`.
PriceEstimate price_vanilla_mc(const OptionContract& contract, const Distribution& shock_model,
                               std::size_t m, std::uint64_t seed, const PricingOptions& options = {});

/// Up-and-out call monitored at every grid time t_i: any S(t_i) > U voids
/// the payoff.
PriceEstimate price_knockout_mc(const OptionContract& contract, const Distribution& shock_model,
                                std::size_t m, std::uint64_t seed, const PricingOptions& options = {});

/// Prices `contract` on its own kind; dispatches to the two functions above.
PriceEstimate price_mc(const OptionContract& contract, const Distribution& shock_model, std::size_t m,
                       std::uint64_t seed, const PricingOptions& options = {});

/// Prices several contracts on one simulated ensemble. All contracts must
/// share maturity, rate, spot and sigma; they may differ in kind, strike and
/// barrier. Estimates are returned in input order.
std::vector<PriceEstimate> price_contracts_mc(std::span<const OptionContract> contracts,
                                              const Distribution& shock_model, std::size_t m,
                                              std::uint64_t seed, const PricingOptions& options = {});

struct MaturityRow {
  double maturity = 0.0;
  PriceEstimate gaussian;
  PriceEstimate non_gaussian;
  double ratio = 0.0;        // gaussian / non_gaussian
  double ratio_error = 0.0;  // first-order propagated 1-sigma
};

/// Gaussian baseline and `shock_model` priced at each maturity with common
/// random numbers (same seed for both).
std::vector<MaturityRow> maturity_scan(const OptionContract& contract_template,
                                       const Distribution& shock_model,
                                       std::span<const double> maturities, std::size_t m,
                                       std::uint64_t seed, const PricingOptions& options = {});

}  // namespace fattail

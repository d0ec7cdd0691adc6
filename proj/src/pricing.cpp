#include "fattail/pricing.hpp"

#include <cmath>
#include <algorithm>

#include "fattail/dynamics.hpp"
#include "fattail/error.hpp"
#include "fattail/special.hpp"

namespace fattail {

using special::normal_cdf;
namespace {

PriceEstimate summarize(const std::vector<double>& payoffs, double discounted_mean, const Distribution& model) {
  PriceEstimate est;
  est.paths = payoffs.size();
  est.model = model.describe();
  est.discounted_terminal_mean = discounted_mean;
  double mean = 0.0;
  for (double p : payoffs) mean += p;
  mean /= static_cast<double>(payoffs.size());
  double ss = 0.0;
  for (double p : payoffs) ss += (p - mean) * (p - mean);
  est.price = mean;
  est.mc_error = std::sqrt(ss / static_cast<double>(payoffs.size())) / std::sqrt(static_cast<double>(payoffs.size()));
  return est;
}

}  // namespace

void OptionContract::validate() const {
  if (!(strike > 0.0) || !std::isfinite(strike)) throw ConfigError("option: strike X must be positive");
  if (!(maturity > 0.0) || !std::isfinite(maturity)) throw ConfigError("option: maturity T must be positive");
  if (!(spot > 0.0) || !std::isfinite(spot)) throw ConfigError("option: spot S0 must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("option: sigma must be >= 0");
  if (!std::isfinite(rate)) throw ConfigError("option: rate must be finite");
  if (kind == OptionKind::knock_out && !(barrier > spot))
    throw ConfigError("option: knock-out barrier U must exceed S0 (contract would be born knocked out)");
}

double bs_call_analytic(const OptionContract& c) {
  if (c.kind != OptionKind::vanilla) throw UnsupportedError("bs_call_analytic: only vanilla calls have a closed form here");
  c.validate();
  const double discount = std::exp(-c.rate * c.maturity);
  const double vol = c.sigma * std::sqrt(c.maturity);
  if (vol == 0.0) return std::max(c.spot - c.strike * discount, 0.0);
  const double d1 = (std::log(c.spot / c.strike) + (c.rate + 0.5 * c.sigma * c.sigma) * c.maturity) / vol;
  const double d2 = d1 - vol;
  return c.spot * normal_cdf(d1) - c.strike * discount * normal_cdf(d2);
}

std::size_t steps_for_maturity(double maturity, double dt) {
  if (!(maturity > 0.0) || !(dt > 0.0)) throw ConfigError("maturity and dt must be positive");
  const double ratio = maturity / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("T / dt = " + std::to_string(ratio) + " is not a positive integer");
  return static_cast<std::size_t>(rounded);
}

std::vector<PriceEstimate> price_contracts_mc(std::span<const OptionContract> contracts, const Distribution& model,
                                              std::size_t m, std::uint64_t seed, const PricingOptions& options) {
  if (contracts.empty()) return {};
  if (m < 1) throw ParameterDomainError("pricing: M must be >= 1");
  const OptionContract& first = contracts.front();
  for (const auto& c : contracts) {
    c.validate();
    if (c.maturity != first.maturity || c.rate != first.rate || c.spot != first.spot || c.sigma != first.sigma)
      throw ConfigError("price_contracts_mc: contracts must share T, r, S0 and sigma");
  }
  WalkConfig config;
  config.mode = WalkMode::multiplicative;
  config.mu = first.rate;
  config.sigma = first.sigma;
  config.dt = options.dt;
  config.n_steps = steps_for_maturity(first.maturity, options.dt);
  config.s0 = first.spot;
  config.shock_model = model;
  config.n_paths = m;
  config.bound = options.bound;

  EnsembleOptions eo;
  eo.track_running_max = true;
  eo.threads = options.threads;
  const PathEnsemble ens = simulate_ensemble(config, seed, eo);

  const double discount = std::exp(-first.rate * first.maturity);
  double terminal = 0.0;
  for (std::size_t i = 0; i < m; ++i) terminal += ens.at(i, 0);
  const double discounted_mean = discount * terminal / static_cast<double>(m);

  std::vector<PriceEstimate> out;
  std::vector<double> payoffs(m);
  for (const auto& c : contracts) {
    for (std::size_t i = 0; i < m; ++i) {
      const bool knocked = c.kind == OptionKind::knock_out && ens.running_max[i] > c.barrier;
      payoffs[i] = knocked ? 0.0 : discount * std::max(ens.at(i, 0) - c.strike, 0.0);
    }
    out.push_back(summarize(payoffs, discounted_mean, model));
  }
  return out;
}

PriceEstimate price_vanilla_mc(const OptionContract& contract, const Distribution& model, std::size_t m,
                               std::uint64_t seed, const PricingOptions& options) {
  OptionContract c = contract;
  c.kind = OptionKind::vanilla;
  return price_contracts_mc(std::span(&c, 1), model, m, seed, options).front();
}

PriceEstimate price_knockout_mc(const OptionContract& contract, const Distribution& model, std::size_t m,
                                std::uint64_t seed, const PricingOptions& options) {
  OptionContract c = contract;
  c.kind = OptionKind::knock_out;
  return price_contracts_mc(std::span(&c, 1), model, m, seed, options).front();
}

PriceEstimate price_mc(const OptionContract& contract, const Distribution& model, std::size_t m, std::uint64_t seed,
                       const PricingOptions& options) {
  return contract.kind == OptionKind::vanilla ? price_vanilla_mc(contract, model, m, seed, options)
                                              : price_knockout_mc(contract, model, m, seed, options);
}

std::vector<MaturityRow> maturity_scan(const OptionContract& contract_template, const Distribution& model,
                                       std::span<const double> maturities, std::size_t m, std::uint64_t seed,
                                       const PricingOptions& options) {
  std::vector<MaturityRow> rows;
  const Distribution gaussian = Distribution::gaussian();
  for (double t : maturities) {
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("maturity_scan: maturities must lie in (0, 1]");
    OptionContract c = contract_template;
    c.maturity = t;
    MaturityRow row;
    row.maturity = t;
    row.gaussian = price_mc(c, gaussian, m, seed, options);
    row.non_gaussian = price_mc(c, model, m, seed, options);
    row.ratio = row.gaussian.price / row.non_gaussian.price;
    const double rg = row.gaussian.mc_error / row.gaussian.price;
    const double rn = row.non_gaussian.mc_error / row.non_gaussian.price;
    row.ratio_error = std::abs(row.ratio) * std::sqrt(rg * rg + rn * rn);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fattail

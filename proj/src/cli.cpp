#include "fattail/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <istream>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fattail/csv.hpp"
#include "fattail/distributions.hpp"
#include "fattail/dynamics.hpp"
#include "fattail/error.hpp"
#include "fattail/pricing.hpp"
#include "fattail/sampler.hpp"
#include "fattail/stats.hpp"

#ifndef FATTAIL_GIT_DESCRIBE
#define FATTAIL_GIT_DESCRIBE "unknown"
#endif

namespace fattail::cli {
namespace {

using json = nlohmann::json;

constexpr std::uint64_t desk_sampling_m = 1'000'000;
constexpr std::uint64_t paper_sampling_m = 100'000'000;
constexpr std::uint64_t pricing_m = 100'000;
constexpr std::size_t fig9_resamples = 200;

const std::vector<Family> non_gaussian = {Family::student_t, Family::q_gaussian, Family::truncated_levy,
                                          Family::modified_weibull};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v))
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

double parse_positive(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (!(v > 0.0)) throw ConfigError(key + ": must be positive, got '" + text + "'");
  return v;
}

// Accepts integer notation and exact scientific forms such as 1e6.
std::uint64_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (!(v >= 1.0) || v > 9.007199254740992e15 || std::floor(v) != v)
    throw ConfigError(key + ": expected a positive integer, got '" + text + "'");
  return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

double shape_for(const RunConfig& c, Family f) {
  const bool daily = c.param_set == ParamSet::daily;
  switch (f) {
    case Family::student_t:
      return c.nu.value_or(daily ? 4.0 : 3.0);
    case Family::q_gaussian:
      return c.q.value_or(daily ? 1.4 : 1.5);
    case Family::truncated_levy:
      return c.lambda.value_or(daily ? 0.26 : 0.18);
    case Family::modified_weibull:
      return c.c.value_or(daily ? 0.85 : 0.75);
    case Family::gaussian:
      return 0.0;
  }
  return 0.0;
}

Distribution make_model(const RunConfig& c, Family f) {
  if (f == Family::truncated_levy && c.alpha && *c.alpha != 1.5) return standardize_tld(*c.alpha, shape_for(c, f));
  return standardize(f, shape_for(c, f));
}

// "all" expands to the four fat-tailed models, plus the Gaussian baseline
// where the experiment plots it.
std::vector<Family> selected(const RunConfig& c, bool with_gaussian) {
  if (c.model != "all") return {parse_family(c.model)};
  std::vector<Family> out;
  if (with_gaussian) out.push_back(Family::gaussian);
  out.insert(out.end(), non_gaussian.begin(), non_gaussian.end());
  return out;
}

std::uint64_t stream_for(Family f) { return static_cast<std::uint64_t>(f); }

std::string join(const std::vector<std::string>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += v[i];
  }
  return s;
}

class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  void write(const std::string& name, const CsvRow& row) {
    auto& sink = open(name);
    sink.out << row;
    ++sink.rows;
  }

  json manifest_files() {
    json files = json::array();
    for (const auto& name : order_) {
      auto& sink = *sinks_.at(name);
      sink.out.close();
      if (!sink.out) throw Error("failed writing " + (dir_ / name).string());
      files.push_back({{"name", name}, {"columns", output_schemas().at(name)}, {"rows", sink.rows}});
    }
    return files;
  }

  const std::vector<std::string>& names() const { return order_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  struct Sink {
    std::ofstream out;
    std::uint64_t rows = 0;
  };

  Sink& open(const std::string& name) {
    auto it = sinks_.find(name);
    if (it != sinks_.end()) return *it->second;
    auto sink = std::make_unique<Sink>();
    sink->out.open(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!sink->out) throw ConfigError("cannot write " + (dir_ / name).string());
    sink->out << join(output_schemas().at(name), ',') << '\n';
    order_.push_back(name);
    return *sinks_.emplace(name, std::move(sink)).first->second;
  }

  std::filesystem::path dir_;
  std::map<std::string, std::unique_ptr<Sink>> sinks_;
  std::vector<std::string> order_;
};

struct Context {
  const RunConfig& config;
  Outputs& out;
  std::ostream& log;
  json summary = json::object();
  json metadata = json::object();
};

std::uint64_t sampling_m(const RunConfig& c) { return c.m_list.front(); }

void run_fig1(Context& ctx) {
  const auto& c = ctx.config;
  for (Family f : selected(c, true)) {
    const Distribution d = make_model(c, f);
    for (int i = -500; i <= 500; ++i) {
      const double x = i * 0.02;
      ctx.out.write("pdf.csv", CsvRow().add(d.name()).add(x).add(pdf(d, x)));
    }
    if (f == Family::truncated_levy) {
      const auto& td = *std::get<TruncatedLevy>(d.model()).density;
      const auto xs = td.x_grid();
      const auto ps = td.p_values();
      for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i]) <= c.bound) ctx.out.write("tld_density.csv", CsvRow().add(xs[i]).add(ps[i]));
    }
    ctx.summary[d.name()] = {{"model", d.describe()}, {"variance", variance(d)}};
    ctx.log << d.describe() << '\n';
  }
}

SamplePool draw_pool(const RunConfig& c, Family f, std::uint64_t m) {
  RngStream rng(c.seed, stream_for(f), rng_domain::sampling);
  return sample_rejection(make_model(c, f), m, c.bound, rng);
}

void run_fig2(Context& ctx) {
  const auto& c = ctx.config;
  for (Family f : selected(c, false)) {
    const Distribution d = make_model(c, f);
    const SamplePool pool = draw_pool(c, f, sampling_m(c));
    const Histogram h = make_histogram(pool.values, -20.0, 20.0, 200);
    const auto dens = h.density();
    for (std::size_t b = 0; b < h.bins(); ++b)
      ctx.out.write("histograms.csv",
                    CsvRow().add(d.name()).add(h.bin_center(b)).add(dens[b]).add(pdf(d, h.bin_center(b))));
    ctx.summary[d.name()] = {{"model", d.describe()}, {"M", pool.size()}, {"acceptance_rate", pool.acceptance_rate},
                             {"normalization_s", pool.normalization_s}};
    ctx.log << d.name() << ": acceptance " << pool.acceptance_rate << ", s = " << pool.normalization_s << '\n';
  }
}

void run_fig3(Context& ctx) {
  const auto& c = ctx.config;
  const auto thresholds = log_spaced(0.01, c.bound, 120);
  for (Family f : selected(c, false)) {
    const Distribution d = make_model(c, f);
    const SamplePool pool = draw_pool(c, f, sampling_m(c));
    const auto ccdf = empirical_ccdf(pool.values, thresholds);
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      ctx.out.write("ccdf.csv", CsvRow().add(d.name()).add(thresholds[i]).add(ccdf.probabilities[i]));
    double slope = std::numeric_limits<double>::quiet_NaN();
    try {
      slope = tail_slope(empirical_ccdf(pool.values, log_spaced(5.0, 20.0, 30)), 5.0, 20.0);
    } catch (const InsufficientDataError&) {
    }
    ctx.out.write("tail_slopes.csv", CsvRow().add(d.name()).add(5.0).add(20.0).add(slope));
    ctx.summary[d.name()] = {{"model", d.describe()}, {"tail_slope_5_20", format_number(slope)}};
    ctx.log << d.name() << ": CCDF slope on [5, 20] = " << format_number(slope) << '\n';
  }
}

void run_fig4(Context& ctx) {
  const auto& c = ctx.config;
  for (Family f : selected(c, true)) {
    WalkConfig w;
    w.mode = WalkMode::multiplicative;
    w.mu = c.drift;
    w.sigma = c.sigma;
    w.dt = c.dt;
    w.n_steps = c.n_list.front();
    w.s0 = c.spot;
    w.shock_model = make_model(c, f);
    w.n_paths = c.m_list.front();
    w.bound = c.bound;
    EnsembleOptions o;
    o.full_paths = true;
    o.threads = c.threads;
    const PathEnsemble ens = simulate_ensemble(w, c.seed, o);
    const std::string name = w.shock_model.name();
    for (std::size_t p = 0; p < ens.n_paths(); ++p)
      for (std::size_t k = 0; k < ens.steps.size(); ++k)
        ctx.out.write("paths.csv", CsvRow().add(name).add(static_cast<std::uint64_t>(p)).add(ens.time(k)).add(ens.at(p, k)));
    ctx.summary[name] = {{"model", w.shock_model.describe()},
                         {"resampled_steps", ens.diagnostics.resampled_steps},
                         {"absorbed_paths", ens.diagnostics.absorbed_paths}};
  }
}

void run_convergence(Context& ctx, bool multiplicative) {
  const auto& c = ctx.config;
  const std::string prefix = multiplicative ? "mclt_" : "clt_";
  ConvergenceOptions o;
  o.dt = c.dt;
  o.n_resamples = c.resamples;
  o.bound = c.bound;
  o.threads = c.threads;
  for (Family f : selected(c, true)) {
    const Distribution d = make_model(c, f);
    const auto r = multiplicative ? mclt_report(d, c.n_list, c.m_list.front(), c.seed, o)
                                  : clt_report(d, c.n_list, c.m_list.front(), c.seed, o);
    for (const auto& m : r.moments)
      ctx.out.write(prefix + "moments.csv", CsvRow()
                                                .add(d.name())
                                                .add(static_cast<std::uint64_t>(m.n_steps))
                                                .add(m.time)
                                                .add(m.order)
                                                .add(m.sample_value)
                                                .add(m.ci.lower)
                                                .add(m.ci.upper)
                                                .add(m.prediction)
                                                .add(m.pass));
    for (const auto& h : r.histograms) {
      const auto dens = h.histogram.density();
      for (std::size_t b = 0; b < h.histogram.bins(); ++b)
        ctx.out.write(prefix + "histograms.csv", CsvRow()
                                                     .add(d.name())
                                                     .add(static_cast<std::uint64_t>(h.n_steps))
                                                     .add(h.histogram.bin_center(b))
                                                     .add(dens[b])
                                                     .add(h.limit_density[b]));
    }
    for (const auto& k : r.ks)
      ctx.out.write(prefix + "ks.csv", CsvRow()
                                           .add(d.name())
                                           .add(static_cast<std::uint64_t>(k.n_steps))
                                           .add(k.ks.statistic)
                                           .add(k.ks.p_value));
    json entry = {{"model", d.describe()},
                  {"normalization_s", r.normalization_s},
                  {"validity_horizon_lnM", r.validity_horizon},
                  {"resampled_steps", r.diagnostics.resampled_steps},
                  {"absorbed_paths", r.diagnostics.absorbed_paths},
                  {"shocks_materialized", r.diagnostics.materialized}};
    entry["crossover_N_star"] = r.crossover.is_infinite() ? json("inf") : json(r.crossover.value());
    ctx.summary[d.name()] = entry;
    std::size_t passed = 0;
    for (const auto& m : r.moments) passed += m.pass;
    ctx.log << d.name() << ": " << passed << "/" << r.moments.size() << " moment checks inside the "
            << c.resamples << "-resample BCa interval\n";
  }
  ctx.metadata["bootstrap"] = {{"method", "BCa"}, {"confidence", default_confidence}, {"resamples", c.resamples}};
}

OptionContract contract_from(const RunConfig& c, OptionKind kind, double maturity) {
  OptionContract k;
  k.kind = kind;
  k.strike = c.strike;
  k.barrier = kind == OptionKind::knock_out ? c.barrier : std::numeric_limits<double>::infinity();
  k.maturity = maturity;
  k.rate = c.rate;
  k.spot = c.spot;
  k.sigma = c.sigma;
  return k;
}

PricingOptions pricing_options(const RunConfig& c) {
  PricingOptions p;
  p.dt = c.dt;
  p.bound = c.bound;
  p.threads = c.threads;
  return p;
}

void write_price(Context& ctx, const std::string& model, double t, const PriceEstimate& p) {
  ctx.out.write("prices.csv", CsvRow().add(model).add(t).add(p.price).add(p.mc_error));
}

void run_prices(Context& ctx, OptionKind kind, bool with_ratio) {
  const auto& c = ctx.config;
  const auto families = selected(c, true);
  const bool has_gaussian = std::find(families.begin(), families.end(), Family::gaussian) != families.end();
  for (double t : c.maturities) {
    const OptionContract contract = contract_from(c, kind, t);
    contract.validate();
    std::optional<PriceEstimate> gaussian;
    if (with_ratio || has_gaussian)
      gaussian = price_mc(contract, Distribution::gaussian(), c.m_list.front(), c.seed, pricing_options(c));
    if (kind == OptionKind::vanilla) {
      const double bs = bs_call_analytic(contract);
      write_price(ctx, "black-scholes", t, PriceEstimate{bs, 0.0, 0, "black-scholes", 0.0});
      ctx.log << "T = " << t << "  black-scholes " << format_number(bs) << '\n';
    }
    for (Family f : families) {
      const Distribution d = make_model(c, f);
      const PriceEstimate p =
          f == Family::gaussian ? *gaussian : price_mc(contract, d, c.m_list.front(), c.seed, pricing_options(c));
      write_price(ctx, d.name(), t, p);
      ctx.summary[d.name() + "@T=" + format_number(t)] = {{"model", p.model},
                                                            {"discounted_terminal_mean", p.discounted_terminal_mean}};
      ctx.log << "T = " << t << "  " << d.name() << " " << format_number(p.price) << " +- "
              << format_number(p.mc_error) << '\n';
      if (with_ratio && f != Family::gaussian) {
        const double ratio = gaussian->price / p.price;
        const double rg = gaussian->mc_error / gaussian->price, rn = p.mc_error / p.price;
        ctx.out.write("ratio.csv", CsvRow()
                                       .add(d.name())
                                       .add(t)
                                       .add(gaussian->price)
                                       .add(gaussian->mc_error)
                                       .add(p.price)
                                       .add(p.mc_error)
                                       .add(ratio)
                                       .add(std::abs(ratio) * std::sqrt(rg * rg + rn * rn)));
      }
    }
  }
  ctx.metadata["common_random_numbers"] = "every model is priced from the same seed";
  ctx.metadata["risk_neutral_drift"] = "mu = r, no martingale compensator";
  ctx.metadata["barrier_monitoring"] = "discrete, at every Euler step";
}

void run_scan(Context& ctx) {
  const auto& c = ctx.config;
  OptionKind kind;
  if (c.kind == "vanilla")
    kind = OptionKind::vanilla;
  else if (c.kind == "knock-out")
    kind = OptionKind::knock_out;
  else
    throw ConfigError("kind: expected vanilla or knock-out, got '" + c.kind + "'");
  for (double t : c.maturities) {
    const OptionContract contract = contract_from(c, kind, t);
    const PriceEstimate g = price_mc(contract, Distribution::gaussian(), c.m_list.front(), c.seed, pricing_options(c));
    for (Family f : selected(c, false)) {
      const Distribution d = make_model(c, f);
      const PriceEstimate p = price_mc(contract, d, c.m_list.front(), c.seed, pricing_options(c));
      const double ratio = g.price / p.price;
      const double rg = g.mc_error / g.price, rn = p.mc_error / p.price;
      const double err = std::abs(ratio) * std::sqrt(rg * rg + rn * rn);
      ctx.out.write("ratio.csv", CsvRow()
                                     .add(d.name())
                                     .add(t)
                                     .add(g.price)
                                     .add(g.mc_error)
                                     .add(p.price)
                                     .add(p.mc_error)
                                     .add(ratio)
                                     .add(err));
      ctx.log << "T = " << t << "  " << d.name() << " ratio " << format_number(ratio) << " +- " << format_number(err)
              << '\n';
    }
  }
  ctx.metadata["common_random_numbers"] = "Gaussian baseline and model share the seed";
}

void run_fig9(Context& ctx) {
  const auto& c = ctx.config;
  const MomentStatistic kurt = kurtosis_from_moments;
  for (Family f : selected(c, false)) {
    const Distribution d = make_model(c, f);
    const ExcessKurtosis theory = excess_kurtosis(d);
    for (std::uint64_t m : c.m_list) {
      const SamplePool pool = draw_pool(c, f, m);
      const BootstrapCI ci = bca_moment_interval(pool.values, kurt, default_confidence, c.resamples, c.seed, c.threads);
      ctx.out.write("kurtosis.csv", CsvRow()
                                        .add(d.name())
                                        .add(m)
                                        .add(c.bound)
                                        .add(ci.point_estimate)
                                        .add(ci.lower)
                                        .add(ci.upper)
                                        .add(theory.is_infinite() ? std::numeric_limits<double>::infinity()
                                                                  : theory.value()));
      ctx.log << d.name() << " M=" << m << ": kurtosis " << format_number(ci.point_estimate) << " ["
              << format_number(ci.lower) << ", " << format_number(ci.upper) << "]\n";
    }
  }
  ctx.metadata["bootstrap"] = {{"method", "BCa"}, {"confidence", default_confidence}, {"resamples", c.resamples},
                               {"jackknife", "leave-one-out up to 1e4 values, else 1e4 contiguous blocks"}};
}

void validate_config(const RunConfig& c) {
  if (c.m_list.empty()) throw ConfigError("M: at least one value required");
  if (c.n_list.empty()) throw ConfigError("N: at least one value required");
  if (c.maturities.empty()) throw ConfigError("T: at least one value required");
  if (c.resamples < 2) throw ConfigError("resamples: must be >= 2");
  if (c.model != "all") parse_family(c.model);
}

json config_json(const RunConfig& c) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"experiment", c.experiment},
          {"param_set", c.param_set == ParamSet::daily ? "daily" : "hf"},
          {"model", c.model},
          {"nu", opt(c.nu)},
          {"q", opt(c.q)},
          {"alpha", opt(c.alpha)},
          {"lambda", opt(c.lambda)},
          {"c", opt(c.c)},
          {"M", c.m_list},
          {"N", c.n_list},
          {"dt", c.dt},
          {"B", c.bound},
          {"seed", c.seed},
          {"threads", c.threads},
          {"paper_scale", c.paper_scale},
          {"resamples", c.resamples},
          {"kind", c.kind},
          {"T", c.maturities},
          {"X", c.strike},
          {"U", c.barrier},
          {"r", c.rate},
          {"S0", c.spot},
          {"sigma", c.sigma},
          {"mu", c.drift}};
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

const std::vector<std::string>& experiments() {
  static const std::vector<std::string> ids = {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6",
                                               "fig7", "fig8", "fig9", "clt", "mclt", "price-vanilla",
                                               "price-knockout", "maturity-scan"};
  return ids;
}

const std::map<std::string, std::vector<std::string>>& output_schemas() {
  static const std::map<std::string, std::vector<std::string>> schemas = {
      {"pdf.csv", {"model", "x", "p"}},
      {"tld_density.csv", {"x", "p"}},
      {"histograms.csv", {"model", "bin_center", "density", "pdf"}},
      {"ccdf.csv", {"model", "x", "P"}},
      {"tail_slopes.csv", {"model", "x_lo", "x_hi", "slope"}},
      {"paths.csv", {"model", "path", "t", "S"}},
      {"clt_moments.csv", {"model", "N", "t", "order", "moment", "ci_lo", "ci_hi", "prediction", "pass"}},
      {"clt_histograms.csv", {"model", "N", "bin_center", "density", "limit_density"}},
      {"clt_ks.csv", {"model", "N", "statistic", "p_value"}},
      {"mclt_moments.csv", {"model", "N", "t", "order", "moment", "ci_lo", "ci_hi", "prediction", "pass"}},
      {"mclt_histograms.csv", {"model", "N", "bin_center", "density", "limit_density"}},
      {"mclt_ks.csv", {"model", "N", "statistic", "p_value"}},
      {"prices.csv", {"model", "T", "price", "mc_error"}},
      {"ratio.csv",
       {"model", "T", "gaussian_price", "gaussian_error", "price", "mc_error", "ratio", "ratio_error"}},
      {"kurtosis.csv", {"model", "M", "B", "kurtosis", "ci_lo", "ci_hi", "theory"}},
  };
  return schemas;
}

RunConfig default_paper_config(const std::string& experiment) {
  if (std::find(experiments().begin(), experiments().end(), experiment) == experiments().end())
    throw ConfigError("unknown experiment '" + experiment + "' (expected one of: " + join(experiments(), ' ') + ")");
  RunConfig c;
  c.experiment = experiment;
  c.m_list = {desk_sampling_m};
  c.n_list = {1000};
  c.maturities = {0.03};
  if (experiment == "fig4") {
    c.m_list = {1};
  } else if (experiment == "clt" || experiment == "mclt" || experiment == "fig5" || experiment == "fig6") {
    c.m_list = {pricing_m};
    c.n_list = {10, 100, 1000};
  } else if (experiment == "fig7" || experiment == "fig8" || experiment == "maturity-scan") {
    c.m_list = {pricing_m};
    c.maturities = {0.03, 0.1, 0.3, 0.5, 1.0};
  } else if (experiment == "price-vanilla" || experiment == "price-knockout") {
    c.m_list = {pricing_m};
    c.model = "gaussian";
  } else if (experiment == "fig9") {
    c.resamples = fig9_resamples;
  }
  if (experiment == "fig8" || experiment == "price-knockout") c.strike = 140.0;
  if (experiment == "fig8") c.kind = "knock-out";
  if (experiment == "maturity-scan") c.model = "tld";
  c.out_dir = default_out_dir(experiment);
  return c;
}

std::filesystem::path default_out_dir(const std::string& experiment) {
  const char* env = std::getenv("FATTAIL_OUT_DIR");
  const std::filesystem::path base = (env && *env) ? std::filesystem::path(env) : std::filesystem::path("fattail_out");
  return base / experiment;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "model") {
    if (value != "all") parse_family(value);
    c.model = value;
  } else if (key == "param-set") {
    if (value == "hf" || value == "high-frequency")
      c.param_set = ParamSet::high_frequency;
    else if (value == "daily")
      c.param_set = ParamSet::daily;
    else
      throw ConfigError("param-set: expected hf or daily, got '" + value + "'");
  } else if (key == "nu") {
    c.nu = parse_positive(key, value);
  } else if (key == "q") {
    c.q = parse_positive(key, value);
  } else if (key == "alpha") {
    c.alpha = parse_positive(key, value);
  } else if (key == "lambda") {
    c.lambda = parse_positive(key, value);
  } else if (key == "c") {
    c.c = parse_positive(key, value);
  } else if (key == "M") {
    c.m_list.clear();
    for (const auto& item : split(value, ',')) c.m_list.push_back(parse_count(key, item));
    c.m_overridden = true;
  } else if (key == "N") {
    c.n_list.clear();
    for (const auto& item : split(value, ',')) c.n_list.push_back(static_cast<std::size_t>(parse_count(key, item)));
  } else if (key == "T") {
    c.maturities.clear();
    for (const auto& item : split(value, ',')) c.maturities.push_back(parse_positive(key, item));
  } else if (key == "dt") {
    c.dt = parse_positive(key, value);
  } else if (key == "B") {
    c.bound = parse_positive(key, value);
  } else if (key == "seed") {
    const double v = parse_double(key, value);
    if (!(v >= 0.0) || std::floor(v) != v || v > 9.007199254740992e15)
      throw ConfigError("seed: expected a non-negative integer, got '" + value + "'");
    c.seed = static_cast<std::uint64_t>(v);
  } else if (key == "threads") {
    const double v = parse_double(key, value);
    if (!(v >= 0.0) || std::floor(v) != v || v > 4096) throw ConfigError("threads: expected 0..4096, got '" + value + "'");
    c.threads = static_cast<unsigned>(v);
  } else if (key == "paper-scale") {
    c.paper_scale = parse_bool(key, value);
  } else if (key == "resamples") {
    c.resamples = static_cast<std::size_t>(parse_count(key, value));
  } else if (key == "kind") {
    if (value != "vanilla" && value != "knock-out")
      throw ConfigError("kind: expected vanilla or knock-out, got '" + value + "'");
    c.kind = value;
  } else if (key == "X") {
    c.strike = parse_positive(key, value);
  } else if (key == "U") {
    c.barrier = parse_positive(key, value);
  } else if (key == "r") {
    c.rate = parse_double(key, value);
  } else if (key == "sigma") {
    c.sigma = parse_double(key, value);
    if (c.sigma < 0.0) throw ConfigError("sigma: must be >= 0");
  } else if (key == "S0") {
    c.spot = parse_positive(key, value);
  } else if (key == "mu") {
    c.drift = parse_double(key, value);
  } else if (key == "out") {
    if (value.empty()) throw ConfigError("out: empty path");
    c.out_dir = value;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void apply_config_file(RunConfig& c, std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source_name + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    try {
      apply_setting(c, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    } catch (const ParameterDomainError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

RunResult run(const RunConfig& input, std::ostream& log, std::ostream& err) {
  RunResult result;
  try {
    RunConfig c = input;
    validate_config(c);
    if (c.paper_scale && !c.m_overridden) {
      if (c.experiment == "fig9")
        c.m_list = {1'000'000, 10'000'000, paper_sampling_m};
      else if (c.experiment == "fig2" || c.experiment == "fig3")
        c.m_list = {paper_sampling_m};
    }
    const auto started = std::chrono::steady_clock::now();
    const std::string started_utc = utc_now();
    Outputs out(c.out_dir);
    Context ctx{c, out, log};
    ctx.metadata["rng"] = "Philox4x64-10; key = (seed, domain), counter = (block, stream)";
    ctx.metadata["sampler"] = "rejection on [-B, B], 4096-cell piecewise-constant envelope at 1.02 x cell max";
    ctx.metadata["shock_normalization"] = "non-Gaussian shocks divided by the population std of all M x N draws";

    const std::string& e = c.experiment;
    if (e == "fig1") run_fig1(ctx);
    else if (e == "fig2") run_fig2(ctx);
    else if (e == "fig3") run_fig3(ctx);
    else if (e == "fig4") run_fig4(ctx);
    else if (e == "fig5" || e == "clt") run_convergence(ctx, false);
    else if (e == "fig6" || e == "mclt") run_convergence(ctx, true);
    else if (e == "fig7") run_prices(ctx, OptionKind::vanilla, true);
    else if (e == "fig8") run_prices(ctx, OptionKind::knock_out, true);
    else if (e == "fig9") run_fig9(ctx);
    else if (e == "price-vanilla") run_prices(ctx, OptionKind::vanilla, false);
    else if (e == "price-knockout") run_prices(ctx, OptionKind::knock_out, false);
    else if (e == "maturity-scan") run_scan(ctx);
    else throw ConfigError("unknown experiment '" + e + "'");

    json manifest;
    manifest["experiment"] = c.experiment;
    manifest["command"] = c.command_line.empty() ? c.experiment : c.command_line;
    manifest["seed"] = c.seed;
    manifest["git_describe"] = FATTAIL_GIT_DESCRIBE;
    manifest["started_utc"] = started_utc;
    manifest["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest["config"] = config_json(c);
    manifest["metadata"] = ctx.metadata;
    manifest["summary"] = ctx.summary;
    manifest["files"] = out.manifest_files();
    std::ofstream mf(c.out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
    mf << manifest.dump(2) << '\n';
    if (!mf) throw Error("failed writing manifest.json");
    result.files = out.names();
    for (const auto& name : result.files) log << "wrote " << (c.out_dir / name).string() << '\n';
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    result.exit_code = 2;
  } catch (const ParameterDomainError& e) {
    err << "parameter error: " << e.what() << '\n';
    result.exit_code = 2;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << '\n';
    result.exit_code = 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    result.exit_code = 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    result.exit_code = 1;
  }
  return result;
}

std::vector<std::string> validate_outputs(const std::filesystem::path& dir) {
  std::vector<std::string> problems;
  std::ifstream mf(dir / "manifest.json");
  if (!mf) return {"missing manifest.json"};
  json manifest;
  try {
    mf >> manifest;
  } catch (const std::exception& e) {
    return {std::string("manifest.json is not valid JSON: ") + e.what()};
  }
  for (const char* key : {"experiment", "command", "seed", "git_describe", "wall_time_seconds", "files"})
    if (!manifest.contains(key)) problems.push_back(std::string("manifest.json lacks '") + key + "'");
  if (!manifest.contains("files") || !manifest["files"].is_array()) return problems;

  for (const auto& entry : manifest["files"]) {
    const std::string name = entry.value("name", "");
    const auto schema = output_schemas().find(name);
    if (schema == output_schemas().end()) {
      problems.push_back(name + ": no documented schema");
      continue;
    }
    if (entry.value("columns", std::vector<std::string>{}) != schema->second)
      problems.push_back(name + ": manifest columns differ from the schema");
    std::ifstream in(dir / name);
    if (!in) {
      problems.push_back(name + ": listed in manifest but missing");
      continue;
    }
    std::string line;
    std::getline(in, line);
    if (line != join(schema->second, ',')) problems.push_back(name + ": header '" + line + "' does not match schema");
    std::uint64_t rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      const auto fields = split(line, ',');
      if (fields.size() != schema->second.size()) {
        problems.push_back(name + ":" + std::to_string(rows + 1) + ": expected " +
                           std::to_string(schema->second.size()) + " fields");
        continue;
      }
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (schema->second[i] == "model") continue;
        const std::string& f = fields[i];
        if (f == "nan" || f == "inf" || f == "-inf") continue;
        std::size_t used = 0;
        try {
          std::stod(f, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != f.size() || f.empty()) {
          problems.push_back(name + ":" + std::to_string(rows + 1) + ": column '" + schema->second[i] +
                             "' is not numeric");
          break;
        }
      }
    }
    if (rows != entry.value("rows", std::uint64_t{0}))
      problems.push_back(name + ": row count differs from manifest");
  }
  return problems;
}

}  // namespace fattail::cli

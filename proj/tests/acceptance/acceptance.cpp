// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance          all criteria
//   acceptance 3 5      selected criteria
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fattail/cli.hpp"
#include "fattail/distributions.hpp"
#include "fattail/dynamics.hpp"
#include "fattail/pricing.hpp"
#include "fattail/sampler.hpp"
#include "fattail/stats.hpp"

namespace fs = std::filesystem;
using namespace fattail;

namespace {

constexpr std::uint64_t seed = 42;
constexpr double bound = 30.0;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  // Records one check; details are printed under the verdict line.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << "    [" << (ok ? "ok" : "FAIL") << "] " << what << '\n';
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

const std::vector<Family> fat_tailed = {Family::student_t, Family::q_gaussian, Family::truncated_levy,
                                        Family::modified_weibull};

// High-frequency parameter set, standardized to unit variance.
Distribution model(Family f) {
  switch (f) {
    case Family::student_t: return standardize(f, 3.0);
    case Family::q_gaussian: return standardize(f, 1.5);
    case Family::truncated_levy: return standardize(f, 0.18);
    case Family::modified_weibull: return standardize(f, 0.75);
    case Family::gaussian: break;
  }
  return Distribution::gaussian();
}

SamplePool pool(Family f, std::size_t m, double b) {
  RngStream rng(seed, static_cast<std::uint64_t>(f), rng_domain::sampling);
  return sample_rejection(model(f), m, b, rng);
}

double integrate(const Distribution& d, double a, double b) {
  static boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([&](double x) { return pdf(d, x); }, a, b);
}

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

Verdict sampler_fidelity() {
  Verdict v;
  const std::size_t m = 1'000'000;
  for (Family f : fat_tailed) {
    const Distribution d = model(f);
    const SamplePool p = pool(f, m, bound);
    const Histogram h = make_histogram(p.values, -20.0, 20.0, 200);
    // Values were divided by s, so bin [a, b] holds raw draws in [s a, s b].
    const double s = p.normalization_s;
    const double z_b = 2.0 * integrate(d, 0.0, bound);
    double worst = 0.0;
    std::size_t outside = 0;
    for (std::size_t i = 0; i < h.bins(); ++i) {
      const double a = h.lo + i * h.bin_width(), b = a + h.bin_width();
      const double mu = static_cast<double>(m) * integrate(d, s * a, s * b) / z_b;
      const double z = (static_cast<double>(h.counts[i]) - mu) / std::sqrt(mu);
      worst = std::max(worst, std::abs(z));
      outside += std::abs(z) > 5.0;
    }
    v.check(outside == 0, d.name() + ": max |bin - expected| = " + fmt(worst) + " Poisson sigma over 200 bins, " +
                              std::to_string(outside) + " beyond 5");
  }
  // Same q-Gaussian through both generators; Box-Muller's standard form has beta = 1/(3 - q).
  RngStream r1(seed, 100), r2(seed, 101);
  SamplePool rej = sample_rejection(Distribution::q_gaussian(1.5, 1.0 / 1.5), m, bound, r1);
  for (double& x : rej.values) x *= rej.normalization_s;
  const SamplePool bm = truncate_pool(sample_box_muller_q(1.5, m, r2), bound);
  const double p_ks = ks_two_sample(rej.values, bm.values).p_value;
  v.check(p_ks > 0.01, "rejection vs Box-Muller q = 1.5: two-sample KS p = " + fmt(p_ks));
  return v;
}

Verdict kurtosis_table() {
  Verdict v;
  const std::size_t m = 10'000'000;
  std::array<BootstrapCI, 2> power_law;
  for (Family f : fat_tailed) {
    const Distribution d = model(f);
    const SamplePool p = pool(f, m, bound);
    const double k = excess_kurtosis_sample(p.values);
    switch (f) {
      case Family::truncated_levy:
        v.check(std::abs(k - 23.2) <= 0.5, "tld: kurtosis " + fmt(k) + ", target 23.2 +- 0.5");
        break;
      case Family::modified_weibull:
        v.check(std::abs(k - 26.2) <= 0.5, "mwd: kurtosis " + fmt(k) + ", target 26.2 +- 0.5");
        break;
      default: {
        const MomentStatistic kurt = kurtosis_from_moments;
        const BootstrapCI ci = bca_moment_interval(p.values, kurt, default_confidence, 200, seed);
        power_law[f == Family::student_t ? 0 : 1] = ci;
        v.check(k >= 30.0 && k <= 40.0, d.name() + ": kurtosis " + fmt(k) + " [" + fmt(ci.lower) + ", " +
                                            fmt(ci.upper) + "], target [30, 40]");
      }
    }
  }
  const bool overlap = power_law[0].lower <= power_law[1].upper && power_law[1].lower <= power_law[0].upper;
  v.check(overlap, "student and qgaussian 99.7% BCa intervals overlap");
  for (Family f : {Family::student_t, Family::q_gaussian}) {
    const double k = excess_kurtosis_sample(pool(f, m, 20.0).values);
    v.check(std::abs(k - 20.0) <= 3.0, model(f).name() + " on [-20, 20]: kurtosis " + fmt(k) + ", target 20 +- 3");
  }
  return v;
}

// log p = a log x + b x + c by least squares on the normal equations.
std::array<double, 3> fit_tail(const std::function<double(double)>& p, double lo, double hi) {
  double ata[3][3] = {}, aty[3] = {};
  for (double x = lo; x <= hi + 1e-12; x += 0.25) {
    const double row[3] = {std::log(x), x, 1.0}, y = std::log(p(x));
    for (int i = 0; i < 3; ++i) {
      aty[i] += row[i] * y;
      for (int j = 0; j < 3; ++j) ata[i][j] += row[i] * row[j];
    }
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const double f = ata[j][i] / ata[i][i];
      for (int k = i; k < 3; ++k) ata[j][k] -= f * ata[i][k];
      aty[j] -= f * aty[i];
    }
  std::array<double, 3> coef{};
  for (int i = 2; i >= 0; --i) {
    coef[i] = aty[i];
    for (int k = i + 1; k < 3; ++k) coef[i] -= ata[i][k] * coef[k];
    coef[i] /= ata[i][i];
  }
  return coef;
}

Verdict inverse_cubic_law() {
  Verdict v;
  const auto thresholds = log_spaced(5.0, 20.0, 30);
  for (Family f : {Family::student_t, Family::q_gaussian}) {
    const SamplePool p = pool(f, 10'000'000, bound);
    const double slope = tail_slope(empirical_ccdf(p.values, thresholds), 5.0, 20.0);
    v.check(std::abs(slope + 3.0) <= 0.2, model(f).name() + ": CCDF slope on [5, 20] = " + fmt(slope));
  }
  const Distribution tld = model(Family::truncated_levy);
  const auto& params = std::get<TruncatedLevy>(tld.model()).params;
  const auto coef = fit_tail([&](double x) { return pdf(tld, x); }, 5.0, 25.0);
  const double lambda = -coef[1];
  v.check(std::abs(lambda - params.lambda()) <= 0.15 * params.lambda(),
          "tld tail fit: lambda = " + fmt(lambda) + " vs " + fmt(params.lambda()) + ", power " + fmt(coef[0]));
  return v;
}

Verdict tld_identity() {
  Verdict v;
  const double literal = std::pow(0.4, 2.0 / 3.0) * 0.18;
  v.check(std::abs(literal - 0.098) <= 0.001, "0.4^(2/3) * 0.18 = " + fmt(literal, 6));
  const auto& params = std::get<TruncatedLevy>(model(Family::truncated_levy).model()).params;
  const double built = std::pow(params.gamma(), 2.0 / 3.0) * params.lambda();
  v.check(std::abs(built - 0.098) <= 0.001,
          "unit-variance tld (gamma = " + fmt(params.gamma(), 6) + "): gamma^(2/3) lambda = " + fmt(built, 6));
  return v;
}

std::string moment_line(const std::string& name, const MomentCheck& c) {
  return name + " N=" + std::to_string(c.n_steps) + " order " + std::to_string(c.order) + ": " +
         fmt(c.sample_value) + " in [" + fmt(c.ci.lower) + ", " + fmt(c.ci.upper) + "] vs " + fmt(c.prediction);
}

const std::vector<std::size_t> n_list = {10, 100, 1000};
constexpr std::size_t convergence_m = 100'000;

Verdict clt_harness() {
  Verdict v;
  const auto gauss = clt_report(Distribution::gaussian(), n_list, convergence_m, seed);
  for (const auto& c : gauss.moments) v.check(c.pass, moment_line("gaussian", c) + " (expect inside)");
  const auto tld = clt_report(model(Family::truncated_levy), n_list, convergence_m, seed);
  for (const auto& c : tld.moments) {
    if (c.order != 4) continue;
    const bool expect_pass = c.n_steps == 1000;
    v.check(c.pass == expect_pass,
            moment_line("tld", c) + (expect_pass ? " (expect inside)" : " (expect outside)"));
  }
  return v;
}

Verdict mclt_harness() {
  Verdict v;
  const auto gauss = mclt_report(Distribution::gaussian(), n_list, convergence_m, seed);
  for (const auto& c : gauss.moments)
    if (c.order <= 2) v.check(c.pass, moment_line("gaussian", c) + " (expect inside)");
  const auto tld = mclt_report(model(Family::truncated_levy), n_list, convergence_m, seed);
  for (std::size_t n : n_list) {
    bool both = true;
    for (const auto& c : tld.moments)
      if (c.n_steps == n && c.order >= 3) {
        both = both && c.pass;
        v.detail << "    " << moment_line("tld", c) << '\n';
      }
    const bool expect = n > 100;
    v.check(both == expect, "tld N=" + std::to_string(n) + ": 3rd and 4th moments " +
                                (both ? "inside" : "not both inside") + (expect ? " (expect inside)" : " (expect not)"));
  }
  for (const auto* r : {&gauss, &tld})
    for (const auto& k : r->ks)
      if (k.n_steps == 1000)
        v.check(k.ks.p_value > 0.01, std::string(r == &gauss ? "gaussian" : "tld") +
                                         " N=1000 endpoint vs log-normal: KS p = " + fmt(k.ks.p_value));
  return v;
}

OptionContract contract(OptionKind kind, double t) {
  OptionContract c;
  c.kind = kind;
  c.strike = kind == OptionKind::vanilla ? 150.0 : 140.0;
  c.barrier = kind == OptionKind::vanilla ? std::numeric_limits<double>::infinity() : 152.0;
  c.maturity = t;
  return c;
}

Verdict bs_recovery() {
  Verdict v;
  const OptionContract c = contract(OptionKind::vanilla, 0.03);
  const double bs = bs_call_analytic(c);
  const PriceEstimate mc = price_vanilla_mc(c, Distribution::gaussian(), 100'000, seed);
  v.check(std::abs(bs - 1.06) < 0.005, "closed form at T = 0.03: " + fmt(bs, 6));
  v.check(std::abs(mc.price - bs) <= 3.0 * mc.mc_error,
          "gaussian MC " + fmt(mc.price, 6) + " +- " + fmt(mc.mc_error) + ", " +
              fmt(std::abs(mc.price - bs) / mc.mc_error, 3) + " sigma from closed form");
  return v;
}

// Vanilla and knock-out prices per model and maturity, both contracts from one ensemble.
struct PriceGrid {
  std::vector<double> maturities;
  // [model][maturity] -> {vanilla, knock-out}; model 0 is the Gaussian.
  std::vector<std::vector<std::array<PriceEstimate, 2>>> prices;
  std::vector<std::string> names;
};

PriceGrid price_grid(std::vector<double> maturities) {
  PriceGrid g;
  g.maturities = std::move(maturities);
  std::vector<Distribution> models = {Distribution::gaussian()};
  for (Family f : fat_tailed) models.push_back(model(f));
  for (const auto& d : models) {
    g.names.push_back(d.name());
    auto& row = g.prices.emplace_back();
    for (double t : g.maturities) {
      const std::array<OptionContract, 2> cs = {contract(OptionKind::vanilla, t), contract(OptionKind::knock_out, t)};
      const auto est = price_contracts_mc(cs, d, 100'000, seed);
      row.push_back({est[0], est[1]});
    }
  }
  return g;
}

Verdict pricing_signs() {
  Verdict v;
  const PriceGrid g = price_grid({0.03, 1.0});
  const char* kinds[2] = {"vanilla", "knock-out"};
  for (std::size_t i = 1; i < g.names.size(); ++i) {
    for (int k = 0; k < 2; ++k) {
      const auto& gauss = g.prices[0][0][k];
      const auto& fat = g.prices[i][0][k];
      const double gap = (fat.price - gauss.price) / combined(gauss.mc_error, fat.mc_error);
      const bool ok = k == 0 ? gap < -3.0 : gap > 3.0;
      v.check(ok, g.names[i] + " " + kinds[k] + " T=0.03: " + fmt(fat.price) + " vs gaussian " + fmt(gauss.price) +
                      " (" + fmt(gap, 3) + " sigma, expect " + (k == 0 ? "below -3)" : "above 3)"));
    }
    for (int k = 0; k < 2; ++k) {
      const double ratio = g.prices[0][1][k].price / g.prices[i][1][k].price;
      v.check(std::abs(ratio - 1.0) <= 0.05,
              g.names[i] + " " + kinds[k] + " T=1: gaussian/model ratio " + fmt(ratio) + " (expect within 5% of 1)");
    }
  }
  return v;
}

Verdict cross_model() {
  Verdict v;
  const PriceGrid g = price_grid({0.03, 0.1, 0.3, 1.0});
  const char* kinds[2] = {"vanilla", "knock-out"};
  for (std::size_t t = 0; t < g.maturities.size(); ++t)
    for (int k = 0; k < 2; ++k) {
      double worst = 0.0;
      std::string pair;
      for (std::size_t i = 1; i < g.names.size(); ++i)
        for (std::size_t j = i + 1; j < g.names.size(); ++j) {
          const auto& a = g.prices[i][t][k];
          const auto& b = g.prices[j][t][k];
          const double z = std::abs(a.price - b.price) / combined(a.mc_error, b.mc_error);
          if (z > worst) {
            worst = z;
            pair = g.names[i] + "/" + g.names[j] + " " + fmt(a.price) + " vs " + fmt(b.price);
          }
        }
      v.check(worst <= 3.0, std::string(kinds[k]) + " T=" + fmt(g.maturities[t]) + ": largest pairwise gap " +
                                fmt(worst, 3) + " sigma (" + pair + ")");
    }
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "fattail_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::string> runs = {
      "fig2 --M 2e5", "fig3 --M 2e5", "fig4", "clt --M 2e4 --resamples 200", "mclt --model tld --M 2e4 --resamples 200",
      "fig7 --M 2e4 --T 0.03,0.1", "fig8 --M 2e4 --T 0.03", "fig9 --M 2e5 --resamples 100",
      "maturity-scan --M 2e4 --T 0.03,0.1 --kind knock-out"};
  for (const auto& args : runs) {
    const std::string exp = args.substr(0, args.find(' '));
    std::vector<fs::path> dirs;
    bool ran = true;
    for (const char* threads : {"1", "1", "4"}) {
      const fs::path out = root / (exp + "_" + std::to_string(dirs.size()));
      const std::string cmd = std::string(FATTAIL_CLI_PATH) + " " + args + " --seed 7 --threads " + threads +
                              " --out " + out.string() + " > /dev/null";
      ran = ran && std::system(cmd.c_str()) == 0;
      dirs.push_back(out);
    }
    if (!ran) {
      v.check(false, exp + ": CLI run failed");
      continue;
    }
    std::size_t files = 0;
    bool same = true;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      const std::string ref = slurp(entry.path());
      const auto name = entry.path().filename();
      same = same && ref == slurp(dirs[1] / name) && ref == slurp(dirs[2] / name);
    }
    const auto problems = cli::validate_outputs(dirs[0]);
    v.check(same && files > 0 && problems.empty(),
            exp + ": " + std::to_string(files) + " CSV files identical across rerun and 1 vs 4 threads" +
                (problems.empty() ? "" : ", schema problem: " + problems.front()));
  }
  fs::remove_all(root);
  return v;
}

struct Criterion {
  const char* title;
  Verdict (*run)();
};

const Criterion criteria[] = {
    {"sampler fidelity", sampler_fidelity},
    {"kurtosis table", kurtosis_table},
    {"inverse cubic law", inverse_cubic_law},
    {"tld parameter identity", tld_identity},
    {"clt harness", clt_harness},
    {"mclt harness", mclt_harness},
    {"black-scholes recovery", bs_recovery},
    {"non-gaussian pricing signs", pricing_signs},
    {"cross-model consistency", cross_model},
    {"determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 10) {
      std::cerr << "usage: acceptance [1-10 ...]\n";
      return 2;
    }
    selected.push_back(n);
  }
  if (selected.empty())
    for (int n = 1; n <= 10; ++n) selected.push_back(n);

  bool all = true;
  for (int n : selected) {
    const Criterion& c = criteria[n - 1];
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    std::cout << v.detail.str() << "criterion " << n << " (" << c.title << "): " << (v.pass ? "PASS" : "FAIL")
              << std::endl;
    all = all && v.pass;
  }
  return all ? 0 : 1;
}

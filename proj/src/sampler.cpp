#include "fattail/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fattail/csv.hpp"
#include "fattail/error.hpp"

namespace fattail {
namespace {

constexpr int max_probe_points = 33;
constexpr int check_points = 64;

// ln_q(x) = (x^(1-q) - 1) / (1 - q)
double q_log(double x, double q) {
  if (q == 1.0) return std::log(x);
  return (std::pow(x, 1.0 - q) - 1.0) / (1.0 - q);
}

std::string describe_params(const char* name, std::initializer_list<std::pair<const char*, double>> items) {
  std::string s = name;
  s += '(';
  bool first = true;
  for (const auto& [k, v] : items) {
    if (!first) s += ',';
    s += k;
    s += '=';
    s += format_number(v);
    first = false;
  }
  return s + ")";
}

}  // namespace

RejectionSampler::RejectionSampler(Distribution d, double bound, std::size_t cells)
    : model_(std::move(d)), bound_(bound), cells_(cells) {
  if (!(bound > 0.0) || !std::isfinite(bound)) throw ParameterDomainError("rejection sampler: bound must be positive");
  if (cells < 2 || cells % 2 != 0 || cells > (std::size_t{1} << 31))
    throw ParameterDomainError("rejection sampler: cell count must be even");
  width_ = 2.0 * bound / static_cast<double>(cells);
  singular_exponent_ = model_.origin_singularity();

  const std::size_t left_of_origin = cells / 2 - 1;
  const std::size_t right_of_origin = cells / 2;
  auto singular_cell = [&](std::size_t i) {
    return singular_exponent_ && (i == left_of_origin || i == right_of_origin);
  };

  height_.resize(cells);
  std::vector<double> mass(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = -bound + static_cast<double>(i) * width_;
    double peak = 0.0;
    if (singular_cell(i)) {
      const double e = *singular_exponent_;
      // Bound pdf(x) / |x|^e on (0, w]; the probe nearest 0 stands in for the limit.
      for (int j = 0; j <= max_probe_points - 1; ++j) {
        const double r = width_ * (j == 0 ? 1e-9 : static_cast<double>(j) / (max_probe_points - 1));
        const double x = (i == right_of_origin) ? r : -r;
        peak = std::max(peak, pdf(model_, x) / std::pow(r, e));
      }
      height_[i] = envelope_safety * peak;
      mass[i] = height_[i] * std::pow(width_, 1.0 + e) / (1.0 + e);
    } else {
      for (int j = 0; j < max_probe_points; ++j)
        peak = std::max(peak, pdf(model_, a + width_ * static_cast<double>(j) / (max_probe_points - 1)));
      height_[i] = envelope_safety * peak;
      mass[i] = height_[i] * width_;
    }
    if (!std::isfinite(height_[i])) {
      std::ostringstream msg;
      msg << "rejection sampler: unbounded density in cell [" << a << ", " << a + width_ << "]";
      throw SetupError(msg.str());
    }
  }

  // Verify the majorant on an independent, denser grid.
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = -bound + static_cast<double>(i) * width_;
    for (int j = 0; j < check_points; ++j) {
      const double x = a + width_ * (static_cast<double>(j) + 0.5) / check_points;
      const double env = singular_cell(i) ? height_[i] * std::pow(std::abs(x), *singular_exponent_) : height_[i];
      const double p = pdf(model_, x);
      if (p > env) {
        std::ostringstream msg;
        msg << "rejection sampler: envelope violated at x = " << x << " (pdf " << p << " > envelope " << env << ")";
        throw SetupError(msg.str());
      }
    }
  }

  // Vose alias table over the cell masses.
  total_mass_ = 0.0;
  for (double m : mass) total_mass_ += m;
  if (!(total_mass_ > 0.0)) throw SetupError("rejection sampler: density vanishes on the support");
  alias_prob_.assign(cells, 1.0);
  alias_.resize(cells);
  std::vector<double> scaled(cells);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < cells; ++i) {
    scaled[i] = mass[i] * static_cast<double>(cells) / total_mass_;
    alias_[i] = static_cast<std::uint32_t>(i);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    alias_prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) alias_prob_[i] = 1.0;
  for (auto i : small) alias_prob_[i] = 1.0;
}

double RejectionSampler::draw(RngStream& rng, std::uint64_t* attempts) const {
  const std::size_t left_of_origin = cells_ / 2 - 1;
  const std::size_t right_of_origin = cells_ / 2;
  for (;;) {
    if (attempts) ++*attempts;
    std::size_t cell = rng.below(cells_);
    if (rng.uniform() >= alias_prob_[cell]) cell = alias_[cell];
    double x;
    double env;
    if (singular_exponent_ && (cell == left_of_origin || cell == right_of_origin)) {
      const double e = *singular_exponent_;
      const double r = width_ * std::pow(rng.uniform(), 1.0 / (1.0 + e));
      x = (cell == right_of_origin) ? r : -r;
      env = height_[cell] * std::pow(r, e);
    } else {
      x = -bound_ + (static_cast<double>(cell) + rng.uniform()) * width_;
      env = height_[cell];
    }
    if (rng.uniform() * env <= pdf(model_, x)) return x;
  }
}

SamplePool sample_rejection(const Distribution& d, std::size_t m, double bound, RngStream& rng) {
  if (m == 0) throw ParameterDomainError("sample_rejection: M must be >= 1");
  const RejectionSampler sampler(d, bound);
  SamplePool pool;
  pool.values.resize(m);
  std::uint64_t attempts = 0;
  for (auto& v : pool.values) v = sampler.draw(rng, &attempts);
  pool.model = d.describe();
  pool.generator = "rejection";
  pool.bound = bound;
  pool.seed = rng.seed();
  pool.stream_id = rng.stream_id();
  pool.acceptance_rate = static_cast<double>(m) / static_cast<double>(attempts);
  return normalize_pool(std::move(pool));
}

SamplePool sample_box_muller_q(double q, std::size_t m, RngStream& rng) {
  if (!(q > 1.0 && q < 3.0)) throw ParameterDomainError("sample_box_muller_q: q must lie in (1, 3)");
  const double q_prime = (1.0 + q) / (3.0 - q);
  SamplePool pool;
  pool.values.resize(m);
  for (std::size_t i = 0; i < m; i += 2) {
    const double radius = std::sqrt(-2.0 * q_log(rng.uniform(), q_prime));
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    pool.values[i] = radius * std::cos(angle);
    if (i + 1 < m) pool.values[i + 1] = radius * std::sin(angle);
  }
  pool.model = describe_params("qgaussian", {{"q", q}, {"beta", 1.0 / (3.0 - q)}});
  pool.generator = "box-muller-q";
  pool.seed = rng.seed();
  pool.stream_id = rng.stream_id();
  return pool;
}

SamplePool sample_box_muller_student(double nu, std::size_t m, RngStream& rng) {
  SamplePool pool = sample_box_muller_q(nu_to_q(nu), m, rng);
  pool.model = describe_params("student", {{"nu", nu}, {"sigma_hat", 1.0}});
  pool.generator = "box-muller-student";
  return pool;
}

SamplePool sample_stable_cms(double alpha, std::size_t m, RngStream& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterDomainError("sample_stable_cms: alpha must lie in (0, 2]");
  SamplePool pool;
  pool.values.resize(m);
  for (auto& x : pool.values) {
    const double v = std::numbers::pi * (rng.uniform() - 0.5);
    if (alpha == 1.0) {
      x = std::tan(v);
      continue;
    }
    const double w = rng.exponential();
    x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
        std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
  }
  pool.model = describe_params("stable", {{"alpha", alpha}});
  pool.generator = "cms";
  pool.seed = rng.seed();
  pool.stream_id = rng.stream_id();
  return pool;
}

double sample_std(std::span<const double> values) {
  if (values.empty()) throw DegenerateInputError("sample_std: empty sample");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

SamplePool normalize_pool(SamplePool pool) {
  if (pool.values.empty()) throw DegenerateInputError("normalize_pool: empty pool");
  const double s = sample_std(pool.values);
  if (!(s > 0.0) || !std::isfinite(s)) throw DegenerateInputError("normalize_pool: zero or non-finite sample std");
  for (auto& v : pool.values) v /= s;
  pool.normalization_s *= s;
  return pool;
}

SamplePool truncate_pool(SamplePool pool, double bound) {
  std::erase_if(pool.values, [bound](double v) { return !(std::abs(v) <= bound); });
  pool.bound = std::min(pool.bound, bound);
  return pool;
}

void write_pool_csv(std::ostream& out, const SamplePool& pool) {
  out << "# model=" << pool.model << '\n'
      << "# generator=" << pool.generator << '\n'
      << "# M=" << pool.values.size() << '\n'
      << "# B=" << format_number(pool.bound) << '\n'
      << "# seed=" << pool.seed << '\n'
      << "# stream_id=" << pool.stream_id << '\n'
      << "# s=" << format_number(pool.normalization_s) << '\n'
      << "# acceptance_rate=" << format_number(pool.acceptance_rate) << '\n'
      << "value\n";
  for (double v : pool.values) out << format_number(v) << '\n';
}

SamplePool read_pool_csv(std::istream& in) {
  SamplePool pool;
  std::string line;
  std::size_t expected = 0;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string val = line.substr(eq + 1);
      if (key == "model") pool.model = val;
      else if (key == "generator") pool.generator = val;
      else if (key == "M") expected = std::stoull(val);
      else if (key == "B") pool.bound = std::stod(val);
      else if (key == "seed") pool.seed = std::stoull(val);
      else if (key == "stream_id") pool.stream_id = std::stoull(val);
      else if (key == "s") pool.normalization_s = std::stod(val);
      else if (key == "acceptance_rate") pool.acceptance_rate = std::stod(val);
      continue;
    }
    if (!header_seen) {
      if (line != "value") throw ConfigError("pool csv line " + std::to_string(line_no) + ": expected 'value' header");
      header_seen = true;
      continue;
    }
    pool.values.push_back(std::stod(line));
  }
  if (pool.values.size() != expected)
    throw ConfigError("pool csv: header declares M=" + std::to_string(expected) + " but found " +
                      std::to_string(pool.values.size()) + " values");
  return pool;
}

ShockSource::ShockSource(const Distribution& d, double bound) : model_(d) {
  if (!d.is_gaussian()) sampler_.emplace(d, bound);
}

double ShockSource::draw_raw(RngStream& rng) const {
  if (sampler_) return sampler_->draw(rng);
  const auto& g = std::get<Gaussian>(model_.model());
  return g.mean + g.std * rng.normal();
}

}  // namespace fattail

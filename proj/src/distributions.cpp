#include "fattail/distributions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fattail/csv.hpp"
#include "fattail/error.hpp"
#include "fattail/special.hpp"

namespace fattail {
namespace {

using std::numbers::pi;

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

bool is_three_halves(double alpha) { return std::abs(alpha - 1.5) < 1e-15; }

double log_c_q(double q) {
  return 0.5 * std::log(pi / (q - 1.0)) + special::log_gamma((3.0 - q) / (2.0 * (q - 1.0))) -
         special::log_gamma(1.0 / (q - 1.0));
}

// Grid wide enough that phi(k_max) <= 1e-12, keeping dk at the default.
std::shared_ptr<const TabulatedDensity> build_tld_density(const TruncatedLevyParams& p) {
  std::size_t n = default_tld_points;
  double k_max = default_tld_k_max;
  while (tld_char_fn(p, k_max) > 1e-12 && n < (std::size_t{1} << 22)) {
    k_max *= 2.0;
    n *= 2;
  }
  return std::make_shared<const TabulatedDensity>(invert_to_density(p, n, k_max));
}

std::string param_list(std::initializer_list<std::pair<const char*, double>> items) {
  std::string s = "(";
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

double ExcessKurtosis::value() const {
  if (infinite_) throw UnsupportedError("excess kurtosis is infinite");
  return value_;
}

Distribution::Distribution(Model m) : model_(std::move(m)) {
  norm_ = std::visit(
      overloaded{
          [](const Gaussian& g) { return 1.0 / (g.std * std::sqrt(2.0 * pi)); },
          [](const StudentT& s) {
            return std::exp(special::log_gamma(0.5 * (s.nu + 1.0)) - special::log_gamma(0.5 * s.nu)) /
                   (std::sqrt(pi * s.nu) * s.sigma_hat);
          },
          [](const QGaussian& g) { return std::sqrt(g.beta) * std::exp(-log_c_q(g.q)); },
          [](const TruncatedLevy&) { return 1.0; },
          [](const ModifiedWeibull& w) { return w.c / (2.0 * std::sqrt(pi) * w.chi); },
      },
      model_);
}

Distribution Distribution::gaussian(double mean, double std) {
  if (!(std > 0.0) || !std::isfinite(std) || !std::isfinite(mean))
    throw ParameterDomainError("gaussian: std must be positive and finite");
  return Distribution(Gaussian{mean, std});
}

Distribution Distribution::student_t(double nu, double sigma_hat) {
  if (!(nu > 2.0) || !std::isfinite(nu))
    throw ParameterDomainError("student_t: nu must exceed 2 for a finite variance");
  if (!(sigma_hat > 0.0) || !std::isfinite(sigma_hat))
    throw ParameterDomainError("student_t: sigma_hat must be positive");
  return Distribution(StudentT{nu, sigma_hat});
}

Distribution Distribution::q_gaussian(double q, double beta) {
  if (!(q > 1.0 && q < 5.0 / 3.0))
    throw ParameterDomainError("q_gaussian: q must lie in (1, 5/3) for a finite variance");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterDomainError("q_gaussian: beta must be positive");
  const double c_q = std::exp(log_c_q(q));
  if (!(c_q > 0.0) || !std::isfinite(c_q))
    throw ParameterDomainError("q_gaussian: normalization constant is not finite");
  return Distribution(QGaussian{q, beta});
}

Distribution Distribution::truncated_levy(double alpha, double lambda, double gamma) {
  TruncatedLevyParams p(alpha, lambda, gamma);
  if (!(lambda > 0.0) && alpha != 2.0)
    throw ParameterDomainError("truncated_levy: lambda must be positive for a finite variance");
  return Distribution(TruncatedLevy{p, build_tld_density(p)});
}

Distribution Distribution::modified_weibull(double c, double chi) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterDomainError("modified_weibull: c must be positive");
  if (!(chi > 0.0) || !std::isfinite(chi)) throw ParameterDomainError("modified_weibull: chi must be positive");
  return Distribution(ModifiedWeibull{c, chi});
}

Family Distribution::family() const { return static_cast<Family>(model_.index()); }

std::string Distribution::name() const { return family_name(family()); }

std::string Distribution::describe() const {
  return name() + std::visit(overloaded{
                                 [](const Gaussian& g) { return param_list({{"mean", g.mean}, {"std", g.std}}); },
                                 [](const StudentT& s) {
                                   return param_list({{"nu", s.nu}, {"sigma_hat", s.sigma_hat}});
                                 },
                                 [](const QGaussian& g) { return param_list({{"q", g.q}, {"beta", g.beta}}); },
                                 [](const TruncatedLevy& t) {
                                   return param_list({{"alpha", t.params.alpha()},
                                                      {"lambda", t.params.lambda()},
                                                      {"gamma", t.params.gamma()}});
                                 },
                                 [](const ModifiedWeibull& w) { return param_list({{"c", w.c}, {"chi", w.chi}}); },
                             },
                             model_);
}

std::optional<double> Distribution::origin_singularity() const {
  if (const auto* w = std::get_if<ModifiedWeibull>(&model_); w && w->c < 2.0) return 0.5 * w->c - 1.0;
  return std::nullopt;
}

double pdf(const Distribution& d, double x) {
  const double norm = d.norm_;
  return std::visit(
      overloaded{
          [&](const Gaussian& g) {
            const double z = (x - g.mean) / g.std;
            return norm * std::exp(-0.5 * z * z);
          },
          [&](const StudentT& s) {
            const double z = x / s.sigma_hat;
            return norm * std::pow(1.0 + z * z / s.nu, -0.5 * (s.nu + 1.0));
          },
          [&](const QGaussian& g) { return norm * std::pow(1.0 + (g.q - 1.0) * g.beta * x * x, -1.0 / (g.q - 1.0)); },
          [&](const TruncatedLevy& t) { return (*t.density)(std::abs(x)); },
          [&](const ModifiedWeibull& w) {
            const double y = std::abs(x) / w.chi;
            if (y == 0.0) {
              if (w.c < 2.0) return std::numeric_limits<double>::infinity();
              return w.c == 2.0 ? norm : 0.0;
            }
            return norm * std::pow(y, 0.5 * w.c - 1.0) * std::exp(-std::pow(y, w.c));
          },
      },
      d.model());
}

double variance(const Distribution& d) {
  return std::visit(
      overloaded{
          [](const Gaussian& g) { return g.std * g.std; },
          [](const StudentT& s) { return s.sigma_hat * s.sigma_hat * s.nu / (s.nu - 2.0); },
          [](const QGaussian& g) { return 1.0 / (g.beta * (5.0 - 3.0 * g.q)); },
          [](const TruncatedLevy& t) {
            const auto& p = t.params;
            if (is_three_halves(p.alpha())) return 3.0 / (2.0 * std::numbers::sqrt2) * p.gamma() / std::sqrt(p.lambda());
            if (p.alpha() == 2.0) return 2.0 * p.gamma();
            return t.density->trapezoid_moment(2, t.density->x_min(), t.density->x_max());
          },
          [](const ModifiedWeibull& w) {
            return w.chi * w.chi * std::exp(special::log_gamma(0.5 + 2.0 / w.c)) / std::sqrt(pi);
          },
      },
      d.model());
}

ExcessKurtosis excess_kurtosis(const Distribution& d) {
  return std::visit(
      overloaded{
          [](const Gaussian&) { return ExcessKurtosis::finite(0.0); },
          [](const StudentT& s) {
            return s.nu > 4.0 ? ExcessKurtosis::finite(6.0 / (s.nu - 4.0)) : ExcessKurtosis::infinite();
          },
          [](const QGaussian& g) {
            return g.q < 1.4 ? ExcessKurtosis::finite(6.0 * (g.q - 1.0) / (7.0 - 5.0 * g.q))
                             : ExcessKurtosis::infinite();
          },
          [](const TruncatedLevy& t) {
            const auto& p = t.params;
            if (is_three_halves(p.alpha()))
              return ExcessKurtosis::finite(std::numbers::sqrt2 / 2.0 / (p.gamma() * std::pow(p.lambda(), 1.5)));
            if (p.alpha() == 2.0) return ExcessKurtosis::finite(0.0);
            const auto& td = *t.density;
            const double m2 = td.trapezoid_moment(2, td.x_min(), td.x_max());
            const double m4 = td.trapezoid_moment(4, td.x_min(), td.x_max());
            return ExcessKurtosis::finite(m4 / (m2 * m2) - 3.0);
          },
          [](const ModifiedWeibull& w) {
            const double lg = special::log_gamma(0.5 + 4.0 / w.c) - 2.0 * special::log_gamma(0.5 + 2.0 / w.c);
            return ExcessKurtosis::finite(std::exp(lg) * std::sqrt(pi) - 3.0);
          },
      },
      d.model());
}

std::optional<TailExponent> tail_exponent(const Distribution& d) {
  if (const auto* s = std::get_if<StudentT>(&d.model())) return TailExponent{s->nu + 1.0, s->nu};
  if (const auto* g = std::get_if<QGaussian>(&d.model())) {
    const double e = 2.0 / (g->q - 1.0);
    return TailExponent{e, e - 1.0};
  }
  return std::nullopt;
}

Distribution standardize(Family family, double shape) {
  switch (family) {
    case Family::gaussian:
      return Distribution::gaussian();
    case Family::student_t:
      if (!(shape > 2.0)) throw ParameterDomainError("standardize: Student's t needs nu > 2");
      return Distribution::student_t(shape, std::sqrt((shape - 2.0) / shape));
    case Family::q_gaussian:
      if (!(shape > 1.0 && shape < 5.0 / 3.0)) throw ParameterDomainError("standardize: q-Gaussian needs 1 < q < 5/3");
      return Distribution::q_gaussian(shape, 1.0 / (5.0 - 3.0 * shape));
    case Family::truncated_levy:
      return standardize_tld(1.5, shape);
    case Family::modified_weibull:
      if (!(shape > 0.0)) throw ParameterDomainError("standardize: modified Weibull needs c > 0");
      return Distribution::modified_weibull(
          shape, std::sqrt(std::sqrt(pi) * std::exp(-special::log_gamma(0.5 + 2.0 / shape))));
  }
  throw ParameterDomainError("standardize: unknown family");
}

Distribution standardize_tld(double alpha, double lambda) {
  if (!(lambda > 0.0)) throw ParameterDomainError("standardize: TLD needs lambda > 0");
  if (is_three_halves(alpha))
    return Distribution::truncated_levy(alpha, lambda, 2.0 * std::numbers::sqrt2 * std::sqrt(lambda) / 3.0);
  if (alpha == 2.0) return Distribution::truncated_levy(alpha, lambda, 0.5);
  // Every cumulant is linear in gamma, so the unit-gamma variance fixes it.
  const double v1 = variance(Distribution::truncated_levy(alpha, lambda, 1.0));
  return Distribution::truncated_levy(alpha, lambda, 1.0 / v1);
}

double nu_to_q(double nu) {
  if (!(nu > 1.0)) throw ParameterDomainError("nu_to_q: nu must exceed 1");
  return (nu + 3.0) / (nu + 1.0);
}

double q_to_nu(double q) {
  if (!(q > 1.0 && q < 3.0)) throw ParameterDomainError("q_to_nu: q must lie in (1, 3)");
  return (3.0 - q) / (q - 1.0);
}

double beta_from_sigma_hat(double q, double sigma_hat) {
  if (!(q > 1.0 && q < 3.0) || !(sigma_hat > 0.0))
    throw ParameterDomainError("beta_from_sigma_hat: need 1 < q < 3 and sigma_hat > 0");
  return 1.0 / ((3.0 - q) * sigma_hat * sigma_hat);
}

double sigma_hat_from_beta(double q, double beta) {
  if (!(q > 1.0 && q < 3.0) || !(beta > 0.0))
    throw ParameterDomainError("sigma_hat_from_beta: need 1 < q < 3 and beta > 0");
  return 1.0 / std::sqrt((3.0 - q) * beta);
}

Family parse_family(const std::string& name) {
  if (name == "gaussian" || name == "normal") return Family::gaussian;
  if (name == "student" || name == "student_t" || name == "t") return Family::student_t;
  if (name == "qgaussian" || name == "q_gaussian" || name == "q-gaussian") return Family::q_gaussian;
  if (name == "tld" || name == "truncated_levy") return Family::truncated_levy;
  if (name == "mwd" || name == "weibull" || name == "modified_weibull") return Family::modified_weibull;
  throw ConfigError("unknown model '" + name + "' (expected gaussian, student, qgaussian, tld, mwd)");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::student_t: return "student";
    case Family::q_gaussian: return "qgaussian";
    case Family::truncated_levy: return "tld";
    case Family::modified_weibull: return "mwd";
  }
  return "unknown";
}

}  // namespace fattail

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "fattail/tld_density.hpp"

namespace fattail {

struct Gaussian {
  double mean = 0.0;
  double std = 1.0;
};

/// Scaled Student's t with zero location; nu > 2, sigma_hat > 0.
struct StudentT {
  double nu;
  double sigma_hat;
};

/// Tsallis q-Gaussian, 1 < q < 5/3, beta > 0.
struct QGaussian {
  double q;
  double beta;
};

/// Truncated Levy distribution. Holds its tabulated density, built once at
/// construction and shared between copies.
struct TruncatedLevy {
  TruncatedLevyParams params;
  std::shared_ptr<const TabulatedDensity> density;
};

/// Modified Weibull (stretched exponential), c > 0, chi > 0.
struct ModifiedWeibull {
  double c;
  double chi;
};

enum class Family { gaussian, student_t, q_gaussian, truncated_levy, modified_weibull };

/// Excess kurtosis, either finite or the distinguished value "infinite".
class ExcessKurtosis {
 public:
  static ExcessKurtosis finite(double v) { return ExcessKurtosis(false, v); }
  static ExcessKurtosis infinite() { return ExcessKurtosis(true, 0.0); }

  bool is_infinite() const { return infinite_; }
  /// Throws UnsupportedError for the infinite case.
  double value() const;

 private:
  ExcessKurtosis(bool inf, double v) : infinite_(inf), value_(v) {}
  bool infinite_;
  double value_;
};

struct TailExponent {
  double pdf;   // p(x) ~ |x|^-pdf
  double ccdf;  // P(x) ~ x^-(pdf - 1)
};

/// One of the five symmetric return models. Parameters are validated by the
/// factory functions; a constructed Distribution is immutable and
/// safe to share between threads.
class Distribution {
 public:
  using Model = std::variant<Gaussian, StudentT, QGaussian, TruncatedLevy, ModifiedWeibull>;

  static Distribution gaussian(double mean = 0.0, double std = 1.0);
  static Distribution student_t(double nu, double sigma_hat);
  static Distribution q_gaussian(double q, double beta);
  static Distribution truncated_levy(double alpha, double lambda, double gamma);
  static Distribution modified_weibull(double c, double chi);

  const Model& model() const { return model_; }
  Family family() const;

  /// Short model name: gaussian, student, qgaussian, tld, mwd.
  std::string name() const;
  /// Name with parameters, e.g. "student(nu=3,sigma_hat=0.57735)".
  std::string describe() const;

  bool is_gaussian() const { return family() == Family::gaussian; }

  /// For densities that diverge at the origin as |x|^e (e > -1), returns e.
  std::optional<double> origin_singularity() const;

 private:
  explicit Distribution(Model m);
  Model model_;
  double norm_ = 0.0;  // cached pdf normalization constant
  friend double pdf(const Distribution&, double);
};

double pdf(const Distribution& d, double x);
double variance(const Distribution& d);
ExcessKurtosis excess_kurtosis(const Distribution& d);

/// Power-law tail exponents for Student's t and q-Gaussian; nullopt for the
/// exponentially damped (TLD, MWD) and Gaussian models.
std::optional<TailExponent> tail_exponent(const Distribution& d);

/// Unit-variance member of a family given its shape parameter:
/// nu (Student), q (q-Gaussian), lambda (TLD, alpha = 3/2), c (MWD).
/// The Gaussian family ignores the shape and returns N(0,1).
Distribution standardize(Family family, double shape);

/// Unit-variance TLD for a general alpha.
Distribution standardize_tld(double alpha, double lambda);

double nu_to_q(double nu);
double q_to_nu(double q);
/// beta = 1 / ((3 - q) sigma_hat^2)
double beta_from_sigma_hat(double q, double sigma_hat);
double sigma_hat_from_beta(double q, double beta);

Family parse_family(const std::string& name);
std::string family_name(Family f);

}  // namespace fattail

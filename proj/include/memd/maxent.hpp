#pragma once

// Per-feature maximum-entropy marginals: p(x) = exp(-lambda0 - sum_k lambda_k x^k)
// constrained to match the empirical raw moments of one feature within one
// class.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "memd/quadrature.hpp"

namespace memd {

inline constexpr double kDefaultSmoothing = 1e-6;
inline constexpr double kDefaultVarianceFloor = 1e-4;

struct SupportSpec {
  enum class Kind { HalfLineNonNegative, RealLine, Interval };

  Kind kind = Kind::HalfLineNonNegative;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();

  static SupportSpec half_line() { return {}; }
  static SupportSpec real_line() {
    return {Kind::RealLine, -std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  }
  /// Throws Error(InvalidArgument) unless lower < upper, both finite.
  static SupportSpec interval(double lower, double upper);

  bool contains(double x) const noexcept { return x >= lower && x <= upper; }

  friend bool operator==(const SupportSpec&, const SupportSpec&) = default;
};

/// Monomial feature functions phi(x) = x^k for each order k.
class FeatureFunctionSpec {
 public:
  /// Orders must be non-empty, positive and strictly increasing.
  explicit FeatureFunctionSpec(std::vector<int> orders);

  /// {1, 2, ..., max_order}.
  static FeatureFunctionSpec up_to(int max_order);

  std::span<const int> orders() const noexcept { return orders_; }
  std::size_t size() const noexcept { return orders_.size(); }
  int max_order() const noexcept { return orders_.back(); }
  /// Position of `order` in the set, or -1.
  int index_of(int order) const noexcept;
  /// True for {1, ..., L}; affine changes of variable stay in the family.
  bool is_prefix() const noexcept;

  friend bool operator==(const FeatureFunctionSpec&, const FeatureFunctionSpec&) = default;

 private:
  std::vector<int> orders_;
};

struct MomentVector {
  std::vector<double> values;
  std::size_t sample_count = 0;

  friend bool operator==(const MomentVector&, const MomentVector&) = default;
};

/// Finite range the density's quadrature runs over. Equals the support for
/// bounded supports that the density fills; otherwise a truncation chosen so
/// the neglected mass is far below double precision.
struct Window {
  double lower = 0.0;
  double upper = 0.0;

  friend bool operator==(const Window&, const Window&) = default;
};

class MaxEntDensity {
 public:
  MaxEntDensity(SupportSpec support, FeatureFunctionSpec spec, std::vector<double> lambdas,
                double log_normalizer, MomentVector moments, Window window, double fit_tolerance);

  const SupportSpec& support() const noexcept { return support_; }
  const FeatureFunctionSpec& spec() const noexcept { return spec_; }
  std::span<const double> lambdas() const noexcept { return lambdas_; }
  double log_normalizer() const noexcept { return log_normalizer_; }
  /// The moments this density matches (after any smoothing).
  const MomentVector& moments() const noexcept { return moments_; }
  const Window& window() const noexcept { return window_; }
  double fit_tolerance() const noexcept { return fit_tolerance_; }

  /// sum_k lambda_k x^k, without the normalizer.
  double potential(double x) const noexcept;

  /// -lambda0 - potential(x); -inf outside the support.
  double log_density(double x) const noexcept;

  /// Integral of f(x) p(x) over the quadrature window.
  template <typename F>
  double expectation(F&& f, const GaussLegendreRule& rule = default_gauss_legendre()) const {
    return integrate(rule, window_.lower, window_.upper,
                     [&](double x) { return f(x) * std::exp(log_density(x)); });
  }

  friend bool operator==(const MaxEntDensity&, const MaxEntDensity&) = default;

 private:
  SupportSpec support_;
  FeatureFunctionSpec spec_;
  std::vector<double> lambdas_;
  double log_normalizer_;
  MomentVector moments_;
  Window window_;
  double fit_tolerance_;
};

inline double log_density(const MaxEntDensity& density, double x) noexcept {
  return density.log_density(x);
}

/// Throws Error(EmptyClass) for an empty sample.
MomentVector empirical_moments(std::span<const double> samples, const FeatureFunctionSpec& spec);

/// Moments from accumulated power sums sum_i x_i^order(k) over n samples.
MomentVector moments_from_power_sums(std::span<const double> power_sums, std::size_t n);

/// One-moment ME on [0, inf): the exponential with rate 1 / max(mu1, smoothing).
MaxEntDensity fit_exponential_halfline(const MomentVector& moments,
                                       double smoothing = kDefaultSmoothing);

/// Two-moment ME on the real line: the Gaussian with variance floored at
/// `variance_floor`.
MaxEntDensity fit_gaussian_realline(const MomentVector& moments,
                                    double variance_floor = kDefaultVarianceFloor);

struct SolverOptions {
  double tolerance = 1e-8;
  int max_iterations = 100;
};

/// Dual objective and moment residual after each accepted Newton step
/// (index 0 is the starting point).
struct SolverTrace {
  std::vector<double> objective;
  std::vector<double> residual;
};

/// Moment matching by damped Newton on the convex dual
///   D(lambda) = log Z(lambda) + sum_k lambda_k mu_k,
/// whose Hessian is the covariance of the feature functions. Expectations use
/// fixed-order Gauss-Legendre quadrature over a window derived from the
/// support and the target moments. Residuals are measured relative to
/// max(1, |mu_k|).
///
/// Throws Error(InvalidMoment) if the moments are outside the support's
/// moment hull and Error(SolverDiverged) when max_iterations is exhausted.
MaxEntDensity fit_numeric(const MomentVector& moments, const FeatureFunctionSpec& spec,
                          const SupportSpec& support, const SolverOptions& options = {},
                          SolverTrace* trace = nullptr);

struct FitOptions {
  double smoothing = kDefaultSmoothing;
  double variance_floor = kDefaultVarianceFloor;
  SolverOptions solver;
};

/// Throws Error(InvalidConfig) for combinations that have no normalizable ME
/// solution, e.g. the real line without a second-order constraint.
void validate_model_family(const FeatureFunctionSpec& spec, const SupportSpec& support);

/// Fits the marginal the toolkit uses for (spec, support): the closed forms
/// where they exist, otherwise fit_numeric on moments pulled into the
/// interior of the moment hull by the smoothing floors.
MaxEntDensity fit_marginal(const MomentVector& raw, const FeatureFunctionSpec& spec,
                           const SupportSpec& support, const FitOptions& options = {});

/// Quadrature estimate of the density's total mass.
double total_mass(const MaxEntDensity& density,
                  const GaussLegendreRule& rule = default_gauss_legendre());

}  // namespace memd

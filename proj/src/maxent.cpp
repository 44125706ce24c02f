#include "memd/maxent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "memd/error.hpp"

namespace memd {

namespace {

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Moment of order `k` from a vector indexed by the spec, with mu_0 = 1.
double moment_of_order(const MomentVector& m, const FeatureFunctionSpec& spec, int k) {
  if (k == 0) return 1.0;
  const int idx = spec.index_of(k);
  return m.values[static_cast<std::size_t>(idx)];
}

struct MeanVar {
  bool has_mean = false;
  bool has_second = false;
  double mean = 0.0;
  double var = 0.0;
};

MeanVar mean_var(const MomentVector& m, const FeatureFunctionSpec& spec) {
  MeanVar out;
  if (const int i1 = spec.index_of(1); i1 >= 0) {
    out.has_mean = true;
    out.mean = m.values[static_cast<std::size_t>(i1)];
  }
  if (const int i2 = spec.index_of(2); i2 >= 0) {
    out.has_second = true;
    out.var = m.values[static_cast<std::size_t>(i2)] - out.mean * out.mean;
  }
  return out;
}

void require_moment_hull(const MomentVector& m, const FeatureFunctionSpec& spec,
                         const SupportSpec& support) {
  if (!all_finite(m.values)) throw Error(ErrorCode::InvalidMoment, "non-finite moment");
  const MeanVar mv = mean_var(m, spec);
  if (mv.has_mean && mv.has_second && !(mv.var > 0.0)) {
    throw Error(ErrorCode::InvalidMoment, "second moment does not exceed squared mean");
  }
  const auto orders = spec.orders();
  switch (support.kind) {
    case SupportSpec::Kind::Interval: {
      const double lo = support.lower;
      const double hi = support.upper;
      for (std::size_t k = 0; k < orders.size(); ++k) {
        const double a = std::pow(lo, orders[k]);
        const double b = std::pow(hi, orders[k]);
        double mn = std::min(a, b);
        const double mx = std::max(a, b);
        if (orders[k] % 2 == 0 && lo < 0.0 && hi > 0.0) mn = 0.0;
        if (!(m.values[k] > mn && m.values[k] < mx)) {
          throw Error(ErrorCode::InvalidMoment, "moment of order " + std::to_string(orders[k]) +
                                                    " outside the support's range");
        }
      }
      if (mv.has_mean && mv.has_second) {
        const double mu2 = mv.var + mv.mean * mv.mean;
        if (!(mu2 < (lo + hi) * mv.mean - lo * hi)) {
          throw Error(ErrorCode::InvalidMoment, "variance exceeds the interval's maximum");
        }
      }
      break;
    }
    case SupportSpec::Kind::HalfLineNonNegative:
      for (std::size_t k = 0; k < orders.size(); ++k) {
        if (!(m.values[k] > 0.0)) {
          throw Error(ErrorCode::InvalidMoment, "half-line moments must be positive");
        }
      }
      break;
    case SupportSpec::Kind::RealLine:
      for (std::size_t k = 0; k < orders.size(); ++k) {
        if (orders[k] % 2 == 0 && !(m.values[k] > 0.0)) {
          throw Error(ErrorCode::InvalidMoment, "even moments must be positive");
        }
      }
      break;
  }
}

Window numeric_window(const MomentVector& m, const FeatureFunctionSpec& spec,
                      const SupportSpec& support) {
  const MeanVar mv = mean_var(m, spec);
  const double sd = mv.has_second ? std::sqrt(std::max(mv.var, 0.0)) : 0.0;
  switch (support.kind) {
    case SupportSpec::Kind::Interval: {
      const double lo = support.lower;
      const double hi = support.upper;
      if (!mv.has_mean) return {lo, hi};
      const double gap = std::min(mv.mean - lo, hi - mv.mean);
      const double half_width = mv.has_second ? 30.0 * std::max(sd, gap) : 60.0 * gap;
      return {std::max(lo, mv.mean - half_width), std::min(hi, mv.mean + half_width)};
    }
    case SupportSpec::Kind::HalfLineNonNegative: {
      if (mv.has_mean && mv.has_second) {
        return {std::max(0.0, mv.mean - 40.0 * sd), mv.mean + 40.0 * sd};
      }
      if (mv.has_mean) return {0.0, 60.0 * mv.mean};
      double scale = 0.0;
      const auto orders = spec.orders();
      for (std::size_t k = 0; k < orders.size(); ++k) {
        scale = std::max(scale, std::pow(m.values[k], 1.0 / orders[k]));
      }
      return {0.0, 60.0 * scale};
    }
    case SupportSpec::Kind::RealLine: {
      const double centre = mv.has_mean ? mv.mean : 0.0;
      const double spread = mv.has_mean ? sd : std::sqrt(moment_of_order(m, spec, 2));
      return {centre - 30.0 * spread, centre + 30.0 * spread};
    }
  }
  return {support.lower, support.upper};
}

// State of the dual at one parameter vector, in the scaled variable t.
struct DualPoint {
  double objective = 0.0;
  double log_partition = 0.0;
  Eigen::VectorXd mean;  // E[t^order]
  Eigen::MatrixXd cov;
  std::vector<double> weights;  // normalized node probabilities
};

class DualProblem {
 public:
  DualProblem(const FeatureFunctionSpec& spec, double t_lo, double t_hi, Eigen::VectorXd target)
      : orders_(spec.orders().begin(), spec.orders().end()), target_(std::move(target)) {
    const auto& rule = default_gauss_legendre();
    const double half = 0.5 * (t_hi - t_lo);
    const double mid = 0.5 * (t_hi + t_lo);
    const std::size_t n = rule.nodes.size();
    nodes_.resize(n);
    log_weights_.resize(n);
    phi_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(orders_.size()));
    for (std::size_t i = 0; i < n; ++i) {
      nodes_[i] = mid + half * rule.nodes[i];
      log_weights_[i] = std::log(half * rule.weights[i]);
      for (std::size_t k = 0; k < orders_.size(); ++k) {
        phi_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            std::pow(nodes_[i], orders_[k]);
      }
    }
  }

  std::span<const double> nodes() const { return nodes_; }

  DualPoint evaluate(const Eigen::VectorXd& theta) const {
    const std::size_t n = nodes_.size();
    const Eigen::VectorXd potential = phi_ * theta;
    std::vector<double> log_terms(n);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      log_terms[i] = log_weights_[i] - potential(static_cast<Eigen::Index>(i));
      peak = std::max(peak, log_terms[i]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += std::exp(log_terms[i] - peak);
    DualPoint out;
    out.log_partition = peak + std::log(sum);
    out.weights.resize(n);
    const auto l = static_cast<Eigen::Index>(orders_.size());
    out.mean = Eigen::VectorXd::Zero(l);
    for (std::size_t i = 0; i < n; ++i) {
      out.weights[i] = std::exp(log_terms[i] - out.log_partition);
      out.mean += out.weights[i] * phi_.row(static_cast<Eigen::Index>(i)).transpose();
    }
    out.cov = Eigen::MatrixXd::Zero(l, l);
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::VectorXd centred = phi_.row(static_cast<Eigen::Index>(i)).transpose() - out.mean;
      out.cov.noalias() += out.weights[i] * centred * centred.transpose();
    }
    out.objective = out.log_partition + theta.dot(target_);
    return out;
  }

  const Eigen::VectorXd& target() const { return target_; }

 private:
  std::vector<int> orders_;
  Eigen::VectorXd target_;
  std::vector<double> nodes_;
  std::vector<double> log_weights_;
  Eigen::MatrixXd phi_;
};

}  // namespace

SupportSpec SupportSpec::interval(double lower, double upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
    throw Error(ErrorCode::InvalidArgument, "interval support needs finite lower < upper");
  }
  return {Kind::Interval, lower, upper};
}

FeatureFunctionSpec::FeatureFunctionSpec(std::vector<int> orders) : orders_(std::move(orders)) {
  if (orders_.empty()) throw Error(ErrorCode::InvalidArgument, "feature function orders empty");
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    if (orders_[i] < 1 || (i > 0 && orders_[i] <= orders_[i - 1])) {
      throw Error(ErrorCode::InvalidArgument,
                  "feature function orders must be positive and strictly increasing");
    }
  }
}

FeatureFunctionSpec FeatureFunctionSpec::up_to(int max_order) {
  std::vector<int> orders;
  for (int k = 1; k <= max_order; ++k) orders.push_back(k);
  return FeatureFunctionSpec(std::move(orders));
}

int FeatureFunctionSpec::index_of(int order) const noexcept {
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    if (orders_[i] == order) return static_cast<int>(i);
  }
  return -1;
}

bool FeatureFunctionSpec::is_prefix() const noexcept {
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    if (orders_[i] != static_cast<int>(i) + 1) return false;
  }
  return true;
}

MaxEntDensity::MaxEntDensity(SupportSpec support, FeatureFunctionSpec spec,
                             std::vector<double> lambdas, double log_normalizer,
                             MomentVector moments, Window window, double fit_tolerance)
    : support_(support),
      spec_(std::move(spec)),
      lambdas_(std::move(lambdas)),
      log_normalizer_(log_normalizer),
      moments_(std::move(moments)),
      window_(window),
      fit_tolerance_(fit_tolerance) {
  if (lambdas_.size() != spec_.size() || moments_.values.size() != spec_.size()) {
    throw Error(ErrorCode::InvalidArgument, "density parameter lengths do not match the spec");
  }
}

double MaxEntDensity::potential(double x) const noexcept {
  const auto orders = spec_.orders();
  double acc = 0.0;
  for (std::size_t k = 0; k < orders.size(); ++k) {
    double power = x;
    for (int p = 1; p < orders[k]; ++p) power *= x;
    acc += lambdas_[k] * power;
  }
  return acc;
}

double MaxEntDensity::log_density(double x) const noexcept {
  if (!support_.contains(x)) return -std::numeric_limits<double>::infinity();
  return -log_normalizer_ - potential(x);
}

MomentVector empirical_moments(std::span<const double> samples, const FeatureFunctionSpec& spec) {
  if (samples.empty()) throw Error(ErrorCode::EmptyClass, "no samples to estimate moments from");
  const auto orders = spec.orders();
  std::vector<double> sums(orders.size(), 0.0);
  for (const double x : samples) {
    for (std::size_t k = 0; k < orders.size(); ++k) {
      double power = x;
      for (int p = 1; p < orders[k]; ++p) power *= x;
      sums[k] += power;
    }
  }
  return moments_from_power_sums(sums, samples.size());
}

MomentVector moments_from_power_sums(std::span<const double> power_sums, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::EmptyClass, "no samples to estimate moments from");
  MomentVector out;
  out.sample_count = n;
  out.values.reserve(power_sums.size());
  for (const double s : power_sums) out.values.push_back(s / static_cast<double>(n));
  return out;
}

MaxEntDensity fit_exponential_halfline(const MomentVector& moments, double smoothing) {
  if (moments.values.size() != 1) {
    throw Error(ErrorCode::InvalidArgument, "exponential fit takes exactly the first moment");
  }
  const double mu = moments.values[0];
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw Error(ErrorCode::InvalidMoment, "half-line mean must be non-negative and finite");
  }
  const double mean = std::max(mu, smoothing);
  const double rate = 1.0 / mean;
  MomentVector matched{{mean}, moments.sample_count};
  return MaxEntDensity(SupportSpec::half_line(), FeatureFunctionSpec({1}), {rate}, -std::log(rate),
                       std::move(matched), Window{0.0, 60.0 * mean}, 0.0);
}

MaxEntDensity fit_gaussian_realline(const MomentVector& moments, double variance_floor) {
  if (moments.values.size() != 2) {
    throw Error(ErrorCode::InvalidArgument, "Gaussian fit takes the first two moments");
  }
  if (!all_finite(moments.values)) throw Error(ErrorCode::InvalidMoment, "non-finite moment");
  const double mean = moments.values[0];
  const double raw_var = moments.values[1] - mean * mean;
  const double slack = 1e-12 * std::max(1.0, std::abs(moments.values[1]));
  if (raw_var < -slack) {
    throw Error(ErrorCode::InvalidMoment, "second moment below squared mean");
  }
  const double var = std::max(raw_var, variance_floor);
  if (!(var > 0.0)) throw Error(ErrorCode::InvalidMoment, "zero variance without a floor");
  const double lambda2 = 1.0 / (2.0 * var);
  const double lambda1 = -mean / var;
  const double lambda0 = mean * mean / (2.0 * var) + 0.5 * std::log(2.0 * std::numbers::pi * var);
  const double sd = std::sqrt(var);
  MomentVector matched{{mean, var + mean * mean}, moments.sample_count};
  return MaxEntDensity(SupportSpec::real_line(), FeatureFunctionSpec({1, 2}), {lambda1, lambda2},
                       lambda0, std::move(matched), Window{mean - 30.0 * sd, mean + 30.0 * sd},
                       0.0);
}

MaxEntDensity fit_numeric(const MomentVector& moments, const FeatureFunctionSpec& spec,
                          const SupportSpec& support, const SolverOptions& options,
                          SolverTrace* trace) {
  if (moments.values.size() != spec.size()) {
    throw Error(ErrorCode::InvalidArgument, "moment vector length does not match the spec");
  }
  validate_model_family(spec, support);
  require_moment_hull(moments, spec, support);

  const Window window = numeric_window(moments, spec, support);
  // Work in t = (x - centre) / scale so the window maps to [-1, 1] (prefix
  // orders) or into [-1, 1] (general orders, scaling only).
  const bool prefix = spec.is_prefix();
  const double centre = prefix ? 0.5 * (window.lower + window.upper) : 0.0;
  const double scale = prefix ? 0.5 * (window.upper - window.lower)
                              : std::max(std::abs(window.lower), std::abs(window.upper));
  const auto orders = spec.orders();
  const auto l = static_cast<Eigen::Index>(orders.size());

  Eigen::VectorXd target(l);
  for (Eigen::Index k = 0; k < l; ++k) {
    const int order = orders[static_cast<std::size_t>(k)];
    double acc = 0.0;
    if (prefix) {
      for (int j = 0; j <= order; ++j) {
        acc += binomial(order, j) * moment_of_order(moments, spec, j) * std::pow(-centre, order - j);
      }
    } else {
      acc = moments.values[static_cast<std::size_t>(k)];
    }
    target(k) = acc / std::pow(scale, order);
  }

  const DualProblem dual(spec, (window.lower - centre) / scale, (window.upper - centre) / scale,
                         target);

  auto residual_of = [&](const DualPoint& point) {
    double worst = 0.0;
    const auto nodes = dual.nodes();
    for (std::size_t k = 0; k < orders.size(); ++k) {
      double e = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        e += point.weights[i] * std::pow(centre + scale * nodes[i], orders[k]);
      }
      const double mu = moments.values[k];
      worst = std::max(worst, std::abs(e - mu) / std::max(1.0, std::abs(mu)));
    }
    return worst;
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(l);
  DualPoint point = dual.evaluate(theta);
  double residual = residual_of(point);
  if (trace != nullptr) {
    trace->objective.assign(1, point.objective);
    trace->residual.assign(1, residual);
  }

  int iteration = 0;
  while (residual > options.tolerance) {
    if (iteration >= options.max_iterations) {
      throw Error(ErrorCode::SolverDiverged,
                  "moment residual " + std::to_string(residual) + " after " +
                      std::to_string(iteration) + " Newton iterations");
    }
    ++iteration;
    // Newton direction on the dual: H delta = E[phi] - mu.
    const Eigen::VectorXd gradient = dual.target() - point.mean;
    Eigen::LDLT<Eigen::MatrixXd> solver(point.cov);
    Eigen::VectorXd step = solver.solve(-gradient);
    if (solver.info() != Eigen::Success || !step.allFinite()) {
      // Degenerate curvature; fall back to steepest descent.
      step = -gradient;
    }
    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, alpha *= 0.5) {
      const Eigen::VectorXd candidate = theta + alpha * step;
      DualPoint next = dual.evaluate(candidate);
      if (std::isfinite(next.objective) && next.objective <= point.objective) {
        theta = candidate;
        point = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw Error(ErrorCode::SolverDiverged,
                  "line search stalled at moment residual " + std::to_string(residual));
    }
    residual = residual_of(point);
    if (trace != nullptr) {
      trace->objective.push_back(point.objective);
      trace->residual.push_back(residual);
    }
  }

  // Back to x: sum_k theta_k ((x - c)/s)^k = const + sum_j lambda_j x^j.
  std::vector<double> lambdas(orders.size(), 0.0);
  double constant = 0.0;
  if (prefix) {
    for (std::size_t k = 0; k < orders.size(); ++k) {
      const int order = orders[k];
      const double coeff = theta(static_cast<Eigen::Index>(k)) / std::pow(scale, order);
      for (int j = 0; j <= order; ++j) {
        const double term = coeff * binomial(order, j) * std::pow(-centre, order - j);
        if (j == 0) {
          constant += term;
        } else {
          lambdas[static_cast<std::size_t>(j - 1)] += term;
        }
      }
    }
  } else {
    for (std::size_t k = 0; k < orders.size(); ++k) {
      lambdas[k] = theta(static_cast<Eigen::Index>(k)) / std::pow(scale, orders[k]);
    }
  }
  const double log_normalizer = point.log_partition + std::log(scale) + constant;
  return MaxEntDensity(support, spec, std::move(lambdas), log_normalizer, moments, window,
                       options.tolerance);
}

void validate_model_family(const FeatureFunctionSpec& spec, const SupportSpec& support) {
  if (support.kind == SupportSpec::Kind::RealLine &&
      (spec.index_of(2) < 0 || spec.max_order() % 2 != 0)) {
    throw Error(ErrorCode::InvalidConfig,
                "the real-line support needs a second-order constraint and an even top order");
  }
}

MaxEntDensity fit_marginal(const MomentVector& raw, const FeatureFunctionSpec& spec,
                           const SupportSpec& support, const FitOptions& options) {
  validate_model_family(spec, support);
  const bool one = spec == FeatureFunctionSpec({1});
  const bool two = spec == FeatureFunctionSpec({1, 2});
  if (support.kind == SupportSpec::Kind::HalfLineNonNegative && one) {
    return fit_exponential_halfline(raw, options.smoothing);
  }
  if (support.kind == SupportSpec::Kind::RealLine && two) {
    return fit_gaussian_realline(raw, options.variance_floor);
  }
  if (raw.values.size() != spec.size()) {
    throw Error(ErrorCode::InvalidArgument, "moment vector length does not match the spec");
  }
  if (!all_finite(raw.values)) throw Error(ErrorCode::InvalidMoment, "non-finite moment");

  MomentVector m = raw;
  const int i1 = spec.index_of(1);
  const int i2 = spec.index_of(2);
  auto at = [&](int idx) -> double& { return m.values[static_cast<std::size_t>(idx)]; };
  const auto orders = spec.orders();

  switch (support.kind) {
    case SupportSpec::Kind::Interval: {
      const double lo = support.lower;
      const double hi = support.upper;
      const double delta = std::max(options.smoothing, 1e-12) * (hi - lo);
      if (i1 >= 0) {
        at(i1) = std::clamp(at(i1), lo + delta, hi - delta);
        if (i2 >= 0) {
          const double mean = at(i1);
          const double gap = std::min(mean - lo, hi - mean);
          const double hull = (mean - lo) * (hi - mean);
          const double var_lo = std::min(options.variance_floor, 0.25 * gap * gap);
          const double var_hi = std::min(4.0 * gap * gap, 0.9 * hull);
          at(i2) = std::clamp(at(i2) - mean * mean, var_lo, var_hi) + mean * mean;
        }
      } else {
        for (std::size_t k = 0; k < orders.size(); ++k) {
          const double a = std::pow(lo, orders[k]);
          const double b = std::pow(hi, orders[k]);
          double mn = std::min(a, b);
          const double mx = std::max(a, b);
          if (orders[k] % 2 == 0 && lo < 0.0 && hi > 0.0) mn = 0.0;
          const double d = std::max(options.smoothing, 1e-12) * (mx - mn);
          m.values[k] = std::clamp(m.values[k], mn + d, mx - d);
        }
      }
      break;
    }
    case SupportSpec::Kind::HalfLineNonNegative: {
      for (double& v : m.values) v = std::max(v, options.smoothing);
      if (i1 >= 0 && i2 >= 0) {
        // Dispersion beyond the exponential's has no ME solution on [0, inf).
        const double mean = at(i1);
        const double var = std::clamp(at(i2) - mean * mean,
                                      std::min(options.variance_floor, 0.25 * mean * mean),
                                      mean * mean);
        at(i2) = var + mean * mean;
      }
      break;
    }
    case SupportSpec::Kind::RealLine: {
      const double mean = i1 >= 0 ? at(i1) : 0.0;
      const double var = std::max(at(i2) - mean * mean, options.variance_floor);
      at(i2) = var + mean * mean;
      break;
    }
  }
  return fit_numeric(m, spec, support, options.solver);
}

double total_mass(const MaxEntDensity& density, const GaussLegendreRule& rule) {
  return density.expectation([](double) { return 1.0; }, rule);
}

}  // namespace memd

#include "memd/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "memd/error.hpp"

namespace memd {

namespace {

constexpr double kSumSlack = 1e-12;

void require_same_size(std::span<const DiscreteDistribution> ps, const WeightVector& w) {
  if (ps.size() != w.size()) {
    throw Error(ErrorCode::InvalidArgument, "one weight per distribution required");
  }
  for (const auto& p : ps) {
    if (p.size() != ps.front().size()) {
      throw Error(ErrorCode::InvalidArgument, "distributions have different support sizes");
    }
  }
}

double xlogy_ratio(double p, double q) {
  if (p == 0.0) return 0.0;
  return p * std::log(p / q);
}

}  // namespace

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
  double sum = 0.0;
  for (const double w : weights_) {
    if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorCode::InvalidArgument, "weight outside [0, 1]");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumSlack) {
    throw Error(ErrorCode::InvalidArgument, "weights do not sum to 1");
  }
}

WeightVector WeightVector::uniform(std::size_t m) {
  return WeightVector(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

WeightVector WeightVector::from_counts(std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "counts sum to zero");
  std::vector<double> w;
  w.reserve(counts.size());
  for (const double c : counts) w.push_back(c / total);
  return WeightVector(std::move(w));
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> probabilities)
    : p_(std::move(probabilities)) {
  double sum = 0.0;
  for (const double v : p_) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumSlack) {
    throw Error(ErrorCode::InvalidArgument, "probabilities do not sum to 1");
  }
}

void require_compatible(const MaxEntDensity& p, const MaxEntDensity& q) {
  if (!(p.support() == q.support()) || !(p.spec() == q.spec())) {
    throw Error(ErrorCode::IncompatibleDensities,
                "densities differ in support or feature functions");
  }
}

double kl_closed_form(const MaxEntDensity& p, const MaxEntDensity& q) {
  require_compatible(p, q);
  const auto lp = p.lambdas();
  const auto lq = q.lambdas();
  const auto& mu = p.moments().values;
  double kl = q.log_normalizer() - p.log_normalizer();
  for (std::size_t k = 0; k < lp.size(); ++k) kl += (lq[k] - lp[k]) * mu[k];
  return std::max(kl, 0.0);
}

double j_divergence(const MaxEntDensity& p, const MaxEntDensity& q) {
  require_compatible(p, q);
  const auto lp = p.lambdas();
  const auto lq = q.lambdas();
  const auto& mp = p.moments().values;
  const auto& mq = q.moments().values;
  double j = 0.0;
  for (std::size_t k = 0; k < lp.size(); ++k) j += (lq[k] - lp[k]) * (mp[k] - mq[k]);
  return std::max(j, 0.0);
}

double kl_numeric(const MaxEntDensity& p, const MaxEntDensity& q, const GaussLegendreRule& rule) {
  require_compatible(p, q);
  return p.expectation([&](double x) { return p.log_density(x) - q.log_density(x); }, rule);
}

double js_gm(std::span<const MaxEntDensity> densities, const WeightVector& weights) {
  if (densities.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "one weight per density required");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    for (std::size_t j = i + 1; j < densities.size(); ++j) {
      // Each unordered pair appears twice in the double sum; the 1/2 cancels.
      total += weights[i] * weights[j] * j_divergence(densities[i], densities[j]);
    }
  }
  return total;
}

double kl_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::InvalidArgument, "distributions have different support sizes");
  }
  double kl = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) kl += xlogy_ratio(p[x], q[x]);
  return kl;
}

double j_divergence_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  return kl_discrete(p, q) + kl_discrete(q, p);
}

double js_divergence_discrete(std::span<const DiscreteDistribution> distributions,
                              const WeightVector& weights) {
  require_same_size(distributions, weights);
  if (distributions.empty()) return 0.0;
  const std::size_t s = distributions.front().size();
  std::vector<double> mixture(s, 0.0);
  for (std::size_t i = 0; i < distributions.size(); ++i) {
    for (std::size_t x = 0; x < s; ++x) mixture[x] += weights[i] * distributions[i][x];
  }
  double js = 0.0;
  for (std::size_t i = 0; i < distributions.size(); ++i) {
    if (weights[i] == 0.0) continue;
    double kl = 0.0;
    for (std::size_t x = 0; x < s; ++x) kl += xlogy_ratio(distributions[i][x], mixture[x]);
    js += weights[i] * kl;
  }
  return std::max(js, 0.0);
}

double js_gm_discrete(std::span<const DiscreteDistribution> distributions,
                      const WeightVector& weights) {
  require_same_size(distributions, weights);
  double total = 0.0;
  for (std::size_t i = 0; i < distributions.size(); ++i) {
    for (std::size_t j = 0; j < distributions.size(); ++j) {
      if (i == j || weights[i] == 0.0 || weights[j] == 0.0) continue;
      total += weights[i] * weights[j] * kl_discrete(distributions[i], distributions[j]);
    }
  }
  return total;
}

double mutual_information_discrete(const JointTable& joint) {
  if (joint.empty()) return 0.0;
  const std::size_t cols = joint.front().size();
  std::vector<double> row_marginal(joint.size(), 0.0);
  std::vector<double> col_marginal(cols, 0.0);
  for (std::size_t z = 0; z < joint.size(); ++z) {
    if (joint[z].size() != cols) throw Error(ErrorCode::InvalidArgument, "ragged joint table");
    for (std::size_t x = 0; x < cols; ++x) {
      row_marginal[z] += joint[z][x];
      col_marginal[x] += joint[z][x];
    }
  }
  double mi = 0.0;
  for (std::size_t z = 0; z < joint.size(); ++z) {
    for (std::size_t x = 0; x < cols; ++x) {
      mi += xlogy_ratio(joint[z][x], row_marginal[z] * col_marginal[x]);
    }
  }
  return std::max(mi, 0.0);
}

JointTable joint_from_mixture(std::span<const DiscreteDistribution> distributions,
                              const WeightVector& weights) {
  require_same_size(distributions, weights);
  JointTable joint(distributions.size());
  for (std::size_t i = 0; i < distributions.size(); ++i) {
    joint[i].resize(distributions[i].size());
    for (std::size_t x = 0; x < distributions[i].size(); ++x) {
      joint[i][x] = weights[i] * distributions[i][x];
    }
  }
  return joint;
}

}  // namespace memd

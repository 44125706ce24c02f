#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "memd/maxent.hpp"
#include "memd/quadrature.hpp"

namespace memd {

/// Mixture weights pi_1..pi_M: each in [0, 1], summing to 1 within 1e-12.
class WeightVector {
 public:
  WeightVector() = default;
  /// Throws Error(InvalidArgument) on a violated invariant.
  explicit WeightVector(std::vector<double> weights);

  static WeightVector uniform(std::size_t m);
  /// Normalizes non-negative counts (or any positive masses) into weights.
  static WeightVector from_counts(std::span<const double> counts);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }
  std::span<const double> values() const noexcept { return weights_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> weights_;
};

/// Probability vector over a finite support.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> probabilities);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const noexcept { return p_[i]; }
  std::span<const double> values() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

/// Throws Error(IncompatibleDensities) unless p and q share support and
/// feature functions.
void require_compatible(const MaxEntDensity& p, const MaxEntDensity& q);

/// KL(p || q) from the parameters: (lambda0' - lambda0) + sum_k (lambda_k' - lambda_k) mu_k,
/// with mu the moments of p. Rounding negatives are clamped to 0.
double kl_closed_form(const MaxEntDensity& p, const MaxEntDensity& q);

/// Jeffreys divergence sum_k (lambda_k' - lambda_k)(mu_k - mu_k'); the
/// normalizers cancel.
double j_divergence(const MaxEntDensity& p, const MaxEntDensity& q);

/// Quadrature of p ln(p/q) over p's window. Test oracle for the closed forms.
double kl_numeric(const MaxEntDensity& p, const MaxEntDensity& q,
                  const GaussLegendreRule& rule = default_gauss_legendre());

/// JS_GM = 1/2 sum_i sum_{j != i} pi_i pi_j J(P_i || P_j), through the pairwise
/// J form only.
double js_gm(std::span<const MaxEntDensity> densities, const WeightVector& weights);

// Discrete counterparts. KL terms with p = 0 contribute 0.

double kl_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q);

double j_divergence_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// sum_i pi_i KL(P_i || sum_j pi_j P_j), by direct summation.
double js_divergence_discrete(std::span<const DiscreteDistribution> distributions,
                              const WeightVector& weights);

/// sum_i sum_{j != i} pi_i pi_j KL(P_i || P_j): the KL to the weighted
/// geometric mean, in its pairwise form.
double js_gm_discrete(std::span<const DiscreteDistribution> distributions,
                      const WeightVector& weights);

/// Row-major M x S joint of (Z, X).
using JointTable = std::vector<std::vector<double>>;

/// I(X; Z) = sum joint ln(joint / (row marginal * column marginal)).
double mutual_information_discrete(const JointTable& joint);

/// Joint with P(Z = i, X = x) = pi_i P_i(x).
JointTable joint_from_mixture(std::span<const DiscreteDistribution> distributions,
                              const WeightVector& weights);

}  // namespace memd

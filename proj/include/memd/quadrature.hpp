#pragma once

#include <cstddef>
#include <vector>

namespace memd {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr std::size_t kDefaultQuadratureOrder = 256;

/// Computes an n-point rule by Newton iteration on P_n. n >= 1.
GaussLegendreRule make_gauss_legendre(std::size_t n);

/// Cached rule for the common order; thread-safe.
const GaussLegendreRule& default_gauss_legendre();

/// Integrates f over [a, b] with the given rule.
template <typename F>
double integrate(const GaussLegendreRule& rule, double a, double b, F&& f) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * acc;
}

}  // namespace memd

#include <cassert>

#include "memd/kernels.hpp"

namespace memd::kernels::scalar {

void accumulate_powers(std::span<const double> x, std::span<double> sum1, std::span<double> sum2) {
  assert(sum1.size() == x.size() && sum2.size() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    sum1[i] += v;
    sum2[i] += v * v;
  }
}

void accumulate_j(std::span<const double> lambda_p, std::span<const double> lambda_q,
                  std::span<const double> mu_p, std::span<const double> mu_q,
                  std::span<double> out) {
  assert(lambda_q.size() == out.size() && lambda_p.size() == out.size());
  assert(mu_p.size() == out.size() && mu_q.size() == out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += (lambda_q[i] - lambda_p[i]) * (mu_p[i] - mu_q[i]);
  }
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

double quadratic_loglik(std::span<const double> x, std::span<const double> c0,
                        std::span<const double> c1, std::span<const double> c2) {
  assert(c0.size() == x.size() && c1.size() == x.size() && c2.size() == x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    acc += c0[i] + v * (c1[i] + v * c2[i]);
  }
  return -acc;
}

}  // namespace memd::kernels::scalar

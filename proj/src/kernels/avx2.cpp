// Compiled with -mavx2 -mfma; only reached through the dispatch table after a
// CPUID check.

#include <immintrin.h>

#include <cassert>

#include "memd/kernels.hpp"

namespace memd::kernels::avx2 {

namespace {
constexpr std::size_t kLanes = 4;
}

// The elementwise kernels deliberately avoid FMA so that their results match
// the scalar reference bit for bit.

void accumulate_powers(std::span<const double> x, std::span<double> sum1, std::span<double> sum2) {
  assert(sum1.size() == x.size() && sum2.size() == x.size());
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    const __m256d s1 = _mm256_loadu_pd(sum1.data() + i);
    const __m256d s2 = _mm256_loadu_pd(sum2.data() + i);
    _mm256_storeu_pd(sum1.data() + i, _mm256_add_pd(s1, v));
    _mm256_storeu_pd(sum2.data() + i, _mm256_add_pd(s2, _mm256_mul_pd(v, v)));
  }
  for (; i < n; ++i) {
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
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d dl = _mm256_sub_pd(_mm256_loadu_pd(lambda_q.data() + i),
                                     _mm256_loadu_pd(lambda_p.data() + i));
    const __m256d dm =
        _mm256_sub_pd(_mm256_loadu_pd(mu_p.data() + i), _mm256_loadu_pd(mu_q.data() + i));
    const __m256d acc = _mm256_loadu_pd(out.data() + i);
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(acc, _mm256_mul_pd(dl, dm)));
  }
  for (; i < n; ++i) out[i] += (lambda_q[i] - lambda_p[i]) * (mu_p[i] - mu_q[i]);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i));
    _mm256_storeu_pd(y.data() + i, _mm256_add_pd(_mm256_loadu_pd(y.data() + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double quadratic_loglik(std::span<const double> x, std::span<const double> c0,
                        std::span<const double> c1, std::span<const double> c2) {
  assert(c0.size() == x.size() && c1.size() == x.size() && c2.size() == x.size());
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  // Two accumulators to hide FMA latency.
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    const __m256d va = _mm256_loadu_pd(x.data() + i);
    const __m256d vb = _mm256_loadu_pd(x.data() + i + kLanes);
    const __m256d ha = _mm256_fmadd_pd(va, _mm256_loadu_pd(c2.data() + i),
                                       _mm256_loadu_pd(c1.data() + i));
    const __m256d hb = _mm256_fmadd_pd(vb, _mm256_loadu_pd(c2.data() + i + kLanes),
                                       _mm256_loadu_pd(c1.data() + i + kLanes));
    acc0 = _mm256_add_pd(acc0, _mm256_fmadd_pd(va, ha, _mm256_loadu_pd(c0.data() + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_fmadd_pd(vb, hb, _mm256_loadu_pd(c0.data() + i + kLanes)));
  }
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d va = _mm256_loadu_pd(x.data() + i);
    const __m256d ha = _mm256_fmadd_pd(va, _mm256_loadu_pd(c2.data() + i),
                                       _mm256_loadu_pd(c1.data() + i));
    acc0 = _mm256_add_pd(acc0, _mm256_fmadd_pd(va, ha, _mm256_loadu_pd(c0.data() + i)));
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double total = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) {
    const double v = x[i];
    total += c0[i] + v * (c1[i] + v * c2[i]);
  }
  return -total;
}

}  // namespace memd::kernels::avx2

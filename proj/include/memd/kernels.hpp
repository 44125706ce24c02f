#pragma once

// Data-parallel inner loops used by marginal fitting, feature scoring and
// prediction. Each kernel has a portable scalar reference and an AVX2
// variant; the active table is chosen once at startup from CPUID and can be
// overridden (tests, or MEMD_KERNELS=scalar in the environment).

#include <span>
#include <string_view>

namespace memd::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend backend);

/// sum1[i] += x[i]; sum2[i] += x[i]*x[i]. Elementwise, bit-identical across
/// backends.
using AccumulatePowersFn = void (*)(std::span<const double> x, std::span<double> sum1,
                                    std::span<double> sum2);

/// out[i] += (lambda_q[i] - lambda_p[i]) * (mu_p[i] - mu_q[i]). One order's
/// term of the closed-form J divergence, batched over features. Elementwise,
/// bit-identical across backends.
using AccumulateJFn = void (*)(std::span<const double> lambda_p, std::span<const double> lambda_q,
                               std::span<const double> mu_p, std::span<const double> mu_q,
                               std::span<double> out);

/// y[i] += a * x[i]. Elementwise, bit-identical across backends.
using AxpyFn = void (*)(double a, std::span<const double> x, std::span<double> y);

/// Returns -sum_i (c0[i] + c1[i]*x[i] + c2[i]*x[i]^2): the log-likelihood of
/// x under independent quadratic-exponential marginals. A reduction, so the
/// backends agree only to rounding.
using QuadraticLogLikFn = double (*)(std::span<const double> x, std::span<const double> c0,
                                     std::span<const double> c1, std::span<const double> c2);

struct KernelTable {
  Backend backend;
  AccumulatePowersFn accumulate_powers;
  AccumulateJFn accumulate_j;
  AxpyFn axpy;
  QuadraticLogLikFn quadratic_loglik;
};

namespace scalar {
void accumulate_powers(std::span<const double> x, std::span<double> sum1, std::span<double> sum2);
void accumulate_j(std::span<const double> lambda_p, std::span<const double> lambda_q,
                  std::span<const double> mu_p, std::span<const double> mu_q,
                  std::span<double> out);
void axpy(double a, std::span<const double> x, std::span<double> y);
double quadratic_loglik(std::span<const double> x, std::span<const double> c0,
                        std::span<const double> c1, std::span<const double> c2);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define MEMD_HAVE_AVX2_KERNELS 1
namespace avx2 {
void accumulate_powers(std::span<const double> x, std::span<double> sum1, std::span<double> sum2);
void accumulate_j(std::span<const double> lambda_p, std::span<const double> lambda_q,
                  std::span<const double> mu_p, std::span<const double> mu_q,
                  std::span<double> out);
void axpy(double a, std::span<const double> x, std::span<double> y);
double quadratic_loglik(std::span<const double> x, std::span<const double> c0,
                        std::span<const double> c1, std::span<const double> c2);
}  // namespace avx2
#else
#define MEMD_HAVE_AVX2_KERNELS 0
#endif

bool backend_supported(Backend backend);

const KernelTable& table_for(Backend backend);

/// The table in use by the library.
const KernelTable& active();

/// Switches the active table. Throws Error(InvalidArgument) if the CPU lacks
/// the instruction set. Not meant to be called while other threads run kernels.
void select_backend(Backend backend);

}  // namespace memd::kernels

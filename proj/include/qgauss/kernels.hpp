#pragma once

#include <span>
#include <string_view>

namespace qgauss::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Best instruction set supported by this build and CPU. Setting the
/// environment variable QGAUSS_SIMD=scalar forces the scalar path.
Isa detect_isa();

/// detect_isa(), evaluated once.
Isa active_isa();

/// Steps every lane (w[i], v[i]) by the degree-d Chebyshev pair, including
/// the circle restore. Results are bit-identical across Isa values.
void chebyshev_step(int d, std::span<double> w, std::span<double> v, Isa isa = active_isa());

/// max_i max(upper[i] - cdf[i], cdf[i] - lower[i]) * weight[i], with an
/// empty weight meaning 1. Spans must have equal length (weight may be empty).
double sup_deviation(std::span<const double> cdf, std::span<const double> lower,
                     std::span<const double> upper, std::span<const double> weight,
                     Isa isa = active_isa());

namespace scalar {
void chebyshev_step(int d, double* w, double* v, std::size_t n);
double sup_deviation(const double* cdf, const double* lower, const double* upper,
                     const double* weight, std::size_t n);
}  // namespace scalar

#if QGAUSS_HAVE_AVX2
namespace avx2 {
void chebyshev_step(int d, double* w, double* v, std::size_t n);
double sup_deviation(const double* cdf, const double* lower, const double* upper,
                     const double* weight, std::size_t n);
}  // namespace avx2
#endif

}  // namespace qgauss::kernels

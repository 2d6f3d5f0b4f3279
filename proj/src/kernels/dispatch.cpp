#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "qgauss/error.hpp"
#include "qgauss/kernels.hpp"

namespace qgauss::kernels {

std::string_view to_string(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

Isa detect_isa() {
  if (const char* forced = std::getenv("QGAUSS_SIMD"); forced && std::strcmp(forced, "scalar") == 0)
    return Isa::scalar;
#if QGAUSS_HAVE_AVX2
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa active_isa() {
  static const Isa isa = detect_isa();
  return isa;
}

void chebyshev_step(int d, std::span<double> w, std::span<double> v, Isa isa) {
  if (w.size() != v.size()) throw std::invalid_argument("chebyshev_step: w and v differ in length");
  if (d < 1 || d > 8) throw DomainError("chebyshev degree must be in 1..8");
#if QGAUSS_HAVE_AVX2
  if (isa == Isa::avx2) return avx2::chebyshev_step(d, w.data(), v.data(), w.size());
#endif
  (void)isa;
  scalar::chebyshev_step(d, w.data(), v.data(), w.size());
}

double sup_deviation(std::span<const double> cdf, std::span<const double> lower,
                     std::span<const double> upper, std::span<const double> weight, Isa isa) {
  const std::size_t n = cdf.size();
  if (lower.size() != n || upper.size() != n || (!weight.empty() && weight.size() != n))
    throw std::invalid_argument("sup_deviation: span lengths differ");
  const double* wt = weight.empty() ? nullptr : weight.data();
#if QGAUSS_HAVE_AVX2
  if (isa == Isa::avx2) return avx2::sup_deviation(cdf.data(), lower.data(), upper.data(), wt, n);
#endif
  (void)isa;
  return scalar::sup_deviation(cdf.data(), lower.data(), upper.data(), wt, n);
}

}  // namespace qgauss::kernels

#include <algorithm>

#include "qgauss/detail/circle.hpp"
#include "qgauss/kernels.hpp"

namespace qgauss::kernels::scalar {

void chebyshev_step(int d, double* w, double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const CirclePoint p = detail::circle_step(d, {w[i], v[i]});
    w[i] = p.w;
    v[i] = p.v;
  }
}

double sup_deviation(const double* cdf, const double* lower, const double* upper,
                     const double* weight, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dev = std::max(upper[i] - cdf[i], cdf[i] - lower[i]);
    if (weight != nullptr) dev *= weight[i];
    best = std::max(best, dev);
  }
  return best;
}

}  // namespace qgauss::kernels::scalar

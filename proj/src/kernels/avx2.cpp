#include <immintrin.h>

#include <algorithm>

#include "qgauss/detail/circle.hpp"
#include "qgauss/kernels.hpp"

namespace qgauss::kernels::avx2 {
namespace {

// Four doubles with the scalar operator set, so the templated Horner forms
// in detail/circle.hpp expand to the same operation sequence per lane.
struct V4 {
  __m256d x;
};

inline V4 operator*(V4 a, V4 b) { return {_mm256_mul_pd(a.x, b.x)}; }
inline V4 operator*(double a, V4 b) { return {_mm256_mul_pd(_mm256_set1_pd(a), b.x)}; }
inline V4 operator+(V4 a, double b) { return {_mm256_add_pd(a.x, _mm256_set1_pd(b))}; }
inline V4 operator-(V4 a, double b) { return {_mm256_sub_pd(a.x, _mm256_set1_pd(b))}; }

inline __m256d abs_pd(__m256d a) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), a); }

inline __m256d copysign_pd(__m256d mag, __m256d sign) {
  const __m256d mask = _mm256_set1_pd(-0.0);
  return _mm256_or_pd(_mm256_andnot_pd(mask, mag), _mm256_and_pd(mask, sign));
}

// Same branches as detail::restore_circle, taken per lane with blends.
inline void restore(__m256d& w, __m256d& v) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();

  const __m256d collapsed = _mm256_cmp_pd(abs_pd(w), one, _CMP_GE_OQ);
  const __m256d av = abs_pd(v);
  const __m256d w2 = _mm256_max_pd(_mm256_mul_pd(_mm256_sub_pd(one, av), _mm256_add_pd(one, av)), zero);
  const __m256d w_fixed = copysign_pd(_mm256_sqrt_pd(w2), w);

  const __m256d drift = _mm256_sub_pd(_mm256_add_pd(_mm256_mul_pd(w, w), _mm256_mul_pd(v, v)), one);
  const __m256d drifted = _mm256_andnot_pd(
      collapsed, _mm256_cmp_pd(abs_pd(drift), _mm256_set1_pd(maps::kCircleDriftTolerance), _CMP_GT_OQ));
  const __m256d v2 = _mm256_max_pd(_mm256_mul_pd(_mm256_sub_pd(one, w), _mm256_add_pd(one, w)), zero);
  const __m256d v_fixed = copysign_pd(_mm256_sqrt_pd(v2), v);

  w = _mm256_blendv_pd(w, w_fixed, collapsed);
  v = _mm256_blendv_pd(v, v_fixed, drifted);
}

}  // namespace

void chebyshev_step(int d, double* w, double* v, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const V4 wv{_mm256_loadu_pd(w + i)};
    const V4 vv{_mm256_loadu_pd(v + i)};
    __m256d v_next = detail::chebyshev_q(d, wv, vv).x;
    __m256d w_next = detail::chebyshev_p(d, wv).x;
    restore(w_next, v_next);
    _mm256_storeu_pd(w + i, w_next);
    _mm256_storeu_pd(v + i, v_next);
  }
  for (; i < n; ++i) {
    const CirclePoint p = detail::circle_step(d, {w[i], v[i]});
    w[i] = p.w;
    v[i] = p.v;
  }
}

double sup_deviation(const double* cdf, const double* lower, const double* upper,
                     const double* weight, std::size_t n) {
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d f = _mm256_loadu_pd(cdf + i);
    __m256d dev = _mm256_max_pd(_mm256_sub_pd(_mm256_loadu_pd(upper + i), f),
                                _mm256_sub_pd(f, _mm256_loadu_pd(lower + i)));
    if (weight != nullptr) dev = _mm256_mul_pd(dev, _mm256_loadu_pd(weight + i));
    best = _mm256_max_pd(dev, best);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double result = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    double dev = std::max(upper[i] - cdf[i], cdf[i] - lower[i]);
    if (weight != nullptr) dev *= weight[i];
    result = std::max(result, dev);
  }
  return result;
}

}  // namespace qgauss::kernels::avx2

#pragma once

// Scalar reference for the circle step. The AVX2 kernel in
// src/kernels/avx2.cpp mirrors these expressions operation for operation;
// change both together.

#include <algorithm>
#include <cmath>

#include "qgauss/maps.hpp"

namespace qgauss::detail {

// Horner forms of P_d(w) = cos(d t) and Q_d(w, v) = sin(d t). The d = 8 pair
// is written exactly as in the reference C implementation of the generator.
// T is double or a vector type with the same arithmetic operators.
template <class T>
inline T chebyshev_p(int d, T w) {
  const T w2 = w * w;
  switch (d) {
    case 1: return w;
    case 2: return 2.0 * w2 - 1.0;
    case 3: return (4.0 * w2 - 3.0) * w;
    case 4: return (8.0 * w2 - 8.0) * w2 + 1.0;
    case 5: return ((16.0 * w2 - 20.0) * w2 + 5.0) * w;
    case 6: return ((32.0 * w2 - 48.0) * w2 + 18.0) * w2 - 1.0;
    case 7: return (((64.0 * w2 - 112.0) * w2 + 56.0) * w2 - 7.0) * w;
    default: return (((128.0 * w * w - 256.0) * w * w + 160.0) * w * w - 32.0) * w * w + 1.0;
  }
}

template <class T>
inline T chebyshev_q(int d, T w, T v) {
  const T w2 = w * w;
  switch (d) {
    case 1: return v;
    case 2: return 2.0 * w * v;
    case 3: return v * (4.0 * w2 - 1.0);
    case 4: return 4.0 * w * v * (2.0 * w2 - 1.0);
    case 5: return v * ((16.0 * w2 - 12.0) * w2 + 1.0);
    case 6: return 2.0 * w * v * ((16.0 * w2 - 16.0) * w2 + 3.0);
    case 7: return v * (((64.0 * w2 - 80.0) * w2 + 24.0) * w2 - 1.0);
    default: return 8 * w * v * (((16.0 * w * w - 24.0) * w * w + 10.0) * w * w - 1.0);
  }
}

inline CirclePoint restore_circle(CirclePoint p) {
  if (std::fabs(p.w) >= 1.0) {
    const double av = std::fabs(p.v);
    const double w2 = std::max(0.0, (1.0 - av) * (1.0 + av));
    return {std::copysign(std::sqrt(w2), p.w), p.v};
  }
  const double drift = p.w * p.w + p.v * p.v - 1.0;
  if (std::fabs(drift) > maps::kCircleDriftTolerance) {
    const double v2 = std::max(0.0, (1.0 - p.w) * (1.0 + p.w));
    return {p.w, std::copysign(std::sqrt(v2), p.v)};
  }
  return p;
}

// Q is evaluated from the pre-step w before P overwrites it.
inline CirclePoint circle_step(int d, CirclePoint p) {
  const double v_next = chebyshev_q(d, p.w, p.v);
  const double w_next = chebyshev_p(d, p.w);
  return restore_circle({w_next, v_next});
}

}  // namespace qgauss::detail

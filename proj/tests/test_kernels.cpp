#include "qgauss/kernels.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "qgauss/maps.hpp"

using namespace qgauss;

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("isa names and detection") {
  CHECK(kernels::to_string(kernels::Isa::scalar) == "scalar");
  CHECK(kernels::to_string(kernels::Isa::avx2) == "avx2");
  CHECK(kernels::active_isa() == kernels::detect_isa());
}

TEST_CASE("chebyshev_step agrees with the scalar map") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-3.14159, 3.14159);
  for (int d = 1; d <= 8; ++d) {
    std::vector<double> w(37), v(37);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double t = angle(rng);
      w[i] = std::cos(t);
      v[i] = std::sin(t);
    }
    std::vector<double> ew = w, ev = v;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const CirclePoint p = maps::chebyshev_pair(d, {ew[i], ev[i]});
      ew[i] = p.w;
      ev[i] = p.v;
    }
    kernels::chebyshev_step(d, w, v, kernels::Isa::scalar);
    CHECK(bitwise_equal(w, ew));
    CHECK(bitwise_equal(v, ev));
  }
}

#if QGAUSS_HAVE_AVX2
TEST_CASE("AVX2 chebyshev_step is bit-identical to scalar") {
  if (kernels::detect_isa() != kernels::Isa::avx2) return;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> angle(-3.14159, 3.14159);
  for (int d = 1; d <= 8; ++d) {
    // Odd length exercises the scalar tail; special lanes exercise the restore branches.
    std::vector<double> w(1001), v(1001);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double t = angle(rng);
      w[i] = std::cos(t);
      v[i] = std::sin(t);
    }
    w[0] = 1.0; v[0] = 0.0;
    w[1] = -1.0; v[1] = 0.0;
    w[2] = 1.0000001; v[2] = 1e-4;
    w[3] = 0.6; v[3] = 0.8 + 1e-7;
    w[4] = -0.0; v[4] = -1.0;
    std::vector<double> sw = w, sv = v;
    for (int step = 0; step < 2000; ++step) {
      kernels::chebyshev_step(d, w, v, kernels::Isa::avx2);
      kernels::chebyshev_step(d, sw, sv, kernels::Isa::scalar);
    }
    CAPTURE(d);
    CHECK(bitwise_equal(w, sw));
    CHECK(bitwise_equal(v, sv));
  }
}

TEST_CASE("AVX2 sup_deviation equals scalar") {
  if (kernels::detect_isa() != kernels::Isa::avx2) return;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n : {1u, 3u, 4u, 5u, 64u, 1023u}) {
    std::vector<double> f(n), lo(n), hi(n), wt(n);
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = u(rng);
      lo[i] = static_cast<double>(i) / n;
      hi[i] = (i + 1.0) / n;
      wt[i] = 1.0 + 10.0 * u(rng);
    }
    CHECK(kernels::sup_deviation(f, lo, hi, {}, kernels::Isa::avx2) ==
          kernels::sup_deviation(f, lo, hi, {}, kernels::Isa::scalar));
    CHECK(kernels::sup_deviation(f, lo, hi, wt, kernels::Isa::avx2) ==
          kernels::sup_deviation(f, lo, hi, wt, kernels::Isa::scalar));
  }
}
#endif

TEST_CASE("kernel argument checks") {
  std::vector<double> w(3), v(2);
  CHECK_THROWS(kernels::chebyshev_step(2, w, v));
  std::vector<double> a(3), b(3), c(2);
  CHECK_THROWS(kernels::sup_deviation(a, b, c, {}));
}

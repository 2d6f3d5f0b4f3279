#include "qgauss/generator.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracle/reference_c.hpp"
#include "qgauss/distribution.hpp"
#include "qgauss/error.hpp"
#include "qgauss/kernels.hpp"
#include "qgauss/stats.hpp"

using namespace qgauss;

TEST_CASE("make_spec parameter mapping") {
  const QSpec unit = make_spec(1.0);
  CHECK(unit.q_int == 1.0);
  CHECK_FALSE(unit.nu.has_value());
  CHECK(unit.regime() == Regime::gaussian);
  CHECK(make_spec(-1.0).q_int == 0.0);
  CHECK(make_spec(-1.0).regime() == Regime::compact);
  REQUIRE(make_spec(1.5).nu.has_value());
  CHECK(*make_spec(1.5).nu == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(make_spec(1.5).q_int == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(make_spec(3.0), DomainError);
  CHECK_THROWS_AS(make_spec(4.0), DomainError);
  CHECK_THROWS_AS(make_spec(std::nan("")), DomainError);
}

TEST_CASE("init_state seeds") {
  const MapConfig cfg;
  const GeneratorState s = init_state(make_spec(1.0), cfg, {0.1, 1.0, 1});
  CHECK(s.point.w == std::sqrt(0.99));
  CHECK(s.point.v == 0.1);
  CHECK(s.step_count == 0);

  const double r = 1.0 / std::sqrt(2.0);
  const GeneratorState neg = init_state(make_spec(1.0), cfg, {r, 1.0, -1});
  CHECK(neg.point.w == doctest::Approx(-r).epsilon(1e-15));
  CHECK(std::fabs(neg.point.w * neg.point.w + neg.point.v * neg.point.v - 1.0) <= 1e-15);

  CHECK_THROWS_AS(init_state(make_spec(1.0), cfg, {1.0, 1.0, 1}), DomainError);
  CHECK_THROWS_AS(init_state(make_spec(1.0), cfg, {0.0, 1.0, 1}), DomainError);
  CHECK_THROWS_AS(init_state(make_spec(1.0), cfg, {0.1, 0.0, 1}), DomainError);
  CHECK_THROWS_AS(init_state(make_spec(1.0), cfg, {0.1, 1.0, 0}), DomainError);
  // q' = -1 gives q = 0 and a z support of sqrt(2).
  CHECK_THROWS_AS(init_state(make_spec(-1.0), cfg, {0.1, 1.5, 1}), DomainError);
}

TEST_CASE("first outputs agree with the reference C generator") {
  oracle::ReferenceGenerator ref;
  ref.setseed_qnormal(0.1, 1.0);
  GeneratorState s = init_state(make_spec(1.0), MapConfig{}, Seeds{});
  for (int i = 0; i < 100; ++i) {
    double xi = 0.0, eta = 0.0;
    ref.next(1.0, xi, eta);
    const Sample out = step(s);
    CHECK(std::fabs(out.xi - xi) <= 1e-12);
    CHECK(std::fabs(out.eta - eta) <= 1e-12);
  }
  CHECK(s.step_count == 100);
}

TEST_CASE("step output lies on the circle of radius z") {
  for (double q : {-0.7, 0.5, 1.0, 1.9, 2.7}) {
    GeneratorState s = init_state(make_spec(q), MapConfig{}, Seeds{0.37, 0.8, -1});
    for (int i = 0; i < 10000; ++i) {
      const Sample out = step(s);
      const double r2 = out.xi * out.xi + out.eta * out.eta;
      CHECK(std::fabs(r2 - s.z * s.z) <= 1e-9 * std::max(1.0, s.z * s.z));
    }
  }
}

TEST_CASE("circle invariant after a million steps") {
  GeneratorState s = init_state(make_spec(1.2), MapConfig{}, Seeds{});
  for (int i = 0; i < 1000000; ++i) step(s);
  CHECK(std::fabs(s.point.w * s.point.w + s.point.v * s.point.v - 1.0) <= 1e-9);
  CHECK(std::isfinite(s.z));
}

TEST_CASE("compact support bound") {
  for (double q : {-2.0, -0.5, 0.6, 0.95}) {
    const auto batch = generate_chaotic(make_spec(q), MapConfig{}, Seeds{}, 100000);
    const double bound = std::sqrt((3.0 - q) / (1.0 - q)) + 1e-9;
    for (double x : batch.xi) CHECK_UNARY(std::fabs(x) <= bound);
  }
}

TEST_CASE("mean of xi is zero") {
  const auto batch = generate_chaotic(make_spec(0.5), MapConfig{}, Seeds{}, 10000);
  const auto bm = stats::batch_means(batch.xi, 20);
  CHECK(std::fabs(bm.mean) <= 3.0 * bm.standard_error);
}

TEST_CASE("batches are reproducible and honour burn-in") {
  const MapConfig cfg;
  const auto a = generate_chaotic(make_spec(1.3), cfg, Seeds{}, 1000);
  const auto b = generate_chaotic(make_spec(1.3), cfg, Seeds{}, 1000);
  CHECK(a.xi == b.xi);
  CHECK(a.eta == b.eta);
  const auto c = generate_chaotic(make_spec(1.3), cfg, Seeds{}, 900, 100);
  CHECK(std::equal(c.xi.begin(), c.xi.end(), a.xi.begin() + 100));
  CHECK(c.burn_in == 100);
  CHECK(c.count == 900);
}

TEST_CASE("lane generator is bit-identical to single generators") {
  const QSpec spec = make_spec(1.7);
  MapConfig cfg;
  cfg.degree = 6;
  cfg.iterations = 6;
  const auto seeds = derive_seeds(spec, 99, 11);
  const auto lanes = generate_chaotic_lanes(spec, cfg, seeds, 5000, 7);
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const auto single = generate_chaotic(spec, cfg, seeds[k], 5000, 7);
    CHECK(single.xi == lanes[k].xi);
    CHECK(single.eta == lanes[k].eta);
  }
}

TEST_CASE("gbmm transform") {
  const QSpec unit = make_spec(1.0);
  const auto [x, y] = gbmm_sample(unit, 0.3, 0.1);
  const double r = std::sqrt(-2.0 * std::log(0.3));
  CHECK(x == doctest::Approx(r * std::cos(0.2 * std::numbers::pi)).epsilon(1e-15));
  CHECK(y == doctest::Approx(r * std::sin(0.2 * std::numbers::pi)).epsilon(1e-15));

  const QSpec heavy = make_spec(1.6);
  const auto [x2, y2] = gbmm_sample(heavy, 0.2, 0.25);
  CHECK(std::fabs(x2) <= 1e-15);
  const double q = heavy.q_int;
  CHECK(y2 == doctest::Approx(std::sqrt(-2.0 * (std::pow(0.2, 1.0 - q) - 1.0) / (1.0 - q))).epsilon(1e-14));

  const auto [x3, y3] = gbmm_sample(heavy, 1.0 - 1e-16, 0.3);
  CHECK(std::fabs(x3) < 1e-7);
  CHECK(std::fabs(y3) < 1e-7);

  CHECK_THROWS_AS(gbmm_sample(unit, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(gbmm_sample(unit, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(gbmm_sample(unit, 0.5, 1.0), DomainError);
}

TEST_CASE("uniform stream") {
  UniformStream a(42), b(42);
  bool same = true, open = true;
  std::vector<double> u(1000000);
  for (auto& x : u) {
    x = a.next();
    same = same && x == b.next();
    open = open && x > 0.0 && x < 1.0;
  }
  CHECK(same);
  CHECK(open);
  std::sort(u.begin(), u.end());
  double d = 0.0;
  const double n = static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max({d, (i + 1.0) / n - u[i], u[i] - static_cast<double>(i) / n});
  }
  CHECK(stats::kolmogorov_sf(std::sqrt(n) * d) > 0.01);
  // SplitMix64 reference output for seed 0.
  UniformStream zero(0);
  CHECK(zero.next_u64() == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("derived seeds are valid for every regime") {
  for (double q : {-3.0, -1.0, 0.5, 1.0, 2.0, 2.95}) {
    const QSpec spec = make_spec(q);
    for (const Seeds& s : derive_seeds(spec, 3, 200)) {
      CHECK_NOTHROW(init_state(spec, MapConfig{}, s));
    }
  }
}

TEST_CASE("method names") {
  CHECK(parse_method("gbmm") == Method::gbmm);
  CHECK(to_string(Method::chaotic) == "chaotic");
  CHECK_THROWS_AS(parse_method("box"), DomainError);
}

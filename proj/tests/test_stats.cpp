#include "qgauss/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qgauss/error.hpp"

using namespace qgauss;

namespace {

stats::TailsFn tails_of(double q) {
  return [q](double x) { return dist::tails(q, x); };
}

}  // namespace

TEST_CASE("sup statistic small cases") {
  const std::vector<double> one = {0.0};
  CHECK(stats::sup_weighted_statistic(one, tails_of(1.0), stats::Weight::one) == 0.5);

  const std::size_t m = 50;
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = dist::quantile(1.3, (i + 0.5) / m);
  const double ks = stats::sup_weighted_statistic(x, tails_of(1.3), stats::Weight::one);
  CHECK(ks == doctest::Approx(std::sqrt(static_cast<double>(m)) * 0.5 / m).epsilon(1e-9));
  const double ad = stats::sup_weighted_statistic(x, tails_of(1.3), stats::Weight::anderson);
  CHECK(ad >= ks);
  CHECK(ad >= 2.0 * ks * (1.0 - 1e-9));

  CHECK_THROWS_AS(stats::sup_weighted_statistic(std::vector<double>{}, tails_of(1.0), stats::Weight::one),
                  DataError);
}

TEST_CASE("AD weight is clamped at extreme order statistics") {
  // A sample far in the tail: F rounds to 1, yet the statistic stays finite.
  const std::vector<double> x = {-1.0, 0.0, 1e300};
  const double ad = stats::sup_weighted_statistic(x, tails_of(2.9), stats::Weight::anderson);
  CHECK(std::isfinite(ad));
}

TEST_CASE("null distribution p-values") {
  const auto nulls = stats::NullDistribution::simulate(200, 999, 1);
  CHECK(nulls.ks.size() == 999);
  CHECK(nulls.ks.p_value(0.0) == 1.0);
  CHECK(nulls.ad.p_value(1e300) == doctest::Approx(1.0 / 1000.0).epsilon(1e-15));
  const auto draws = nulls.ks.draws();
  const double median = draws[draws.size() / 2];
  CHECK(std::fabs(nulls.ks.p_value(median) - 0.5) <= 2.0 / std::sqrt(999.0));
}

TEST_CASE("KS null agrees with the Kolmogorov law") {
  const std::size_t m = 1000;
  const double rm = std::sqrt(static_cast<double>(m));
  const auto nulls = stats::NullDistribution::simulate(m, 4000, 17);
  // Finite-M correction: D (sqrt(M) + 0.12 + 0.11 / sqrt(M)) is close to Kolmogorov.
  for (double z : {0.6, 0.83, 1.2}) {
    const double stat = rm * z / (rm + 0.12 + 0.11 / rm);
    CHECK(std::fabs(nulls.ks.p_value(stat) - stats::kolmogorov_sf(z)) <= 0.025);
  }
}

TEST_CASE("quantile-route p-value agrees with the uniform-route null") {
  const std::size_t m = 300;
  const auto nulls = stats::NullDistribution::simulate(m, 999, 5);
  const QSpec spec = make_spec(1.8);
  for (stats::GofKind kind : {stats::GofKind::ks, stats::GofKind::ad}) {
    const auto draws = nulls.get(kind).draws();
    for (double frac : {0.25, 0.5, 0.9}) {
      const double observed = draws[static_cast<std::size_t>(frac * draws.size())];
      const double fast = nulls.get(kind).p_value(observed);
      // Same replicate seed: the draws coincide up to quantile rounding.
      const double exact = stats::mc_p_value(spec, m, observed, kind, 999, 5 ^ 0x0ULL);
      CHECK(std::fabs(fast - exact) <= 0.004);
    }
  }
  CHECK(stats::mc_p_value(spec, m, 0.0, stats::GofKind::ks, 99, 1) == 1.0);
  CHECK(stats::mc_p_value(spec, m, 1e300, stats::GofKind::ad, 99, 1) == doctest::Approx(0.01));
  CHECK_THROWS_AS(stats::mc_p_value(spec, m, 1.0, stats::GofKind::ks, 98, 1), DomainError);
}

TEST_CASE("p-values are uniform under the null") {
  const std::size_t m = 400;
  const auto nulls = stats::NullDistribution::simulate(m, 999, 23);
  UniformStream stream(77);
  std::vector<double> p(200);
  for (auto& v : p) {
    std::vector<double> x(m);
    for (auto& s : x) s = dist::quantile(0.4, stream.next());
    v = stats::gof_test(0.4, x, nulls.ks).p_value;
  }
  std::sort(p.begin(), p.end());
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max({d, (i + 1.0) / p.size() - p[i], p[i] - static_cast<double>(i) / p.size()});
  }
  CHECK(stats::kolmogorov_sf(std::sqrt(200.0) * d) > 0.01);
}

TEST_CASE("gof_test_both matches gof_test") {
  const auto nulls = stats::NullDistribution::simulate(1000, 199, 9);
  const auto batch = generate_chaotic(make_spec(1.5), MapConfig{}, Seeds{}, 1000);
  const auto [ks, ad] = stats::gof_test_both(1.5, batch.xi, nulls);
  const auto ks2 = stats::gof_test(1.5, batch.xi, nulls.ks);
  const auto ad2 = stats::gof_test(1.5, batch.xi, nulls.ad);
  CHECK(ks.statistic == ks2.statistic);
  CHECK(ad.statistic == ad2.statistic);
  CHECK(ks.p_value == ks2.p_value);
  CHECK(ad.kind == stats::GofKind::ad);
  CHECK(ks.n_null == 199);
  CHECK_THROWS_AS(stats::gof_test(1.5, std::span(batch.xi).first(10), nulls.ks), DomainError);
}

TEST_CASE("autocorrelation") {
  const std::vector<double> constant(100, 0.1);
  for (std::size_t m = 0; m < 10; ++m) CHECK(stats::autocorrelation(constant, m) == 0.0);
  std::vector<double> alt(100);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
  CHECK(stats::autocorrelation(alt, 1) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(stats::autocorrelation(alt, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(stats::autocorrelation(alt, 100), DomainError);
  const auto all = stats::autocorrelations(alt, 3);
  CHECK(all.size() == 4);
  CHECK(all[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("chaotic output is uncorrelated at q' = 0.6") {
  const auto batch = generate_chaotic(make_spec(0.6), MapConfig{}, Seeds{}, 1000000);
  const auto c = stats::autocorrelations(batch.xi, 10);
  for (std::size_t m = 1; m <= 10; ++m) CHECK(std::fabs(c[m]) / c[0] <= 5e-3);
}

TEST_CASE("Lyapunov exponent of the z map") {
  MapConfig cfg;
  const auto est = stats::lyapunov(make_spec(0.5).q_int, cfg, 1.0, 100000);
  CHECK(est.lambda == doctest::Approx(std::log(2.0)).epsilon(0.01));
  CHECK(est.used + est.skipped == 100000);
  std::vector<double> running;
  cfg.order = 3;
  const auto est3 = stats::lyapunov(make_spec(1.5).q_int, cfg, 0.7, 100000, &running, 1000);
  CHECK(est3.lambda == doctest::Approx(std::log(3.0)).epsilon(0.01));
  CHECK(running.size() == 100);
  CHECK(running.back() == est3.lambda);
}

TEST_CASE("Kolmogorov survival function") {
  CHECK(stats::kolmogorov_sf(0.0) == 1.0);
  CHECK(stats::kolmogorov_sf(1.3580986393225505) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(stats::kolmogorov_sf(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
  for (double z = 0.3; z < 3.0; z += 0.01) {
    CHECK(stats::kolmogorov_sf(z) >= stats::kolmogorov_sf(z + 0.01));
  }
  // Both series agree where they switch.
  CHECK(stats::kolmogorov_sf(1.18 - 1e-12) == doctest::Approx(stats::kolmogorov_sf(1.18)).epsilon(1e-12));
}

TEST_CASE("two-sample KS") {
  const std::vector<double> a = {1, 2, 3, 4};
  const std::vector<double> b = {5, 6, 7, 8};
  CHECK(stats::two_sample_ks(a, b).statistic == 1.0);
  CHECK(stats::two_sample_ks(a, a).statistic == 0.0);
  CHECK(stats::two_sample_ks(a, a).p_value == 1.0);
  CHECK_THROWS_AS(stats::two_sample_ks(a, std::vector<double>{}), DataError);
}

TEST_CASE("batch means") {
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i % 10);
  const auto bm = stats::batch_means(x, 10);
  CHECK(bm.mean == doctest::Approx(4.5));
  CHECK(bm.standard_error == doctest::Approx(0.0));
  CHECK_THROWS_AS(stats::batch_means(x, 1), DomainError);
}

TEST_CASE("tail slope of exact Pareto quantiles") {
  const std::size_t n = 100000;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::pow((i + 0.5) / n, -1.0 / 1.7);
  CHECK(stats::fit_ccdf_tail_slope(x, 0.001, 0.01) == doctest::Approx(-1.7).epsilon(1e-3));
  CHECK_THROWS_AS(stats::fit_ccdf_tail_slope(x, 0.01, 0.001), DomainError);
}

TEST_CASE("trial table shape and determinism") {
  stats::TrialOptions opt;
  opt.trials = 3;
  opt.samples = 200;
  opt.n_null = 99;
  const std::vector<double> q = {0.5, 2.0};
  const auto a = stats::run_trial_table(q, MapConfig{}, opt);
  opt.jobs = 1;
  const auto b = stats::run_trial_table(q, MapConfig{}, opt);
  REQUIRE(a.rows.size() == 2);
  CHECK_FALSE(a.rows[0].nu.has_value());
  CHECK(*a.rows[1].nu == doctest::Approx(1.0));
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.rows[i].best_p_ks == b.rows[i].best_p_ks);
    CHECK(a.rows[i].best_p_ad == b.rows[i].best_p_ad);
    CHECK(a.rows[i].best_p_ks >= a.rows[i].mean_p_ks);
  }
  // A row does not depend on its neighbours.
  const std::vector<double> single = {2.0};
  CHECK(stats::run_trial_table(single, MapConfig{}, opt).rows[0].best_p_ks == a.rows[1].best_p_ks);
  opt.method = Method::gbmm;
  CHECK(stats::run_trial_table(single, MapConfig{}, opt).rows[0].best_p_ks > 0.0);
}

TEST_CASE("gof kind names") {
  CHECK(stats::parse_gof_kind("ks") == stats::GofKind::ks);
  CHECK(stats::parse_gof_kind("AD") == stats::GofKind::ad);
  CHECK(stats::to_string(stats::GofKind::ad) == "AD");
  CHECK_THROWS_AS(stats::parse_gof_kind("cvm"), DomainError);
}

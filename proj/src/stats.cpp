#include "qgauss/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "qgauss/error.hpp"
#include "qgauss/kernels.hpp"
#include "qgauss/parallel.hpp"

namespace qgauss::stats {

namespace {

// Lanes stepped together by the ensemble generator in the trial runner.
constexpr std::size_t kTrialLanes = 8;

// Offset separating the null-replicate stream from the trial seeds.
constexpr std::uint64_t kNullStream = 0x6A09E667F3BCC909ULL;

std::vector<std::uint64_t> replicate_seeds(std::uint64_t seed, std::size_t n) {
  UniformStream stream(seed);
  std::vector<std::uint64_t> out(n);
  for (auto& s : out) s = stream.next_u64();
  return out;
}

}  // namespace

std::string to_string(GofKind kind) { return kind == GofKind::ks ? "KS" : "AD"; }

GofKind parse_gof_kind(const std::string& name) {
  if (name == "ks" || name == "KS") return GofKind::ks;
  if (name == "ad" || name == "AD") return GofKind::ad;
  throw DomainError("test kind must be 'ks' or 'ad', got '" + name + "'");
}

Weight weight_for(GofKind kind) { return kind == GofKind::ks ? Weight::one : Weight::anderson; }

double sup_weighted_statistic(std::span<const double> lower, std::span<const double> upper,
                              Weight weight) {
  const std::size_t m = lower.size();
  if (m == 0) throw DataError("statistic of an empty sample");
  if (upper.size() != m) throw DataError("tail arrays differ in length");
  const double md = static_cast<double>(m);
  std::vector<double> edf_below(m), edf_at(m), wt;
  for (std::size_t i = 0; i < m; ++i) {
    edf_below[i] = static_cast<double>(i) / md;
    edf_at[i] = static_cast<double>(i + 1) / md;
  }
  if (weight == Weight::anderson) {
    const double lo = 0.5 / md;
    const double hi = 1.0 - lo;
    wt.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double f = std::clamp(lower[i], lo, hi);
      const double g = std::clamp(upper[i], lo, hi);
      wt[i] = 1.0 / std::sqrt(f * g);
    }
  }
  return std::sqrt(md) * kernels::sup_deviation(lower, edf_below, edf_at, wt);
}

double sup_weighted_statistic(std::span<const double> sorted, const TailsFn& tails, Weight weight) {
  if (sorted.empty()) throw DataError("statistic of an empty sample");
  std::vector<double> lower(sorted.size()), upper(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const dist::Tails t = tails(sorted[i]);
    lower[i] = t.lower;
    upper[i] = t.upper;
  }
  return sup_weighted_statistic(lower, upper, weight);
}

NullDistribution::NullDistribution(GofKind kind, std::size_t samples, std::vector<double> draws)
    : kind_(kind), samples_(samples), sorted_(std::move(draws)) {
  std::sort(sorted_.begin(), sorted_.end());
}

NullDistribution::Pair NullDistribution::simulate(std::size_t samples, std::size_t n_null,
                                                  std::uint64_t seed, int jobs) {
  if (samples == 0) throw DomainError("null distribution needs M >= 1");
  if (n_null == 0) throw DomainError("null distribution needs n_null >= 1");
  const auto seeds = replicate_seeds(seed, n_null);
  std::vector<double> ks(n_null), ad(n_null);
  parallel_for(n_null, jobs, [&](std::size_t r) {
    UniformStream stream(seeds[r]);
    std::vector<double> u(samples), g(samples);
    for (auto& x : u) x = stream.next();
    std::sort(u.begin(), u.end());
    for (std::size_t i = 0; i < samples; ++i) g[i] = 1.0 - u[i];
    ks[r] = sup_weighted_statistic(u, g, Weight::one);
    ad[r] = sup_weighted_statistic(u, g, Weight::anderson);
  });
  return {NullDistribution(GofKind::ks, samples, std::move(ks)),
          NullDistribution(GofKind::ad, samples, std::move(ad))};
}

double NullDistribution::p_value(double observed) const {
  const auto first = std::lower_bound(sorted_.begin(), sorted_.end(), observed);
  const auto exceed = static_cast<double>(sorted_.end() - first);
  return (1.0 + exceed) / (static_cast<double>(sorted_.size()) + 1.0);
}

double mc_p_value(const QSpec& spec, std::size_t samples, double observed, GofKind kind,
                  std::size_t n_null, std::uint64_t seed, int jobs) {
  if (n_null < 99) throw DomainError("n_null must be >= 99, got " + std::to_string(n_null));
  if (samples == 0) throw DomainError("M must be >= 1");
  const auto seeds = replicate_seeds(seed, n_null);
  const double q = spec.q_out;
  std::vector<char> exceeds(n_null, 0);
  parallel_for(n_null, jobs, [&](std::size_t r) {
    UniformStream stream(seeds[r]);
    std::vector<double> x(samples);
    for (auto& v : x) v = dist::quantile(q, stream.next());
    std::sort(x.begin(), x.end());
    const double stat = sup_weighted_statistic(
        x, [q](double t) { return dist::tails(q, t); }, weight_for(kind));
    exceeds[r] = stat >= observed;
  });
  const double count = static_cast<double>(std::count(exceeds.begin(), exceeds.end(), 1));
  return (1.0 + count) / (static_cast<double>(n_null) + 1.0);
}

std::pair<GofResult, GofResult> gof_test_both(double q_out, std::span<const double> samples,
                                              const NullDistribution::Pair& nulls) {
  if (samples.empty()) throw DataError("goodness-of-fit test of an empty sample");
  if (nulls.ks.samples() != samples.size() || nulls.ad.samples() != samples.size()) {
    throw DomainError("null distribution was built for a different sample size");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> lower(sorted.size()), upper(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const dist::Tails t = dist::tails(q_out, sorted[i]);
    lower[i] = t.lower;
    upper[i] = t.upper;
  }
  std::pair<GofResult, GofResult> out;
  for (GofResult* r : {&out.first, &out.second}) {
    r->kind = (r == &out.first) ? GofKind::ks : GofKind::ad;
    r->statistic = sup_weighted_statistic(lower, upper, weight_for(r->kind));
    r->p_value = nulls.get(r->kind).p_value(r->statistic);
    r->n_samples = samples.size();
    r->n_null = nulls.get(r->kind).size();
  }
  return out;
}

GofResult gof_test(double q_out, std::span<const double> samples, const NullDistribution& null) {
  if (samples.empty()) throw DataError("goodness-of-fit test of an empty sample");
  if (null.samples() != samples.size()) {
    throw DomainError("null distribution was built for a different sample size");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  GofResult r;
  r.kind = null.kind();
  r.statistic = sup_weighted_statistic(
      sorted, [q_out](double t) { return dist::tails(q_out, t); }, weight_for(r.kind));
  r.p_value = null.p_value(r.statistic);
  r.n_samples = samples.size();
  r.n_null = null.size();
  return r;
}

double autocorrelation(std::span<const double> x, std::size_t m) {
  if (m >= x.size()) {
    throw DomainError("lag " + std::to_string(m) + " must be below the length " +
                      std::to_string(x.size()));
  }
  const std::size_t n = x.size();
  const double shift = x[0];
  double sum = 0.0;
  for (double v : x) sum += v - shift;
  const double mean = sum / static_cast<double>(n);
  double cross = 0.0;
  for (std::size_t i = 0; i + m < n; ++i) cross += (x[i] - shift) * (x[i + m] - shift);
  return cross / static_cast<double>(n - m) - mean * mean;
}

std::vector<double> autocorrelations(std::span<const double> x, std::size_t max_lag) {
  std::vector<double> out(max_lag + 1);
  for (std::size_t m = 0; m <= max_lag; ++m) out[m] = autocorrelation(x, m);
  return out;
}

LyapunovEstimate lyapunov(double q_int, const MapConfig& cfg, double z0, std::size_t t,
                          std::vector<double>* running, std::size_t stride) {
  cfg.validate();
  if (stride == 0) stride = 1;
  const bool analytic = cfg.order == 2 && cfg.iterations == 1;
  const double kink = maps::z_map_kink(q_int, cfg.epsilon);
  LyapunovEstimate est;
  double sum = 0.0;
  double z = z0;
  for (std::size_t n = 0; n < t; ++n) {
    double term = std::numeric_limits<double>::quiet_NaN();
    if (analytic) {
      if (z > 0.0 && std::fabs(z - kink) >= 1e-9) {
        term = std::log(std::fabs(maps::z_map_derivative(q_int, z, cfg.epsilon)));
      }
    } else {
      term = maps::z_map_log_slope(q_int, cfg, z);
    }
    if (std::isfinite(term)) {
      sum += term;
      ++est.used;
    } else {
      ++est.skipped;
    }
    if (running && (n + 1) % stride == 0) {
      running->push_back(est.used ? sum / static_cast<double>(est.used) : 0.0);
    }
    z = maps::z_map(q_int, cfg, z);
  }
  est.lambda = est.used ? sum / static_cast<double>(est.used) : 0.0;
  return est;
}

double kolmogorov_sf(double z) {
  if (!(z > 0.0)) return 1.0;
  if (z < 1.18) {
    // Jacobi theta form of the CDF converges fast for small z.
    const double y = std::numbers::pi * std::numbers::pi / (8.0 * z * z);
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      s += std::exp(-odd * odd * y);
    }
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / z * s;
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * z * z);
    s += (k % 2 == 1) ? term : -term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

TwoSampleResult two_sample_ks(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DataError("two-sample KS needs two non-empty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  TwoSampleResult r;
  r.statistic = d;
  r.p_value = kolmogorov_sf(std::sqrt(n * m / (n + m)) * d);
  return r;
}

BatchMeans batch_means(std::span<const double> x, std::size_t batches) {
  if (batches < 2) throw DomainError("batch_means needs at least 2 batches");
  const std::size_t size = x.size() / batches;
  if (size == 0) throw DataError("batch_means: fewer samples than batches");
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const auto first = x.begin() + static_cast<std::ptrdiff_t>(b * size);
    means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(size), 0.0) /
               static_cast<double>(size);
  }
  const double k = static_cast<double>(batches);
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / k;
  double ss = 0.0;
  for (double v : means) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (k - 1.0) / k)};
}

double fit_ccdf_tail_slope(std::span<const double> samples, double lo_frac, double hi_frac,
                           bool two_sided) {
  if (!(lo_frac > 0.0 && lo_frac < hi_frac && hi_frac <= 1.0)) {
    throw DomainError("tail fit needs 0 < lo_frac < hi_frac <= 1");
  }
  std::vector<double> v(samples.begin(), samples.end());
  if (two_sided) for (auto& s : v) s = std::fabs(s);
  std::sort(v.begin(), v.end(), std::greater<>());
  const double n = static_cast<double>(v.size());
  const auto k_lo = static_cast<std::size_t>(std::ceil(lo_frac * n));
  const auto k_hi = static_cast<std::size_t>(std::floor(hi_frac * n));
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  for (std::size_t k = std::max<std::size_t>(k_lo, 1); k <= k_hi && k <= v.size(); ++k) {
    const double value = v[k - 1];
    if (!(value > 0.0)) break;
    const double lx = std::log(value);
    const double ly = std::log(static_cast<double>(k) / n);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    cnt += 1.0;
  }
  if (cnt < 3.0) throw DataError("tail fit range holds fewer than 3 positive order statistics");
  return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

std::uint64_t row_seed(std::uint64_t master, double q_out) {
  return UniformStream(master ^ std::bit_cast<std::uint64_t>(q_out)).next_u64();
}

TrialRow run_trials(double q_out, const MapConfig& cfg, const TrialOptions& options,
                    const NullDistribution::Pair& nulls) {
  if (options.trials == 0) throw DomainError("trials must be >= 1");
  if (options.samples == 0) throw DomainError("M must be >= 1");
  const QSpec spec = make_spec(q_out);
  cfg.validate();
  const std::uint64_t seed = row_seed(options.seed, q_out);
  std::vector<double> p_ks(options.trials), p_ad(options.trials);

  if (options.method == Method::chaotic) {
    const auto seeds = derive_seeds(spec, seed, options.trials);
    const std::size_t chunks = (options.trials + kTrialLanes - 1) / kTrialLanes;
    parallel_for(chunks, options.jobs, [&](std::size_t c) {
      const std::size_t first = c * kTrialLanes;
      const std::size_t count = std::min(kTrialLanes, options.trials - first);
      const auto batches = generate_chaotic_lanes(
          spec, cfg, std::span(seeds).subspan(first, count), options.samples, options.burn_in);
      for (std::size_t k = 0; k < count; ++k) {
        const auto [ks, ad] = gof_test_both(q_out, batches[k].xi, nulls);
        p_ks[first + k] = ks.p_value;
        p_ad[first + k] = ad.p_value;
      }
    });
  } else {
    UniformStream stream(seed);
    std::vector<std::uint64_t> seeds(options.trials);
    for (auto& s : seeds) s = stream.next_u64();
    parallel_for(options.trials, options.jobs, [&](std::size_t k) {
      const auto batch = generate_gbmm(spec, options.samples, seeds[k]);
      const auto [ks, ad] = gof_test_both(q_out, batch.xi, nulls);
      p_ks[k] = ks.p_value;
      p_ad[k] = ad.p_value;
    });
  }

  TrialRow row;
  row.q_out = q_out;
  row.nu = spec.nu;
  const double n = static_cast<double>(options.trials);
  row.best_p_ks = *std::max_element(p_ks.begin(), p_ks.end());
  row.best_p_ad = *std::max_element(p_ad.begin(), p_ad.end());
  row.mean_p_ks = std::accumulate(p_ks.begin(), p_ks.end(), 0.0) / n;
  row.mean_p_ad = std::accumulate(p_ad.begin(), p_ad.end(), 0.0) / n;
  return row;
}

TrialTable run_trial_table(std::span<const double> q_list, const MapConfig& cfg,
                           const TrialOptions& options) {
  cfg.validate();
  const auto nulls = NullDistribution::simulate(options.samples, options.n_null,
                                                options.seed ^ kNullStream, options.jobs);
  TrialTable table;
  table.cfg = cfg;
  table.options = options;
  for (double q : q_list) table.rows.push_back(run_trials(q, cfg, options, nulls));
  return table;
}

}  // namespace qgauss::stats

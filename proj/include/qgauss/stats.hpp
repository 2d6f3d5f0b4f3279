#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qgauss/distribution.hpp"
#include "qgauss/generator.hpp"
#include "qgauss/maps.hpp"

namespace qgauss::stats {

enum class GofKind { ks, ad };

std::string to_string(GofKind kind);
GofKind parse_gof_kind(const std::string& name);

/// psi(u) = 1 (KS) or 1 / (u (1 - u)) (AD).
enum class Weight { one, anderson };

Weight weight_for(GofKind kind);

using TailsFn = std::function<dist::Tails(double)>;

/// Z = sqrt(M) max_i max((i+1)/M - F_i, F_i - i/M) sqrt(psi(F_i)) over the
/// sorted sample, i.e. the EDF is compared with F both at x_i and just below
/// it. For the AD weight F and 1 - F are clamped to [1/(2M), 1 - 1/(2M)].
/// Throws DataError for an empty sample.
double sup_weighted_statistic(std::span<const double> sorted, const TailsFn& tails, Weight weight);

/// Same statistic from tail probabilities already evaluated at the sorted
/// sample: lower[i] = F(x_i), upper[i] = 1 - F(x_i).
double sup_weighted_statistic(std::span<const double> lower, std::span<const double> upper,
                              Weight weight);

/// Null distribution of the statistic for M samples. The statistic depends on
/// the data only through F(x_i), which are i.i.d. uniform under the null, so
/// each replicate is a sorted set of M uniforms from UniformStream. The
/// distribution is therefore the same for every q'.
class NullDistribution {
 public:
  NullDistribution(GofKind kind, std::size_t samples, std::vector<double> draws);

  /// KS and AD nulls built from the same uniform replicates.
  struct Pair;
  static Pair simulate(std::size_t samples, std::size_t n_null, std::uint64_t seed, int jobs = 0);

  /// (1 + #{null >= observed}) / (n_null + 1).
  double p_value(double observed) const;

  GofKind kind() const { return kind_; }
  std::size_t samples() const { return samples_; }
  std::size_t size() const { return sorted_.size(); }
  std::span<const double> draws() const { return sorted_; }

 private:
  GofKind kind_;
  std::size_t samples_;
  std::vector<double> sorted_;
};

struct NullDistribution::Pair {
  NullDistribution ks;
  NullDistribution ad;
  const NullDistribution& get(GofKind kind) const { return kind == GofKind::ks ? ks : ad; }
};

/// Add-one Monte-Carlo p-value with replicates drawn from the q-Gaussian
/// itself: each of n_null sets holds M values quantile(q', u) with u from
/// UniformStream. Requires n_null >= 99. Deterministic given seed.
double mc_p_value(const QSpec& spec, std::size_t samples, double observed, GofKind kind,
                  std::size_t n_null, std::uint64_t seed, int jobs = 0);

struct GofResult {
  GofKind kind = GofKind::ks;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_samples = 0;
  std::size_t n_null = 0;

  bool pass(double alpha = 0.05) const { return p_value > alpha; }
};

/// Tests `samples` against the q' distribution. `null` must match the sample
/// size and kind.
GofResult gof_test(double q_out, std::span<const double> samples, const NullDistribution& null);

/// Both statistics from one sort and one pass of tail evaluations.
std::pair<GofResult, GofResult> gof_test_both(double q_out, std::span<const double> samples,
                                              const NullDistribution::Pair& nulls);

/// Empirical C(m) = (1/(N-m)) sum_{n<N-m} x_n x_{n+m} - mean^2, computed on
/// x - x_0 (C is shift invariant). Throws DomainError for m >= N.
double autocorrelation(std::span<const double> x, std::size_t m);

/// C(0..max_lag).
std::vector<double> autocorrelations(std::span<const double> x, std::size_t max_lag);

struct LyapunovEstimate {
  double lambda = 0.0;
  std::size_t used = 0;     ///< steps contributing to the average
  std::size_t skipped = 0;  ///< steps on a kink or at a degenerate u
};

/// Orbit average of log |f'_{l,c}(z_n)| over t steps from z0. For l = 2,
/// c = 1 the analytic derivative is used; otherwise the chain rule through
/// the conjugacy. If `running` is non-null, the running average after every
/// `stride` steps is appended.
LyapunovEstimate lyapunov(double q_int, const MapConfig& cfg, double z0, std::size_t t,
                          std::vector<double>* running = nullptr, std::size_t stride = 1);

/// Asymptotic Kolmogorov survival function Pr(K > z).
double kolmogorov_sf(double z);

struct TwoSampleResult {
  double statistic = 0.0;  ///< sup |F_a - F_b|
  double p_value = 1.0;    ///< kolmogorov_sf(sqrt(n m / (n + m)) D)
};

TwoSampleResult two_sample_ks(std::span<const double> a, std::span<const double> b);

struct BatchMeans {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Mean with a standard error from `batches` contiguous batch means, which
/// stays honest under serial correlation.
BatchMeans batch_means(std::span<const double> x, std::size_t batches = 100);

/// Least-squares slope of log ccdf_emp against log x over the order
/// statistics whose empirical upper-tail probability k/N lies in
/// [lo_frac, hi_frac]. With two_sided the fit uses |x|.
double fit_ccdf_tail_slope(std::span<const double> samples, double lo_frac, double hi_frac,
                           bool two_sided = false);

struct TrialOptions {
  std::size_t trials = 100;
  std::size_t samples = 10000;
  std::size_t n_null = 999;
  std::uint64_t seed = 20240601;
  std::size_t burn_in = 0;
  Method method = Method::chaotic;
  int jobs = 0;
};

struct TrialRow {
  double q_out = 0.0;
  std::optional<double> nu;
  double best_p_ks = 0.0;
  double best_p_ad = 0.0;
  double mean_p_ks = 0.0;
  double mean_p_ad = 0.0;
};

struct TrialTable {
  std::vector<TrialRow> rows;
  MapConfig cfg;
  TrialOptions options;
};

/// Seed of the trial set for one q': the master seed mixed with the bits of
/// q', so a row does not depend on which other rows are in the table.
std::uint64_t row_seed(std::uint64_t master, double q_out);

/// Runs options.trials independent generators per q' and records the best
/// (and mean) KS and AD p-values. Trials are spread over options.jobs threads;
/// results do not depend on scheduling.
TrialTable run_trial_table(std::span<const double> q_list, const MapConfig& cfg,
                           const TrialOptions& options);

/// One row, against prebuilt nulls.
TrialRow run_trials(double q_out, const MapConfig& cfg, const TrialOptions& options,
                    const NullDistribution::Pair& nulls);

}  // namespace qgauss::stats

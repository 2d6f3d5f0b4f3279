#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qgauss/distribution.hpp"
#include "qgauss/error.hpp"
#include "qgauss/kernels.hpp"
#include "qgauss/stats.hpp"

namespace qgauss::cli {

namespace {

using nlohmann::json;

// Sample count from which bench timings are considered stable.
constexpr std::size_t kReliableBenchSamples = 10'000'000;
constexpr std::size_t kBenchWarmup = 200'000;
constexpr int kBenchRepeats = 5;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fixed6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

// Output sink: the caller's stream for "-", otherwise a file opened in binary
// mode so line endings stay LF.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw DataError("cannot open '" + path + "' for writing");
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }
  void finish(const std::string& path) {
    stream_->flush();
    if (!*stream_) throw DataError("write to '" + path + "' failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

json map_json(const MapConfig& cfg) {
  return {{"d", cfg.degree}, {"l", cfg.order}, {"c", cfg.iterations}, {"epsilon", cfg.epsilon}};
}

json spec_json(const QSpec& spec) {
  json j = {{"q_out", spec.q_out}, {"q_int", spec.q_int}};
  j["nu"] = spec.nu ? json(*spec.nu) : json(nullptr);
  return j;
}

json batch_metadata(const SampleBatch& b) {
  json j = spec_json(b.spec);
  j["method"] = to_string(b.method);
  j["count"] = b.count;
  if (b.method == Method::chaotic) {
    j["map"] = map_json(b.cfg);
    j["seeds"] = {{"v0", b.seeds.v0}, {"z0", b.seeds.z0}, {"w0_sign", b.seeds.w0_sign}};
    j["burn_in"] = b.burn_in;
    j["evaluation_order"] =
        "v'=Q_d(w,v); w'=P_d(w); circle restore; u=q_exp(q,(-z*z)*0.5); clamp u; "
        "u=T_l(u) c times; z'=sqrt(-2 q_ln(q,u)); xi=w'*z'; eta=v'*z'";
  } else {
    j["uniform_seed"] = b.uniform_seed;
    j["uniform_stream"] = "splitmix64, (k>>11 + 0.5) * 2^-53; u1 then u2 per pair";
  }
  j["columns"] = {"xi", "eta"};
  return j;
}

void validate_common(const RunConfig& cfg) {
  make_spec(cfg.q_out);
  cfg.map.validate();
  if (cfg.count == 0) throw DomainError("M (--count) must be >= 1");
}

SampleBatch make_batch(const RunConfig& cfg) {
  const QSpec spec = make_spec(cfg.q_out);
  if (cfg.method == Method::gbmm) return generate_gbmm(spec, cfg.count, cfg.uniform_seed);
  return generate_chaotic(spec, cfg.map, cfg.seeds, cfg.count, cfg.burn_in);
}

void write_csv(std::ostream& os, const SampleBatch& b) {
  os << "xi,eta\n";
  for (std::size_t i = 0; i < b.count; ++i) os << fmt17(b.xi[i]) << ',' << fmt17(b.eta[i]) << '\n';
}

// ---- gen -----------------------------------------------------------------

int cmd_gen(const RunConfig& cfg, std::ostream& out) {
  validate_common(cfg);
  if (cfg.method == Method::chaotic) init_state(make_spec(cfg.q_out), cfg.map, cfg.seeds);
  const SampleBatch batch = make_batch(cfg);
  Sink sink(cfg.output, out);
  if (cfg.format == Format::json) {
    json j = batch_metadata(batch);
    j["xi"] = batch.xi;
    j["eta"] = batch.eta;
    sink.get() << j.dump() << '\n';
  } else {
    write_csv(sink.get(), batch);
  }
  sink.finish(cfg.output);
  if (cfg.format == Format::csv && cfg.output != "-") {
    const std::string side = cfg.output + ".json";
    Sink meta(side, out);
    meta.get() << batch_metadata(batch).dump(2) << '\n';
    meta.finish(side);
  }
  return kOk;
}

// ---- gof -----------------------------------------------------------------

json gof_json(const stats::GofResult& r) {
  return {{"kind", stats::to_string(r.kind)}, {"statistic", r.statistic},
          {"p_value", r.p_value},             {"n_samples", r.n_samples},
          {"n_null", r.n_null},               {"pass_at_0.05", r.pass(0.05)}};
}

int cmd_gof(const RunConfig& cfg, const std::string& kind_name, const std::string& null_route,
            std::ostream& out) {
  validate_common(cfg);
  if (null_route != "uniform" && null_route != "quantile") {
    throw DomainError("--null must be 'uniform' or 'quantile'");
  }
  std::vector<stats::GofKind> kinds;
  if (kind_name == "both") kinds = {stats::GofKind::ks, stats::GofKind::ad};
  else kinds = {stats::parse_gof_kind(kind_name)};
  if (cfg.n_null < 1) throw DomainError("n_null must be >= 1");
  if (null_route == "quantile" && cfg.n_null < 99) throw DomainError("n_null must be >= 99");

  std::vector<double> xi;
  if (!cfg.input.empty()) {
    xi = read_xi_column(cfg.input);
  } else {
    if (cfg.method == Method::chaotic) init_state(make_spec(cfg.q_out), cfg.map, cfg.seeds);
    xi = make_batch(cfg).xi;
  }

  json results = json::array();
  if (null_route == "uniform") {
    const auto nulls = stats::NullDistribution::simulate(xi.size(), cfg.n_null, cfg.seed, cfg.jobs);
    for (auto kind : kinds) results.push_back(gof_json(stats::gof_test(cfg.q_out, xi, nulls.get(kind))));
  } else {
    std::vector<double> sorted = xi;
    std::sort(sorted.begin(), sorted.end());
    const double q = cfg.q_out;
    for (auto kind : kinds) {
      stats::GofResult r;
      r.kind = kind;
      r.statistic = stats::sup_weighted_statistic(
          sorted, [q](double x) { return dist::tails(q, x); }, stats::weight_for(kind));
      r.p_value = stats::mc_p_value(make_spec(q), xi.size(), r.statistic, kind, cfg.n_null,
                                    cfg.seed, cfg.jobs);
      r.n_samples = xi.size();
      r.n_null = cfg.n_null;
      results.push_back(gof_json(r));
    }
  }
  json j = {{"q_out", cfg.q_out}, {"null", null_route}, {"results", results}};
  Sink sink(cfg.output, out);
  sink.get() << j.dump(2) << '\n';
  sink.finish(cfg.output);
  return kOk;
}

// ---- table ---------------------------------------------------------------

std::vector<double> q_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) throw DomainError("--q-step must be > 0");
  if (!(hi >= lo)) throw DomainError("--q-max must be >= --q-min");
  std::vector<double> grid;
  for (long i = 0;; ++i) {
    // Rounded to 1e-9 so 0.1 steps land on the decimal grid points.
    const double q = std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9;
    if (q > hi + 1e-12) break;
    grid.push_back(q);
  }
  return grid;
}

int cmd_table(const RunConfig& cfg, std::vector<double> q_list, double q_min, double q_max,
              double q_step, bool with_mean, std::ostream& out) {
  cfg.map.validate();
  if (q_list.empty()) q_list = q_grid(q_min, q_max, q_step);
  for (double q : q_list) make_spec(q);
  if (cfg.count == 0) throw DomainError("M (--count) must be >= 1");
  if (cfg.trials == 0) throw DomainError("trials must be >= 1");
  if (cfg.n_null == 0) throw DomainError("n_null must be >= 1");

  stats::TrialOptions opt;
  opt.trials = cfg.trials;
  opt.samples = cfg.count;
  opt.n_null = cfg.n_null;
  opt.seed = cfg.seed;
  opt.burn_in = cfg.burn_in;
  opt.method = cfg.method;
  opt.jobs = cfg.jobs;
  const auto table = stats::run_trial_table(q_list, cfg.map, opt);

  Sink sink(cfg.output, out);
  std::ostream& os = sink.get();
  os << "q,nu,p_AD_best,p_KS_best" << (with_mean ? ",p_AD_mean,p_KS_mean" : "") << '\n';
  for (const auto& row : table.rows) {
    char q[32];
    std::snprintf(q, sizeof q, "%g", row.q_out);
    os << q << ',';
    if (row.nu) {
      char nu[32];
      std::snprintf(nu, sizeof nu, "%.6g", *row.nu);
      os << nu;
    }
    os << ',' << fixed6(row.best_p_ad) << ',' << fixed6(row.best_p_ks);
    if (with_mean) os << ',' << fixed6(row.mean_p_ad) << ',' << fixed6(row.mean_p_ks);
    os << '\n';
  }
  sink.finish(cfg.output);
  return kOk;
}

// ---- diag ----------------------------------------------------------------

int cmd_diag(const RunConfig& cfg, const std::string& what, std::size_t max_lag, int grid,
             std::ostream& out) {
  validate_common(cfg);
  const QSpec spec = make_spec(cfg.q_out);
  static const std::vector<std::string> known = {"return_map", "sample_path", "ccdf_compare",
                                                 "lyapunov",   "autocorr",    "joint_grid"};
  if (std::find(known.begin(), known.end(), what) == known.end()) {
    throw DomainError("unknown diagnostic '" + what + "'");
  }
  if (grid < 2) throw DomainError("--grid must be >= 2");
  Sink sink(cfg.output, out);
  std::ostream& os = sink.get();

  if (what == "return_map") {
    init_state(spec, cfg.map, cfg.seeds);
    os << "series,z,z_next\n";
    double z = cfg.seeds.z0;
    for (std::size_t i = 0; i < cfg.count; ++i) {
      const double next = maps::z_map(spec.q_int, cfg.map, z);
      os << "orbit," << fmt17(z) << ',' << fmt17(next) << '\n';
      z = next;
    }
    const double top = std::min(maps::z_support(spec.q_int), 4.0);
    for (int i = 0; i < grid; ++i) {
      const double zg = top * i / (grid - 1.0);
      os << "curve," << fmt17(zg) << ',' << fmt17(maps::z_map(spec.q_int, cfg.map, zg)) << '\n';
    }
  } else if (what == "sample_path") {
    GeneratorState s = init_state(spec, cfg.map, cfg.seeds);
    os << "n,w,v,z,xi,eta\n";
    for (std::size_t i = 0; i < cfg.count; ++i) {
      const Sample smp = step(s);
      os << s.step_count << ',' << fmt17(s.point.w) << ',' << fmt17(s.point.v) << ','
         << fmt17(s.z) << ',' << fmt17(smp.xi) << ',' << fmt17(smp.eta) << '\n';
    }
  } else if (what == "ccdf_compare") {
    if (cfg.method == Method::chaotic) init_state(spec, cfg.map, cfg.seeds);
    std::vector<double> xi = make_batch(cfg).xi;
    std::sort(xi.begin(), xi.end(), std::greater<>());
    const double n = static_cast<double>(xi.size());
    os << "x,empirical_ccdf,theoretical_ccdf\n";
    for (std::size_t k = 0; k < xi.size() && xi[k] > 0.0; ++k) {
      os << fmt17(xi[k]) << ',' << fmt17((k + 1.0) / n) << ',' << fmt17(dist::ccdf(cfg.q_out, xi[k]))
         << '\n';
    }
  } else if (what == "lyapunov") {
    init_state(spec, cfg.map, cfg.seeds);
    std::vector<double> running;
    const std::size_t stride = std::max<std::size_t>(1, cfg.count / 1000);
    stats::lyapunov(spec.q_int, cfg.map, cfg.seeds.z0, cfg.count, &running, stride);
    os << "step,lambda\n";
    for (std::size_t i = 0; i < running.size(); ++i) {
      os << (i + 1) * stride << ',' << fmt17(running[i]) << '\n';
    }
  } else if (what == "autocorr") {
    if (cfg.method == Method::chaotic) init_state(spec, cfg.map, cfg.seeds);
    const auto xi = make_batch(cfg).xi;
    const auto c = stats::autocorrelations(xi, max_lag);
    os << "m,C,C_normalized\n";
    for (std::size_t m = 0; m < c.size(); ++m) {
      os << m << ',' << fmt17(c[m]) << ',' << fmt17(c[m] / c[0]) << '\n';
    }
  } else {
    const double edge = dist::support(cfg.q_out);
    const double half = std::isfinite(edge) ? edge : 4.0;
    os << "xi,eta,pdf_joint\n";
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const double x = -half + 2.0 * half * i / (grid - 1.0);
        const double y = -half + 2.0 * half * j / (grid - 1.0);
        os << fmt17(x) << ',' << fmt17(y) << ',' << fmt17(dist::joint_pdf(cfg.q_out, x, y)) << '\n';
      }
    }
  }
  sink.finish(cfg.output);
  return kOk;
}

// ---- bench ---------------------------------------------------------------

template <class Fn>
json time_runs(std::size_t samples, Fn&& fn) {
  std::vector<double> seconds;
  for (int r = 0; r < kBenchRepeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(seconds.begin(), seconds.end());
  const double median = seconds[seconds.size() / 2];
  return {{"median_seconds", median},
          {"samples_per_second", median > 0.0 ? static_cast<double>(samples) / median : 0.0},
          {"min_seconds", seconds.front()},
          {"max_seconds", seconds.back()}};
}

int cmd_bench(const RunConfig& cfg, std::size_t samples, std::ostream& out) {
  make_spec(cfg.q_out);
  cfg.map.validate();
  if (samples == 0) throw DomainError("M (--count) must be >= 1");
  const QSpec spec = make_spec(cfg.q_out);
  init_state(spec, cfg.map, cfg.seeds);

  // Warm-up: touch the code paths and the allocator before timing.
  const std::size_t warm = std::min(samples, kBenchWarmup);
  generate_chaotic(spec, cfg.map, cfg.seeds, warm);
  generate_gbmm(spec, warm, cfg.uniform_seed);

  constexpr std::size_t kLanes = 8;
  const auto lane_seeds = derive_seeds(spec, cfg.seed, kLanes);
  const std::size_t per_lane = (samples + kLanes - 1) / kLanes;

  json j;
  j["q_out"] = cfg.q_out;
  j["map"] = map_json(cfg.map);
  j["samples"] = samples;
  j["repeats"] = kBenchRepeats;
  j["isa"] = std::string(kernels::to_string(kernels::active_isa()));
  j["chaotic"] = time_runs(samples, [&] { generate_chaotic(spec, cfg.map, cfg.seeds, samples); });
  j["chaotic_lanes"] = time_runs(per_lane * kLanes, [&] {
    generate_chaotic_lanes(spec, cfg.map, lane_seeds, per_lane);
  });
  j["gbmm"] = time_runs(samples, [&] { generate_gbmm(spec, samples, cfg.uniform_seed); });
  j["unreliable"] = samples < kReliableBenchSamples;
  Sink sink(cfg.output, out);
  sink.get() << j.dump(2) << '\n';
  sink.finish(cfg.output);
  return kOk;
}

// ---- option wiring -------------------------------------------------------

void add_q(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-q,--q", cfg.q_out, "output parameter q' (< 3)");
}

void add_map(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-d,--degree", cfg.map.degree, "Chebyshev degree d (2..8)");
  sub->add_option("-l,--order", cfg.map.order, "piecewise-linear order l (>= 2)");
  sub->add_option("-c,--iterations", cfg.map.iterations, "T_l applications per step c (>= 1)");
  sub->add_option("--epsilon", cfg.map.epsilon, "slope correction, T_l slope l(1-eps)");
}

void add_seeds(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--v0", cfg.seeds.v0, "seed v0 in (0, 1)");
  sub->add_option("--z0", cfg.seeds.z0, "seed z0 > 0");
  sub->add_option("--w0-sign", cfg.seeds.w0_sign, "sign of w0 (+1 or -1)");
  sub->add_option("--uniform-seed", cfg.uniform_seed, "seed of the GBMM uniform stream");
  sub->add_option("--burn-in", cfg.burn_in, "discarded initial steps");
}

void add_method(CLI::App* sub, std::string& method) {
  sub->add_option("--method", method, "chaotic or gbmm")->check(CLI::IsMember({"chaotic", "gbmm"}));
}

void add_output(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-o,--output", cfg.output, "output path, '-' for stdout");
}

void add_count(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-M,--count", cfg.count, "number of samples M");
}

void add_jobs(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-j,--jobs", cfg.jobs, "worker threads (0 = all cores)");
}

void report(std::ostream& err, int code, const std::string& type, const std::string& message) {
  err << json{{"error", type}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

}  // namespace

std::vector<double> read_xi_column(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "xi,eta") throw DataError(path + ": expected header 'xi,eta'");
  std::vector<double> xi;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string where = path + ":" + std::to_string(lineno);
    if (comma == std::string::npos) throw DataError(where + ": expected two columns");
    double values[2];
    const std::string_view fields[2] = {std::string_view(line).substr(0, comma),
                                        std::string_view(line).substr(comma + 1)};
    for (int k = 0; k < 2; ++k) {
      const char* first = fields[k].data();
      const char* last = first + fields[k].size();
      const auto [ptr, ec] = std::from_chars(first, last, values[k]);
      if (ec != std::errc() || ptr != last || !std::isfinite(values[k])) {
        throw DataError(where + ": malformed number '" + std::string(fields[k]) + "'");
      }
    }
    xi.push_back(values[0]);
  }
  if (xi.empty()) throw DataError(path + ": no samples");
  return xi;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string method = "chaotic";
  std::string format = "csv";
  std::string kind = "both";
  std::string null_route = "uniform";
  std::string what;
  std::vector<double> q_list;
  double q_min = -1.0, q_max = 2.9, q_step = 0.1;
  bool with_mean = false;
  std::size_t max_lag = 10;
  int grid = 41;
  std::size_t bench_samples = kReliableBenchSamples;

  CLI::App app{"q-Gaussian variates from chaotic maps, with verification tools"};
  app.name("qgauss");
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate (xi, eta) samples");
  add_q(gen, cfg); add_map(gen, cfg); add_seeds(gen, cfg); add_method(gen, method);
  add_count(gen, cfg); add_output(gen, cfg);
  gen->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* gof = app.add_subcommand("gof", "KS / AD goodness of fit of xi");
  add_q(gof, cfg); add_map(gof, cfg); add_seeds(gof, cfg); add_method(gof, method);
  add_count(gof, cfg); add_output(gof, cfg); add_jobs(gof, cfg);
  gof->add_option("-i,--input", cfg.input, "CSV written by gen (otherwise one trial is generated)");
  gof->add_option("--kind", kind, "ks, ad or both")->check(CLI::IsMember({"ks", "ad", "both"}));
  gof->add_option("--n-null", cfg.n_null, "null replicates");
  gof->add_option("--seed", cfg.seed, "seed of the null replicates");
  gof->add_option("--null", null_route, "uniform (sorted uniforms) or quantile (via quantile())");

  auto* table = app.add_subcommand("table", "best-of-trials KS / AD p-values over a q grid");
  add_map(table, cfg); add_method(table, method); add_count(table, cfg); add_output(table, cfg);
  add_jobs(table, cfg);
  table->add_option("--burn-in", cfg.burn_in, "discarded initial steps per trial");
  table->add_option("--trials", cfg.trials, "independent trials per q");
  table->add_option("--n-null", cfg.n_null, "null replicates");
  table->add_option("--seed", cfg.seed, "master seed for trial seeds and null replicates");
  table->add_option("--q-list", q_list, "explicit q values")->delimiter(',');
  table->add_option("--q-min", q_min, "grid start");
  table->add_option("--q-max", q_max, "grid end");
  table->add_option("--q-step", q_step, "grid step");
  table->add_flag("--with-mean", with_mean, "add mean p-value columns");

  auto* diag = app.add_subcommand("diag", "diagnostic data as CSV");
  add_q(diag, cfg); add_map(diag, cfg); add_seeds(diag, cfg); add_method(diag, method);
  add_count(diag, cfg); add_output(diag, cfg);
  diag->add_option("--what", what,
                   "return_map, sample_path, ccdf_compare, lyapunov, autocorr or joint_grid")
      ->required();
  diag->add_option("--max-lag", max_lag, "largest lag for autocorr");
  diag->add_option("--grid", grid, "grid points (return_map curve, joint_grid axis)");

  auto* bench = app.add_subcommand("bench", "throughput of the chaotic and GBMM generators");
  add_q(bench, cfg); add_map(bench, cfg); add_seeds(bench, cfg); add_output(bench, cfg);
  bench->add_option("-M,--count", bench_samples, "samples per timed run");
  bench->add_option("--seed", cfg.seed, "seed of the lane generators");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report(err, kArgumentError, "argument", e.what());
    return kArgumentError;
  }

  try {
    cfg.method = parse_method(method);
    cfg.format = format == "json" ? Format::json : Format::csv;
    if (gen->parsed()) return cmd_gen(cfg, out);
    if (gof->parsed()) return cmd_gof(cfg, kind, null_route, out);
    if (table->parsed()) return cmd_table(cfg, q_list, q_min, q_max, q_step, with_mean, out);
    if (diag->parsed()) return cmd_diag(cfg, what, max_lag, grid, out);
    if (bench->parsed()) return cmd_bench(cfg, bench_samples, out);
  } catch (const DomainError& e) {
    report(err, kArgumentError, "argument", e.what());
    return kArgumentError;
  } catch (const DataError& e) {
    report(err, kDataError, "data", e.what());
    return kDataError;
  } catch (const std::exception& e) {
    report(err, kDataError, "data", e.what());
    return kDataError;
  }
  return kArgumentError;
}

}  // namespace qgauss::cli

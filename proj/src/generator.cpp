#include "qgauss/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qgauss/detail/circle.hpp"
#include "qgauss/error.hpp"
#include "qgauss/kernels.hpp"
#include "qgauss/specfun.hpp"

namespace qgauss {

Regime QSpec::regime() const {
  if (std::fabs(q_out - 1.0) < specfun::kUnitQTolerance) return Regime::gaussian;
  return q_out < 1.0 ? Regime::compact : Regime::heavy_tail;
}

QSpec make_spec(double q_out) {
  if (!std::isfinite(q_out)) throw DomainError("q_out must be finite");
  if (!(q_out < 3.0)) throw DomainError("q_out must be < 3, got " + std::to_string(q_out));
  QSpec spec;
  spec.q_out = q_out;
  spec.q_int = (q_out + 1.0) / (3.0 - q_out);
  if (spec.regime() == Regime::heavy_tail) spec.nu = (3.0 - q_out) / (q_out - 1.0);
  return spec;
}

GeneratorState init_state(const QSpec& spec, const MapConfig& cfg, const Seeds& seeds) {
  cfg.validate();
  if (!(seeds.v0 > 0.0 && seeds.v0 < 1.0)) {
    throw DomainError("seed v0 must lie in (0, 1), got " + std::to_string(seeds.v0));
  }
  if (!(seeds.z0 > 0.0) || std::isinf(seeds.z0)) {
    throw DomainError("seed z0 must be finite and > 0, got " + std::to_string(seeds.z0));
  }
  const double bound = maps::z_support(spec.q_int);
  if (seeds.z0 > bound) {
    throw DomainError("seed z0 must not exceed the support bound " + std::to_string(bound) +
                      ", got " + std::to_string(seeds.z0));
  }
  if (seeds.w0_sign != 1 && seeds.w0_sign != -1) {
    throw DomainError("seed sign of w0 must be +1 or -1");
  }
  GeneratorState state;
  state.point.v = seeds.v0;
  state.point.w = seeds.w0_sign * std::sqrt(1 - seeds.v0 * seeds.v0);
  state.z = seeds.z0;
  state.spec = spec;
  state.cfg = cfg;
  return state;
}

Sample step(GeneratorState& state) {
  state.point = detail::circle_step(state.cfg.degree, state.point);
  state.z = maps::z_map(state.spec.q_int, state.cfg, state.z);
  ++state.step_count;
  return {state.point.w * state.z, state.point.v * state.z};
}

std::string to_string(Method method) { return method == Method::gbmm ? "gbmm" : "chaotic"; }

Method parse_method(const std::string& name) {
  if (name == "chaotic") return Method::chaotic;
  if (name == "gbmm") return Method::gbmm;
  throw DomainError("method must be 'chaotic' or 'gbmm', got '" + name + "'");
}

SampleBatch generate_chaotic(const QSpec& spec, const MapConfig& cfg, const Seeds& seeds,
                             std::size_t count, std::size_t burn_in) {
  GeneratorState state = init_state(spec, cfg, seeds);
  for (std::size_t i = 0; i < burn_in; ++i) step(state);
  SampleBatch batch;
  batch.spec = spec;
  batch.cfg = cfg;
  batch.seeds = seeds;
  batch.count = count;
  batch.burn_in = burn_in;
  batch.xi.resize(count);
  batch.eta.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Sample s = step(state);
    batch.xi[i] = s.xi;
    batch.eta[i] = s.eta;
  }
  return batch;
}

std::vector<SampleBatch> generate_chaotic_lanes(const QSpec& spec, const MapConfig& cfg,
                                                std::span<const Seeds> seeds,
                                                std::size_t count, std::size_t burn_in) {
  const std::size_t lanes = seeds.size();
  std::vector<double> w(lanes), v(lanes), z(lanes);
  std::vector<SampleBatch> out(lanes);
  for (std::size_t k = 0; k < lanes; ++k) {
    const GeneratorState s = init_state(spec, cfg, seeds[k]);
    w[k] = s.point.w;
    v[k] = s.point.v;
    z[k] = s.z;
    SampleBatch& b = out[k];
    b.spec = spec;
    b.cfg = cfg;
    b.seeds = seeds[k];
    b.count = count;
    b.burn_in = burn_in;
    b.xi.resize(count);
    b.eta.resize(count);
  }
  for (std::size_t i = 0; i < burn_in + count; ++i) {
    kernels::chebyshev_step(cfg.degree, w, v);
    for (std::size_t k = 0; k < lanes; ++k) z[k] = maps::z_map(spec.q_int, cfg, z[k]);
    if (i < burn_in) continue;
    const std::size_t j = i - burn_in;
    for (std::size_t k = 0; k < lanes; ++k) {
      out[k].xi[j] = w[k] * z[k];
      out[k].eta[j] = v[k] * z[k];
    }
  }
  return out;
}

std::pair<double, double> gbmm_sample(const QSpec& spec, double u1, double u2) {
  if (!(u1 > 0.0 && u1 < 1.0)) throw DomainError("gbmm: u1 must lie in (0, 1)");
  if (!(u2 > 0.0 && u2 < 1.0)) throw DomainError("gbmm: u2 must lie in (0, 1)");
  const double r = std::sqrt(-2.0 * specfun::q_ln(spec.q_int, u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(angle), r * std::sin(angle)};
}

std::uint64_t UniformStream::next_u64() {
  std::uint64_t x = (state_ += 0x9E3779B97F4A7C15ULL);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double UniformStream::next() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

SampleBatch generate_gbmm(const QSpec& spec, std::size_t count, std::uint64_t seed) {
  UniformStream stream(seed);
  SampleBatch batch;
  batch.spec = spec;
  batch.method = Method::gbmm;
  batch.uniform_seed = seed;
  batch.count = count;
  batch.xi.resize(count);
  batch.eta.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u1 = stream.next();
    const double u2 = stream.next();
    const auto [x, y] = gbmm_sample(spec, u1, u2);
    batch.xi[i] = x;
    batch.eta[i] = y;
  }
  return batch;
}

std::vector<Seeds> derive_seeds(const QSpec& spec, std::uint64_t master, std::size_t n) {
  UniformStream stream(master);
  std::vector<Seeds> seeds(n);
  for (auto& s : seeds) {
    s.v0 = stream.next();
    s.z0 = maps::unit_to_z(spec.q_int, std::max(stream.next(), maps::unit_floor(spec.q_int)));
    s.w0_sign = (stream.next_u64() & 1U) ? -1 : 1;
  }
  return seeds;
}

}  // namespace qgauss

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qgauss/maps.hpp"

namespace qgauss {

enum class Regime { compact, gaussian, heavy_tail };

/// Output parameter q' with the derived internal map parameter and tail index.
struct QSpec {
  double q_out = 1.0;             ///< q' of the output distribution, < 3
  double q_int = 1.0;             ///< (q' + 1) / (3 - q'), used by the maps and GBMM
  std::optional<double> nu;       ///< (3 - q') / (q' - 1), only for q' > 1

  Regime regime() const;
};

/// Throws DomainError for q_out >= 3 or non-finite input.
QSpec make_spec(double q_out);

/// Seeds of the chaotic generator: v0 in (0, 1), z0 > 0, and the sign of
/// w0 = +-sqrt(1 - v0^2).
struct Seeds {
  double v0 = 0.1;
  double z0 = 1.0;
  int w0_sign = 1;
};

struct GeneratorState {
  CirclePoint point;
  double z = 1.0;
  QSpec spec;
  MapConfig cfg;
  std::uint64_t step_count = 0;
};

/// Validates the seeds against the spec and config. Throws DomainError naming
/// the violated bound.
GeneratorState init_state(const QSpec& spec, const MapConfig& cfg, const Seeds& seeds);

struct Sample {
  double xi;
  double eta;
};

/// Advances (w, v) by the Chebyshev pair and z by f_{l,c}, then returns
/// (z w, z v) from the updated state.
///
/// Evaluation order per step, all in IEEE double without contraction:
///   v' = Q_d(w, v); w' = P_d(w); circle restore;
///   u = q_exp(q, (-z * z) * 0.5); clamp u; u = T_l(u) c times;
///   z' = sqrt(-2 q_ln(q, u)); xi = w' * z'; eta = v' * z'.
Sample step(GeneratorState& state);

enum class Method { chaotic, gbmm };

std::string to_string(Method method);
Method parse_method(const std::string& name);

/// An ordered run of generated pairs together with everything needed to
/// regenerate it.
struct SampleBatch {
  std::vector<double> xi;
  std::vector<double> eta;
  QSpec spec;
  MapConfig cfg;
  Method method = Method::chaotic;
  Seeds seeds;
  std::uint64_t uniform_seed = 0;
  std::size_t count = 0;
  std::size_t burn_in = 0;
};

/// Runs `burn_in` discarded steps, then records `count` pairs.
SampleBatch generate_chaotic(const QSpec& spec, const MapConfig& cfg, const Seeds& seeds,
                             std::size_t count, std::size_t burn_in = 0);

/// Steps several independent generators in lockstep. The circle update runs
/// through the dispatched data-parallel kernel; each lane's output is
/// bit-identical to generate_chaotic with the same seeds.
std::vector<SampleBatch> generate_chaotic_lanes(const QSpec& spec, const MapConfig& cfg,
                                                std::span<const Seeds> seeds,
                                                std::size_t count, std::size_t burn_in = 0);

/// Generalized Box-Muller transform of two uniforms in (0, 1), using q_int.
std::pair<double, double> gbmm_sample(const QSpec& spec, double u1, double u2);

/// SplitMix64: state += 0x9E3779B97F4A7C15, output is the state passed through
/// two xor-shift-multiply rounds. The top 53 bits map to (k + 0.5) 2^-53, so
/// uniforms lie strictly inside (0, 1). Period 2^64.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  double next();

 private:
  std::uint64_t state_;
};

/// GBMM batch; each pair consumes u1 then u2 from UniformStream(seed).
SampleBatch generate_gbmm(const QSpec& spec, std::size_t count, std::uint64_t seed);

/// Seeds for independent trials, drawn from UniformStream(master): v0 and a
/// uniform u mapped to z0 = g(u) (inside the support for every q), and a sign.
std::vector<Seeds> derive_seeds(const QSpec& spec, std::uint64_t master, std::size_t n);

}  // namespace qgauss

#include "qgauss/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qgauss/detail/circle.hpp"
#include "qgauss/error.hpp"
#include "qgauss/specfun.hpp"

namespace qgauss {

void MapConfig::validate() const {
  if (degree < 2 || degree > maps::kMaxDegree) {
    throw DomainError("degree d must lie in [2, 8], got " + std::to_string(degree));
  }
  if (order < 2) {
    throw DomainError("order l must be >= 2, got " + std::to_string(order));
  }
  if (iterations < 1) {
    throw DomainError("iterations c must be >= 1, got " + std::to_string(iterations));
  }
  if (!(epsilon >= 0.0 && epsilon < 1e-3)) {
    throw DomainError("epsilon must lie in [0, 1e-3), got " + std::to_string(epsilon));
  }
}

namespace maps {

namespace {

// Below this the tent form 1 - |1 - y| has lost most of y's digits.
constexpr double kTentDirect = 0x1p-26;

// T_l without argument checks; u is already known to lie in [0, 1].
double fold(int l, double slope, double u) {
  if (l == 2) {
    const double y = slope * u;
    return y < kTentDirect ? y : 1.0 - std::fabs(1.0 - y);
  }
  const double y = slope * u;
  const double k = std::floor(y);
  const bool rising = std::fmod(k, 2.0) == 0.0;
  const double r = rising ? y - k : (k + 1.0) - y;
  return std::clamp(r, 0.0, 1.0);
}

void check_z(double q, double z) {
  if (!(z >= 0.0) || std::isinf(z)) {
    throw DomainError("z must be finite and >= 0, got " + std::to_string(z));
  }
  if (z > z_support(q)) {
    throw DomainError("z must not exceed the support bound sqrt(2/(1-q)) = " +
                      std::to_string(z_support(q)) + ", got " + std::to_string(z));
  }
}

}  // namespace

CirclePoint chebyshev_polynomials(int d, CirclePoint p) {
  if (d < 1 || d > kMaxDegree) {
    throw DomainError("Chebyshev degree must lie in [1, 8], got " + std::to_string(d));
  }
  return {detail::chebyshev_p(d, p.w), detail::chebyshev_q(d, p.w, p.v)};
}

CirclePoint restore_circle(CirclePoint p) { return detail::restore_circle(p); }

CirclePoint chebyshev_pair(int d, CirclePoint p) {
  if (d < 1 || d > kMaxDegree) {
    throw DomainError("Chebyshev degree must lie in [1, 8], got " + std::to_string(d));
  }
  return detail::circle_step(d, p);
}

double tri_map(int l, double epsilon, double u) {
  if (l < 2) throw DomainError("order l must be >= 2, got " + std::to_string(l));
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("tri_map: u must lie in [0, 1], got " + std::to_string(u));
  }
  return fold(l, static_cast<double>(l) * (1.0 - epsilon), u);
}

double z_support(double q) {
  if (q < 1.0 && std::fabs(q - 1.0) >= specfun::kUnitQTolerance) {
    return std::sqrt(2.0 / (1.0 - q));
  }
  return std::numeric_limits<double>::infinity();
}

double z_to_unit(double q, double z) { return specfun::q_exp(q, -z * z * 0.5); }

double unit_to_z(double q, double u) {
  if (u == 0.0 && std::isfinite(z_support(q))) return z_support(q);
  return std::sqrt(-2.0 * specfun::q_ln(q, u));
}

double unit_floor(double q) {
  if (std::isfinite(z_support(q))) return 0.0;
  if (q - 1.0 < specfun::kUnitQTolerance) return kUnitFloor;
  // Keeps u^(1-q) <= e^680 so that z stays finite.
  return std::max(kUnitFloor, std::exp(-680.0 / (q - 1.0)));
}

double z_map(double q, const MapConfig& cfg, double z) {
  check_z(q, z);
  const double slope = cfg.slope();
  const double floor = unit_floor(q);
  double u = std::clamp(z_to_unit(q, z), floor, 1.0);
  for (int i = 0; i < cfg.iterations; ++i) u = fold(cfg.order, slope, u);
  return unit_to_z(q, std::max(u, floor));
}

double z_map_kink(double q, double epsilon) {
  return unit_to_z(q, 1.0 / (2.0 * (1.0 - epsilon)));
}

double z_map_derivative(double q, double z, double epsilon) {
  check_z(q, z);
  if (!(z > 0.0)) throw DomainError("z_map_derivative: z must be > 0");
  if (std::fabs(z - z_map_kink(q, epsilon)) < 1e-9) {
    throw DomainError("z_map_derivative: undefined at the kink z = " +
                      std::to_string(z_map_kink(q, epsilon)));
  }
  const double slope = 2.0 * (1.0 - epsilon);
  const double u = z_to_unit(q, z);
  if (!(u > 0.0)) throw DomainError("z_map_derivative: z lies on the support edge");
  const double image = fold(2, slope, u);
  const double z_next = unit_to_z(q, image);
  // f' = T'(u) * (dz'/du') * (du/dz) with du/dz = -z u^q, dz'/du' = -u'^-q / z'.
  const double sign = (slope * u < 1.0) ? 1.0 : -1.0;
  return sign * slope * (z / z_next) * std::exp(q * (std::log(u) - std::log(image)));
}

double z_map_log_slope(double q, const MapConfig& cfg, double z) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  check_z(q, z);
  const double slope = cfg.slope();
  const double u0 = std::clamp(z_to_unit(q, z), unit_floor(q), 1.0);
  double u = u0;
  for (int i = 0; i < cfg.iterations; ++i) u = fold(cfg.order, slope, u);
  const double z_next = unit_to_z(q, u);
  if (!(z > 0.0) || !(z_next > 0.0) || !(u0 > 0.0) || !(u > 0.0)) return nan;
  return static_cast<double>(cfg.iterations) * std::log(slope) + std::log(z) +
         q * std::log(u0) - std::log(z_next) - q * std::log(u);
}

}  // namespace maps
}  // namespace qgauss

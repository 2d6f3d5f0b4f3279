#pragma once

#include <limits>

namespace qgauss {

/// Parameters of the map dynamics.
struct MapConfig {
  int degree = 8;         ///< Chebyshev degree d, 2..8
  int order = 2;          ///< piecewise-linear order l >= 2
  int iterations = 1;     ///< applications c >= 1 of T_l per z step
  double epsilon = 5e-6;  ///< slope correction: T_l uses slope l * (1 - epsilon)

  /// l * (1 - epsilon). With the defaults this is exactly the double 1.99999.
  double slope() const { return static_cast<double>(order) * (1.0 - epsilon); }

  /// Throws DomainError naming the first violated bound.
  void validate() const;
};

/// A point (w, v) on the unit circle.
struct CirclePoint {
  double w = 1.0;
  double v = 0.0;
};

namespace maps {

inline constexpr int kMaxDegree = 8;

/// Largest |w^2 + v^2 - 1| left uncorrected after a circle step.
inline constexpr double kCircleDriftTolerance = 1e-10;

/// Smallest u passed to the q-logarithm when q >= 1.
inline constexpr double kUnitFloor = 1e-300;

/// Raw (P_d(w), Q_d(w, v)) from the explicit Horner forms, d in 1..8. No
/// correction is applied.
CirclePoint chebyshev_polynomials(int d, CirclePoint p);

/// Projects a freshly stepped point back onto the circle.
///
/// If |w| >= 1 the point has collapsed onto (or past) a fixed point of P_d;
/// w is clamped and rebuilt from v, which still carries the angle. Otherwise,
/// when the drift |w^2 + v^2 - 1| exceeds kCircleDriftTolerance, v is rebuilt
/// from w. w is never touched in the common case, so the real-part orbit is
/// bit-identical to iterating P_d alone.
CirclePoint restore_circle(CirclePoint p);

/// One step of the Chebyshev pair map: restore_circle(chebyshev_polynomials(d, p)).
CirclePoint chebyshev_pair(int d, CirclePoint p);

/// l-th order piecewise-linear map on [0, 1] with slope s = l (1 - epsilon).
/// l == 2 evaluates the tent form 1 - |1 - s u| (s u itself when s u < 2^-26,
/// where the tent form would round small images to 0); general l folds s u as
/// a triangular wave. Throws DomainError for u outside [0, 1] or l < 2.
double tri_map(int l, double epsilon, double u);

/// Upper end of the z support: sqrt(2 / (1 - q)) for q < 1, +inf otherwise.
double z_support(double q);

/// g^{-1}(z) = q_exp(q, -z^2 / 2).
double z_to_unit(double q, double z);

/// g(u) = sqrt(-2 q_ln(q, u)); for q < 1, u == 0 maps to the support edge.
double unit_to_z(double q, double u);

/// Floor applied to u before the q-logarithm: 0 for q < 1; for q >= 1 the
/// larger of kUnitFloor and the smallest u keeping g(u) finite.
double unit_floor(double q);

/// f_{l,c}(z) = g o T_l^c o g^{-1}(z), with u clamped to unit_floor(q) before
/// T_l and again before g. Throws DomainError for z < 0 or z
/// beyond the support when q < 1.
double z_map(double q, const MapConfig& cfg, double z);

/// The branch point of f_{2,1}: g(1 / s) with s = 2 (1 - epsilon).
double z_map_kink(double q, double epsilon = 0.0);

/// df_{2,1}/dz. Negative below the kink, positive above; throws DomainError
/// within 1e-9 of the kink or for z <= 0.
double z_map_derivative(double q, double z, double epsilon = 0.0);

/// log |f'_{l,c}(z)| by the chain rule through the conjugacy. Returns NaN
/// where the derivative is undefined (a fold of T_l^c or a degenerate u).
double z_map_log_slope(double q, const MapConfig& cfg, double z);

}  // namespace maps
}  // namespace qgauss

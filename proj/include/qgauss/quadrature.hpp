#pragma once

#include <functional>

// Adaptive Gauss-Kronrod quadrature, used as the independent numerical
// oracle for the closed-form distribution functions.

namespace qgauss::quad {

struct Result {
  double value;
  double error;      ///< sum of |K15 - G7| over the final partition
  int intervals;
  bool converged;
};

struct Options {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  int max_intervals = 4000;
};

/// Globally adaptive G7-K15: the interval with the largest error estimate is
/// bisected until the summed estimate is below max(abs_tol, rel_tol |I|).
/// [a, b] must be finite; the integrand is never evaluated at the endpoints.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {});

/// Integral of pdf(q', t) t^power over [x0, x1], 0 <= x0 <= x1 <= inf, with
/// power in {0, 2}. Heavy tails are integrated in log t up to 1e100 and the
/// rest is added from the leading power-law term; compact supports are
/// clipped to the support.
double pdf_moment(double q_out, double x0, double x1, int power = 0);

}  // namespace qgauss::quad

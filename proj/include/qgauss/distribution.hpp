#pragma once

#include <optional>

// Closed-form q-Gaussian density and distribution functions, parameterized by
// the output parameter q' < 3:
//
//   q' < 1   compact, pdf ~ (1 - a x^2)^(1/(1-q')),  a = (1-q')/(3-q')
//   q' = 1   standard normal
//   1 < q'   Student-t shape, pdf ~ (1 + a x^2)^(-1/(q'-1)),  a = (q'-1)/(3-q')
//
// All functions throw DomainError for q' >= 3.

namespace qgauss::dist {

struct DistSummary {
  double q_out;
  double support_lo;  ///< -inf unless q' < 1
  double support_hi;
  std::optional<double> nu;        ///< tail index, q' > 1
  std::optional<double> variance;  ///< q' < 5/3
};

/// Half-width of the support, sqrt((3-q')/(1-q')) for q' < 1, +inf otherwise.
double support(double q_out);

double pdf(double q_out, double x);

/// Lower and upper tail probabilities at x, each computed without forming
/// 1 - (the other); lower + upper == 1 up to rounding.
struct Tails {
  double lower;  ///< Pr(X <= x)
  double upper;  ///< Pr(X > x)
};

Tails tails(double q_out, double x);
double cdf(double q_out, double x);
double ccdf(double q_out, double x);

/// (3 - q') / (5 - 3 q'). Throws DomainError for q' >= 5/3 (divergent moment).
double variance(double q_out);

/// Solves cdf(x) = p for p in (0, 1) by safeguarded Newton steps inside a
/// bracket. The upper half is solved on ccdf so extreme p keep full relative
/// accuracy in the tail.
double quantile(double q_out, double p);

DistSummary summary(double q_out);

/// Joint density of the GBMM pair, (1 / 2 pi) q_exp(q, -r^2 / 2)^q with the
/// internal parameter q = (q'+1)/(3-q'); zero outside the support.
double joint_pdf(double q_out, double x, double y);

}  // namespace qgauss::dist

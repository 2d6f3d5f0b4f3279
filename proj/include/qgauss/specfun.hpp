#pragma once

// Scalar special functions used by the densities, distribution functions and
// the map conjugacies. Every function here is pure and thread-safe.

namespace qgauss::specfun {

/// |q - 1| below this is treated as q == 1 (exp / ln limits).
inline constexpr double kUnitQTolerance = 1e-12;

/// q-exponential: (1 + (1-q) w)^(1/(1-q)) where the base is positive, 0
/// elsewhere, exp(w) at q == 1.
double q_exp(double q, double w);

/// q-logarithm: (w^(1-q) - 1) / (1-q), ln(w) at q == 1. Throws DomainError
/// for w <= 0.
double q_ln(double q, double w);

/// ln Gamma(a) for a > 0 (Lanczos, g = 7, nine terms; reflection below 1/2).
double log_gamma(double a);

/// ln B(a, b) and B(a, b) for a, b > 0.
double log_beta(double a, double b);
double beta(double a, double b);

/// Regularized incomplete beta I_x(a, b) together with its complement
/// 1 - I_x(a, b). Both members are accurate in their own tails.
struct IncBeta {
  double value;
  double complement;
};

/// Takes x and y = 1 - x separately so callers that know y exactly (for
/// example y = 1 / (1 + t) in a distribution tail) avoid the cancellation in
/// forming 1 - x.
///
/// Evaluation: modified Lentz continued fraction on whichever of (x; a, b)
/// and (y; b, a) lies below the mean a / (a + b) + 1 / (a + b + 2) switch
/// point. Iteration stops when the multiplicative update differs from 1 by
/// less than 4 ulp(1); failure to do so in 10000 terms throws.
IncBeta inc_beta(double x, double y, double a, double b);

/// I_x(a, b) for x in [0, 1].
double reg_inc_beta(double x, double a, double b);

/// Complementary error function.
double erfc(double x);

}  // namespace qgauss::specfun

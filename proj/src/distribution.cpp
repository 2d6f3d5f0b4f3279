#include "qgauss/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qgauss/error.hpp"
#include "qgauss/specfun.hpp"

namespace qgauss::dist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Branch { compact, gaussian, heavy };

Branch branch(double q_out) {
  if (!std::isfinite(q_out)) throw DomainError("q_out must be finite");
  if (!(q_out < 3.0)) throw DomainError("q_out must be < 3, got " + std::to_string(q_out));
  if (std::fabs(q_out - 1.0) < specfun::kUnitQTolerance) return Branch::gaussian;
  return q_out < 1.0 ? Branch::compact : Branch::heavy;
}

// Scale a of the quadratic form in either non-Gaussian branch.
double scale(double q_out) { return std::fabs(q_out - 1.0) / (3.0 - q_out); }

// First beta parameter of the tail integral; the second is always 1/2.
double tail_shape(double q_out) {
  return q_out < 1.0 ? (2.0 - q_out) / (1.0 - q_out) : 1.0 / (q_out - 1.0) - 0.5;
}

// log(1 + r^2) without overflow for huge r.
double log1p_square(double r) { return r < 1e150 ? std::log1p(r * r) : 2.0 * std::log(r); }

double log_norm(double q_out) {
  return 0.5 * std::log(scale(q_out)) - specfun::log_beta(tail_shape(q_out), 0.5);
}

// Pr(X > x) and Pr(X <= x) for x >= 0.
Tails upper_tails(double q_out, double x) {
  switch (branch(q_out)) {
    case Branch::gaussian: {
      const double t = x / std::numbers::sqrt2;
      return {1.0 - 0.5 * specfun::erfc(t), 0.5 * specfun::erfc(t)};
    }
    case Branch::compact: {
      const double r = std::sqrt(scale(q_out)) * x;
      if (r >= 1.0) return {1.0, 0.0};
      const double inside = (1.0 - r) * (1.0 + r);
      const auto ib = specfun::inc_beta(inside, r * r, tail_shape(q_out), 0.5);
      return {0.5 + 0.5 * ib.complement, 0.5 * ib.value};
    }
    case Branch::heavy: {
      const double r = std::sqrt(scale(q_out)) * x;
      if (std::isinf(r)) return {1.0, 0.0};
      const double shape = tail_shape(q_out);
      if (r > 1e15) {
        // I_s(shape, 1/2) with s = 1/(1+r^2) < 1e-30: the leading series term
        // s^shape / (shape B) is exact to double precision.
        const double upper = 0.5 * std::exp(-shape * log1p_square(r) - std::log(shape) -
                                            specfun::log_beta(shape, 0.5));
        return {1.0 - upper, upper};
      }
      const double t = r * r;
      const auto ib = specfun::inc_beta(1.0 / (1.0 + t), t / (1.0 + t), shape, 0.5);
      return {0.5 + 0.5 * ib.complement, 0.5 * ib.value};
    }
  }
  return {0.5, 0.5};
}

// Solves ccdf(x) = target for x > 0, target in (0, 1/2); ccdf is strictly
// decreasing there.
double upper_quantile(double q_out, double target) {
  double lo = 0.0;
  double hi = support(q_out);
  if (std::isinf(hi)) {
    hi = 1.0;
    while (ccdf(q_out, hi) > target) {
      lo = hi;
      hi *= 16.0;
      if (std::isinf(hi)) return hi;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double f = ccdf(q_out, x) - target;
    if (f == 0.0) return x;
    if (f > 0.0) lo = x; else hi = x;
    const double density = pdf(q_out, x);
    double next = density > 0.0 ? x + f / density : lo;
    if (!(next > lo && next < hi)) {
      // Geometric midpoint while the bracket spans decades.
      next = (lo > 0.0 && hi > 4.0 * lo) ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
    }
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return next;
    x = next;
  }
  return x;
}

}  // namespace

double support(double q_out) {
  if (branch(q_out) != Branch::compact) return kInf;
  return std::sqrt((3.0 - q_out) / (1.0 - q_out));
}

double pdf(double q_out, double x) {
  const Branch b = branch(q_out);
  if (std::isnan(x)) return x;
  if (b == Branch::gaussian) return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  const double sa = std::sqrt(scale(q_out));
  const double r = sa * std::fabs(x);
  if (b == Branch::compact) {
    if (r >= 1.0) return 0.0;
    const double inside = (1.0 - r) * (1.0 + r);
    return std::exp(log_norm(q_out) + std::log(inside) / (1.0 - q_out));
  }
  if (std::isinf(r)) return 0.0;
  return std::exp(log_norm(q_out) - log1p_square(r) / (q_out - 1.0));
}

Tails tails(double q_out, double x) {
  if (std::isnan(x)) return {x, x};
  if (x >= 0.0) return upper_tails(q_out, x);
  const Tails mirrored = upper_tails(q_out, -x);
  return {mirrored.upper, mirrored.lower};
}

double cdf(double q_out, double x) { return tails(q_out, x).lower; }

double ccdf(double q_out, double x) { return tails(q_out, x).upper; }

double variance(double q_out) {
  branch(q_out);
  if (!(q_out < 5.0 / 3.0)) {
    throw DomainError("variance diverges for q_out >= 5/3, got " + std::to_string(q_out));
  }
  return (3.0 - q_out) / (5.0 - 3.0 * q_out);
}

double quantile(double q_out, double p) {
  branch(q_out);
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  // By symmetry both halves reduce to ccdf(x) = target on x > 0; 1 - p is
  // exact for p > 1/2, and p < 1/2 is used as is.
  return p < 0.5 ? -upper_quantile(q_out, p) : upper_quantile(q_out, 1.0 - p);
}

DistSummary summary(double q_out) {
  DistSummary s;
  s.q_out = q_out;
  s.support_hi = support(q_out);
  s.support_lo = -s.support_hi;
  if (branch(q_out) == Branch::heavy) s.nu = (3.0 - q_out) / (q_out - 1.0);
  if (q_out < 5.0 / 3.0) s.variance = variance(q_out);
  return s;
}

double joint_pdf(double q_out, double x, double y) {
  branch(q_out);
  const double q = (q_out + 1.0) / (3.0 - q_out);
  const double u = specfun::q_exp(q, -(x * x + y * y) * 0.5);
  if (!(u > 0.0)) return 0.0;
  return std::pow(u, q) / (2.0 * std::numbers::pi);
}

}  // namespace qgauss::dist

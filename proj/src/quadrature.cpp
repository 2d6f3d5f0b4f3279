#include "qgauss/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

#include "qgauss/distribution.hpp"
#include "qgauss/error.hpp"
#include "qgauss/specfun.hpp"

namespace qgauss::quad {

namespace {

// Kronrod nodes on [0, 1) of the symmetric rule; odd indices are the Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kKronrod[7];
  double g = fc * kGauss[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kNodes[i];
    const double sum = f(c - dx) + f(c + dx);
    k += kKronrod[i] * sum;
    if (i % 2 == 1) g += kGauss[i / 2] * sum;
  }
  return {a, b, k * h, std::fabs((k - g) * h)};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("integrate: infinite bound");
  if (a == b) return {0.0, 0.0, 0, true};
  std::priority_queue<Piece> heap;
  Piece first = gk15(f, a, b);
  double value = first.value;
  double error = first.error;
  heap.push(first);
  while (error > std::max(opts.abs_tol, opts.rel_tol * std::fabs(value)) &&
         static_cast<int>(heap.size()) < opts.max_intervals) {
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) break;
    heap.pop();
    const Piece left = gk15(f, worst.a, mid);
    const Piece right = gk15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the partition to shed the running-update rounding.
  double total = 0.0;
  double total_error = 0.0;
  const int n = static_cast<int>(heap.size());
  std::vector<double> parts;
  parts.reserve(heap.size());
  while (!heap.empty()) {
    parts.push_back(heap.top().value);
    total_error += heap.top().error;
    heap.pop();
  }
  std::sort(parts.begin(), parts.end(), [](double x, double y) { return std::fabs(x) < std::fabs(y); });
  for (double p : parts) total += p;
  return {total, total_error, n,
          total_error <= std::max(opts.abs_tol, opts.rel_tol * std::fabs(total))};
}

double pdf_moment(double q_out, double x0, double x1, int power) {
  if (power != 0 && power != 2) throw std::invalid_argument("pdf_moment: power must be 0 or 2");
  if (!(x0 >= 0.0 && x1 >= x0)) throw std::invalid_argument("pdf_moment: need 0 <= x0 <= x1");
  const double edge = dist::support(q_out);
  x1 = std::min(x1, edge);
  x0 = std::min(x0, edge);
  if (x0 == x1) return 0.0;
  const auto integrand = [&](double t) { return dist::pdf(q_out, t) * (power == 2 ? t * t : 1.0); };

  // Finite pieces are split at 1 so the bulk and the shoulder get separate meshes.
  const auto finite = [&](double a, double b) {
    double sum = 0.0;
    if (a < 1.0) sum += integrate(integrand, a, std::min(b, 1.0)).value;
    if (b > 1.0) {
      const double lo = std::max(a, 1.0);
      const auto in_log = [&](double y) {
        const double t = std::exp(y);
        return integrand(t) * t;
      };
      sum += integrate(in_log, std::log(lo), std::log(b)).value;
    }
    return sum;
  };
  if (std::isfinite(x1)) return finite(x0, x1);

  if (q_out <= 1.0 + specfun::kUnitQTolerance) return finite(x0, std::max(x0, 40.0));

  // Power-law remainder beyond X: pdf ~ K (a t^2)^(-p), p = 1/(q'-1).
  constexpr double kCut = 1e100;
  const double p = 1.0 / (q_out - 1.0);
  const double a = (q_out - 1.0) / (3.0 - q_out);
  const double k = dist::pdf(q_out, 0.0);
  const double exponent = 2.0 * p - 1.0 - power;  // integral of t^(power - 2p)
  if (!(exponent > 0.0)) throw DomainError("pdf_moment: moment diverges");
  const double cut = std::max(x0, kCut);
  const double remainder = k * std::exp(-p * std::log(a) - exponent * std::log(cut)) / exponent;
  return finite(x0, cut) + remainder;
}

}  // namespace qgauss::quad

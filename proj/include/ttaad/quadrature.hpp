#ifndef TTAAD_QUADRATURE_HPP
#define TTAAD_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

#include "ttaad/error.hpp"

namespace ttaad {

struct QuadratureOptions {
  double abs_tol = 1e-8;
  std::size_t max_intervals = 20000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // sum of local |Kronrod - Gauss| estimates
  std::size_t intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (nodes on [-1, 1]).
// Neither rule touches the endpoints, so integrable endpoint singularities are safe.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// Evaluation points are kept strictly inside (a, b): near 1 the outer nodes of a
// narrow panel would otherwise round onto the endpoint.
template <class F>
Panel gauss_kronrod(F& f, double a, double b) {
  const double lo = std::nextafter(a, b);
  const double hi = std::nextafter(b, a);
  auto eval = [&](double x) {
    const double y = f(std::clamp(x, lo, hi));
    if (!std::isfinite(y)) {
      throw NumericalError("integrand is not finite at x = " + std::to_string(std::clamp(x, lo, hi)));
    }
    return y;
  };
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = eval(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double sum = eval(centre - dx) + eval(centre + dx);
    kronrod += kKronrodWeights[i] * sum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

// True when both halves of [a, b] still contain a double strictly inside them.
inline bool splittable(double a, double b) {
  const double mid = 0.5 * (a + b);
  return std::nextafter(a, b) < mid && std::nextafter(mid, b) < b;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `abs_tol`. Panels that have shrunk to the spacing of
/// doubles cannot be refined further; they are retired, and their estimate is
/// still included in `error`. Running out of panels or meeting a non-finite
/// integrand value throws NumericalError.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& options = {}) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw InputError("integration needs finite a < b");
  std::priority_queue<detail::Panel> active;
  std::vector<detail::Panel> retired;
  active.push(detail::gauss_kronrod(f, a, b));
  double error = active.top().error;

  while (!active.empty() && error > options.abs_tol) {
    if (active.size() + retired.size() >= options.max_intervals) {
      throw NumericalError("quadrature did not converge within " + std::to_string(options.max_intervals) +
                           " intervals (error estimate " + std::to_string(error) + ", tolerance " +
                           std::to_string(options.abs_tol) + ")");
    }
    const detail::Panel worst = active.top();
    active.pop();
    if (!detail::splittable(worst.a, worst.b)) {
      retired.push_back(worst);
      error -= worst.error;
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gauss_kronrod(f, worst.a, mid);
    const auto right = detail::gauss_kronrod(f, mid, worst.b);
    error += left.error + right.error - worst.error;
    active.push(left);
    active.push(right);
  }

  // Re-sum in position order so the running updates leave no drift.
  std::vector<detail::Panel> all = std::move(retired);
  while (!active.empty()) {
    all.push_back(active.top());
    active.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  QuadratureResult result;
  result.intervals = all.size();
  for (const auto& p : all) {
    result.value += p.value;
    result.error += p.error;
  }
  return result;
}

}  // namespace ttaad

#endif  // TTAAD_QUADRATURE_HPP

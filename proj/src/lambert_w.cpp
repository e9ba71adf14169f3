#include "dirnet/lambert_w.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dirnet {

namespace {

double initial_guess(double x) {
  if (x < -0.25) {
    // Series about the branch point.
    const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  }
  if (x < 1.0) return x;
  if (x < 3.0) return 0.8 * std::log1p(x);
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w0(double x) {
  constexpr double branch = -1.0 / std::numbers::e;
  if (std::isnan(x) || x < branch) throw std::domain_error("lambert_w0: argument below -1/e");
  if (x == 0.0) return 0.0;
  if (x == branch) return -1.0;
  if (std::isinf(x)) return x;

  double w = initial_guess(x);
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    // Halley step on f(w) = w e^w - x.
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    double step = f / denom;
    if (!std::isfinite(step)) step = f / (ew * wp1);
    const double next = w - step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(next))) {
      w = next;
      break;
    }
    w = next;
  }
  return w;
}

}  // namespace dirnet

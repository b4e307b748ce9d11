#pragma once

// Cancellation-free elementary combinations used by the step coefficients,
// the quadrature weights and the moment oracles.

#include <cmath>

namespace wickwave::num {

/// x - sin x
inline double x_minus_sin(double x) {
  if (std::abs(x) < 0.1) {
    const double x2 = x * x;
    return x * x2 * (1.0 / 6 - x2 * (1.0 / 120 - x2 * (1.0 / 5040 - x2 / 362880)));
  }
  return x - std::sin(x);
}

/// 1 - cos x
inline double one_minus_cos(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}

/// (1 - e^{-x}) / x, finite at 0
inline double phi1(double x) {
  if (std::abs(x) < 1e-5) return 1.0 - x / 2 + x * x / 6;
  return -std::expm1(-x) / x;
}

/// 1 - e^{-x}(1 + x)
inline double one_minus_exp_poly1(double x) {
  if (std::abs(x) < 0.05) {
    // sum_{k>=2} (-1)^k (k-1) x^k / k!
    double term = x * x / 2;  // k = 2
    double acc = term;
    for (int k = 3; k <= 12; ++k) {
      term *= -x / k;
      acc += (k - 1) * term;
    }
    return acc;
  }
  return -std::expm1(-x) - x * std::exp(-x);
}

/// (e^{x t} - 1) / x, with the limit t at x = 0
inline double expm1_over(double x, double t) {
  if (x == 0.0) return t;
  return std::expm1(x * t) / x;
}

}  // namespace wickwave::num

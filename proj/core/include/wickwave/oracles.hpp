#pragma once

// Deterministic second moments E|X(n,t)|^2 of the stochastic objects, built
// from the mode covariances by Wick pairing, plus the predicted exponents.

#include <optional>
#include <string_view>

#include "wickwave/lattice.hpp"
#include "wickwave/time_grid.hpp"
#include "wickwave/trajectory.hpp"

namespace wickwave {

enum class OracleMethod { closed_form, lattice_sum, lattice_sum_plus_quadrature };

std::string_view oracle_method_name(OracleMethod m);

struct OracleValue {
  double value = 0.0;
  OracleMethod method = OracleMethod::closed_form;
  std::optional<int> quadrature_points;
};

/// E[a_n(t1) conj a_n(t2)] for the wave <1>.
double wave_cov_sigma(FreqIndex n, double t1, double t2, double alpha);
double wave_cov_sigma_w(double w, double t1, double t2, double alpha);

/// E[a_n(t1) conj a_n(t2)] for the stationary heat <1>.
double heat_cov_kappa(FreqIndex n, double t1, double t2, double alpha);

/// Number of ordered pairs (n1, n2), n1 + n2 = n, |n1|, |n2| <= N, grouped by
/// (|n1|^2, |n2|^2).
struct PairClass {
  std::int64_t r1 = 0;
  std::int64_t r2 = 0;
  int count = 0;
};
std::vector<PairClass> pair_classes(FreqIndex n, int N);

OracleValue wave_wick_moment(FreqIndex n, double t, int N, double alpha);
OracleValue heat_wick_moment(FreqIndex n, double t, int N, double alpha);

/// Without quad_points the time integrals are evaluated in closed form;
/// with quad_points = Q >= 16 a tensor trapezoid rule with Q intervals per axis is used.
OracleValue wave_duh_moment(FreqIndex n, double t, int N, double alpha,
                            std::optional<int> quad_points = std::nullopt);

/// Single pair contribution int int K K sigma_1 sigma_2 over [0,t]^2 (no prefactor).
double wave_duh_pair_integral(double w, double w1, double w2, double t, double alpha);

OracleValue heat_duh_moment(FreqIndex n, double t, int N, double alpha);

/// Single pair contribution of the heat <20> moment (no lattice prefactor).
double heat_duh_pair_term(double w, double w1, double w2, double t, double alpha);

/// wave_duh_moment / (t^4 <n>^{-2-2 s_alpha}); requires 2/<n> <= t <= 0.3.
double wave_duh_sharpness_ratio(FreqIndex n, double t, double alpha, int N,
                                std::optional<int> quad_points = std::nullopt);

/// 1 - 2 alpha + min(alpha, 1/4), for 0 < alpha < 1/2.
double s_alpha(double alpha);

/// Predicted s0 with variance ~ <n>^{-2-2 s0}.
double predicted_regularity(ObjectKind object, Flow flow, double alpha);

/// Roughness at which the object stops existing as N -> infinity.
double divergence_threshold(ObjectKind object, Flow flow);

/// Growth exponent of the n = 0 variance above threshold (N^p); 0 means logarithmic
/// at the threshold itself.
double predicted_growth_exponent(ObjectKind object, Flow flow, double alpha);

}  // namespace wickwave

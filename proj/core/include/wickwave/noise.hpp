#pragma once

// Exact-in-distribution sampling of the truncated stochastic convolutions,
// mode by mode, with one counter-based random stream per (replica, mode).

#include <cstdint>
#include <random>

#include "wickwave/spectral.hpp"
#include "wickwave/time_grid.hpp"
#include "wickwave/trajectory.hpp"

namespace wickwave {

struct NoiseSpec {
  double alpha = 0.0;
  int N = 0;
  Flow kind = Flow::wave;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
};

/// SplitMix64 sequence; satisfies UniformRandomBitGenerator.
class ModeStream {
 public:
  using result_type = std::uint64_t;

  explicit ModeStream(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Standard normal draw.
  double normal() { return gauss_(*this); }

 private:
  std::uint64_t state_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Independent stream per (seed, replica, n, flow). n must be 0 or in the
/// upper half-lattice.
ModeStream derive_mode_stream(std::uint64_t seed, std::uint64_t replica, FreqIndex n, Flow kind);

struct WaveModeState {
  cplx a{};
  cplx adot{};
};

struct HeatModeState {
  cplx a{};
};

/// Per-mode constants for one wave step of length h: the rotation and the
/// Cholesky factor of the increment covariance Q.
struct WaveStepCoeffs {
  double cos_hw = 1.0, sin_hw = 0.0, w = 1.0;
  double q11 = 0.0, q12 = 0.0, q22 = 0.0;
  double l11 = 0.0, l21 = 0.0, l22 = 0.0;
};

WaveStepCoeffs wave_step_coeffs(double w, double alpha, double h);

struct HeatStepCoeffs {
  double decay = 1.0;     ///< exp(-h <n>^2)
  double variance = 0.0;  ///< total complex increment variance
};

HeatStepCoeffs heat_step_coeffs(double w, double alpha, double h);

/// Deterministic free rotation of (a, adot) over time h at frequency w.
WaveModeState wave_rotate(const WaveModeState& s, const WaveStepCoeffs& c);

/// Centered increment (eta1, eta2) with covariance Q (split between real and
/// imaginary parts unless the mode is real).
WaveModeState wave_increment(const WaveStepCoeffs& c, bool real_mode, ModeStream& stream);

WaveModeState wave_mode_step(const WaveModeState& state, FreqIndex n, double alpha, double h,
                             ModeStream& stream);

HeatModeState heat_mode_step(const HeatModeState& state, FreqIndex n, double alpha, double h,
                             ModeStream& stream);

HeatModeState heat_stationary_init(FreqIndex n, double alpha, ModeStream& stream);

/// Stationary variance <n>^{2 alpha - 2} / 2 of a heat mode.
double heat_stationary_variance(FreqIndex n, double alpha);

/// One realization of <1>_N on the grid. Wave paths start from zero at t0 = 0
/// and carry the velocity; heat paths start from the stationary law at t0.
ObjectTrajectory sample_lin_path(const NoiseSpec& spec, const TimeGrid& grid);

/// Time series of selected modes only (n must be 0 or in the upper half).
/// Row k holds the values at t_k in the order of `modes`.
std::vector<std::vector<cplx>> sample_lin_modes(const NoiseSpec& spec, const TimeGrid& grid,
                                                const std::vector<FreqIndex>& modes);

}  // namespace wickwave

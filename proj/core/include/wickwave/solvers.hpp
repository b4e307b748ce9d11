#pragma once

// Frozen-forcing trigonometric (wave) and exponential (heat) integrators for the
// residual equations and for the truncated renormalized equations.

#include <optional>
#include <string_view>
#include <vector>

#include "wickwave/objects.hpp"

namespace wickwave {

struct WaveState {
  SpectralField v;
  SpectralField vdot;
  double time = 0.0;
};

struct HeatState {
  SpectralField v;
  double time = 0.0;
};

enum class Expansion { first_order, second_order, direct };

std::string_view expansion_name(Expansion e);
Expansion parse_expansion(std::string_view s);

struct SolveConfig {
  Flow flow = Flow::wave;
  Expansion expansion = Expansion::second_order;
  int band = 32;        ///< solver band B; every product is projected to B
  double h = 1.0 / 256;
  double T = 0.25;
  double alpha = 0.3;
  double blowup_guard = 1e8;  ///< halt when ||v||_{H^guard_s} exceeds this
  double guard_s = 0.0;
  bool drop_nonlinearity = false;  ///< direct solver: linear part only

  /// Throws std::invalid_argument on inconsistent fields.
  void validate() const;
};

/// Initial data (u0, u1); u1 is ignored for the heat flow.
struct InitialData {
  SpectralField u0;
  SpectralField u1;
};

/// u0 = amplitude (cos x + 0.5 cos 2y + 0.25 sin(x + y)) style low-mode data, u1 = 0.
InitialData smooth_test_data(double amplitude, int band);

struct SolveResult {
  TimeGrid grid;
  std::vector<SpectralField> u;  ///< reconstructed solution per grid time
  std::vector<SpectralField> v;  ///< residual (or u itself for direct)
  bool blowup = false;
  std::optional<double> blowup_time;
};

WaveState wave_propagator_step(const WaveState& state, double h);

WaveState wave_trig_euler_step(const WaveState& state, const SpectralField& forcing, double h);

HeatState heat_etd1_step(const HeatState& state, const SpectralField& forcing, double h);

/// Residual equation for the configured expansion (first or second order),
/// reconstructing u from v and the data set.
SolveResult solve_residual(const SolveConfig& config, const EnhancedDataSet& data,
                           const InitialData& init);

/// Truncated renormalized equation; the noise enters through the exact one-step
/// increments of `lin` (which must carry the velocity for the wave flow).
SolveResult solve_direct_truncated(const SolveConfig& config, const ObjectTrajectory& lin,
                                   const std::vector<double>& counterterm, const InitialData& init);

/// sup_k || a_k - b_k ||_{H^s} / sup_k || b_k ||_{H^s}
double relative_sup_distance(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b,
                             double s);

/// sup_k || a_k - b_k ||_{H^s}
double sup_distance(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b, double s);

}  // namespace wickwave

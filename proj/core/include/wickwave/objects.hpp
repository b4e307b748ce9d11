#pragma once

// Renormalized chaos objects built from a sampled <1>_N path: the Wick square,
// its Duhamel integral and the resonant product with <1>_N.

#include <optional>
#include <vector>

#include "wickwave/noise.hpp"
#include "wickwave/trajectory.hpp"

namespace wickwave {

/// sigma_N(t) = E[<1>_N(x, t)^2] for the wave flow.
double sigma_counterterm_wave(int N, double t, double alpha);

/// kappa_N = E[<1>_N(x, t)^2] for the stationary heat flow.
double kappa_counterterm_heat(int N, double alpha);

/// Counterterm of the flow at every grid time.
std::vector<double> counterterm_series(Flow flow, int N, double alpha, const TimeGrid& grid);

/// <1>^2 - c(t_k) per grid time, band 2N.
ObjectTrajectory wick_square(const ObjectTrajectory& lin, const std::vector<double>& counterterm);
ObjectTrajectory wick_square(const ObjectTrajectory& lin);

/// Wick-square coefficients at selected modes only; row k holds time t_k.
std::vector<std::vector<cplx>> wick_square_modes(const ObjectTrajectory& lin,
                                                 const std::vector<double>& counterterm,
                                                 const std::vector<FreqIndex>& modes);

/// Trapezoidal Duhamel integral int_0^t sin((t-s)w)/w F(s) ds of one mode series
/// sampled on a grid starting at 0.
std::vector<cplx> duhamel_wave_mode(const std::vector<cplx>& forcing, double w, double h);

/// int_{t_start}^t e^{-(t-s) w^2} F(s) ds with exact weights for piecewise-linear F;
/// entries before `start` are zero.
std::vector<cplx> duhamel_heat_mode(const std::vector<cplx>& forcing, double w, double h,
                                    int start = 0);

/// Largest h for which the wave quadrature resolves band `track_band`.
double wave_resolution_limit(int track_band);

/// <20> for the wave flow on modes |n| <= track_band.
ObjectTrajectory duhamel_wave(const ObjectTrajectory& wick, int track_band);

enum class LowerLimit { zero, minus_infinity };

inline constexpr double kDefaultBurnIn = 20.0;

/// <20> for the heat flow on modes |n| <= track_band (negative: full band).
ObjectTrajectory duhamel_heat(const ObjectTrajectory& wick, LowerLimit lower_limit,
                              double T_burn = kDefaultBurnIn, int track_band = -1);

/// Resonant part of duh * lin per grid time.
ObjectTrajectory resonant_product(const ObjectTrajectory& duh, const ObjectTrajectory& lin);

struct EnhancedDataSet {
  ObjectTrajectory lin;
  std::optional<ObjectTrajectory> wick;
  ObjectTrajectory duh;
  ObjectTrajectory res;
};

struct EnhancedOptions {
  LowerLimit lower_limit = LowerLimit::zero;
  double T_burn = kDefaultBurnIn;
  bool keep_wick = true;
};

EnhancedDataSet build_enhanced_set(const NoiseSpec& spec, const TimeGrid& grid, int track_band,
                                   const EnhancedOptions& options = {});

/// Same pipeline from an existing lin path.
EnhancedDataSet build_enhanced_from_lin(ObjectTrajectory lin, int track_band,
                                        const EnhancedOptions& options = {});

/// Every `factor`-th grid time of a trajectory (coarser grid, same path).
ObjectTrajectory subsample(const ObjectTrajectory& traj, int factor);

/// The trajectory with every field (and velocity) projected to band N.
ObjectTrajectory project_trajectory(const ObjectTrajectory& traj, int N);

}  // namespace wickwave

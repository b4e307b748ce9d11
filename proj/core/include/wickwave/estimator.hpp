#pragma once

// Monte-Carlo second moments, decay-curve fits, oracle z-scores, N-growth
// classification and the coupled-truncation Cauchy diagnostic.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wickwave/objects.hpp"

namespace wickwave {

/// Which object to build per replica, and on what grid.
struct PipelineSpec {
  Flow flow = Flow::wave;
  ObjectKind object = ObjectKind::lin;
  double alpha = 0.3;
  int N = 16;
  double h = 1.0 / 256;
  std::uint64_t seed = 0;
  LowerLimit lower_limit = LowerLimit::zero;
  double T_burn = kDefaultBurnIn;
};

/// Object coefficients X(n_i, t_j) of one replica, row-major by time:
/// value[j * modes.size() + i]. Times must be non-negative multiples of h.
std::vector<cplx> evaluate_object(const PipelineSpec& spec, std::uint64_t replica,
                                  const std::vector<FreqIndex>& modes,
                                  const std::vector<double>& times);

struct MomentEntry {
  FreqIndex n;
  double t = 0.0;
  double mean = 0.0;  ///< sample mean of |X(n,t)|^2
  double se = 0.0;    ///< sample standard deviation / sqrt(R)
  int replicas = 0;
};

struct MomentTable {
  std::vector<MomentEntry> entries;
  /// Per-replica |X|^2 values (replica-major), kept when requested.
  std::vector<std::vector<double>> samples;

  const MomentEntry& find(FreqIndex n, double t) const;
};

/// Mean and SE from per-key samples (replica-major).
MomentTable summarize_samples(const std::vector<FreqIndex>& modes, const std::vector<double>& times,
                              std::vector<std::vector<double>> samples, bool keep_samples);

MomentTable mc_moment(const PipelineSpec& spec, const std::vector<FreqIndex>& modes,
                      const std::vector<double>& times, int replicas, int workers = 0,
                      bool keep_samples = false);

/// Mean of sample |X(n,t)| (complex) values, for checking that Wick objects are centered.
struct MeanReport {
  cplx mean;
  double se_re = 0.0, se_im = 0.0;
  double z = 0.0;  ///< max of |re|/se_re, |im|/se_im
};
MeanReport mc_mean(const PipelineSpec& spec, FreqIndex n, double t, int replicas, int workers = 0);

struct CurvePoint {
  double bracket = 0.0;  ///< mean <n> over the bucket's modes
  double value = 0.0;    ///< mean variance over the bucket's modes
  double se = 0.0;       ///< propagated standard error (0 for oracle data)
  int modes = 0;
};

using DecayCurve = std::vector<CurvePoint>;

/// One bucket per distinct |n| (exact for radial data).
DecayCurve annulus_average(const MomentTable& table, double t);

/// Buckets lo_k < <n> <= hi_k given by consecutive edges. Throws on an empty bucket.
DecayCurve annulus_average(const MomentTable& table, double t, const std::vector<double>& edges);

/// Dyadic-in-log edges from lo to hi with `per_octave` buckets per doubling.
std::vector<double> log_edges(double lo, double hi, int per_octave);

struct ExponentFit {
  double s0 = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double fit_lo = 0.0, fit_hi = 0.0;
  double r_squared = 0.0;
  int buckets = 0;
};

/// OLS of log(value) on log<n> over buckets with lo <= <n> <= hi; s0 = -(slope+2)/2.
ExponentFit fit_exponent(const DecayCurve& curve, double lo, double hi);

struct ZEntry {
  FreqIndex n;
  double t = 0.0;
  double mc = 0.0, se = 0.0, oracle = 0.0, z = 0.0;
};

struct ZReport {
  std::vector<ZEntry> entries;
  double max_abs_z = 0.0;
  std::vector<ZEntry> offending;  ///< entries with |z| > threshold
  bool pass = true;
};

/// `oracle` is aligned with table.entries.
ZReport compare_to_oracle(const MomentTable& table, const std::vector<double>& oracle,
                          double threshold = 4.0);

enum class GrowthClass { bounded, logarithmic, power };

std::string_view growth_name(GrowthClass g);

struct GrowthFit {
  GrowthClass classification = GrowthClass::bounded;
  double exponent = 0.0;  ///< p of a N^p (power model)
  double score_bounded = 0.0, score_log = 0.0, score_power = 0.0;
  double bounded_rate = 0.0;  ///< c of a + b N^{-c}
  double log_slope = 0.0;     ///< b of a + b log N
};

/// Smallest decay rate c of the bounded model; slower decays are not separable
/// from log N over a few doublings.
inline constexpr double kMinBoundedRate = 0.5;

/// Fits a + b N^{-c} (c in [min_rate, 4]), a + b log N and a N^p; picks the smallest
/// relative RMS residual. Needs >= 5 values.
GrowthFit growth_fit(const std::vector<double>& N, const std::vector<double>& values,
                     double min_rate = kMinBoundedRate);

struct CauchyLevel {
  int N = 0;            ///< difference between levels N and 2N
  double mean_sq = 0.0; ///< E || X_{2N} - X_N ||^2_{H^s}
  double se = 0.0;
  bool decreased = true;  ///< mean_sq <= previous level
};

struct CauchyReport {
  std::vector<CauchyLevel> levels;
  bool all_decreasing = true;
};

/// Coupled truncations share one noise path (sampled at the top band, projected
/// below). For duh the norm is taken over |n| <= track_band (0: full band).
CauchyReport cauchy_diagnostic(const PipelineSpec& spec, const std::vector<int>& ladder, double s,
                               const std::vector<double>& times, int replicas, int track_band = 0,
                               int workers = 0);

}  // namespace wickwave

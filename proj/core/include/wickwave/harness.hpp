#pragma once

// Experiment configuration, dispatch and result serialization.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wickwave/estimator.hpp"
#include "wickwave/solvers.hpp"

namespace wickwave {

struct ExperimentConfig {
  std::string experiment = "moments";  ///< moments|fit|diverge|sharpness|cauchy|solve|reconstruct
  Flow flow = Flow::wave;
  ObjectKind object = ObjectKind::lin;
  double alpha = 0.3;
  int N = 16;
  std::vector<int> N_ladder;
  int d = 2;

  // time grid: t0, h and either the point count M or the horizon T
  double t0 = 0.0;
  double h = 1.0 / 256;
  int M = 0;
  double T = 0.5;
  std::vector<double> times;  ///< evaluation times (default: {T})

  std::vector<FreqIndex> modes;
  int track_band = 0;  ///< 0: 2N
  int band = 0;        ///< solver band, 0: 2N
  int replicas = 200;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;

  // estimator / oracle options
  std::string source = "oracle";     ///< oracle|mc for fit and diverge
  std::string fit_modes = "rays";    ///< axis|rays|disk
  int ray_step = 1;                  ///< stride along the axis / diagonal rays
  std::string buckets = "auto";      ///< auto|log|shell
  int per_octave = 4;
  double fit_lo = 4.0, fit_hi = 24.0;
  double tolerance = 0.1;
  std::optional<double> expected_s0;
  std::optional<double> gain_reference;  ///< also require s0 >= gain_reference + gain_min
  double gain_min = 0.15;
  double z_max = 4.0;
  std::optional<int> quad_points;
  std::string lower_limit = "zero";  ///< zero|minus_infinity
  double T_burn = kDefaultBurnIn;

  // divergence
  std::string expect = "auto";  ///< diverge: auto|bounded|logarithmic|power; cauchy: auto|decreasing|not_decreasing
  double p_tolerance = 0.15;
  std::vector<int> stable_between;  ///< pair {N1, N2} for a relative-change check
  double stable_tol = 0.02;

  // sharpness
  double band_factor = 10.0;

  // norms and solvers
  double s_norm = -0.4;
  std::string target = "object";  ///< cauchy: object|solution
  Expansion expansion = Expansion::second_order;
  double amplitude = 1.0;
  double blowup_guard = 1e8;
  int refinements = 2;
  double rel_tol = 5e-2;

  /// Evaluation times, defaulting to the horizon.
  std::vector<double> eval_times() const;
  /// Horizon implied by (t0, h, M) when M is set, else T.
  double horizon() const;
  int effective_track_band() const { return track_band > 0 ? track_band : 2 * N; }
  int effective_band() const { return band > 0 ? band : 2 * N; }
};

/// Parses flat `key = value` text (TOML subset: numbers, "strings", booleans,
/// arrays and nested arrays, # comments).
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});

/// Applies one override, e.g. ("alpha", "0.4") or ("modes", "[[0,0],[1,0]]").
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Round-trippable flat text of every field.
std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg);

struct Diagnostics {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

Diagnostics validate(const ExperimentConfig& cfg);

struct CsvTable {
  std::string name;  ///< file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

struct ResultBundle {
  ExperimentConfig config;
  std::vector<CsvTable> tables;
  std::string summary_json;
  std::string meta_json;
  bool pass = false;
  double wall_seconds = 0.0;
};

/// Validates, dispatches and, when cfg.out is set, writes <experiment>.csv,
/// summary.json and meta.json. Throws std::invalid_argument on invalid config.
ResultBundle run(const ExperimentConfig& cfg);

struct CatalogEntry {
  std::string name;
  std::string experiment;
  std::string claim;   ///< what the run checks
  std::string config;  ///< ready-to-run config text
};

std::vector<CatalogEntry> list_experiments();

/// Catalog lookup by name; throws std::out_of_range.
const CatalogEntry& find_experiment(const std::string& name);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wickwave

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wickwave {

enum class Flow { wave, heat };

inline std::string_view flow_name(Flow f) { return f == Flow::wave ? "wave" : "heat"; }

inline Flow parse_flow(std::string_view s) {
  if (s == "wave") return Flow::wave;
  if (s == "heat") return Flow::heat;
  throw std::invalid_argument("unknown flow '" + std::string(s) + "' (expected wave|heat)");
}

/// Uniform grid t_k = t0 + k h, k = 0..count-1.
struct TimeGrid {
  double t0 = 0.0;
  double h = 1.0;
  int count = 1;

  TimeGrid() = default;
  TimeGrid(double t0_, double h_, int count_) : t0(t0_), h(h_), count(count_) {
    if (!(h > 0.0)) throw std::invalid_argument("TimeGrid: step must be positive");
    if (count < 1) throw std::invalid_argument("TimeGrid: count must be >= 1");
  }

  /// Grid on [0, T] with step h; T must be a multiple of h up to rounding.
  static TimeGrid covering(double t0, double T, double h) {
    const double steps = (T - t0) / h;
    const int k = static_cast<int>(std::lround(steps));
    if (k < 0 || std::abs(steps - k) > 1e-9 * std::max(1.0, steps))
      throw std::invalid_argument("TimeGrid: span is not a whole number of steps");
    return TimeGrid(t0, h, k + 1);
  }

  double time(int k) const { return t0 + k * h; }
  double end() const { return time(count - 1); }

  /// Index of the grid point at time t; throws if t is not on the grid.
  int index_of(double t) const {
    const double r = (t - t0) / h;
    const long k = std::lround(r);
    if (k < 0 || k >= count || std::abs(r - k) > 1e-7)
      throw std::out_of_range("TimeGrid: time " + std::to_string(t) + " is not a grid point");
    return static_cast<int>(k);
  }

  bool operator==(const TimeGrid& o) const = default;
};

}  // namespace wickwave

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wickwave/spectral.hpp"
#include "wickwave/time_grid.hpp"

namespace wickwave {

enum class ObjectKind { lin, wick, duh, res };

inline std::string_view object_name(ObjectKind k) {
  switch (k) {
    case ObjectKind::lin: return "lin";
    case ObjectKind::wick: return "wick";
    case ObjectKind::duh: return "duh";
    case ObjectKind::res: return "res";
  }
  return "?";
}

inline ObjectKind parse_object(std::string_view s) {
  if (s == "lin") return ObjectKind::lin;
  if (s == "wick") return ObjectKind::wick;
  if (s == "duh") return ObjectKind::duh;
  if (s == "res") return ObjectKind::res;
  throw std::invalid_argument("unknown object '" + std::string(s) +
                              "' (expected lin|wick|duh|res)");
}

/// Time series of one stochastic object on one noise realization.
struct ObjectTrajectory {
  ObjectKind kind = ObjectKind::lin;
  Flow flow = Flow::wave;
  double alpha = 0.0;
  int N = 0;
  TimeGrid grid;
  std::vector<SpectralField> fields;
  /// Time derivative, kept for wave lin paths only.
  std::vector<SpectralField> velocity;

  const SpectralField& at(int k) const { return fields.at(k); }
  int band() const { return fields.empty() ? 0 : fields.front().band(); }
};

}  // namespace wickwave

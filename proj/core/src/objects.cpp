#include "wickwave/objects.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wickwave/numerics.hpp"

namespace wickwave {

double sigma_counterterm_wave(int N, double t, double alpha) {
  if (t < 0.0) throw std::invalid_argument("sigma_counterterm_wave: t must be non-negative");
  double acc = 0.0;
  for (const auto& shell : disk_shells(N)) {
    const double w = std::sqrt(1.0 + static_cast<double>(shell.norm2));
    const double term = t * std::pow(w, 2 * alpha - 2) - std::sin(2 * t * w) * std::pow(w, 2 * alpha - 3) / 2;
    acc += shell.count * term;
  }
  return acc / (8 * kPi * kPi);
}

double kappa_counterterm_heat(int N, double alpha) {
  double acc = 0.0;
  for (const auto& shell : disk_shells(N)) {
    const double w = std::sqrt(1.0 + static_cast<double>(shell.norm2));
    acc += shell.count * std::pow(w, 2 * alpha - 2);
  }
  return acc / (8 * kPi * kPi);
}

std::vector<double> counterterm_series(Flow flow, int N, double alpha, const TimeGrid& grid) {
  std::vector<double> c(grid.count);
  if (flow == Flow::heat) {
    std::fill(c.begin(), c.end(), kappa_counterterm_heat(N, alpha));
  } else {
    for (int k = 0; k < grid.count; ++k) c[k] = sigma_counterterm_wave(N, grid.time(k), alpha);
  }
  return c;
}

namespace {

void require_kind(const ObjectTrajectory& t, ObjectKind k, const char* who) {
  if (t.kind != k)
    throw std::invalid_argument(std::string(who) + ": expected a " + std::string(object_name(k)) +
                                " trajectory, got " + std::string(object_name(t.kind)));
}

ObjectTrajectory like(const ObjectTrajectory& src, ObjectKind kind) {
  ObjectTrajectory out;
  out.kind = kind;
  out.flow = src.flow;
  out.alpha = src.alpha;
  out.N = src.N;
  out.grid = src.grid;
  return out;
}

}  // namespace

ObjectTrajectory wick_square(const ObjectTrajectory& lin, const std::vector<double>& counterterm) {
  require_kind(lin, ObjectKind::lin, "wick_square");
  if (static_cast<int>(counterterm.size()) != lin.grid.count)
    throw std::invalid_argument("wick_square: counterterm length does not match the grid");
  ObjectTrajectory out = like(lin, ObjectKind::wick);
  out.fields.reserve(lin.fields.size());
  for (int k = 0; k < lin.grid.count; ++k) {
    SpectralField sq = multiply_dealiased(lin.fields[k], lin.fields[k]);
    sq.ref({0, 0}) -= kTwoPi * counterterm[k];
    out.fields.push_back(std::move(sq));
  }
  return out;
}

ObjectTrajectory wick_square(const ObjectTrajectory& lin) {
  return wick_square(lin, counterterm_series(lin.flow, lin.N, lin.alpha, lin.grid));
}

std::vector<std::vector<cplx>> wick_square_modes(const ObjectTrajectory& lin,
                                                 const std::vector<double>& counterterm,
                                                 const std::vector<FreqIndex>& modes) {
  require_kind(lin, ObjectKind::lin, "wick_square_modes");
  std::vector<std::vector<cplx>> rows(lin.grid.count, std::vector<cplx>(modes.size()));
  for (int k = 0; k < lin.grid.count; ++k)
    for (std::size_t i = 0; i < modes.size(); ++i) {
      cplx c = product_coefficient(lin.fields[k], lin.fields[k], modes[i]);
      if (modes[i].x == 0 && modes[i].y == 0) c = {c.real() - kTwoPi * counterterm[k], 0.0};
      rows[k][i] = c;
    }
  return rows;
}

std::vector<cplx> duhamel_wave_mode(const std::vector<cplx>& forcing, double w, double h) {
  // D(t) = (sin(tw) C(t) - cos(tw) S(t)) / w with C, S the cosine/sine moments of F.
  std::vector<cplx> out(forcing.size());
  cplx C{}, S{};
  cplx prev_c{}, prev_s{};
  for (std::size_t k = 0; k < forcing.size(); ++k) {
    const double t = h * static_cast<double>(k);
    const double c = std::cos(t * w), s = std::sin(t * w);
    const cplx fc = c * forcing[k], fs = s * forcing[k];
    if (k > 0) {
      C += 0.5 * h * (prev_c + fc);
      S += 0.5 * h * (prev_s + fs);
    }
    prev_c = fc;
    prev_s = fs;
    out[k] = (s * C - c * S) / w;
  }
  return out;
}

std::vector<cplx> duhamel_heat_mode(const std::vector<cplx>& forcing, double w, double h,
                                    int start) {
  std::vector<cplx> out(forcing.size());
  const double lambda = w * w;
  const double x = h * lambda;
  const double decay = std::exp(-x);
  const double w0 = num::one_minus_exp_poly1(x) / (h * lambda * lambda);
  const double w1 = h * num::phi1(x) - w0;
  cplx d{};
  for (std::size_t k = static_cast<std::size_t>(start) + 1; k < forcing.size(); ++k) {
    d = decay * d + w0 * forcing[k - 1] + w1 * forcing[k];
    out[k] = d;
  }
  return out;
}

double wave_resolution_limit(int track_band) {
  return 0.5 / std::sqrt(1.0 + static_cast<double>(track_band) * track_band);
}

namespace {

/// Applies a per-mode series map over the half disk of radius `band`.
template <class ModeMap>
ObjectTrajectory map_modes(const ObjectTrajectory& src, ObjectKind kind, int band, ModeMap&& f) {
  ObjectTrajectory out = like(src, kind);
  const int count = src.grid.count;
  out.fields.assign(count, SpectralField(band));
  std::vector<cplx> series(count);
  for (const auto& n : half_disk_modes(band)) {
    for (int k = 0; k < count; ++k) series[k] = src.fields[k].at(n);
    const std::vector<cplx> mapped = f(n, series);
    for (int k = 0; k < count; ++k) out.fields[k].set_pair(n, mapped[k]);
  }
  return out;
}

}  // namespace

ObjectTrajectory duhamel_wave(const ObjectTrajectory& wick, int track_band) {
  require_kind(wick, ObjectKind::wick, "duhamel_wave");
  if (track_band < 0) throw std::invalid_argument("duhamel_wave: track_band must be >= 0");
  if (wick.grid.t0 != 0.0) throw std::invalid_argument("duhamel_wave: grid must start at t = 0");
  const double limit = wave_resolution_limit(track_band);
  if (wick.grid.h > limit * (1 + 1e-12))
    throw std::invalid_argument("duhamel_wave: resolution violated, need h*<track_band> <= 0.5 (h = " +
                                std::to_string(wick.grid.h) + ", track_band = " +
                                std::to_string(track_band) + ", max h = " + std::to_string(limit) + ")");
  const int band = std::min(track_band, wick.band());
  const double h = wick.grid.h;
  return map_modes(wick, ObjectKind::duh, band, [h](FreqIndex n, const std::vector<cplx>& s) {
    return duhamel_wave_mode(s, jbracket(n), h);
  });
}

ObjectTrajectory duhamel_heat(const ObjectTrajectory& wick, LowerLimit lower_limit, double T_burn,
                              int track_band) {
  require_kind(wick, ObjectKind::wick, "duhamel_heat");
  int start = 0;
  if (lower_limit == LowerLimit::zero) {
    if (wick.grid.t0 > 0.0) throw std::invalid_argument("duhamel_heat: grid starts after t = 0");
    start = wick.grid.index_of(0.0);
  } else {
    if (!(T_burn > 0.0)) throw std::invalid_argument("duhamel_heat: T_burn must be positive");
    if (wick.grid.t0 > -T_burn + 1e-9)
      throw std::invalid_argument("duhamel_heat: minus_infinity needs a grid starting at -T_burn");
  }
  const int band = track_band < 0 ? wick.band() : std::min(track_band, wick.band());
  const double h = wick.grid.h;
  return map_modes(wick, ObjectKind::duh, band, [h, start](FreqIndex n, const std::vector<cplx>& s) {
    return duhamel_heat_mode(s, jbracket(n), h, start);
  });
}

ObjectTrajectory resonant_product(const ObjectTrajectory& duh, const ObjectTrajectory& lin) {
  require_kind(duh, ObjectKind::duh, "resonant_product");
  require_kind(lin, ObjectKind::lin, "resonant_product");
  if (!(duh.grid == lin.grid)) throw std::invalid_argument("resonant_product: grid mismatch");
  ObjectTrajectory out = like(lin, ObjectKind::res);
  out.fields.reserve(lin.grid.count);
  for (int k = 0; k < lin.grid.count; ++k)
    out.fields.push_back(resonant_part(duh.fields[k], lin.fields[k]));
  return out;
}

EnhancedDataSet build_enhanced_from_lin(ObjectTrajectory lin, int track_band,
                                        const EnhancedOptions& options) {
  require_kind(lin, ObjectKind::lin, "build_enhanced_from_lin");
  EnhancedDataSet set;
  set.lin = std::move(lin);
  ObjectTrajectory wick = wick_square(set.lin);
  if (set.lin.flow == Flow::wave)
    set.duh = duhamel_wave(wick, track_band);
  else
    set.duh = duhamel_heat(wick, options.lower_limit, options.T_burn, track_band);
  set.res = resonant_product(set.duh, set.lin);
  if (options.keep_wick) set.wick = std::move(wick);
  return set;
}

EnhancedDataSet build_enhanced_set(const NoiseSpec& spec, const TimeGrid& grid, int track_band,
                                   const EnhancedOptions& options) {
  return build_enhanced_from_lin(sample_lin_path(spec, grid), track_band, options);
}

ObjectTrajectory subsample(const ObjectTrajectory& traj, int factor) {
  if (factor < 1) throw std::invalid_argument("subsample: factor must be >= 1");
  if ((traj.grid.count - 1) % factor != 0)
    throw std::invalid_argument("subsample: grid length is not compatible with the factor");
  ObjectTrajectory out = like(traj, traj.kind);
  out.grid = TimeGrid(traj.grid.t0, traj.grid.h * factor, (traj.grid.count - 1) / factor + 1);
  for (int k = 0; k < traj.grid.count; k += factor) {
    out.fields.push_back(traj.fields[k]);
    if (!traj.velocity.empty()) out.velocity.push_back(traj.velocity[k]);
  }
  return out;
}

ObjectTrajectory project_trajectory(const ObjectTrajectory& traj, int N) {
  ObjectTrajectory out = like(traj, traj.kind);
  out.N = std::min(traj.N, N);
  for (const auto& f : traj.fields) out.fields.push_back(project(f, N));
  for (const auto& f : traj.velocity) out.velocity.push_back(project(f, N));
  return out;
}

}  // namespace wickwave

#include "wickwave/solvers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wickwave/numerics.hpp"

namespace wickwave {

std::string_view expansion_name(Expansion e) {
  switch (e) {
    case Expansion::first_order: return "first_order";
    case Expansion::second_order: return "second_order";
    case Expansion::direct: return "direct";
  }
  return "?";
}

Expansion parse_expansion(std::string_view s) {
  if (s == "first_order") return Expansion::first_order;
  if (s == "second_order") return Expansion::second_order;
  if (s == "direct") return Expansion::direct;
  throw std::invalid_argument("unknown expansion '" + std::string(s) +
                              "' (expected first_order|second_order|direct)");
}

void SolveConfig::validate() const {
  if (band < 0) throw std::invalid_argument("solve: band must be non-negative");
  if (!(h > 0.0)) throw std::invalid_argument("solve: step h must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("solve: horizon T must be positive");
  if (!(alpha >= 0.0)) throw std::invalid_argument("solve: alpha must be non-negative");
  if (!(blowup_guard > 0.0)) throw std::invalid_argument("solve: blowup_guard must be positive");
  if (flow == Flow::wave && h * std::sqrt(1.0 + double(band) * band) > 0.5 + 1e-12)
    throw std::invalid_argument("solve: wave step needs h*<band> <= 0.5 (h = " + std::to_string(h) +
                                ", band = " + std::to_string(band) + ")");
}

InitialData smooth_test_data(double amplitude, int band) {
  if (band < 2) throw std::invalid_argument("smooth_test_data: band must be >= 2");
  InitialData d{SpectralField(band), SpectralField(band)};
  d.u0.set_pair({1, 0}, amplitude);
  d.u0.set_pair({0, 2}, 0.5 * amplitude);
  d.u0.set_pair({1, 1}, cplx{0.0, 0.25 * amplitude});
  d.u1.set_pair({0, 1}, 0.2 * amplitude);
  return d;
}

namespace {

/// Calls f(n, w) for every stored mode of the band.
template <class F>
void for_each_mode(int band, F&& f) {
  for (int x = -band; x <= band; ++x)
    for (int y = -band; y <= band; ++y) {
      const FreqIndex n{x, y};
      if (in_disk(n, band)) f(n, jbracket(n));
    }
}

}  // namespace

WaveState wave_propagator_step(const WaveState& state, double h) {
  WaveState out{SpectralField(state.v.band()), SpectralField(state.v.band()), state.time + h};
  for_each_mode(state.v.band(), [&](FreqIndex n, double w) {
    const double c = std::cos(h * w), s = std::sin(h * w);
    const cplx v = state.v.at(n), vd = state.vdot.at(n);
    out.v.ref(n) = c * v + (s / w) * vd;
    out.vdot.ref(n) = -w * s * v + c * vd;
  });
  return out;
}

WaveState wave_trig_euler_step(const WaveState& state, const SpectralField& forcing, double h) {
  WaveState out{SpectralField(state.v.band()), SpectralField(state.v.band()), state.time + h};
  for_each_mode(state.v.band(), [&](FreqIndex n, double w) {
    const double c = std::cos(h * w), s = std::sin(h * w);
    const cplx v = state.v.at(n), vd = state.vdot.at(n), F = forcing.at(n);
    out.v.ref(n) = c * v + (s / w) * vd + (num::one_minus_cos(h * w) / (w * w)) * F;
    out.vdot.ref(n) = -w * s * v + c * vd + (s / w) * F;
  });
  return out;
}

HeatState heat_etd1_step(const HeatState& state, const SpectralField& forcing, double h) {
  HeatState out{SpectralField(state.v.band()), state.time + h};
  for_each_mode(state.v.band(), [&](FreqIndex n, double w) {
    const double x = h * w * w;
    out.v.ref(n) = std::exp(-x) * state.v.at(n) + (h * num::phi1(x)) * forcing.at(n);
  });
  return out;
}

namespace {

bool guard_tripped(const SolveConfig& cfg, const SpectralField& v) {
  const double norm = sobolev_norm(v, cfg.guard_s);
  return !std::isfinite(norm) || norm > cfg.blowup_guard;
}

void check_grid(const ObjectTrajectory& t, const TimeGrid& grid, const char* what) {
  if (!(t.grid == grid))
    throw std::invalid_argument(std::string("solve: grid mismatch for ") + what +
                                " (data must be sampled on the solver grid)");
  if (static_cast<int>(t.fields.size()) != grid.count)
    throw std::invalid_argument(std::string("solve: incomplete trajectory for ") + what);
}

}  // namespace

SolveResult solve_residual(const SolveConfig& config, const EnhancedDataSet& data,
                           const InitialData& init) {
  config.validate();
  if (config.expansion == Expansion::direct)
    throw std::invalid_argument("solve_residual: use solve_direct_truncated for the direct expansion");
  const TimeGrid grid = TimeGrid::covering(0.0, config.T, config.h);
  const bool second = config.expansion == Expansion::second_order;
  const bool wave = config.flow == Flow::wave;
  const int B = config.band;
  check_grid(data.lin, grid, "lin");
  if (data.lin.flow != config.flow) throw std::invalid_argument("solve_residual: data flow mismatch");
  if (second || wave) check_grid(data.duh, grid, "duh");
  if (second) check_grid(data.res, grid, "res");
  if (!wave && !second) {
    if (!data.wick) throw std::invalid_argument("solve_residual: heat first order needs the wick trajectory");
    check_grid(*data.wick, grid, "wick");
  }

  // Data-only parts: F = -pi_B(v (v + 2 c_k)) + G_k, u_k = lin_k + e_k + v_k.
  auto coeff_field = [&](int k) {
    SpectralField c = data.lin.fields[k].with_band(B);
    if (second) c -= data.duh.fields[k];
    return project(c, B);
  };
  auto data_forcing = [&](int k) {
    if (second) {
      const SpectralField& duh = data.duh.fields[k];
      const auto parts = paraproduct_split(duh, data.lin.fields[k]);
      SpectralField g = 2.0 * (parts.lo + data.res.fields[k] + parts.hi);
      g -= multiply_projected(duh, duh, B);
      return project(g, B);
    }
    if (!wave) return project(-1.0 * data.wick->fields[k], B);
    return SpectralField(B);
  };
  auto reconstruct = [&](int k, const SpectralField& v) {
    SpectralField u = v;
    u += data.lin.fields[k];
    if (second) u -= data.duh.fields[k];
    return project(u, B);
  };

  SolveResult res;
  res.grid = grid;

  if (wave) {
    // First order evolves y = v + <20>, second order evolves v.
    WaveState st{project(init.u0, B).with_band(B), project(init.u1, B).with_band(B), 0.0};
    for (int k = 0; k < grid.count; ++k) {
      SpectralField v = st.v;
      if (!second) v = project(v - data.duh.fields[k], B);
      if (guard_tripped(config, v)) {
        res.blowup = true;
        res.blowup_time = grid.time(k);
        break;
      }
      res.v.push_back(v);
      res.u.push_back(reconstruct(k, v));
      if (k + 1 == grid.count) break;
      SpectralField w = coeff_field(k);
      w *= 2.0;
      w += v;
      SpectralField F = data_forcing(k);
      F -= multiply_projected(v, w, B);
      st = wave_trig_euler_step(st, F, grid.h);
    }
  } else {
    SpectralField v0 = project(init.u0, B).with_band(B);
    v0 -= data.lin.fields[0];
    if (second) v0 += data.duh.fields[0];
    HeatState st{project(v0, B), 0.0};
    for (int k = 0; k < grid.count; ++k) {
      if (guard_tripped(config, st.v)) {
        res.blowup = true;
        res.blowup_time = grid.time(k);
        break;
      }
      res.v.push_back(st.v);
      res.u.push_back(reconstruct(k, st.v));
      if (k + 1 == grid.count) break;
      SpectralField w = coeff_field(k);
      w *= 2.0;
      w += st.v;
      SpectralField F = data_forcing(k);
      F -= multiply_projected(st.v, w, B);
      st = heat_etd1_step(st, F, grid.h);
    }
  }
  return res;
}

SolveResult solve_direct_truncated(const SolveConfig& config, const ObjectTrajectory& lin,
                                   const std::vector<double>& counterterm, const InitialData& init) {
  config.validate();
  const TimeGrid grid = TimeGrid::covering(0.0, config.T, config.h);
  check_grid(lin, grid, "lin");
  if (lin.flow != config.flow) throw std::invalid_argument("solve_direct_truncated: flow mismatch");
  if (static_cast<int>(counterterm.size()) != grid.count)
    throw std::invalid_argument("solve_direct_truncated: counterterm length does not match the grid");
  const bool wave = config.flow == Flow::wave;
  if (wave && static_cast<int>(lin.velocity.size()) != grid.count)
    throw std::invalid_argument("solve_direct_truncated: wave lin path must carry the velocity");
  const int B = config.band;

  auto forcing = [&](const SpectralField& u, int k) {
    if (config.drop_nonlinearity) return SpectralField(B);
    SpectralField F = multiply_projected(u, u, B);
    F.ref({0, 0}) -= kTwoPi * counterterm[k];
    F *= -1.0;
    return F;
  };

  SolveResult res;
  res.grid = grid;
  if (wave) {
    WaveState st{project(init.u0, B).with_band(B), project(init.u1, B).with_band(B), 0.0};
    for (int k = 0; k < grid.count; ++k) {
      if (guard_tripped(config, st.v)) {
        res.blowup = true;
        res.blowup_time = grid.time(k);
        break;
      }
      res.u.push_back(st.v);
      res.v.push_back(st.v);
      if (k + 1 == grid.count) break;
      st = wave_trig_euler_step(st, forcing(st.v, k), grid.h);
      const WaveState rot = wave_propagator_step({lin.fields[k], lin.velocity[k], 0.0}, grid.h);
      st.v += lin.fields[k + 1] - rot.v;
      st.vdot += lin.velocity[k + 1] - rot.vdot;
    }
  } else {
    HeatState st{project(init.u0, B).with_band(B), 0.0};
    const SpectralField zero(lin.band());
    for (int k = 0; k < grid.count; ++k) {
      if (guard_tripped(config, st.v)) {
        res.blowup = true;
        res.blowup_time = grid.time(k);
        break;
      }
      res.u.push_back(st.v);
      res.v.push_back(st.v);
      if (k + 1 == grid.count) break;
      st = heat_etd1_step(st, forcing(st.v, k), grid.h);
      const HeatState decayed = heat_etd1_step({lin.fields[k], 0.0}, zero, grid.h);
      st.v += lin.fields[k + 1] - decayed.v;
    }
  }
  return res;
}

double sup_distance(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b, double s) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_distance: trajectories differ in length");
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, sobolev_norm(a[k] - b[k], s));
  return d;
}

double relative_sup_distance(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b,
                             double s) {
  double ref = 0.0;
  for (const auto& f : b) ref = std::max(ref, sobolev_norm(f, s));
  const double d = sup_distance(a, b, s);
  return ref > 0.0 ? d / ref : d;
}

}  // namespace wickwave

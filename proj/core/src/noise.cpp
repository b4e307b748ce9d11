#include "wickwave/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "wickwave/numerics.hpp"

namespace wickwave {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ModeStream::result_type ModeStream::operator()() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

ModeStream derive_mode_stream(std::uint64_t seed, std::uint64_t replica, FreqIndex n, Flow kind) {
  if (!(n.x == 0 && n.y == 0) && !in_upper_half(n))
    throw std::invalid_argument("derive_mode_stream: mode must be 0 or in the upper half-lattice");
  const std::uint64_t packed = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(n.x)) << 32) |
                               static_cast<std::uint32_t>(n.y);
  std::uint64_t key = mix64(seed + 0x243f6a8885a308d3ULL);
  key = mix64(key ^ (replica * 0x9e3779b97f4a7c15ULL + 0x13198a2e03707344ULL));
  key = mix64(key ^ packed);
  key = mix64(key ^ (kind == Flow::wave ? 0xa4093822299f31d0ULL : 0x082efa98ec4e6c89ULL));
  return ModeStream(key);
}

WaveStepCoeffs wave_step_coeffs(double w, double alpha, double h) {
  if (!(h >= 0.0)) throw std::invalid_argument("wave step: h must be non-negative");
  WaveStepCoeffs c;
  const double x = h * w;
  c.w = w;
  c.cos_hw = std::cos(x);
  c.sin_hw = std::sin(x);
  const double p = std::pow(w, 2.0 * alpha - 2.0);
  c.q11 = p * num::x_minus_sin(2 * x) / (4 * w);
  c.q22 = p * w * w * (2 * x + std::sin(2 * x)) / (4 * w);
  c.q12 = p * c.sin_hw * c.sin_hw / 2;
  const double det = p * p * num::x_minus_sin(x) * (x + c.sin_hw) / 4;
  if (!(c.q11 >= 0.0) || !(c.q22 >= 0.0) || !(det >= 0.0) || !std::isfinite(det))
    throw std::runtime_error("wave step: increment covariance is not positive semi-definite");
  if (c.q11 > 0.0) {
    c.l11 = std::sqrt(c.q11);
    c.l21 = c.q12 / c.l11;
    c.l22 = std::sqrt(det / c.q11);
  }
  return c;
}

HeatStepCoeffs heat_step_coeffs(double w, double alpha, double h) {
  if (!(h >= 0.0)) throw std::invalid_argument("heat step: h must be non-negative");
  const double lambda = w * w;
  HeatStepCoeffs c;
  c.decay = std::exp(-h * lambda);
  c.variance = std::pow(w, 2.0 * alpha - 2.0) * (-std::expm1(-2.0 * h * lambda)) / 2;
  return c;
}

WaveModeState wave_rotate(const WaveModeState& s, const WaveStepCoeffs& c) {
  return {c.cos_hw * s.a + (c.sin_hw / c.w) * s.adot, -c.w * c.sin_hw * s.a + c.cos_hw * s.adot};
}

WaveModeState wave_increment(const WaveStepCoeffs& c, bool real_mode, ModeStream& stream) {
  const double z1 = stream.normal();
  const double z2 = stream.normal();
  if (real_mode) return {cplx{c.l11 * z1, 0.0}, cplx{c.l21 * z1 + c.l22 * z2, 0.0}};
  const double z3 = stream.normal();
  const double z4 = stream.normal();
  const double r = std::sqrt(0.5);
  return {r * cplx{c.l11 * z1, c.l11 * z3},
          r * cplx{c.l21 * z1 + c.l22 * z2, c.l21 * z3 + c.l22 * z4}};
}

namespace {

bool is_zero(FreqIndex n) { return n.x == 0 && n.y == 0; }

cplx draw_complex(double variance, bool real_mode, ModeStream& stream) {
  if (real_mode) return {std::sqrt(variance) * stream.normal(), 0.0};
  const double s = std::sqrt(variance / 2);
  const double re = stream.normal();
  const double im = stream.normal();
  return {s * re, s * im};
}

}  // namespace

WaveModeState wave_mode_step(const WaveModeState& state, FreqIndex n, double alpha, double h,
                             ModeStream& stream) {
  const auto c = wave_step_coeffs(jbracket(n), alpha, h);
  const auto rot = wave_rotate(state, c);
  const auto inc = wave_increment(c, is_zero(n), stream);
  return {rot.a + inc.a, rot.adot + inc.adot};
}

HeatModeState heat_mode_step(const HeatModeState& state, FreqIndex n, double alpha, double h,
                             ModeStream& stream) {
  const auto c = heat_step_coeffs(jbracket(n), alpha, h);
  return {c.decay * state.a + draw_complex(c.variance, is_zero(n), stream)};
}

double heat_stationary_variance(FreqIndex n, double alpha) {
  return std::pow(jbracket(n), 2.0 * alpha - 2.0) / 2;
}

HeatModeState heat_stationary_init(FreqIndex n, double alpha, ModeStream& stream) {
  return {draw_complex(heat_stationary_variance(n, alpha), is_zero(n), stream)};
}

namespace {

/// Runs one mode over the grid, calling emit(k, a, adot) at every grid time.
template <class Emit>
void run_mode(const NoiseSpec& spec, const TimeGrid& grid, FreqIndex n, Emit&& emit) {
  ModeStream stream = derive_mode_stream(spec.seed, spec.replica, n, spec.kind);
  const double w = jbracket(n);
  const bool real_mode = is_zero(n);
  if (spec.kind == Flow::wave) {
    const auto c = wave_step_coeffs(w, spec.alpha, grid.h);
    WaveModeState s;
    emit(0, s.a, s.adot);
    for (int k = 1; k < grid.count; ++k) {
      const auto rot = wave_rotate(s, c);
      const auto inc = wave_increment(c, real_mode, stream);
      s = {rot.a + inc.a, rot.adot + inc.adot};
      emit(k, s.a, s.adot);
    }
  } else {
    const auto c = heat_step_coeffs(w, spec.alpha, grid.h);
    cplx a = draw_complex(heat_stationary_variance(n, spec.alpha), real_mode, stream);
    emit(0, a, cplx{});
    for (int k = 1; k < grid.count; ++k) {
      a = c.decay * a + draw_complex(c.variance, real_mode, stream);
      emit(k, a, cplx{});
    }
  }
}

void check_spec(const NoiseSpec& spec, const TimeGrid& grid) {
  if (spec.N < 0) throw std::invalid_argument("noise: band N must be non-negative");
  if (!(spec.alpha >= 0.0)) throw std::invalid_argument("noise: alpha must be non-negative");
  if (spec.kind == Flow::wave && grid.t0 != 0.0)
    throw std::invalid_argument("noise: wave paths start at t0 = 0");
}

}  // namespace

ObjectTrajectory sample_lin_path(const NoiseSpec& spec, const TimeGrid& grid) {
  check_spec(spec, grid);
  ObjectTrajectory traj;
  traj.kind = ObjectKind::lin;
  traj.flow = spec.kind;
  traj.alpha = spec.alpha;
  traj.N = spec.N;
  traj.grid = grid;
  traj.fields.assign(grid.count, SpectralField(spec.N));
  const bool wave = spec.kind == Flow::wave;
  if (wave) traj.velocity.assign(grid.count, SpectralField(spec.N));
  for (const auto& n : half_disk_modes(spec.N)) {
    run_mode(spec, grid, n, [&](int k, cplx a, cplx adot) {
      traj.fields[k].set_pair(n, a);
      if (wave) traj.velocity[k].set_pair(n, adot);
    });
  }
  return traj;
}

std::vector<std::vector<cplx>> sample_lin_modes(const NoiseSpec& spec, const TimeGrid& grid,
                                                const std::vector<FreqIndex>& modes) {
  check_spec(spec, grid);
  std::vector<std::vector<cplx>> rows(grid.count, std::vector<cplx>(modes.size()));
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (!in_disk(modes[i], spec.N)) continue;
    run_mode(spec, grid, modes[i], [&](int k, cplx a, cplx) { rows[k][i] = a; });
  }
  return rows;
}

}  // namespace wickwave

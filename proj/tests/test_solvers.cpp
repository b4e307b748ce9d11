#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "test_support.hpp"
#include "wickwave/objects.hpp"
#include "wickwave/solvers.hpp"

using namespace wickwave;
using wickwave::testing::max_coeff_diff;
using wickwave::testing::random_field;

namespace {

constexpr int kBand = 6;

/// -pi_B(u^2) by direct convolution.
SpectralField minus_square(const SpectralField& u) { return -1.0 * project(multiply_direct(u, u), kBand); }

SpectralField apply_symbol(const SpectralField& u, double scale) {
  SpectralField out(u.band());
  for (auto n : disk_modes(u.band())) out.ref(n) = scale * jbracket_sq(n) * u.at(n);
  return out;
}

/// Classical RK4 for u'' = -<n>^2 u - pi_B(u^2) (wave) or u' = -<n>^2 u - pi_B(u^2) (heat).
std::pair<SpectralField, SpectralField> rk4_reference(Flow flow, const InitialData& init, double T, int steps) {
  const double h = T / steps;
  SpectralField u = project(init.u0, kBand).with_band(kBand);
  SpectralField p = project(init.u1, kBand).with_band(kBand);
  if (flow == Flow::heat) {
    auto rhs = [](const SpectralField& v) { return apply_symbol(v, -1.0) + minus_square(v); };
    for (int k = 0; k < steps; ++k) {
      const auto k1 = rhs(u);
      const auto k2 = rhs(u + (0.5 * h) * k1);
      const auto k3 = rhs(u + (0.5 * h) * k2);
      const auto k4 = rhs(u + h * k3);
      u += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return {u, p};
  }
  auto acc = [](const SpectralField& v) { return apply_symbol(v, -1.0) + minus_square(v); };
  for (int k = 0; k < steps; ++k) {
    const auto a1 = acc(u);
    const auto u2 = u + (0.5 * h) * p, p2 = p + (0.5 * h) * a1;
    const auto a2 = acc(u2);
    const auto u3 = u + (0.5 * h) * p2, p3 = p + (0.5 * h) * a2;
    const auto a3 = acc(u3);
    const auto u4 = u + h * p3, p4 = p + h * a3;
    const auto a4 = acc(u4);
    u += (h / 6) * (p + 2.0 * p2 + 2.0 * p3 + p4);
    p += (h / 6) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  }
  return {u, p};
}

ObjectTrajectory zero_path(ObjectKind kind, Flow flow, const TimeGrid& grid, int band) {
  ObjectTrajectory t;
  t.kind = kind;
  t.flow = flow;
  t.N = band;
  t.grid = grid;
  t.fields.assign(grid.count, SpectralField(band));
  if (kind == ObjectKind::lin && flow == Flow::wave) t.velocity.assign(grid.count, SpectralField(band));
  return t;
}

EnhancedDataSet zero_data(Flow flow, const TimeGrid& grid) {
  EnhancedDataSet d;
  d.lin = zero_path(ObjectKind::lin, flow, grid, kBand);
  d.wick = zero_path(ObjectKind::wick, flow, grid, 2 * kBand);
  d.duh = zero_path(ObjectKind::duh, flow, grid, kBand);
  d.res = zero_path(ObjectKind::res, flow, grid, kBand);
  return d;
}

SolveConfig deterministic_config(Flow flow, Expansion e, double h, double T) {
  SolveConfig c;
  c.flow = flow;
  c.expansion = e;
  c.band = kBand;
  c.h = h;
  c.T = T;
  return c;
}

double solve_error(Flow flow, double h, const InitialData& init, const SpectralField& ref, double T) {
  const auto cfg = deterministic_config(flow, Expansion::direct, h, T);
  const auto grid = TimeGrid::covering(0, T, h);
  const auto lin = zero_path(ObjectKind::lin, flow, grid, kBand);
  const auto r = solve_direct_truncated(cfg, lin, std::vector<double>(grid.count, 0.0), init);
  return sobolev_norm(r.u.back() - ref, 0.0);
}

}  // namespace

TEST(Propagator, SingleModeRotation) {
  WaveState s{SpectralField(2), SpectralField(2), 0.0};
  s.v.set_pair({1, 0}, 1.0);
  const double h = 0.3, w = std::sqrt(2.0);
  const auto out = wave_propagator_step(s, h);
  EXPECT_NEAR(out.v.at({1, 0}).real(), std::cos(h * w), 1e-15);
  EXPECT_NEAR(out.vdot.at({1, 0}).real(), -w * std::sin(h * w), 1e-15);
  EXPECT_DOUBLE_EQ(out.time, h);
}

TEST(Propagator, EnergyConservedPerModeAndGroupProperty) {
  WaveState s{random_field(8, 1), random_field(8, 2), 0.0};
  std::vector<double> e0;
  for (auto n : disk_modes(8)) e0.push_back(std::norm(s.vdot.at(n)) + jbracket_sq(n) * std::norm(s.v.at(n)));
  auto cur = s;
  for (int k = 0; k < 200; ++k) cur = wave_propagator_step(cur, 0.05);
  std::size_t i = 0;
  for (auto n : disk_modes(8)) {
    const double e = std::norm(cur.vdot.at(n)) + jbracket_sq(n) * std::norm(cur.v.at(n));
    EXPECT_LE(std::abs(e - e0[i]), 1e-12 * std::max(1.0, e0[i]));
    ++i;
  }
  const auto full = wave_propagator_step(s, 0.2);
  const auto half = wave_propagator_step(wave_propagator_step(s, 0.1), 0.1);
  EXPECT_LE(max_coeff_diff(full.v, half.v), 1e-12);
  EXPECT_LE(max_coeff_diff(full.vdot, half.vdot), 1e-12);
  EXPECT_TRUE(full.v.is_hermitian(1e-14));
}

TEST(TrigEuler, ZeroForcingIsPropagator) {
  WaveState s{random_field(5, 3), random_field(5, 4), 0.0};
  const auto a = wave_trig_euler_step(s, SpectralField(5), 0.07);
  const auto b = wave_propagator_step(s, 0.07);
  EXPECT_EQ(max_coeff_diff(a.v, b.v), 0.0);
  EXPECT_EQ(max_coeff_diff(a.vdot, b.vdot), 0.0);
}

TEST(TrigEuler, ConstantForcingFromRestIsExact) {
  WaveState s{SpectralField(3), SpectralField(3), 0.0};
  SpectralField F(3);
  F.set_pair({2, 1}, cplx{0.5, -1.0});
  const double h = 0.4, w = std::sqrt(6.0);
  const auto out = wave_trig_euler_step(s, F, h);
  EXPECT_NEAR(std::abs(out.v.at({2, 1}) - cplx{0.5, -1.0} * (1 - std::cos(h * w)) / (w * w)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out.vdot.at({2, 1}) - cplx{0.5, -1.0} * std::sin(h * w) / w), 0.0, 1e-15);
}

TEST(HeatEtd, DecayAndEquilibrium) {
  HeatState s{SpectralField(0), 0.0};
  s.v.set_pair({0, 0}, 1.0);
  EXPECT_NEAR(heat_etd1_step(s, SpectralField(0), 1.0).v.at({0, 0}).real(), std::exp(-1.0), 1e-15);
  SpectralField F = random_field(4, 8);
  HeatState eq{SpectralField(4), 0.0};
  for (auto n : disk_modes(4)) eq.v.ref(n) = F.at(n) / jbracket_sq(n);
  EXPECT_LE(max_coeff_diff(heat_etd1_step(eq, F, 0.3).v, eq.v), 1e-15);
  HeatState free{random_field(4, 9), 0.0};
  const auto next = heat_etd1_step(free, SpectralField(4), 0.1);
  for (auto n : disk_modes(4)) EXPECT_LE(std::abs(next.v.at(n)), std::abs(free.v.at(n)));
}

TEST(Integrators, FirstOrderAgainstRungeKuttaReference) {
  const auto init = smooth_test_data(1.0, kBand);
  const double T = 0.5;
  for (Flow flow : {Flow::wave, Flow::heat}) {
    const auto ref = rk4_reference(flow, init, T, flow == Flow::wave ? 4096 : 8192).first;
    const double e1 = solve_error(flow, T / 32, init, ref, T);
    const double e2 = solve_error(flow, T / 64, init, ref, T);
    const double e3 = solve_error(flow, T / 128, init, ref, T);
    EXPECT_GE(std::log2(e2 / e3), 0.95) << flow_name(flow);
    EXPECT_GE(std::log2(e1 / e2), 0.9) << flow_name(flow);
    EXPECT_LT(e3, 2e-2 * sobolev_norm(ref, 0.0)) << flow_name(flow);
  }
}

TEST(Integrators, ExpansionsAgreeOnDeterministicData) {
  const auto init = smooth_test_data(0.8, kBand);
  for (Flow flow : {Flow::wave, Flow::heat}) {
    const auto grid = TimeGrid::covering(0, 0.25, 1.0 / 64);
    const auto data = zero_data(flow, grid);
    const auto direct = solve_direct_truncated(deterministic_config(flow, Expansion::direct, grid.h, 0.25),
                                               data.lin, std::vector<double>(grid.count, 0.0), init);
    for (Expansion e : {Expansion::first_order, Expansion::second_order}) {
      const auto r = solve_residual(deterministic_config(flow, e, grid.h, 0.25), data, init);
      ASSERT_EQ(r.u.size(), direct.u.size());
      EXPECT_LE(sup_distance(r.u, direct.u, 0.0), 1e-12);
    }
  }
}

TEST(DirectSolver, LinearPartReproducesLinPath) {
  for (Flow flow : {Flow::wave, Flow::heat}) {
    const auto grid = TimeGrid::covering(0, 0.25, 1.0 / 64);
    const auto lin = sample_lin_path({0.3, 8, flow, 77, 0}, grid);
    auto cfg = deterministic_config(flow, Expansion::direct, grid.h, 0.25);
    cfg.band = 16;
    cfg.drop_nonlinearity = true;
    InitialData init{lin.fields[0].with_band(16), SpectralField(16)};
    const auto r = solve_direct_truncated(cfg, lin, std::vector<double>(grid.count, 0.0), init);
    for (int k = 0; k < grid.count; ++k) {
      EXPECT_LE(max_coeff_diff(r.u[k], lin.fields[k]), 1e-10);
      EXPECT_TRUE(r.u[k].is_hermitian(1e-12));
    }
  }
}

TEST(ResidualSolver, ReconstructionIdentity) {
  const auto grid = TimeGrid::covering(0, 0.125, 1.0 / 64);
  const auto data = build_enhanced_set({0.3, 4, Flow::heat, 5, 0}, grid, 8);
  auto cfg = deterministic_config(Flow::heat, Expansion::first_order, grid.h, 0.125);
  cfg.band = 8;
  const auto init = smooth_test_data(1.0, 8);
  const auto first = solve_residual(cfg, data, init);
  EXPECT_LE(max_coeff_diff(first.u[0], init.u0), 1e-14);
  for (int k = 0; k < grid.count; ++k)
    EXPECT_LE(max_coeff_diff(first.u[k], first.v[k] + data.lin.fields[k].with_band(8)), 1e-14);
  cfg.expansion = Expansion::second_order;
  const auto second = solve_residual(cfg, data, init);
  for (int k = 0; k < grid.count; ++k) {
    const auto u = second.v[k] + data.lin.fields[k].with_band(8) - data.duh.fields[k];
    EXPECT_LE(max_coeff_diff(second.u[k], u), 1e-14);
    EXPECT_TRUE(second.u[k].is_hermitian(1e-12));
  }
}

TEST(ResidualSolver, ExpansionsAgreeOnNoisyPath) {
  const double h = 1.0 / 128, T = 0.25;
  const auto grid = TimeGrid::covering(0, T, h);
  const auto data = build_enhanced_set({0.3, 8, Flow::wave, 9, 0}, grid, 16);
  SolveConfig cfg = deterministic_config(Flow::wave, Expansion::second_order, h, T);
  cfg.band = 16;
  const auto init = smooth_test_data(1.0, 16);
  const auto second = solve_residual(cfg, data, init);
  cfg.expansion = Expansion::first_order;
  const auto first = solve_residual(cfg, data, init);
  const auto direct = solve_direct_truncated(cfg, data.lin, counterterm_series(Flow::wave, 8, 0.3, grid), init);
  EXPECT_LE(relative_sup_distance(first.u, second.u, -0.4), 5e-2);
  EXPECT_LE(relative_sup_distance(direct.u, second.u, -0.4), 5e-2);
}

TEST(Solvers, BlowupIsReported) {
  const auto grid = TimeGrid::covering(0, 0.5, 1.0 / 256);
  const auto lin = zero_path(ObjectKind::lin, Flow::heat, grid, kBand);
  InitialData init{SpectralField(kBand), SpectralField(kBand)};
  init.u0.set_pair({0, 0}, -100.0 * kTwoPi);
  auto cfg = deterministic_config(Flow::heat, Expansion::direct, grid.h, 0.5);
  const auto r = solve_direct_truncated(cfg, lin, std::vector<double>(grid.count, 0.0), init);
  EXPECT_TRUE(r.blowup);
  ASSERT_TRUE(r.blowup_time.has_value());
  EXPECT_LT(*r.blowup_time, 0.1);
  EXPECT_LT(r.u.size(), static_cast<std::size_t>(grid.count));
  const auto calm = solve_direct_truncated(cfg, lin, std::vector<double>(grid.count, 0.0), smooth_test_data(0.1, kBand));
  EXPECT_FALSE(calm.blowup);
  EXPECT_EQ(calm.u.size(), static_cast<std::size_t>(grid.count));
}

TEST(Solvers, ConfigurationErrors) {
  auto cfg = deterministic_config(Flow::wave, Expansion::second_order, 0.1, 0.5);
  cfg.band = 16;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  const auto grid = TimeGrid::covering(0, 0.25, 1.0 / 64);
  const auto data = zero_data(Flow::wave, grid);
  auto ok = deterministic_config(Flow::wave, Expansion::second_order, 1.0 / 128, 0.25);
  EXPECT_THROW(solve_residual(ok, data, smooth_test_data(1, kBand)), std::invalid_argument);
  ok.h = 1.0 / 64;
  ok.expansion = Expansion::direct;
  EXPECT_THROW(solve_residual(ok, data, smooth_test_data(1, kBand)), std::invalid_argument);
  EXPECT_THROW(solve_direct_truncated(ok, data.lin, {0.0}, smooth_test_data(1, kBand)), std::invalid_argument);
  EXPECT_THROW(parse_expansion("third"), std::invalid_argument);
  EXPECT_EQ(parse_expansion(expansion_name(Expansion::first_order)), Expansion::first_order);
}

TEST(Solvers, SupDistances) {
  const std::vector<SpectralField> a{random_field(3, 1), random_field(3, 2)};
  EXPECT_EQ(sup_distance(a, a, -0.4), 0.0);
  const std::vector<SpectralField> z{SpectralField(3), SpectralField(3)};
  EXPECT_NEAR(relative_sup_distance(z, a, 0.0), 1.0, 1e-15);
  EXPECT_THROW(sup_distance(a, {z[0]}, 0.0), std::invalid_argument);
}

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "test_support.hpp"
#include "wickwave/estimator.hpp"
#include "wickwave/oracles.hpp"

using namespace wickwave;

namespace {

struct GaussRule {
  std::vector<double> x, w;  // on [0, 1]
};

GaussRule gauss_legendre(int n) {
  GaussRule r{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = 0.5 * (1 - z);
    r.w[i] = 1.0 / ((1 - z * z) * dp * dp);
  }
  return r;
}

/// 2 * int_0^t int_0^{t1} f(t1, t2) dt2 dt1, for symmetric f smooth off the diagonal.
double symmetric_square_integral(const std::function<double(double, double)>& f, double t, int n) {
  const auto g = gauss_legendre(n);
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    const double t1 = t * g.x[i];
    for (int j = 0; j < n; ++j) acc += g.w[i] * g.w[j] * t1 * f(t1, t1 * g.x[j]);
  }
  return 2 * t * acc;
}

/// Ordered pairs n1 + n2 = n with |n1|, |n2| <= N.
std::vector<std::pair<FreqIndex, FreqIndex>> pairs(FreqIndex n, int N) {
  std::vector<std::pair<FreqIndex, FreqIndex>> out;
  for (auto m : disk_modes(N))
    if (in_disk(n - m, N)) out.emplace_back(m, n - m);
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Covariances, WaveValues) {
  EXPECT_NEAR(wave_cov_sigma({0, 0}, 1, 1, 0.3), 0.5 - std::sin(2.0) / 4, 1e-15);
  EXPECT_EQ(wave_cov_sigma({2, 1}, 0.7, 0.0, 0.4), 0.0);
  for (double t1 : {0.1, 0.45, 1.3})
    for (double t2 : {0.2, 0.9}) {
      EXPECT_NEAR(wave_cov_sigma({3, -1}, t1, t2, 0.35), wave_cov_sigma({3, -1}, t2, t1, 0.35), 1e-15);
    }
}

TEST(Covariances, WaveMatchesItoIntegral) {
  // int_0^{min} sin((t1-s)w) sin((t2-s)w) w^{2a-2} ds
  const double w = jbracket({2, 3}), a = 0.3, t1 = 0.8, t2 = 0.35;
  const auto g = gauss_legendre(40);
  double acc = 0;
  for (int i = 0; i < 40; ++i) {
    const double s = t2 * g.x[i];
    acc += g.w[i] * std::sin((t1 - s) * w) * std::sin((t2 - s) * w);
  }
  EXPECT_NEAR(wave_cov_sigma({2, 3}, t1, t2, a), acc * t2 * std::pow(w, 2 * a - 2), 1e-14);
}

TEST(Covariances, HeatValues) {
  EXPECT_DOUBLE_EQ(heat_cov_kappa({0, 0}, 0.3, 0.3, 0.7), 0.5);
  EXPECT_NEAR(heat_cov_kappa({1, 0}, 1.5, 0.5, 0.5), std::exp(-2.0) / (2 * std::sqrt(2.0)), 1e-15);
  EXPECT_LT(heat_cov_kappa({1, 0}, 500, 0, 0.5), 1e-300);
}

TEST(PairClasses, CountOrderedPairs) {
  for (FreqIndex n : {FreqIndex{0, 0}, FreqIndex{1, 0}, FreqIndex{3, 2}, FreqIndex{-5, 4}}) {
    int total = 0;
    for (const auto& c : pair_classes(n, 7)) total += c.count;
    EXPECT_EQ(total, static_cast<int>(pairs(n, 7).size()));
  }
}

TEST(WickMoments, WaveValues) {
  EXPECT_EQ(wave_wick_moment({1, 0}, 0.0, 8, 0.3).value, 0.0);
  const double s0 = wave_cov_sigma({0, 0}, 0.5, 0.5, 0.3);
  EXPECT_NEAR(wave_wick_moment({0, 0}, 0.5, 0, 0.3).value, s0 * s0 / (2 * kPi * kPi), 1e-16);
  // brute force over ordered pairs
  const double t = 0.5, a = 0.3;
  for (FreqIndex n : {FreqIndex{0, 0}, FreqIndex{1, 0}, FreqIndex{3, 2}}) {
    double acc = 0;
    for (auto [m1, m2] : pairs(n, 16)) acc += wave_cov_sigma(m1, t, t, a) * wave_cov_sigma(m2, t, t, a);
    EXPECT_LT(rel(wave_wick_moment(n, t, 16, a).value, acc / (2 * kPi * kPi)), 1e-12);
  }
  EXPECT_EQ(wave_wick_moment({1, 0}, 0.5, 8, 0.3).method, OracleMethod::lattice_sum);
}

TEST(WickMoments, HeatIsStationary) {
  EXPECT_EQ(heat_wick_moment({2, 1}, 0.1, 16, 0.3).value, heat_wick_moment({2, 1}, 7.0, 16, 0.3).value);
}

TEST(WickMoments, HeatCriticalGrowthRate) {
  std::vector<double> lx, ly;
  for (int N = 16; N <= 256; N *= 2) {
    lx.push_back(std::log(N));
    ly.push_back(std::log(heat_wick_moment({0, 0}, 0, N, 0.75).value));
  }
  EXPECT_NEAR(wickwave::testing::ols_slope(lx, ly), 1.0, 0.15);
}

TEST(DuhMoments, WaveVanishesAtZero) {
  EXPECT_EQ(wave_duh_moment({0, 0}, 0.0, 8, 0.3).value, 0.0);
  EXPECT_EQ(wave_duh_moment({3, 2}, 0.0, 8, 0.3, 32).value, 0.0);
}

TEST(DuhMoments, WaveMatchesIndependentTimeQuadrature) {
  const double a = 0.3, t = 0.5;
  for (FreqIndex n : {FreqIndex{0, 0}, FreqIndex{1, 0}, FreqIndex{3, 2}}) {
    const int N = 3;
    const double w = jbracket(n);
    double acc = 0;
    for (auto [m1, m2] : pairs(n, N)) {
      auto f = [&](double t1, double t2) {
        return std::sin((t - t1) * w) / w * std::sin((t - t2) * w) / w * wave_cov_sigma(m1, t1, t2, a) *
               wave_cov_sigma(m2, t1, t2, a);
      };
      acc += symmetric_square_integral(f, t, 48);
    }
    const auto v = wave_duh_moment(n, t, N, a);
    EXPECT_LT(rel(v.value, acc / (2 * kPi * kPi)), 1e-9);
  }
}

TEST(DuhMoments, WaveTrapezoidRouteConvergesAtSecondOrder) {
  const double a = 0.3, t = 0.5;
  for (FreqIndex n : {FreqIndex{0, 0}, FreqIndex{1, 0}, FreqIndex{3, 2}}) {
    const double exact = wave_duh_moment(n, t, 16, a).value;
    const double e32 = std::abs(wave_duh_moment(n, t, 16, a, 32).value - exact);
    const double e64 = std::abs(wave_duh_moment(n, t, 16, a, 64).value - exact);
    const double v128 = wave_duh_moment(n, t, 16, a, 128).value;
    const double v256 = wave_duh_moment(n, t, 16, a, 256).value;
    EXPECT_LT(rel(v128, v256), 5e-3);
    EXPECT_NEAR(e32 / e64, 4.0, 0.6);
    EXPECT_EQ(wave_duh_moment(n, t, 16, a, 64).quadrature_points, 64);
  }
  EXPECT_THROW(wave_duh_moment({0, 0}, t, 8, a, 8), std::invalid_argument);
}

TEST(DuhMoments, HeatMatchesIndependentTimeQuadrature) {
  for (double a : {0.5, 0.9}) {
    for (FreqIndex n : {FreqIndex{0, 0}, FreqIndex{1, 0}, FreqIndex{3, 2}}) {
      const double t = 0.5, w = jbracket(n);
      for (int N : {4, 8}) {
        double acc = 0;
        for (auto [m1, m2] : pairs(n, N)) {
          auto f = [&](double t1, double t2) {
            return std::exp(-(2 * t - t1 - t2) * w * w) * heat_cov_kappa(m1, t1, t2, a) *
                   heat_cov_kappa(m2, t1, t2, a);
          };
          acc += symmetric_square_integral(f, t, 32);
        }
        EXPECT_LT(rel(heat_duh_moment(n, t, N, a).value, acc / (2 * kPi * kPi)), 1e-6);
      }
    }
  }
  EXPECT_EQ(heat_duh_moment({1, 1}, 0.0, 8, 0.5).value, 0.0);
}

TEST(DuhMoments, HeatPairTermNearDegenerateBranch) {
  // w^2 = w1^2 + w2^2 + x with x small on both sides of the switch
  const double w1 = 1.3, w2 = 2.1, t = 0.7, a = 0.6;
  auto term = [&](double x) { return heat_duh_pair_term(std::sqrt(w1 * w1 + w2 * w2 + x), w1, w2, t, a); };
  const double at0 = term(0.0);
  for (double x : {1e-9, -1e-9, 1e-7, -1e-7, 1e-6, -1e-6}) EXPECT_LT(rel(term(x), at0), 2e-6);
  // independent quadrature of the single-pair integral at the degenerate point
  const double w = std::sqrt(w1 * w1 + w2 * w2), A = w1 * w1 + w2 * w2;
  auto f = [&](double t1, double t2) {
    return std::exp(-(2 * t - t1 - t2) * w * w - std::abs(t1 - t2) * A);
  };
  const double q = 0.5 * symmetric_square_integral(f, t, 40) * std::pow(w1 * w2, 2 * a - 2);
  EXPECT_LT(rel(at0, q), 1e-10);
}

TEST(DuhMoments, HeatSubcriticalIncrementsShrink) {
  double prev = heat_duh_moment({0, 0}, 1, 64, 0.9).value, prev_inc = 0;
  for (int N : {128, 256, 512}) {
    const double cur = heat_duh_moment({0, 0}, 1, N, 0.9).value;
    const double inc = cur - prev;
    if (prev_inc > 0) {
      EXPECT_NEAR(inc / prev_inc, std::pow(2.0, -0.4), 0.1);
    }
    prev = cur;
    prev_inc = inc;
  }
}

TEST(DuhMoments, HeatCriticalGrowsLogarithmically) {
  std::vector<double> Ns, vals;
  for (int N = 16; N <= 512; N *= 2) {
    Ns.push_back(N);
    vals.push_back(heat_duh_moment({0, 0}, 1, N, 1.0).value);
  }
  EXPECT_EQ(growth_fit(Ns, vals).classification, GrowthClass::logarithmic);
}

TEST(Oracles, SymmetricUnderReflection) {
  const double t = 0.5;
  for (FreqIndex n : {FreqIndex{1, 0}, FreqIndex{3, 2}, FreqIndex{-2, 5}}) {
    EXPECT_LT(rel(wave_wick_moment(-n, t, 12, 0.3).value, wave_wick_moment(n, t, 12, 0.3).value), 1e-12);
    EXPECT_LT(rel(heat_wick_moment(-n, t, 12, 0.6).value, heat_wick_moment(n, t, 12, 0.6).value), 1e-12);
    EXPECT_LT(rel(wave_duh_moment(-n, t, 8, 0.3).value, wave_duh_moment(n, t, 8, 0.3).value), 1e-12);
    EXPECT_LT(rel(heat_duh_moment(-n, t, 12, 0.6).value, heat_duh_moment(n, t, 12, 0.6).value), 1e-12);
  }
}

TEST(Oracles, NondecreasingInTruncation) {
  const FreqIndex n{2, 1};
  double pw = 0, ph = 0, pd = 0, pe = 0;
  for (int N = 1; N <= 12; ++N) {
    const double a = wave_wick_moment(n, 0.5, N, 0.3).value, b = heat_wick_moment(n, 0, N, 0.6).value;
    const double c = wave_duh_moment(n, 0.5, N, 0.3).value, d = heat_duh_moment(n, 0.5, N, 0.6).value;
    EXPECT_GE(a, pw);
    EXPECT_GE(b, ph);
    EXPECT_GE(c, pd * (1 - 1e-13));
    EXPECT_GE(d, pe);
    pw = a, ph = b, pd = c, pe = d;
  }
}

TEST(Sharpness, PositiveAndWindowed) {
  for (double a : {0.2, 0.35})
    for (int k : {8, 16, 31}) EXPECT_GT(wave_duh_sharpness_ratio({k, 0}, 0.25, a, 32), 0.0);
  EXPECT_THROW(wave_duh_sharpness_ratio({8, 0}, 0.1, 0.3, 32), std::domain_error);
  EXPECT_THROW(wave_duh_sharpness_ratio({16, 0}, 0.5, 0.3, 32), std::domain_error);
}

TEST(Exponents, SmoothingIndex) {
  EXPECT_NEAR(s_alpha(0.2), 0.8, 1e-15);
  EXPECT_NEAR(s_alpha(0.4), 0.45, 1e-15);
  EXPECT_NEAR(s_alpha(0.25), 0.75, 1e-15);
  EXPECT_NEAR(s_alpha(0.25 - 1e-12), s_alpha(0.25 + 1e-12), 1e-11);
  EXPECT_THROW(s_alpha(0.5), std::domain_error);
  EXPECT_THROW(s_alpha(0.0), std::domain_error);
}

TEST(Exponents, PredictedRegularity) {
  EXPECT_NEAR(predicted_regularity(ObjectKind::lin, Flow::wave, 0.3), -0.3, 1e-15);
  EXPECT_NEAR(predicted_regularity(ObjectKind::wick, Flow::heat, 0.3), -0.6, 1e-15);
  EXPECT_NEAR(predicted_regularity(ObjectKind::duh, Flow::heat, 0.7), 0.6, 1e-15);
  EXPECT_NEAR(predicted_regularity(ObjectKind::duh, Flow::wave, 0.35), 0.55, 1e-15);
  EXPECT_NEAR(predicted_regularity(ObjectKind::res, Flow::wave, 0.45), -0.1, 1e-12);
  EXPECT_NEAR(predicted_regularity(ObjectKind::res, Flow::heat, 0.8), -0.4, 1e-12);
  EXPECT_THROW(predicted_regularity(ObjectKind::duh, Flow::wave, 0.6), std::domain_error);
}

TEST(Exponents, DivergenceThresholds) {
  EXPECT_EQ(divergence_threshold(ObjectKind::duh, Flow::wave), 0.5);
  EXPECT_EQ(divergence_threshold(ObjectKind::duh, Flow::heat), 1.0);
  EXPECT_EQ(divergence_threshold(ObjectKind::wick, Flow::heat), 0.5);
  EXPECT_EQ(divergence_threshold(ObjectKind::wick, Flow::wave), 0.5);
  EXPECT_NEAR(predicted_growth_exponent(ObjectKind::duh, Flow::wave, 0.75), 1.0, 1e-15);
  EXPECT_NEAR(predicted_growth_exponent(ObjectKind::wick, Flow::heat, 0.75), 1.0, 1e-15);
  EXPECT_EQ(predicted_growth_exponent(ObjectKind::duh, Flow::wave, 0.5), 0.0);
}

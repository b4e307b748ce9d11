#include "wickwave/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "wickwave/parallel.hpp"
#include "wickwave/spectral.hpp"

namespace wickwave {

std::string_view oracle_method_name(OracleMethod m) {
  switch (m) {
    case OracleMethod::closed_form: return "closed_form";
    case OracleMethod::lattice_sum: return "lattice_sum";
    case OracleMethod::lattice_sum_plus_quadrature: return "lattice_sum_plus_quadrature";
  }
  return "?";
}

namespace {

double bracket_of(std::int64_t r2) { return std::sqrt(1.0 + static_cast<double>(r2)); }

/// Pairing prefactor of E|<2>(n)|^2 over ordered pairs.
constexpr double kPairFactor = 1.0 / (2 * kPi * kPi);

constexpr std::size_t kChunk = 256;

}  // namespace

double wave_cov_sigma_w(double w, double t1, double t2, double alpha) {
  const double hi = std::max(t1, t2), lo = std::min(t1, t2);
  if (lo <= 0.0) return 0.0;
  const double p2 = std::pow(w, 2 * alpha - 2);
  const double p3 = p2 / w;
  return std::cos((hi - lo) * w) * lo * p2 / 2 + std::sin((hi - lo) * w) * p3 / 4 -
         std::sin((hi + lo) * w) * p3 / 4;
}

double wave_cov_sigma(FreqIndex n, double t1, double t2, double alpha) {
  return wave_cov_sigma_w(jbracket(n), t1, t2, alpha);
}

double heat_cov_kappa(FreqIndex n, double t1, double t2, double alpha) {
  const double w = jbracket(n);
  return std::exp(-std::abs(t1 - t2) * w * w) * std::pow(w, 2 * alpha - 2) / 2;
}

std::vector<PairClass> pair_classes(FreqIndex n, int N) {
  std::map<std::pair<std::int64_t, std::int64_t>, int> counts;
  for (int x = -N; x <= N; ++x)
    for (int y = -N; y <= N; ++y) {
      const FreqIndex n1{x, y};
      if (!in_disk(n1, N)) continue;
      const FreqIndex n2 = n - n1;
      if (!in_disk(n2, N)) continue;
      ++counts[{n1.norm2(), n2.norm2()}];
    }
  std::vector<PairClass> out;
  out.reserve(counts.size());
  for (const auto& [k, c] : counts) out.push_back({k.first, k.second, c});
  return out;
}

namespace {

template <class Term>
double pair_sum(const std::vector<PairClass>& classes, Term&& term) {
  return chunked_sum<double>(classes.size(), kChunk, 0, [&](std::size_t b, std::size_t e) {
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i)
      acc += classes[i].count * term(bracket_of(classes[i].r1), bracket_of(classes[i].r2));
    return acc;
  });
}

}  // namespace

OracleValue wave_wick_moment(FreqIndex n, double t, int N, double alpha) {
  const auto classes = pair_classes(n, N);
  const double v = pair_sum(classes, [&](double w1, double w2) {
    return wave_cov_sigma_w(w1, t, t, alpha) * wave_cov_sigma_w(w2, t, t, alpha);
  });
  return {kPairFactor * v, OracleMethod::lattice_sum, std::nullopt};
}

OracleValue heat_wick_moment(FreqIndex n, double /*t*/, int N, double alpha) {
  const auto classes = pair_classes(n, N);
  const double v = pair_sum(classes, [&](double w1, double w2) {
    return std::pow(w1 * w2, 2 * alpha - 2) / 4;
  });
  return {kPairFactor * v, OracleMethod::lattice_sum, std::nullopt};
}

// ---------------------------------------------------------------------------
// Exact time integration for the wave <20> moment. The integrand
// K(r) K(s) sigma_1(r,s) sigma_2(r,s) on s <= r is a sum of monomials
// c s^p e^{i(a r + b s)}; each is integrated over the triangle in closed form.

namespace {

const cplx I{0.0, 1.0};

/// int_0^T s^q e^{i c s} ds
cplx moment_integral(int q, double c, double T) {
  if (std::abs(c) * T < 1.0) {
    const cplx z = I * c * T;
    cplx term = 1.0;  // (icT)^k / k!
    cplx acc = 0.0;
    for (int k = 0; k < 60; ++k) {
      const cplx add = term / static_cast<double>(k + q + 1);
      acc += add;
      if (std::abs(add) < 1e-18 * std::abs(acc)) break;
      term *= z / static_cast<double>(k + 1);
    }
    return acc * std::pow(T, q + 1);
  }
  const cplx e = std::exp(I * c * T);
  const cplx ic = I * c;
  cplx g = (e - 1.0) / ic;
  for (int j = 1; j <= q; ++j) g = (std::pow(T, j) * e - static_cast<double>(j) * g) / ic;
  return g;
}

/// int_0^t e^{i a r} int_0^r s^p e^{i b s} ds dr
cplx triangle_integral(int p, double a, double b, double t) {
  if (std::abs(a) * t >= 1.0) {
    return (std::exp(I * a * t) * moment_integral(p, b, t) - moment_integral(p, a + b, t)) / (I * a);
  }
  if (std::abs(b) * t >= 1.0) {
    // int_0^r s^p e^{ibs} = sum_q u_q r^q e^{ibr} + v
    std::array<cplx, 8> u{};
    const cplx ib = I * b;
    u[0] = 1.0 / ib;
    cplx v = -1.0 / ib;
    for (int j = 1; j <= p; ++j) {
      for (int q = 0; q < j; ++q) u[q] *= -static_cast<double>(j) / ib;
      u[j] = 1.0 / ib;
      v *= -static_cast<double>(j) / ib;
    }
    cplx acc = v * moment_integral(0, a, t);
    for (int q = 0; q <= p; ++q) acc += u[q] * moment_integral(q, a + b, t);
    return acc;
  }
  // Double Taylor series in (a t, b t).
  cplx acc = 0.0;
  cplx ta = 1.0;  // (i a)^j / j!
  for (int j = 0; j < 40; ++j) {
    cplx tb = 1.0;  // (i b)^k / k!
    cplx row = 0.0;
    for (int k = 0; k < 40; ++k) {
      const double e = static_cast<double>(j + k + p + 2);
      const cplx add = tb * std::pow(t, e) / (static_cast<double>(k + p + 1) * e);
      row += add;
      if (std::abs(add) < 1e-18 * std::abs(row)) break;
      tb *= I * b / static_cast<double>(k + 1);
    }
    const cplx add = ta * row;
    acc += add;
    if (std::abs(add) < 1e-18 * std::abs(acc)) break;
    ta *= I * a / static_cast<double>(j + 1);
  }
  return acc;
}

struct Mono {
  cplx c;
  double a, b;
  int p;
};

/// sigma_m(r, s) on r >= s as six monomials.
std::array<Mono, 6> sigma_monomials(double w, double alpha) {
  const double P = std::pow(w, 2 - 2 * alpha);
  const double Q = P * w;
  const cplx c0 = 1.0 / (4 * P);
  const cplx c1 = -I / (8 * Q);
  return {{{c0, w, -w, 1},
           {c0, -w, w, 1},
           {c1, w, -w, 0},
           {-c1, -w, w, 0},
           {-c1, w, w, 0},
           {c1, -w, -w, 0}}};
}

/// sin((t-r)w) sin((t-s)w) / w^2 as four monomials (p = 0).
std::array<Mono, 4> kernel_monomials(double w, double t) {
  const cplx ep = std::exp(I * w * t) / (2.0 * I * w);
  const cplx em = -std::exp(-I * w * t) / (2.0 * I * w);
  return {{{ep * ep, -w, -w, 0}, {ep * em, -w, w, 0}, {em * ep, w, -w, 0}, {em * em, w, w, 0}}};
}

double pair_integral_exact(double w, double w1, double w2, double t, double alpha) {
  if (t <= 0.0) return 0.0;
  const auto K = kernel_monomials(w, t);
  const auto S1 = sigma_monomials(w1, alpha);
  const auto S2 = sigma_monomials(w2, alpha);
  cplx acc = 0.0;
  for (const auto& k : K)
    for (const auto& s1 : S1)
      for (const auto& s2 : S2) {
        const cplx c = k.c * s1.c * s2.c;
        acc += c * triangle_integral(s1.p + s2.p, k.a + s1.a + s2.a, k.b + s1.b + s2.b, t);
      }
  return 2.0 * acc.real();
}

/// Tensor trapezoid on [0,t]^2 with Q intervals; sigma tables cached per radius.
class QuadratureSum {
 public:
  QuadratureSum(double w, double t, double alpha, int Q) : t_(t), alpha_(alpha), Q_(Q) {
    const double h = t / Q;
    nodes_.resize(Q + 1);
    weights_.assign(Q + 1, h);
    weights_.front() = weights_.back() = h / 2;
    for (int i = 0; i <= Q; ++i) nodes_[i] = i * h;
    kk_.resize(static_cast<std::size_t>(Q + 1) * (Q + 1));
    for (int i = 0; i <= Q; ++i)
      for (int j = 0; j <= Q; ++j)
        kk_[idx(i, j)] = weights_[i] * weights_[j] * std::sin((t - nodes_[i]) * w) *
                         std::sin((t - nodes_[j]) * w) / (w * w);
  }

  double pair(std::int64_t r1, std::int64_t r2) {
    const auto& s1 = table(r1);
    const auto& s2 = table(r2);
    double acc = 0.0;
    for (std::size_t i = 0; i < kk_.size(); ++i) acc += kk_[i] * s1[i] * s2[i];
    return acc;
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * (Q_ + 1) + j; }

  const std::vector<double>& table(std::int64_t r2) {
    auto it = cache_.find(r2);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > 512) cache_.clear();
    std::vector<double> tab(kk_.size());
    const double w = bracket_of(r2);
    for (int i = 0; i <= Q_; ++i)
      for (int j = 0; j <= Q_; ++j) tab[idx(i, j)] = wave_cov_sigma_w(w, nodes_[i], nodes_[j], alpha_);
    return cache_.emplace(r2, std::move(tab)).first->second;
  }

  double t_, alpha_;
  int Q_;
  std::vector<double> nodes_, weights_, kk_;
  std::unordered_map<std::int64_t, std::vector<double>> cache_;
};

}  // namespace

double wave_duh_pair_integral(double w, double w1, double w2, double t, double alpha) {
  return pair_integral_exact(w, w1, w2, t, alpha);
}

OracleValue wave_duh_moment(FreqIndex n, double t, int N, double alpha,
                            std::optional<int> quad_points) {
  if (t < 0.0) throw std::invalid_argument("wave_duh_moment: t must be non-negative");
  const auto classes = pair_classes(n, N);
  const double w = jbracket(n);
  if (quad_points) {
    if (*quad_points < 16) throw std::invalid_argument("wave_duh_moment: quad_points must be >= 16");
    if (t == 0.0) return {0.0, OracleMethod::lattice_sum_plus_quadrature, quad_points};
    QuadratureSum quad(w, t, alpha, *quad_points);
    double acc = 0.0;
    for (const auto& c : classes) acc += c.count * quad.pair(c.r1, c.r2);
    return {kPairFactor * acc, OracleMethod::lattice_sum_plus_quadrature, quad_points};
  }
  const double v = pair_sum(classes, [&](double w1, double w2) {
    return pair_integral_exact(w, w1, w2, t, alpha);
  });
  return {kPairFactor * v, OracleMethod::lattice_sum, std::nullopt};
}

double heat_duh_pair_term(double w, double w1, double w2, double t, double alpha) {
  if (t <= 0.0) return 0.0;
  const double lambda = w * w;
  const double A = w1 * w1 + w2 * w2;
  const double x = lambda - A;
  const double e2 = std::exp(-2 * t * lambda);
  const double tail = std::abs(x) < 1e-8 ? t : std::expm1(x * t) / x;
  const double J = (-std::expm1(-2 * t * lambda) / (2 * lambda) - e2 * tail) / (lambda + A);
  return std::pow(w1 * w2, 2 * alpha - 2) * J;
}

OracleValue heat_duh_moment(FreqIndex n, double t, int N, double alpha) {
  if (t < 0.0) throw std::invalid_argument("heat_duh_moment: t must be non-negative");
  const auto classes = pair_classes(n, N);
  const double w = jbracket(n);
  const double v = pair_sum(classes, [&](double w1, double w2) {
    return heat_duh_pair_term(w, w1, w2, t, alpha);
  });
  return {v / (4 * kPi * kPi), OracleMethod::closed_form, std::nullopt};
}

double wave_duh_sharpness_ratio(FreqIndex n, double t, double alpha, int N,
                                std::optional<int> quad_points) {
  const double w = jbracket(n);
  if (t < 2.0 / w || t > 0.3)
    throw std::domain_error("wave_duh_sharpness_ratio: need 2/<n> <= t <= 0.3 (t = " +
                            std::to_string(t) + ", <n> = " + std::to_string(w) + ")");
  const double s = s_alpha(alpha);
  const double v = wave_duh_moment(n, t, N, alpha, quad_points).value;
  return v / (std::pow(t, 4) * std::pow(w, -2 - 2 * s));
}

double s_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::domain_error("s_alpha: requires 0 < alpha < 1/2 (alpha = " + std::to_string(alpha) + ")");
  return 1 - 2 * alpha + std::min(alpha, 0.25);
}

double divergence_threshold(ObjectKind object, Flow flow) {
  switch (object) {
    case ObjectKind::wick: return 0.5;
    case ObjectKind::duh: return flow == Flow::wave ? 0.5 : 1.0;
    default:
      throw std::invalid_argument("divergence_threshold: defined for wick and duh only");
  }
}

double predicted_regularity(ObjectKind object, Flow flow, double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("predicted_regularity: alpha must be positive");
  auto check = [&](double threshold) {
    if (alpha >= threshold)
      throw std::domain_error("predicted_regularity: alpha = " + std::to_string(alpha) +
                              " is at or above the divergence threshold " + std::to_string(threshold) +
                              " for " + std::string(object_name(object)) + "/" +
                              std::string(flow_name(flow)));
  };
  switch (object) {
    case ObjectKind::lin: return -alpha;
    case ObjectKind::wick: check(0.5); return -2 * alpha;
    case ObjectKind::duh:
      if (flow == Flow::wave) { check(0.5); return s_alpha(alpha); }
      check(1.0);
      return 2 - 2 * alpha;
    case ObjectKind::res:
      if (flow == Flow::wave) { check(0.5); return s_alpha(alpha) - alpha; }
      check(1.0);
      return 2 - 3 * alpha;
  }
  return 0.0;
}

double predicted_growth_exponent(ObjectKind object, Flow flow, double alpha) {
  const double threshold = divergence_threshold(object, flow);
  if (alpha < threshold)
    throw std::domain_error("predicted_growth_exponent: alpha below the divergence threshold");
  if (object == ObjectKind::duh && flow == Flow::heat) return 4 * alpha - 4;
  return 4 * alpha - 2;
}

}  // namespace wickwave

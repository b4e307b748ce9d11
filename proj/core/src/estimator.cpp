#include "wickwave/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "wickwave/parallel.hpp"

namespace wickwave {

namespace {

bool is_zero(FreqIndex n) { return n.x == 0 && n.y == 0; }

FreqIndex canonical(FreqIndex n) { return (is_zero(n) || in_upper_half(n)) ? n : -n; }

int max_radius(const std::vector<FreqIndex>& modes) {
  std::int64_t r2 = 0;
  for (const auto& n : modes) r2 = std::max(r2, n.norm2());
  return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(r2))));
}

TimeGrid pipeline_grid(const PipelineSpec& spec, double t_max) {
  if (!(spec.h > 0.0)) throw std::invalid_argument("pipeline: h must be positive");
  if (t_max < 0.0) throw std::invalid_argument("pipeline: times must be non-negative");
  const double t0 = (spec.flow == Flow::heat && spec.lower_limit == LowerLimit::minus_infinity)
                        ? -spec.T_burn
                        : 0.0;
  return TimeGrid::covering(t0, t_max, spec.h);
}

/// Direct convolution is cheaper than a padded transform for few output modes.
bool prefer_direct(std::size_t modes, int N) {
  const double disk = kPi * (N + 0.5) * (N + 0.5);
  const double M = fft_friendly_size(4 * N + 1);
  return static_cast<double>(modes) * disk < 15.0 * M * M * std::log2(M);
}

SpectralField wick_field(const SpectralField& lin, double counterterm) {
  SpectralField sq = multiply_dealiased(lin, lin);
  sq.ref({0, 0}) -= kTwoPi * counterterm;
  return sq;
}

/// Wick series over the selected grid indices for the given (canonical) modes.
std::vector<std::vector<cplx>> wick_rows(const ObjectTrajectory& lin, const std::vector<double>& ct,
                                         const std::vector<FreqIndex>& modes,
                                         const std::vector<int>& indices) {
  std::vector<std::vector<cplx>> rows(indices.size(), std::vector<cplx>(modes.size()));
  const bool direct = prefer_direct(modes.size(), lin.N);
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const int k = indices[j];
    if (direct) {
      for (std::size_t i = 0; i < modes.size(); ++i) {
        cplx c = product_coefficient(lin.fields[k], lin.fields[k], modes[i]);
        if (is_zero(modes[i])) c = {c.real() - kTwoPi * ct[k], 0.0};
        rows[j][i] = c;
      }
    } else {
      const SpectralField w = wick_field(lin.fields[k], ct[k]);
      for (std::size_t i = 0; i < modes.size(); ++i) rows[j][i] = w.at(modes[i]);
    }
  }
  return rows;
}

std::vector<int> all_indices(const TimeGrid& g) {
  std::vector<int> idx(g.count);
  for (int k = 0; k < g.count; ++k) idx[k] = k;
  return idx;
}

/// Duhamel series per canonical mode from wick rows over the full grid.
std::vector<std::vector<cplx>> duh_rows(const PipelineSpec& spec, const TimeGrid& grid,
                                        const std::vector<std::vector<cplx>>& wick,
                                        const std::vector<FreqIndex>& modes) {
  std::vector<std::vector<cplx>> out(grid.count, std::vector<cplx>(modes.size()));
  int start = 0;
  if (spec.flow == Flow::heat && spec.lower_limit == LowerLimit::zero) start = grid.index_of(0.0);
  std::vector<cplx> series(grid.count);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (int k = 0; k < grid.count; ++k) series[k] = wick[k][i];
    const double w = jbracket(modes[i]);
    const auto d = spec.flow == Flow::wave ? duhamel_wave_mode(series, w, grid.h)
                                           : duhamel_heat_mode(series, w, grid.h, start);
    for (int k = 0; k < grid.count; ++k) out[k][i] = d[k];
  }
  return out;
}

}  // namespace

std::vector<cplx> evaluate_object(const PipelineSpec& spec, std::uint64_t replica,
                                  const std::vector<FreqIndex>& modes,
                                  const std::vector<double>& times) {
  if (modes.empty() || times.empty()) return {};
  const double t_max = *std::max_element(times.begin(), times.end());
  const TimeGrid grid = pipeline_grid(spec, t_max);
  std::vector<int> tidx(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) tidx[j] = grid.index_of(times[j]);

  std::vector<FreqIndex> canon(modes.size());
  std::vector<bool> flip(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    canon[i] = canonical(modes[i]);
    flip[i] = !(canon[i] == modes[i]);
  }
  const NoiseSpec ns{spec.alpha, spec.N, spec.flow, spec.seed, replica};

  std::vector<std::vector<cplx>> rows;  // per requested time
  switch (spec.object) {
    case ObjectKind::lin: {
      const auto all = sample_lin_modes(ns, grid, canon);
      for (int k : tidx) rows.push_back(all[k]);
      break;
    }
    case ObjectKind::wick: {
      const auto lin = sample_lin_path(ns, grid);
      rows = wick_rows(lin, counterterm_series(spec.flow, spec.N, spec.alpha, grid), canon, tidx);
      break;
    }
    case ObjectKind::duh: {
      if (spec.flow == Flow::wave && spec.h > wave_resolution_limit(max_radius(canon)) * (1 + 1e-12))
        throw std::invalid_argument("pipeline: resolution violated, need h*<n> <= 0.5 for tracked modes");
      const auto lin = sample_lin_path(ns, grid);
      const auto ct = counterterm_series(spec.flow, spec.N, spec.alpha, grid);
      const auto wick = wick_rows(lin, ct, canon, all_indices(grid));
      const auto duh = duh_rows(spec, grid, wick, canon);
      for (int k : tidx) rows.push_back(duh[k]);
      break;
    }
    case ObjectKind::res: {
      const int track = std::min(2 * spec.N, spec.N + max_radius(canon));
      if (spec.flow == Flow::wave && spec.h > wave_resolution_limit(track) * (1 + 1e-12))
        throw std::invalid_argument("pipeline: resolution violated, need h*<track_band> <= 0.5");
      const auto lin = sample_lin_path(ns, grid);
      const ObjectTrajectory wick = wick_square(lin);
      const ObjectTrajectory duh = spec.flow == Flow::wave
                                       ? duhamel_wave(wick, track)
                                       : duhamel_heat(wick, spec.lower_limit, spec.T_burn, track);
      for (int k : tidx) {
        std::vector<cplx> row(canon.size());
        for (std::size_t i = 0; i < canon.size(); ++i)
          row[i] = resonant_coefficient(duh.fields[k], lin.fields[k], canon[i]);
        rows.push_back(std::move(row));
      }
      break;
    }
  }
  std::vector<cplx> out(times.size() * modes.size());
  for (std::size_t j = 0; j < times.size(); ++j)
    for (std::size_t i = 0; i < modes.size(); ++i)
      out[j * modes.size() + i] = flip[i] ? std::conj(rows[j][i]) : rows[j][i];
  return out;
}

const MomentEntry& MomentTable::find(FreqIndex n, double t) const {
  for (const auto& e : entries)
    if (e.n == n && std::abs(e.t - t) < 1e-12) return e;
  throw std::out_of_range("MomentTable: key not present");
}

MomentTable summarize_samples(const std::vector<FreqIndex>& modes, const std::vector<double>& times,
                              std::vector<std::vector<double>> samples, bool keep_samples) {
  const std::size_t R = samples.size();
  if (R < 2) throw std::invalid_argument("moment table: need at least 2 replicas");
  MomentTable table;
  const std::size_t K = times.size() * modes.size();
  for (std::size_t key = 0; key < K; ++key) {
    double sum = 0.0;
    for (std::size_t r = 0; r < R; ++r) sum += samples[r][key];
    const double mean = sum / R;
    double ss = 0.0;
    for (std::size_t r = 0; r < R; ++r) ss += (samples[r][key] - mean) * (samples[r][key] - mean);
    const double sd = std::sqrt(ss / (R - 1));
    table.entries.push_back({modes[key % modes.size()], times[key / modes.size()], mean,
                             sd / std::sqrt(static_cast<double>(R)), static_cast<int>(R)});
  }
  if (keep_samples) table.samples = std::move(samples);
  return table;
}

MomentTable mc_moment(const PipelineSpec& spec, const std::vector<FreqIndex>& modes,
                      const std::vector<double>& times, int replicas, int workers,
                      bool keep_samples) {
  if (replicas < 2) throw std::invalid_argument("mc_moment: need at least 2 replicas");
  std::vector<std::vector<double>> samples(replicas);
  parallel_for(replicas, workers, [&](std::size_t r) {
    const auto v = evaluate_object(spec, r, modes, times);
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = std::norm(v[i]);
    samples[r] = std::move(sq);
  });
  return summarize_samples(modes, times, std::move(samples), keep_samples);
}

MeanReport mc_mean(const PipelineSpec& spec, FreqIndex n, double t, int replicas, int workers) {
  if (replicas < 2) throw std::invalid_argument("mc_mean: need at least 2 replicas");
  std::vector<cplx> vals(replicas);
  parallel_for(replicas, workers, [&](std::size_t r) { vals[r] = evaluate_object(spec, r, {n}, {t})[0]; });
  cplx sum{};
  for (const auto& v : vals) sum += v;
  const cplx mean = sum / static_cast<double>(replicas);
  double sre = 0.0, sim = 0.0;
  for (const auto& v : vals) {
    sre += (v.real() - mean.real()) * (v.real() - mean.real());
    sim += (v.imag() - mean.imag()) * (v.imag() - mean.imag());
  }
  MeanReport rep;
  rep.mean = mean;
  rep.se_re = std::sqrt(sre / (replicas - 1) / replicas);
  rep.se_im = std::sqrt(sim / (replicas - 1) / replicas);
  const double zr = rep.se_re > 0 ? std::abs(mean.real()) / rep.se_re : 0.0;
  const double zi = rep.se_im > 0 ? std::abs(mean.imag()) / rep.se_im : 0.0;
  rep.z = std::max(zr, zi);
  return rep;
}

namespace {

DecayCurve bucketize(const MomentTable& table, double t, const std::vector<double>& edges,
                     bool shells) {
  std::map<std::int64_t, std::vector<const MomentEntry*>> by_shell;
  for (const auto& e : table.entries)
    if (std::abs(e.t - t) < 1e-12) by_shell[e.n.norm2()].push_back(&e);
  if (by_shell.empty()) throw std::invalid_argument("annulus_average: no entries at the requested time");
  DecayCurve curve;
  auto emit = [&](const std::vector<const MomentEntry*>& members) {
    CurvePoint p;
    double var = 0.0;
    for (const auto* e : members) {
      p.bracket += jbracket(e->n);
      p.value += e->mean;
      var += e->se * e->se;
    }
    const double m = static_cast<double>(members.size());
    p.bracket /= m;
    p.value /= m;
    p.se = std::sqrt(var) / m;
    p.modes = static_cast<int>(members.size());
    curve.push_back(p);
  };
  if (shells) {
    for (const auto& [r2, members] : by_shell) emit(members);
    return curve;
  }
  if (edges.size() < 2) throw std::invalid_argument("annulus_average: need at least two edges");
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    std::vector<const MomentEntry*> members;
    for (const auto& [r2, es] : by_shell) {
      const double w = std::sqrt(1.0 + static_cast<double>(r2));
      if (w > edges[b] && w <= edges[b + 1]) members.insert(members.end(), es.begin(), es.end());
    }
    if (members.empty())
      throw std::invalid_argument("annulus_average: empty bucket (" + std::to_string(edges[b]) + ", " +
                                  std::to_string(edges[b + 1]) + "]");
    emit(members);
  }
  return curve;
}

}  // namespace

DecayCurve annulus_average(const MomentTable& table, double t) { return bucketize(table, t, {}, true); }

DecayCurve annulus_average(const MomentTable& table, double t, const std::vector<double>& edges) {
  return bucketize(table, t, edges, false);
}

std::vector<double> log_edges(double lo, double hi, int per_octave) {
  if (!(lo > 0.0 && hi > lo) || per_octave < 1) throw std::invalid_argument("log_edges: bad range");
  const int n = static_cast<int>(std::ceil(std::log2(hi / lo) * per_octave - 1e-9));
  std::vector<double> e(n + 1);
  for (int k = 0; k <= n; ++k) e[k] = lo * std::pow(hi / lo, static_cast<double>(k) / n);
  return e;
}

ExponentFit fit_exponent(const DecayCurve& curve, double lo, double hi) {
  std::vector<double> xs, ys;
  for (const auto& p : curve)
    if (p.bracket >= lo - 1e-12 && p.bracket <= hi + 1e-12) {
      if (!(p.value > 0.0)) throw std::invalid_argument("fit_exponent: non-positive variance in range");
      xs.push_back(std::log(p.bracket));
      ys.push_back(std::log(p.value));
    }
  const std::size_t m = xs.size();
  if (m < 4)
    throw std::invalid_argument("fit_exponent: need >= 4 buckets in range, found " + std::to_string(m));
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) mx += xs[i], my += ys[i];
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  const double icpt = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ys[i] - icpt - fit.slope * xs[i];
    sse += r * r;
  }
  fit.slope_stderr = m > 2 ? std::sqrt(sse / (m - 2) / sxx) : 0.0;
  fit.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
  fit.s0 = -(fit.slope + 2) / 2;
  fit.fit_lo = lo;
  fit.fit_hi = hi;
  fit.buckets = static_cast<int>(m);
  return fit;
}

ZReport compare_to_oracle(const MomentTable& table, const std::vector<double>& oracle,
                          double threshold) {
  if (oracle.size() != table.entries.size())
    throw std::invalid_argument("compare_to_oracle: oracle values do not match the table keys");
  ZReport rep;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    const auto& e = table.entries[i];
    ZEntry z{e.n, e.t, e.mean, e.se, oracle[i], 0.0};
    if (e.se > 0.0)
      z.z = (e.mean - oracle[i]) / e.se;
    else
      z.z = e.mean == oracle[i] ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), e.mean - oracle[i]);
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z.z));
    if (std::abs(z.z) > threshold) rep.offending.push_back(z);
    rep.entries.push_back(z);
  }
  rep.pass = rep.offending.empty();
  return rep;
}

std::string_view growth_name(GrowthClass g) {
  switch (g) {
    case GrowthClass::bounded: return "bounded";
    case GrowthClass::logarithmic: return "logarithmic";
    case GrowthClass::power: return "power";
  }
  return "?";
}

namespace {

/// Weighted LS y ~ a + b f with weights 1/y^2; returns the relative RMS residual.
double fit_two(const std::vector<double>& f, const std::vector<double>& y, double& a, double& b) {
  double s00 = 0, s01 = 0, s11 = 0, t0 = 0, t1 = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double w = 1.0 / (y[i] * y[i]);
    s00 += w;
    s01 += w * f[i];
    s11 += w * f[i] * f[i];
    t0 += w * y[i];
    t1 += w * y[i] * f[i];
  }
  const double det = s00 * s11 - s01 * s01;
  if (std::abs(det) < 1e-300) {
    a = t0 / s00;
    b = 0.0;
  } else {
    a = (t0 * s11 - t1 * s01) / det;
    b = (s00 * t1 - s01 * t0) / det;
  }
  double ss = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = (a + b * f[i]) / y[i] - 1.0;
    ss += r * r;
  }
  return std::sqrt(ss / y.size());
}

}  // namespace

GrowthFit growth_fit(const std::vector<double>& N, const std::vector<double>& values, double min_rate) {
  if (!(min_rate > 0.0 && min_rate < 4.0)) throw std::invalid_argument("growth_fit: min_rate must lie in (0, 4)");
  if (N.size() != values.size()) throw std::invalid_argument("growth_fit: size mismatch");
  if (N.size() < 5) throw std::invalid_argument("growth_fit: need at least 5 values of N");
  for (std::size_t i = 0; i < N.size(); ++i)
    if (!(N[i] > 0.0) || values[i] == 0.0 || !std::isfinite(values[i]))
      throw std::invalid_argument("growth_fit: values must be finite and non-zero, N positive");
  GrowthFit g;
  const std::size_t m = N.size();

  // Bounded: a + b N^{-c}.
  g.score_bounded = std::numeric_limits<double>::infinity();
  std::vector<double> f(m);
  const int steps = static_cast<int>(std::floor((4.0 - min_rate) / 0.01 + 1e-9));
  for (int ic = 0; ic <= steps; ++ic) {
    const double c = min_rate + 0.01 * ic;
    for (std::size_t i = 0; i < m; ++i) f[i] = std::pow(N[i], -c);
    double a, b;
    const double s = fit_two(f, values, a, b);
    if (s < g.score_bounded) {
      g.score_bounded = s;
      g.bounded_rate = c;
    }
  }

  // Logarithmic: a + b log N.
  for (std::size_t i = 0; i < m; ++i) f[i] = std::log(N[i]);
  {
    double a, b;
    g.score_log = fit_two(f, values, a, b);
    g.log_slope = b;
  }

  // Power: a N^p, fitted in log space.
  g.score_power = std::numeric_limits<double>::infinity();
  const bool positive = std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
  if (positive) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < m; ++i) mx += std::log(N[i]), my += std::log(values[i]);
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
      sxx += (std::log(N[i]) - mx) * (std::log(N[i]) - mx);
      sxy += (std::log(N[i]) - mx) * (std::log(values[i]) - my);
    }
    const double p = sxy / sxx;
    const double la = my - p * mx;
    double ss = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = std::exp(la + p * std::log(N[i])) / values[i] - 1.0;
      ss += r * r;
    }
    g.score_power = std::sqrt(ss / m);
    g.exponent = p;
  }

  g.classification = GrowthClass::bounded;
  double best = g.score_bounded;
  if (g.score_log < best) {
    best = g.score_log;
    g.classification = GrowthClass::logarithmic;
  }
  if (g.score_power < best) g.classification = GrowthClass::power;
  return g;
}

CauchyReport cauchy_diagnostic(const PipelineSpec& spec, const std::vector<int>& ladder, double s,
                               const std::vector<double>& times, int replicas, int track_band,
                               int workers) {
  if (ladder.size() < 2) throw std::invalid_argument("cauchy_diagnostic: need at least two levels");
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i)
    if (ladder[i + 1] <= ladder[i]) throw std::invalid_argument("cauchy_diagnostic: ladder must increase");
  if (replicas < 2) throw std::invalid_argument("cauchy_diagnostic: need at least 2 replicas");
  if (times.empty()) throw std::invalid_argument("cauchy_diagnostic: need at least one time");
  if (spec.object == ObjectKind::res)
    throw std::invalid_argument("cauchy_diagnostic: supported objects are lin, wick, duh");

  const int top = ladder.back();
  const double t_max = *std::max_element(times.begin(), times.end());
  const TimeGrid grid = pipeline_grid(spec, t_max);
  std::vector<int> tidx;
  for (double t : times) tidx.push_back(grid.index_of(t));
  const std::size_t L = ladder.size();

  if (spec.object == ObjectKind::duh && spec.flow == Flow::wave) {
    const int band = track_band > 0 ? track_band : 2 * top;
    if (spec.h > wave_resolution_limit(band) * (1 + 1e-12))
      throw std::invalid_argument("cauchy_diagnostic: resolution violated, need h*<track_band> <= 0.5");
  }

  // samples[r][level] = sup_t || X_{L+1} - X_L ||^2_{H^s}
  std::vector<std::vector<double>> samples(replicas);
  parallel_for(replicas, workers, [&](std::size_t r) {
    const NoiseSpec ns{spec.alpha, top, spec.flow, spec.seed, r};
    const ObjectTrajectory lin = sample_lin_path(ns, grid);
    // level fields at every requested time
    std::vector<std::vector<SpectralField>> level(L);
    for (std::size_t l = 0; l < L; ++l) {
      const int Nl = ladder[l];
      if (spec.object == ObjectKind::lin) {
        for (int k : tidx) level[l].push_back(project(lin.fields[k], Nl));
        continue;
      }
      const auto ct = counterterm_series(spec.flow, Nl, spec.alpha, grid);
      const int band = track_band > 0 ? std::min(track_band, 2 * Nl) : 2 * Nl;
      if (spec.object == ObjectKind::wick) {
        for (int k : tidx) level[l].push_back(project(wick_field(project(lin.fields[k], Nl), ct[k]), band));
        continue;
      }
      ObjectTrajectory wick;
      wick.kind = ObjectKind::wick;
      wick.flow = spec.flow;
      wick.alpha = spec.alpha;
      wick.N = Nl;
      wick.grid = grid;
      for (int k = 0; k < grid.count; ++k)
        wick.fields.push_back(project(wick_field(project(lin.fields[k], Nl), ct[k]), band));
      const ObjectTrajectory duh = spec.flow == Flow::wave
                                       ? duhamel_wave(wick, band)
                                       : duhamel_heat(wick, spec.lower_limit, spec.T_burn, band);
      for (int k : tidx) level[l].push_back(duh.fields[k]);
    }
    std::vector<double> d(L - 1, 0.0);
    for (std::size_t l = 0; l + 1 < L; ++l)
      for (std::size_t j = 0; j < tidx.size(); ++j) {
        const double v = sobolev_norm(level[l + 1][j] - level[l][j], s);
        d[l] = std::max(d[l], v * v);
      }
    samples[r] = std::move(d);
  });

  CauchyReport rep;
  for (std::size_t l = 0; l + 1 < L; ++l) {
    double sum = 0.0;
    for (const auto& v : samples) sum += v[l];
    const double mean = sum / replicas;
    double ss = 0.0;
    for (const auto& v : samples) ss += (v[l] - mean) * (v[l] - mean);
    CauchyLevel lev;
    lev.N = ladder[l];
    lev.mean_sq = mean;
    lev.se = std::sqrt(ss / (replicas - 1) / replicas);
    lev.decreased = l == 0 || mean <= rep.levels.back().mean_sq;
    rep.all_decreasing = rep.all_decreasing && lev.decreased;
    rep.levels.push_back(lev);
  }
  return rep;
}

}  // namespace wickwave

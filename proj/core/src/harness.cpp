#include "wickwave/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wickwave/oracles.hpp"
#include "wickwave/parallel.hpp"

namespace wickwave {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- parsing

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string unquote(const std::string& raw) {
  std::string s = trim(raw);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
  throw std::invalid_argument("config: key '" + key + "' has invalid value '" + value + "' (expected " +
                              expected + ")");
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = unquote(raw);
  try {
    const auto slash = s.find('/');
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const std::string a = trim(s.substr(0, slash)), b = trim(s.substr(slash + 1));
      std::size_t ua = 0, ub = 0;
      const double num = std::stod(a, &ua), den = std::stod(b, &ub);
      if (ua != a.size() || ub != b.size() || den == 0.0) bad_value(key, raw, "a number");
      return num / den;
    }
    const double v = std::stod(s, &used);
    if (used != s.size()) bad_value(key, raw, "a number");
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, raw, "a number");
  }
}

long long to_integer(const std::string& key, const std::string& raw) {
  const std::string s = unquote(raw);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) bad_value(key, raw, "an integer");
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, raw, "an integer");
  }
}

int to_int(const std::string& key, const std::string& raw) {
  const long long v = to_integer(key, raw);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    bad_value(key, raw, "an integer in int range");
  return static_cast<int>(v);
}

std::uint64_t to_u64(const std::string& key, const std::string& raw) {
  const std::string s = unquote(raw);
  if (s.empty() || s.front() == '-') bad_value(key, raw, "an unsigned 64-bit integer");
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used, 0);
    if (used != s.size()) bad_value(key, raw, "an unsigned 64-bit integer");
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, raw, "an unsigned 64-bit integer");
  }
}

/// Top-level elements of "[a, b, [c, d]]".
std::vector<std::string> split_list(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') bad_value(key, raw, "an array [...]");
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const char c = s[i];
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (depth < 0) bad_value(key, raw, "a balanced array");
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) bad_value(key, raw, "a balanced array");
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

bool is_none(const std::string& raw) {
  const std::string s = unquote(raw);
  return s == "none" || s.empty();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, class F>
std::string list_text(const std::vector<T>& v, F&& each) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += each(v[i]);
  }
  return s + "]";
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string qstr(std::string_view s) { return "\"" + std::string(s) + "\""; }

const std::vector<std::string> kExperiments = {"moments", "fit",   "diverge",    "sharpness",
                                               "cauchy",  "solve", "reconstruct"};

void check_choice(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
  std::string list;
  for (const char* a : allowed) {
    if (value == a) return;
    if (!list.empty()) list += "|";
    list += a;
  }
  bad_value(key, value, list);
}

}  // namespace

// ---------------------------------------------------------------- config

std::vector<double> ExperimentConfig::eval_times() const {
  if (!times.empty()) return times;
  return {horizon()};
}

double ExperimentConfig::horizon() const { return M > 0 ? t0 + (M - 1) * h : T; }

void apply_setting(ExperimentConfig& c, const std::string& key_raw, const std::string& value) {
  const std::string key = trim(key_raw);
  const std::string s = unquote(value);
  if (key == "experiment") {
    if (std::find(kExperiments.begin(), kExperiments.end(), s) == kExperiments.end())
      bad_value(key, value, "moments|fit|diverge|sharpness|cauchy|solve|reconstruct");
    c.experiment = s;
  } else if (key == "flow") {
    c.flow = parse_flow(s);
  } else if (key == "object") {
    c.object = parse_object(s);
  } else if (key == "alpha") {
    c.alpha = to_double(key, value);
  } else if (key == "N") {
    c.N = to_int(key, value);
  } else if (key == "N_ladder") {
    c.N_ladder.clear();
    for (const auto& e : split_list(key, value)) c.N_ladder.push_back(to_int(key, e));
  } else if (key == "d") {
    c.d = to_int(key, value);
  } else if (key == "t0") {
    c.t0 = to_double(key, value);
  } else if (key == "h") {
    c.h = to_double(key, value);
  } else if (key == "M") {
    c.M = to_int(key, value);
  } else if (key == "T") {
    c.T = to_double(key, value);
  } else if (key == "times") {
    c.times.clear();
    for (const auto& e : split_list(key, value)) c.times.push_back(to_double(key, e));
  } else if (key == "modes") {
    c.modes.clear();
    for (const auto& e : split_list(key, value)) {
      const auto xy = split_list(key, e);
      if (xy.size() != 2) bad_value(key, value, "an array of [n_x, n_y] pairs");
      c.modes.push_back({to_int(key, xy[0]), to_int(key, xy[1])});
    }
  } else if (key == "track_band") {
    c.track_band = to_int(key, value);
  } else if (key == "band") {
    c.band = to_int(key, value);
  } else if (key == "replicas" || key == "R") {
    c.replicas = to_int(key, value);
  } else if (key == "seed") {
    c.seed = to_u64(key, value);
  } else if (key == "workers") {
    c.workers = to_int(key, value);
  } else if (key == "out") {
    c.out = s;
  } else if (key == "source") {
    check_choice(key, s, {"oracle", "mc"});
    c.source = s;
  } else if (key == "fit_modes") {
    check_choice(key, s, {"axis", "rays", "disk"});
    c.fit_modes = s;
  } else if (key == "ray_step") {
    c.ray_step = to_int(key, value);
  } else if (key == "buckets") {
    check_choice(key, s, {"auto", "log", "shell"});
    c.buckets = s;
  } else if (key == "per_octave") {
    c.per_octave = to_int(key, value);
  } else if (key == "fit_lo") {
    c.fit_lo = to_double(key, value);
  } else if (key == "fit_hi") {
    c.fit_hi = to_double(key, value);
  } else if (key == "tolerance") {
    c.tolerance = to_double(key, value);
  } else if (key == "expected_s0") {
    c.expected_s0 = is_none(value) ? std::nullopt : std::optional<double>(to_double(key, value));
  } else if (key == "gain_reference") {
    c.gain_reference = is_none(value) ? std::nullopt : std::optional<double>(to_double(key, value));
  } else if (key == "gain_min") {
    c.gain_min = to_double(key, value);
  } else if (key == "z_max") {
    c.z_max = to_double(key, value);
  } else if (key == "quad_points") {
    c.quad_points = is_none(value) ? std::nullopt : std::optional<int>(to_int(key, value));
  } else if (key == "lower_limit") {
    check_choice(key, s, {"zero", "minus_infinity"});
    c.lower_limit = s;
  } else if (key == "T_burn") {
    c.T_burn = to_double(key, value);
  } else if (key == "expect") {
    check_choice(key, s, {"auto", "bounded", "logarithmic", "power", "decreasing", "not_decreasing"});
    c.expect = s;
  } else if (key == "p_tolerance") {
    c.p_tolerance = to_double(key, value);
  } else if (key == "stable_between") {
    c.stable_between.clear();
    if (!is_none(value))
      for (const auto& e : split_list(key, value)) c.stable_between.push_back(to_int(key, e));
  } else if (key == "stable_tol") {
    c.stable_tol = to_double(key, value);
  } else if (key == "band_factor") {
    c.band_factor = to_double(key, value);
  } else if (key == "s_norm") {
    c.s_norm = to_double(key, value);
  } else if (key == "target") {
    check_choice(key, s, {"object", "solution"});
    c.target = s;
  } else if (key == "expansion") {
    c.expansion = parse_expansion(s);
  } else if (key == "amplitude") {
    c.amplitude = to_double(key, value);
  } else if (key == "blowup_guard") {
    c.blowup_guard = to_double(key, value);
  } else if (key == "refinements") {
    c.refinements = to_int(key, value);
  } else if (key == "rel_tol") {
    c.rel_tol = to_double(key, value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line, pending_key, pending_value;
  int depth = 0, lineno = 0, start_line = 0;
  auto strip_comment = [](const std::string& l) {
    bool q = false;
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (l[i] == '"') q = !q;
      if (l[i] == '#' && !q) return l.substr(0, i);
    }
    return l;
  };
  auto depth_of = [](const std::string& v) {
    int d = 0;
    for (char ch : v) d += (ch == '[') - (ch == ']');
    return d;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (depth > 0) {
      pending_value += " " + body;
      depth = depth_of(pending_value);
      if (depth == 0) apply_setting(base, pending_key, pending_value);
      continue;
    }
    if (body.empty()) continue;
    if (body.front() == '[' && body.back() == ']' && body.find('=') == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": tables are not supported, use flat key = value");
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    pending_key = trim(body.substr(0, eq));
    pending_value = trim(body.substr(eq + 1));
    start_line = lineno;
    depth = depth_of(pending_value);
    if (depth == 0) apply_setting(base, pending_key, pending_value);
  }
  if (depth != 0)
    throw std::invalid_argument("config line " + std::to_string(start_line) + ": unterminated array");
  return base;
}

std::map<std::string, std::string> config_echo(const ExperimentConfig& c) {
  auto opt_d = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("\"none\""); };
  auto ints = [](const std::vector<int>& v) { return list_text(v, [](int x) { return std::to_string(x); }); };
  std::map<std::string, std::string> m;
  m["experiment"] = qstr(c.experiment);
  m["flow"] = qstr(flow_name(c.flow));
  m["object"] = qstr(object_name(c.object));
  m["alpha"] = fmt(c.alpha);
  m["N"] = std::to_string(c.N);
  m["N_ladder"] = ints(c.N_ladder);
  m["d"] = std::to_string(c.d);
  m["t0"] = fmt(c.t0);
  m["h"] = fmt(c.h);
  m["M"] = std::to_string(c.M);
  m["T"] = fmt(c.T);
  m["times"] = list_text(c.times, [](double t) { return fmt(t); });
  m["modes"] = list_text(c.modes, [](FreqIndex n) {
    return "[" + std::to_string(n.x) + ", " + std::to_string(n.y) + "]";
  });
  m["track_band"] = std::to_string(c.track_band);
  m["band"] = std::to_string(c.band);
  m["replicas"] = std::to_string(c.replicas);
  m["seed"] = std::to_string(c.seed);
  m["workers"] = std::to_string(c.workers);
  m["out"] = qstr(c.out);
  m["source"] = qstr(c.source);
  m["fit_modes"] = qstr(c.fit_modes);
  m["ray_step"] = std::to_string(c.ray_step);
  m["buckets"] = qstr(c.buckets);
  m["per_octave"] = std::to_string(c.per_octave);
  m["fit_lo"] = fmt(c.fit_lo);
  m["fit_hi"] = fmt(c.fit_hi);
  m["tolerance"] = fmt(c.tolerance);
  m["expected_s0"] = opt_d(c.expected_s0);
  m["gain_reference"] = opt_d(c.gain_reference);
  m["gain_min"] = fmt(c.gain_min);
  m["z_max"] = fmt(c.z_max);
  m["quad_points"] = c.quad_points ? std::to_string(*c.quad_points) : std::string("\"none\"");
  m["lower_limit"] = qstr(c.lower_limit);
  m["T_burn"] = fmt(c.T_burn);
  m["expect"] = qstr(c.expect);
  m["p_tolerance"] = fmt(c.p_tolerance);
  m["stable_between"] = ints(c.stable_between);
  m["stable_tol"] = fmt(c.stable_tol);
  m["band_factor"] = fmt(c.band_factor);
  m["s_norm"] = fmt(c.s_norm);
  m["target"] = qstr(c.target);
  m["expansion"] = qstr(expansion_name(c.expansion));
  m["amplitude"] = fmt(c.amplitude);
  m["blowup_guard"] = fmt(c.blowup_guard);
  m["refinements"] = std::to_string(c.refinements);
  m["rel_tol"] = fmt(c.rel_tol);
  return m;
}

// ---------------------------------------------------------------- validation

namespace {

std::vector<FreqIndex> fit_mode_set(const ExperimentConfig& c) {
  if (!c.modes.empty()) return c.modes;
  std::vector<FreqIndex> modes;
  auto inside = [&](FreqIndex n) {
    const double w = jbracket(n);
    return w >= c.fit_lo * (1 - 1e-12) && w <= c.fit_hi * (1 + 1e-12);
  };
  if (c.fit_modes == "disk") {
    for (FreqIndex n : half_disk_modes(static_cast<int>(std::ceil(c.fit_hi))))
      if (inside(n)) modes.push_back(n);
    return modes;
  }
  const int kmax = static_cast<int>(std::ceil(c.fit_hi)) + 1;
  for (int k = 0; k <= kmax; k += c.ray_step)
    if (inside({k, 0})) modes.push_back({k, 0});
  if (c.fit_modes == "rays")
    for (int k = 0; k <= kmax; k += c.ray_step)
      if (inside({k, k})) modes.push_back({k, k});
  return modes;
}

/// Band the Monte-Carlo pipeline tracks for duh/res at the experiment's modes.
int mc_track_band(const ExperimentConfig& c) {
  std::vector<FreqIndex> modes = c.modes;
  if (c.experiment == "fit") modes = fit_mode_set(c);
  if (modes.empty()) modes = {{0, 0}, {1, 0}, {3, 2}};
  double r = 0.0;
  for (FreqIndex n : modes) r = std::max(r, std::sqrt(double(n.norm2())));
  const int maxr = static_cast<int>(std::ceil(r - 1e-12));
  return c.object == ObjectKind::res ? std::min(2 * c.N, c.N + maxr) : maxr;
}

bool needs_wave_duh(const ExperimentConfig& c) {
  if (c.flow != Flow::wave) return false;
  const bool duh_like = c.object == ObjectKind::duh || c.object == ObjectKind::res;
  if (c.experiment == "solve" || c.experiment == "reconstruct") return true;
  if (c.experiment == "cauchy") return c.target == "solution" || duh_like;
  if (c.experiment == "moments") return duh_like;
  if (c.experiment == "fit" || c.experiment == "diverge") return duh_like && c.source == "mc";
  return false;
}

bool multiple_of(double t, double h) {
  const double k = std::round(t / h);
  return std::abs(t - k * h) <= 1e-9 * std::max(1.0, std::abs(t));
}

std::vector<int> default_ladder(const ExperimentConfig& c) {
  if (!c.N_ladder.empty()) return c.N_ladder;
  if (c.experiment == "cauchy") return {8, 16, 32, 64};
  return {8, 16, 32, 64, 128, 256};
}

}  // namespace

Diagnostics validate(const ExperimentConfig& c) {
  Diagnostics d;
  auto err = [&](std::string m) { d.errors.push_back(std::move(m)); };
  auto warn = [&](std::string m) { d.warnings.push_back(std::move(m)); };

  if (c.d != 2) err("d = " + std::to_string(c.d) + " is not supported; only d = 2 is implemented");
  if (!(c.alpha > 0.0)) err("alpha must be positive");
  if (c.N < 1) err("N must be >= 1");
  if (!(c.h > 0.0)) err("h must be positive");
  if (c.t0 != 0.0) err("t0 must be 0 (paths start at t = 0)");
  if (c.M < 0) err("M must be >= 0 (0: use T)");
  if (!(c.horizon() > 0.0)) err("the horizon T (or t0 + (M-1) h) must be positive");
  if (c.track_band < 0) err("track_band must be >= 0 (0: 2N)");
  if (c.band < 0) err("band must be >= 0 (0: 2N)");
  if (c.workers < 0) err("workers must be >= 0 (0: hardware concurrency)");
  if (c.ray_step < 1) err("ray_step must be >= 1");
  if (c.per_octave < 1) err("per_octave must be >= 1");
  if (!(c.tolerance > 0.0)) err("tolerance must be positive");
  if (!(c.z_max > 0.0)) err("z_max must be positive");
  if (!(c.T_burn > 0.0)) err("T_burn must be positive");
  if (c.quad_points && *c.quad_points < 16) err("quad_points must be >= 16");
  if (c.h > 0.0) {
    for (double t : c.eval_times()) {
      if (t < 0.0 || t > c.horizon() + 1e-12)
        err("time " + fmt_short(t) + " lies outside [0, " + fmt_short(c.horizon()) + "]");
      else if (!multiple_of(t, c.h))
        err("time " + fmt_short(t) + " is not a multiple of h = " + fmt_short(c.h));
    }
  }
  const bool mc = c.experiment == "moments" || c.experiment == "cauchy" ||
                  ((c.experiment == "fit" || c.experiment == "diverge") && c.source == "mc");
  if (mc && c.replicas < 2) err("replicas must be >= 2 for Monte-Carlo estimates");

  if (needs_wave_duh(c) && c.h > 0.0) {
    int track = c.effective_track_band();
    if (c.experiment == "solve" || c.experiment == "reconstruct" || (c.experiment == "cauchy" && c.target == "solution"))
      track = std::max(track, c.effective_band());
    else if (c.experiment != "cauchy")
      track = mc_track_band(c);
    const double limit = wave_resolution_limit(track);
    if (c.h > limit * (1.0 + 1e-12))
      err("resolution: need h*<track_band> <= 0.5, got h = " + fmt_short(c.h) + " with track_band = " +
          std::to_string(track) + " (use h <= " + fmt_short(limit) + " or a smaller track_band)");
  }

  if (c.experiment == "fit") {
    if (!(c.fit_lo > 0.0 && c.fit_hi > c.fit_lo)) err("fit window needs 0 < fit_lo < fit_hi");
    if (c.object == ObjectKind::wick || c.object == ObjectKind::duh) {
      const double thr = divergence_threshold(c.object, c.flow);
      if (c.alpha >= thr)
        warn("alpha = " + fmt_short(c.alpha) + " is above divergence threshold " + (thr == 0.5 ? "1/2" : fmt_short(thr)) +
             " for " + std::string(object_name(c.object)) + " (" + std::string(flow_name(c.flow)) +
             "); the N -> infinity limit does not exist");
    }
    if (c.object == ObjectKind::res && c.source == "oracle") err("fit: no oracle for res, use source = mc");
  }
  if (c.experiment == "diverge") {
    const auto ladder = default_ladder(c);
    if (ladder.size() < 5) err("diverge: N_ladder needs >= 5 levels");
    if (c.object == ObjectKind::res && c.source == "oracle") err("diverge: no oracle for res, use source = mc");
  }
  if (c.experiment == "cauchy") {
    const auto ladder = default_ladder(c);
    if (ladder.size() < 2) err("cauchy: N_ladder needs >= 2 levels");
    if (c.target == "object" && c.object == ObjectKind::res) err("cauchy: supported objects are lin, wick, duh");
  }
  if (c.experiment == "sharpness") {
    if (c.flow != Flow::wave || c.object != ObjectKind::duh)
      warn("sharpness always evaluates the wave duh ratio; flow/object are ignored");
    if (!(c.alpha < 0.5)) err("sharpness: alpha must lie in (0, 1/2)");
    if (!(c.band_factor > 1.0)) err("band_factor must exceed 1");
  }
  if (c.experiment == "reconstruct" && c.refinements < 2) err("reconstruct: refinements must be >= 2");
  if ((c.experiment == "solve" || c.experiment == "reconstruct" || c.target == "solution") &&
      c.effective_band() < 2)
    err("solver band must be >= 2");
  if (c.lower_limit == "minus_infinity" && c.flow == Flow::wave)
    err("lower_limit = minus_infinity applies to the heat flow only");
  return d;
}

// ---------------------------------------------------------------- output

std::string CsvTable::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
    s += "\n";
  }
  return s;
}

namespace {

struct Outcome {
  std::vector<CsvTable> tables;
  json summary;
  bool pass = false;
};

PipelineSpec pipeline_of(const ExperimentConfig& c, int N) {
  PipelineSpec p;
  p.flow = c.flow;
  p.object = c.object;
  p.alpha = c.alpha;
  p.N = N;
  p.h = c.h;
  p.seed = c.seed;
  p.lower_limit = c.lower_limit == "minus_infinity" ? LowerLimit::minus_infinity : LowerLimit::zero;
  p.T_burn = c.T_burn;
  return p;
}

/// Oracle E|X(n,t)|^2 at truncation N, or NaN when no oracle exists.
double oracle_value(const ExperimentConfig& c, ObjectKind object, FreqIndex n, double t, int N) {
  const bool wave = c.flow == Flow::wave;
  switch (object) {
    case ObjectKind::lin:
      if (!in_disk(n, N)) return 0.0;
      return wave ? wave_cov_sigma(n, t, t, c.alpha) : heat_cov_kappa(n, t, t, c.alpha);
    case ObjectKind::wick:
      return (wave ? wave_wick_moment(n, t, N, c.alpha) : heat_wick_moment(n, t, N, c.alpha)).value;
    case ObjectKind::duh:
      if (wave) return wave_duh_moment(n, t, N, c.alpha, c.quad_points).value;
      // A stationary path started at -T_burn has the law of one started at 0, shifted by T_burn.
      return heat_duh_moment(n, c.lower_limit == "minus_infinity" ? t + c.T_burn : t, N, c.alpha).value;
    case ObjectKind::res:
      return std::numeric_limits<double>::quiet_NaN();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string oracle_method(const ExperimentConfig& c, ObjectKind object) {
  if (object == ObjectKind::lin) return "closed_form";
  if (object == ObjectKind::res) return "none";
  if (object == ObjectKind::duh && c.flow == Flow::wave && c.quad_points)
    return std::string(oracle_method_name(OracleMethod::lattice_sum_plus_quadrature));
  return std::string(oracle_method_name(OracleMethod::lattice_sum));
}

json assertion(const std::string& name, double value, const std::string& target, bool pass) {
  return json{{"name", name}, {"value", value}, {"target", target}, {"pass", pass}};
}

/// Evaluates f(i) for i in [0, n) across workers, keeping index order.
template <class F>
std::vector<double> map_ordered(int n, int workers, F&& f) {
  std::vector<double> out(n);
  parallel_for(n, workers, [&](int i) { out[i] = f(i); });
  return out;
}

// ------------------------------------------------------------ moments

Outcome run_moments(const ExperimentConfig& c) {
  std::vector<FreqIndex> modes = c.modes;
  if (modes.empty()) modes = {{0, 0}, {1, 0}, {3, 2}};
  const auto times = c.eval_times();
  const PipelineSpec spec = pipeline_of(c, c.N);
  const MomentTable table = mc_moment(spec, modes, times, c.replicas, c.workers);

  std::vector<double> oracle(table.entries.size());
  for (std::size_t i = 0; i < table.entries.size(); ++i)
    oracle[i] = oracle_value(c, c.object, table.entries[i].n, table.entries[i].t, c.N);

  Outcome o;
  CsvTable csv{"moments", {"n_x", "n_y", "t", "mc_mean", "mc_se", "oracle", "z"}, {}};
  double max_z = 0.0;
  json offending = json::array();
  bool have_oracle = false;
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const auto& e = table.entries[i];
    double z = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(oracle[i])) {
      have_oracle = true;
      z = e.se > 0.0 ? (e.mean - oracle[i]) / e.se : (e.mean == oracle[i] ? 0.0 : HUGE_VAL);
      max_z = std::max(max_z, std::abs(z));
      if (std::abs(z) > c.z_max) offending.push_back({{"n_x", e.n.x}, {"n_y", e.n.y}, {"t", e.t}, {"z", z}});
    }
    csv.rows.push_back({std::to_string(e.n.x), std::to_string(e.n.y), fmt(e.t), fmt(e.mean), fmt(e.se),
                        std::isfinite(oracle[i]) ? fmt(oracle[i]) : "", std::isfinite(z) ? fmt(z) : ""});
  }
  o.tables.push_back(std::move(csv));
  o.pass = !have_oracle || max_z <= c.z_max;
  o.summary["oracle_method"] = oracle_method(c, c.object);
  o.summary["max_abs_z"] = have_oracle ? json(max_z) : json(nullptr);
  o.summary["offending"] = offending;
  o.summary["assertions"] = json::array();
  if (have_oracle)
    o.summary["assertions"].push_back(assertion("max_abs_z", max_z, "<= " + fmt_short(c.z_max), o.pass));
  return o;
}

// ------------------------------------------------------------ fit

/// Configured or predicted s0; empty when the object has no regularity (above threshold).
std::optional<double> predicted_s0(const ExperimentConfig& c) {
  if (c.expected_s0) return *c.expected_s0;
  try {
    return predicted_regularity(c.object, c.flow, c.alpha);
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

Outcome run_fit(const ExperimentConfig& c) {
  const auto modes = fit_mode_set(c);
  if (modes.empty()) throw std::invalid_argument("fit: no modes in the fit window");
  const double t = c.eval_times().front();

  MomentTable table;
  if (c.source == "mc") {
    table = mc_moment(pipeline_of(c, c.N), modes, {t}, c.replicas, c.workers);
  } else {
    const auto vals = map_ordered(static_cast<int>(modes.size()), c.workers,
                                  [&](int i) { return oracle_value(c, c.object, modes[i], t, c.N); });
    for (std::size_t i = 0; i < modes.size(); ++i) table.entries.push_back({modes[i], t, vals[i], 0.0, 0});
  }

  const bool log_buckets = c.buckets == "log" || (c.buckets == "auto" && c.fit_modes == "disk" && c.modes.empty());
  DecayCurve curve = log_buckets
                         ? annulus_average(table, t, log_edges(c.fit_lo * (1 - 1e-9), c.fit_hi, c.per_octave))
                         : annulus_average(table, t);
  const ExponentFit fit = fit_exponent(curve, c.fit_lo * (1 - 1e-9), c.fit_hi * (1 + 1e-9));
  const auto pred = predicted_s0(c);

  Outcome o;
  CsvTable csv{"fit", {"bracket", "value", "se", "modes"}, {}};
  for (const auto& p : curve) csv.rows.push_back({fmt(p.bracket), fmt(p.value), fmt(p.se), std::to_string(p.modes)});
  CsvTable raw{"fit_modes", {"n_x", "n_y", "bracket", "t", "value", "se"}, {}};
  for (const auto& e : table.entries)
    raw.rows.push_back({std::to_string(e.n.x), std::to_string(e.n.y), fmt(jbracket(e.n)), fmt(e.t), fmt(e.mean),
                        fmt(e.se)});
  o.tables.push_back(std::move(csv));
  o.tables.push_back(std::move(raw));

  json asserts = json::array();
  bool pass = true;
  if (pred) {
    const bool within = std::abs(fit.s0 - *pred) <= c.tolerance;
    asserts.push_back(assertion("s0", fit.s0, fmt_short(*pred) + " +/- " + fmt_short(c.tolerance), within));
    pass = within;
  }
  if (c.gain_reference) {
    const bool gain = fit.s0 >= *c.gain_reference + c.gain_min;
    asserts.push_back(assertion("s0_gain", fit.s0 - *c.gain_reference, ">= " + fmt_short(c.gain_min), gain));
    pass = pass && gain;
  }
  o.pass = pass;
  o.summary = {{"s0", fit.s0},
               {"slope", fit.slope},
               {"slope_stderr", fit.slope_stderr},
               {"r_squared", fit.r_squared},
               {"buckets", fit.buckets},
               {"fit_lo", c.fit_lo},
               {"fit_hi", c.fit_hi},
               {"t", t},
               {"predicted_s0", pred ? json(*pred) : json(nullptr)},
               {"source", c.source},
               {"oracle_method", c.source == "oracle" ? oracle_method(c, c.object) : std::string("none")},
               {"assertions", asserts}};
  return o;
}

// ------------------------------------------------------------ diverge

Outcome run_diverge(const ExperimentConfig& c) {
  const auto ladder = default_ladder(c);
  const FreqIndex n = c.modes.empty() ? FreqIndex{0, 0} : c.modes.front();
  const double t = c.eval_times().front();

  std::vector<double> values(ladder.size()), ses(ladder.size(), 0.0);
  if (c.source == "mc") {
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      const auto tab = mc_moment(pipeline_of(c, ladder[i]), {n}, {t}, c.replicas, c.workers);
      values[i] = tab.entries.front().mean;
      ses[i] = tab.entries.front().se;
    }
  } else {
    values = map_ordered(static_cast<int>(ladder.size()), c.workers,
                         [&](int i) { return oracle_value(c, c.object, n, t, ladder[i]); });
  }
  std::vector<double> Nd(ladder.begin(), ladder.end());
  const GrowthFit g = growth_fit(Nd, values);

  std::string expected = c.expect;
  double p_pred = std::numeric_limits<double>::quiet_NaN();
  const double thr = divergence_threshold(c.object, c.flow);
  if (c.alpha > thr + 1e-12) p_pred = predicted_growth_exponent(c.object, c.flow, c.alpha);
  if (expected == "auto") {
    if (std::abs(c.alpha - thr) <= 1e-12) expected = "logarithmic";
    else expected = c.alpha < thr ? "bounded" : "power";
  }
  if (expected != "bounded" && expected != "logarithmic" && expected != "power")
    throw std::invalid_argument("diverge: expect must be auto|bounded|logarithmic|power");

  Outcome o;
  CsvTable csv{"diverge", {"N", "n_x", "n_y", "t", "value", "se"}, {}};
  for (std::size_t i = 0; i < ladder.size(); ++i)
    csv.rows.push_back({std::to_string(ladder[i]), std::to_string(n.x), std::to_string(n.y), fmt(t),
                        fmt(values[i]), fmt(ses[i])});
  o.tables.push_back(std::move(csv));

  json asserts = json::array();
  const std::string got(growth_name(g.classification));
  bool pass = got == expected;
  asserts.push_back(json{{"name", "classification"}, {"value", got}, {"target", expected}, {"pass", pass}});
  if (expected == "power" && std::isfinite(p_pred)) {
    const bool ok = std::abs(g.exponent - p_pred) <= c.p_tolerance;
    asserts.push_back(assertion("exponent", g.exponent, fmt_short(p_pred) + " +/- " + fmt_short(c.p_tolerance), ok));
    pass = pass && ok;
  }
  if (c.stable_between.size() == 2) {
    const auto find = [&](int N) {
      const auto it = std::find(ladder.begin(), ladder.end(), N);
      if (it == ladder.end()) throw std::invalid_argument("diverge: stable_between level not in N_ladder");
      return values[it - ladder.begin()];
    };
    const double a = find(c.stable_between[0]), b = find(c.stable_between[1]);
    const double change = std::abs(b - a) / std::abs(a);
    const bool ok = change < c.stable_tol;
    asserts.push_back(assertion("relative_change_" + std::to_string(c.stable_between[0]) + "_" +
                                    std::to_string(c.stable_between[1]),
                                change, "< " + fmt_short(c.stable_tol), ok));
    pass = pass && ok;
  }
  o.pass = pass;
  o.summary = {{"classification", got},
               {"expected", expected},
               {"exponent", g.exponent},
               {"predicted_exponent", std::isfinite(p_pred) ? json(p_pred) : json(nullptr)},
               {"threshold", thr},
               {"score_bounded", g.score_bounded},
               {"score_log", g.score_log},
               {"score_power", g.score_power},
               {"bounded_rate", g.bounded_rate},
               {"log_slope", g.log_slope},
               {"source", c.source},
               {"assertions", asserts}};
  return o;
}

// ------------------------------------------------------------ sharpness

Outcome run_sharpness(const ExperimentConfig& c) {
  std::vector<FreqIndex> modes = c.modes;
  const double lo = c.fit_lo, hi = c.fit_hi;
  if (modes.empty()) {
    std::vector<int> ks;
    for (int j = 0;; ++j) {
      const int k = static_cast<int>(std::lround(lo * std::pow(2.0, 0.5 * j)));
      if (jbracket({k, 0}) > hi) break;
      if (ks.empty() || k != ks.back()) ks.push_back(k);
    }
    const int top = static_cast<int>(std::floor(std::sqrt(hi * hi - 1.0)));
    if (ks.empty() || ks.back() != top) ks.push_back(top);
    for (int k : ks) modes.push_back({k, 0});
  }
  const double t = c.eval_times().front();
  std::vector<int> Ns(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i)
    Ns[i] = std::max(c.N, static_cast<int>(std::ceil(4.0 * jbracket(modes[i]))));
  const auto ratios = map_ordered(static_cast<int>(modes.size()), c.workers, [&](int i) {
    return wave_duh_sharpness_ratio(modes[i], t, c.alpha, Ns[i], c.quad_points);
  });

  Outcome o;
  CsvTable csv{"sharpness", {"n_x", "n_y", "bracket", "N", "t", "ratio"}, {}};
  double rmin = HUGE_VAL, rmax = 0.0;
  bool positive = true;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    csv.rows.push_back({std::to_string(modes[i].x), std::to_string(modes[i].y), fmt(jbracket(modes[i])),
                        std::to_string(Ns[i]), fmt(t), fmt(ratios[i])});
    positive = positive && ratios[i] > 0.0;
    rmin = std::min(rmin, ratios[i]);
    rmax = std::max(rmax, ratios[i]);
  }
  o.tables.push_back(std::move(csv));
  const double spread = rmin > 0.0 ? rmax / rmin : HUGE_VAL;
  json asserts = json::array();
  asserts.push_back(assertion("min_ratio", rmin, "> 0", positive));
  asserts.push_back(assertion("max_over_min", spread, "<= " + fmt_short(c.band_factor), spread <= c.band_factor));
  o.pass = positive && spread <= c.band_factor;
  o.summary = {{"min_ratio", rmin}, {"max_ratio", rmax}, {"max_over_min", spread}, {"t", t},
               {"s_alpha", s_alpha(c.alpha)}, {"assertions", asserts}};
  return o;
}

// ------------------------------------------------------------ solver helpers

SolveConfig solve_config(const ExperimentConfig& c, int band, double h, Expansion e) {
  SolveConfig s;
  s.flow = c.flow;
  s.expansion = e;
  s.band = band;
  s.h = h;
  s.T = c.horizon();
  s.alpha = c.alpha;
  s.blowup_guard = c.blowup_guard;
  return s;
}

EnhancedOptions enhanced_options(const ExperimentConfig& c) {
  EnhancedOptions e;
  e.lower_limit = c.lower_limit == "minus_infinity" ? LowerLimit::minus_infinity : LowerLimit::zero;
  e.T_burn = c.T_burn;
  return e;
}

// ------------------------------------------------------------ cauchy

Outcome run_cauchy_solution(const ExperimentConfig& c) {
  const auto ladder = default_ladder(c);
  const int top = ladder.back();
  const TimeGrid grid = TimeGrid::covering(0.0, c.horizon(), c.h);
  const std::size_t L = ladder.size() - 1;
  std::vector<std::vector<double>> per(c.replicas, std::vector<double>(L));
  parallel_for(c.replicas, c.workers, [&](int r) {
    const auto path = sample_lin_path({c.alpha, top, c.flow, c.seed, static_cast<std::uint64_t>(r)}, grid);
    std::vector<SolveResult> sol;
    for (int N : ladder) {
      const auto lin = project_trajectory(path, N);
      const InitialData init = smooth_test_data(c.amplitude, std::max(2, std::min(16, N)));
      sol.push_back(solve_direct_truncated(solve_config(c, 2 * N, c.h, Expansion::direct), lin,
                                           counterterm_series(c.flow, N, c.alpha, grid), init));
    }
    for (std::size_t l = 0; l < L; ++l) {
      if (sol[l].blowup || sol[l + 1].blowup) {
        per[r][l] = std::numeric_limits<double>::infinity();
        continue;
      }
      per[r][l] = sup_distance(sol[l + 1].u, sol[l].u, c.s_norm);
    }
  });

  Outcome o;
  CsvTable csv{"cauchy", {"N", "mean", "se", "decreased"}, {}};
  bool all = true;
  double prev = HUGE_VAL;
  json levels = json::array();
  for (std::size_t l = 0; l < L; ++l) {
    double s = 0.0, s2 = 0.0;
    for (int r = 0; r < c.replicas; ++r) s += per[r][l];
    const double mean = s / c.replicas;
    for (int r = 0; r < c.replicas; ++r) s2 += (per[r][l] - mean) * (per[r][l] - mean);
    const double se = c.replicas > 1 ? std::sqrt(s2 / (c.replicas - 1) / c.replicas) : 0.0;
    const bool dec = mean < prev;
    if (l > 0) all = all && dec;
    prev = mean;
    csv.rows.push_back({std::to_string(ladder[l]), fmt(mean), fmt(se), l == 0 ? "1" : (dec ? "1" : "0")});
    levels.push_back({{"N", ladder[l]}, {"mean", mean}, {"se", se}});
  }
  o.tables.push_back(std::move(csv));
  const std::string expect = c.expect == "auto" ? "decreasing" : c.expect;
  o.pass = expect == "not_decreasing" ? !all : all;
  o.summary = {{"target", "solution"}, {"norm_s", c.s_norm}, {"all_decreasing", all}, {"levels", levels},
               {"assertions", json::array({json{{"name", "monotone"}, {"value", all ? "decreasing" : "not_decreasing"},
                                                {"target", expect}, {"pass", o.pass}}})}};
  return o;
}

Outcome run_cauchy(const ExperimentConfig& c) {
  if (c.target == "solution") return run_cauchy_solution(c);
  const auto ladder = default_ladder(c);
  const CauchyReport rep = cauchy_diagnostic(pipeline_of(c, ladder.back()), ladder, c.s_norm, c.eval_times(),
                                             c.replicas, c.track_band, c.workers);
  std::string expect = c.expect;
  if (expect == "auto") {
    expect = "decreasing";
    if (c.object != ObjectKind::lin && c.alpha >= divergence_threshold(c.object, c.flow)) expect = "not_decreasing";
  }
  if (expect != "decreasing" && expect != "not_decreasing")
    throw std::invalid_argument("cauchy: expect must be auto|decreasing|not_decreasing");
  Outcome o;
  CsvTable csv{"cauchy", {"N", "mean", "se", "decreased"}, {}};
  json levels = json::array();
  for (const auto& l : rep.levels) {
    csv.rows.push_back({std::to_string(l.N), fmt(l.mean_sq), fmt(l.se), l.decreased ? "1" : "0"});
    levels.push_back({{"N", l.N}, {"mean", l.mean_sq}, {"se", l.se}});
  }
  o.tables.push_back(std::move(csv));
  o.pass = expect == "decreasing" ? rep.all_decreasing : !rep.all_decreasing;
  o.summary = {{"target", "object"}, {"norm_s", c.s_norm}, {"all_decreasing", rep.all_decreasing},
               {"levels", levels},
               {"assertions", json::array({json{{"name", "monotone"},
                                                {"value", rep.all_decreasing ? "decreasing" : "not_decreasing"},
                                                {"target", expect}, {"pass", o.pass}}})}};
  return o;
}

// ------------------------------------------------------------ solve

Outcome run_solve(const ExperimentConfig& c) {
  const TimeGrid grid = TimeGrid::covering(0.0, c.horizon(), c.h);
  const int B = c.effective_band();
  const InitialData init = smooth_test_data(c.amplitude, std::max(2, std::min(16, B)));
  const NoiseSpec ns{c.alpha, c.N, c.flow, c.seed, 0};
  SolveResult res;
  if (c.expansion == Expansion::direct) {
    const auto lin = sample_lin_path(ns, grid);
    res = solve_direct_truncated(solve_config(c, B, c.h, c.expansion), lin,
                                 counterterm_series(c.flow, c.N, c.alpha, grid), init);
  } else {
    const auto data = build_enhanced_set(ns, grid, c.effective_track_band(), enhanced_options(c));
    res = solve_residual(solve_config(c, B, c.h, c.expansion), data, init);
  }
  Outcome o;
  CsvTable csv{"solve", {"t", "norm_u", "norm_v"}, {}};
  for (std::size_t k = 0; k < res.u.size(); ++k)
    csv.rows.push_back({fmt(grid.time(static_cast<int>(k))), fmt(sobolev_norm(res.u[k], c.s_norm)),
                        fmt(sobolev_norm(res.v[k], c.s_norm))});
  o.tables.push_back(std::move(csv));
  o.pass = !res.blowup;
  o.summary = {{"blowup", res.blowup},
               {"blowup_time", res.blowup_time ? json(*res.blowup_time) : json(nullptr)},
               {"steps", res.u.size()},
               {"expansion", std::string(expansion_name(c.expansion))},
               {"norm_s", c.s_norm},
               {"assertions", json::array({json{{"name", "no_blowup"}, {"value", !res.blowup}, {"target", true},
                                                {"pass", o.pass}}})}};
  return o;
}

// ------------------------------------------------------------ reconstruct

Outcome run_reconstruct(const ExperimentConfig& c) {
  const int levels = c.refinements;
  const int fine_factor = 1 << (levels - 1);
  const double h_fine = c.h / fine_factor;
  const TimeGrid fine = TimeGrid::covering(0.0, c.horizon(), h_fine);
  const auto path = sample_lin_path({c.alpha, c.N, c.flow, c.seed, 0}, fine);
  const int B = c.effective_band();
  const InitialData init = smooth_test_data(c.amplitude, std::max(2, std::min(16, B)));

  struct Row {
    double h, direct_vs_second, first_vs_second, direct_vs_first;
    bool blowup;
  };
  std::vector<Row> rows;
  for (int l = 0; l < levels; ++l) {
    const int factor = fine_factor >> l;
    const double h = c.h / (1 << l);
    auto lin = subsample(path, factor);
    const TimeGrid grid = lin.grid;
    const auto ct = counterterm_series(c.flow, c.N, c.alpha, grid);
    const auto data = build_enhanced_from_lin(lin, c.effective_track_band(), enhanced_options(c));
    const auto second = solve_residual(solve_config(c, B, h, Expansion::second_order), data, init);
    const auto first = solve_residual(solve_config(c, B, h, Expansion::first_order), data, init);
    const auto direct = solve_direct_truncated(solve_config(c, B, h, Expansion::direct), lin, ct, init);
    const bool blow = second.blowup || first.blowup || direct.blowup;
    const double inf = std::numeric_limits<double>::infinity();
    rows.push_back({h, blow ? inf : relative_sup_distance(direct.u, second.u, c.s_norm),
                    blow ? inf : relative_sup_distance(first.u, second.u, c.s_norm),
                    blow ? inf : relative_sup_distance(direct.u, first.u, c.s_norm), blow});
  }

  Outcome o;
  CsvTable csv{"reconstruct", {"h", "direct_vs_second", "first_vs_second", "direct_vs_first"}, {}};
  for (const auto& r : rows)
    csv.rows.push_back({fmt(r.h), fmt(r.direct_vs_second), fmt(r.first_vs_second), fmt(r.direct_vs_first)});
  o.tables.push_back(std::move(csv));

  bool decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    decreasing = decreasing && rows[i].direct_vs_second < rows[i - 1].direct_vs_second;
  const bool recon_ok = rows.front().direct_vs_second <= c.rel_tol;
  const bool orders_ok = rows.front().first_vs_second <= c.rel_tol;
  json asserts = json::array();
  asserts.push_back(assertion("direct_vs_second", rows.front().direct_vs_second, "<= " + fmt_short(c.rel_tol), recon_ok));
  asserts.push_back(json{{"name", "refinement"}, {"value", decreasing ? "decreasing" : "not_decreasing"},
                         {"target", "decreasing"}, {"pass", decreasing}});
  asserts.push_back(assertion("first_vs_second", rows.front().first_vs_second, "<= " + fmt_short(c.rel_tol), orders_ok));
  o.pass = recon_ok && orders_ok && decreasing;
  bool blow = false;
  for (const auto& r : rows) blow = blow || r.blowup;
  o.summary = {{"norm_s", c.s_norm}, {"blowup", blow}, {"assertions", asserts}};
  return o;
}

}  // namespace

ResultBundle run(const ExperimentConfig& cfg) {
  const Diagnostics diag = validate(cfg);
  if (!diag.ok()) {
    std::string msg = "invalid config:";
    for (const auto& e : diag.errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  const auto t_start = std::chrono::steady_clock::now();
  const int saved_workers = default_workers();
  set_default_workers(cfg.workers > 0 ? cfg.workers : resolve_workers(0));

  Outcome o;
  try {
    if (cfg.experiment == "moments") o = run_moments(cfg);
    else if (cfg.experiment == "fit") o = run_fit(cfg);
    else if (cfg.experiment == "diverge") o = run_diverge(cfg);
    else if (cfg.experiment == "sharpness") o = run_sharpness(cfg);
    else if (cfg.experiment == "cauchy") o = run_cauchy(cfg);
    else if (cfg.experiment == "solve") o = run_solve(cfg);
    else o = run_reconstruct(cfg);
  } catch (...) {
    set_default_workers(saved_workers);
    throw;
  }
  set_default_workers(saved_workers);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  ResultBundle b;
  b.config = cfg;
  b.tables = std::move(o.tables);
  b.pass = o.pass;
  b.wall_seconds = wall;

  json summary = std::move(o.summary);
  summary["experiment"] = cfg.experiment;
  summary["pass"] = o.pass;
  summary["warnings"] = diag.warnings;
  b.summary_json = summary.dump(2);

  json echo = json::object();
  for (const auto& [k, v] : config_echo(cfg)) echo[k] = json::parse(v);
  json meta = {{"version", kVersion},
               {"config", echo},
               {"wall_seconds", wall},
               {"workers", cfg.workers},
               {"conventions",
                {{"fourier_basis", "e_n(x) = exp(i n.x) / (2 pi)"},
                 {"bracket", "<n> = sqrt(1 + |n|^2)"},
                 {"lp_block0", "|n|<=1"},
                 {"lp_block_j", "2^(j-1) < |n| <= 2^j"},
                 {"heat_lower_limit", cfg.lower_limit}}},
               {"tables", json::array()}};
  for (const auto& t : b.tables) meta["tables"].push_back(t.name + ".csv");
  b.meta_json = meta.dump(2);

  if (!cfg.out.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out);
    auto write = [&](const std::string& name, const std::string& body) {
      std::ofstream f(fs::path(cfg.out) / name, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + (fs::path(cfg.out) / name).string());
      f << body;
    };
    for (std::size_t i = 0; i < b.tables.size(); ++i)
      write((i == 0 ? cfg.experiment : b.tables[i].name) + ".csv", b.tables[i].to_string());
    write("summary.json", b.summary_json + "\n");
    write("meta.json", b.meta_json + "\n");
  }
  return b;
}

// ---------------------------------------------------------------- catalog

std::vector<CatalogEntry> list_experiments() {
  return {
      {"wave-moments", "moments", "wave Wick square and Duhamel term: Monte-Carlo variance matches the oracle",
       "experiment = \"moments\"\nflow = \"wave\"\nobject = \"duh\"\nalpha = 0.3\nN = 16\nh = 1/256\nT = 0.5\n"
       "times = [0.25, 0.5]\nmodes = [[0,0],[1,0],[3,2]]\nreplicas = 2000\n"},
      {"heat-moments", "moments", "heat Wick square and Duhamel term: Monte-Carlo variance matches the closed form",
       "experiment = \"moments\"\nflow = \"heat\"\nobject = \"duh\"\nalpha = 0.5\nN = 16\nh = 1/256\nT = 0.5\n"
       "modes = [[0,0],[1,0],[3,2]]\nreplicas = 2000\n"},
      {"lin-regularity", "fit", "first chaos has spatial regularity -alpha",
       "experiment = \"fit\"\nflow = \"wave\"\nobject = \"lin\"\nalpha = 0.3\nN = 64\nT = 1\nh = 1/256\n"
       "fit_lo = 4\nfit_hi = 24\nfit_modes = \"disk\"\n"},
      {"wave-smoothing", "fit", "wave Duhamel term gains regularity beyond the parabolic count",
       "experiment = \"fit\"\nflow = \"wave\"\nobject = \"duh\"\nalpha = 0.35\nN = 64\nT = 0.5\nh = 1/256\n"
       "fit_lo = 4\nfit_hi = 32\nfit_modes = \"axis\"\ntolerance = 0.2\ngain_reference = 0.3\n"},
      {"wave-sharpness", "sharpness", "the smoothing gain is sharp: normalized variance stays in a bounded band",
       "experiment = \"sharpness\"\nflow = \"wave\"\nobject = \"duh\"\nalpha = 0.35\nN = 128\nT = 0.25\n"
       "h = 1/256\nfit_lo = 8\nfit_hi = 64\n"},
      {"wave-divergence", "diverge", "wave Duhamel variance at n = 0 diverges logarithmically at alpha = 1/2",
       "experiment = \"diverge\"\nflow = \"wave\"\nobject = \"duh\"\nalpha = 0.5\nT = 0.5\nh = 1/256\n"
       "N_ladder = [8, 16, 32, 64, 128, 256]\n"},
      {"heat-wick-divergence", "diverge", "heat Wick square diverges like a power of N for alpha > 1/2",
       "experiment = \"diverge\"\nflow = \"heat\"\nobject = \"wick\"\nalpha = 0.75\nT = 0.5\nh = 1/256\n"
       "N_ladder = [8, 16, 32, 64, 128, 256]\n"},
      {"heat-duh-bounded", "diverge", "heat Duhamel term stays bounded for 1/2 <= alpha < 1",
       "experiment = \"diverge\"\nflow = \"heat\"\nobject = \"duh\"\nalpha = 0.75\nT = 0.5\nh = 1/256\n"
       "N_ladder = [8, 16, 32, 64, 128, 256, 512]\nstable_between = [64, 128]\n"},
      {"heat-duh-log", "diverge", "heat Duhamel term diverges logarithmically at alpha = 1",
       "experiment = \"diverge\"\nflow = \"heat\"\nobject = \"duh\"\nalpha = 1.0\nT = 0.5\nh = 1/256\n"
       "N_ladder = [8, 16, 32, 64, 128, 256, 512]\n"},
      {"lin-cauchy", "cauchy", "coupled truncations of the first chaos form a Cauchy sequence in H^s, s < -alpha",
       "experiment = \"cauchy\"\nflow = \"wave\"\nobject = \"lin\"\nalpha = 0.3\nN_ladder = [8, 16, 32, 64]\n"
       "h = 1/256\nT = 0.25\ns_norm = -0.4\nreplicas = 50\n"},
      {"reconstruction", "reconstruct", "direct truncated solve equals the residual reconstruction",
       "experiment = \"reconstruct\"\nflow = \"wave\"\nalpha = 0.3\nN = 16\nh = 1/256\nT = 0.25\ns_norm = -0.4\n"},
      {"solution-convergence", "cauchy", "truncated solutions converge as N grows",
       "experiment = \"cauchy\"\ntarget = \"solution\"\nflow = \"wave\"\nalpha = 0.3\nN_ladder = [8, 16, 32, 64]\n"
       "h = 1/512\nT = 0.25\ns_norm = -0.4\nreplicas = 4\n"},
      {"solve-demo", "solve", "second-order residual solve with blowup guard",
       "experiment = \"solve\"\nflow = \"wave\"\nexpansion = \"second_order\"\nalpha = 0.3\nN = 16\nh = 1/256\n"
       "T = 0.25\n"},
  };
}

const CatalogEntry& find_experiment(const std::string& name) {
  static const std::vector<CatalogEntry> catalog = list_experiments();
  for (const auto& e : catalog)
    if (e.name == name) return e;
  throw std::out_of_range("unknown catalog experiment '" + name + "'");
}

}  // namespace wickwave

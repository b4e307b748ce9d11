#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "test_support.hpp"
#include "wickwave/harness.hpp"

using namespace wickwave;
using nlohmann::json;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("no column " + name);
}

ExperimentConfig small_moments() {
  return parse_config(
      "experiment = \"moments\"\nflow = \"wave\"\nobject = \"wick\"\nalpha = 0.3\nN = 8\n"
      "h = 1/64\nT = 0.5\ntimes = [0.25, 0.5]\nmodes = [[0,0],[1,0],[3,2]]\nreplicas = 60\nseed = 5\n");
}

std::string read(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ParsesFlatText) {
  const auto c = parse_config(
      "# comment\nexperiment = \"fit\"   # trailing\nflow = \"heat\"\nalpha = 0.7\nN = 64\nh = 1/128\n"
      "modes = [[0,0],\n  [1,-2]]\nN_ladder = [8, 16, 32]\nexpected_s0 = 0.6\nseed = 18446744073709551615\n"
      "quad_points = 64\nR = 40\n");
  EXPECT_EQ(c.experiment, "fit");
  EXPECT_EQ(c.flow, Flow::heat);
  EXPECT_DOUBLE_EQ(c.alpha, 0.7);
  EXPECT_EQ(c.N, 64);
  EXPECT_DOUBLE_EQ(c.h, 1.0 / 128);
  ASSERT_EQ(c.modes.size(), 2u);
  EXPECT_EQ(c.modes[1], (FreqIndex{1, -2}));
  EXPECT_EQ(c.N_ladder, (std::vector<int>{8, 16, 32}));
  EXPECT_EQ(c.expected_s0, 0.6);
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_EQ(c.quad_points, 64);
  EXPECT_EQ(c.replicas, 40);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("colour = 3\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("alpha = abc\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("flow = \"fluid\"\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("[section]\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("modes = [[0,0]\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("just words\n"), std::invalid_argument);
  ExperimentConfig c;
  EXPECT_THROW(apply_setting(c, "fit_modes", "\"spiral\""), std::invalid_argument);
}

TEST(Config, EchoRoundTrips) {
  auto c = parse_config(
      "experiment = \"diverge\"\nflow = \"heat\"\nobject = \"duh\"\nalpha = 0.75\nN_ladder = [8,16,32,64,128]\n"
      "stable_between = [64, 128]\nmodes = [[1,2]]\ntimes = [0.125, 1]\ngain_reference = 0.3\nout = \"x y\"\n");
  std::string text;
  for (const auto& [k, v] : config_echo(c)) text += k + " = " + v + "\n";
  const auto back = parse_config(text);
  EXPECT_EQ(config_echo(back), config_echo(c));
  EXPECT_EQ(back.out, "x y");
  EXPECT_EQ(back.times, (std::vector<double>{0.125, 1.0}));
  for (const auto& [k, v] : config_echo(c)) EXPECT_NO_THROW(json::parse(v)) << k;
}

TEST(Validation, ReportsProblems) {
  auto c = small_moments();
  EXPECT_TRUE(validate(c).ok());
  c.d = 3;
  EXPECT_FALSE(validate(c).ok());
  c = small_moments();
  c.object = ObjectKind::duh;
  c.h = 1.0 / 8;
  c.times = {0.25, 0.5};
  const auto d = validate(c);
  ASSERT_FALSE(d.ok());
  EXPECT_NE(d.errors[0].find("h*<track_band> <= 0.5"), std::string::npos);
  c = small_moments();
  c.times = {0.3};
  EXPECT_FALSE(validate(c).ok());
  c = small_moments();
  c.replicas = 1;
  EXPECT_FALSE(validate(c).ok());
  c = small_moments();
  c.alpha = -1;
  EXPECT_FALSE(validate(c).ok());
}

TEST(Validation, WarnsAboveDivergenceThreshold) {
  auto c = parse_config("experiment = \"fit\"\nflow = \"wave\"\nobject = \"duh\"\nalpha = 0.6\nN = 32\n");
  const auto d = validate(c);
  EXPECT_TRUE(d.ok());
  ASSERT_FALSE(d.warnings.empty());
  EXPECT_NE(d.warnings[0].find("divergence threshold 1/2"), std::string::npos);
  EXPECT_THROW(run(parse_config("experiment = \"moments\"\nd = 3\n")), std::invalid_argument);
}

TEST(Catalog, EntriesAreValid) {
  const auto cat = list_experiments();
  EXPECT_GE(cat.size(), 7u);
  std::set<std::string> names;
  for (const auto& e : cat) {
    names.insert(e.name);
    const auto c = parse_config(e.config);
    EXPECT_EQ(c.experiment, e.experiment) << e.name;
    const auto d = validate(c);
    EXPECT_TRUE(d.ok()) << e.name << ": " << (d.errors.empty() ? "" : d.errors[0]);
    EXPECT_FALSE(e.claim.empty());
  }
  EXPECT_EQ(names.size(), cat.size());
  EXPECT_EQ(find_experiment("lin-regularity").experiment, "fit");
  EXPECT_THROW(find_experiment("nope"), std::out_of_range);
}

TEST(Experiments, LinRegularityFit) {
  auto c = parse_config(find_experiment("lin-regularity").config);
  const auto b = run(c);
  EXPECT_TRUE(b.pass);
  const auto s = json::parse(b.summary_json);
  EXPECT_NEAR(s["s0"].get<double>(), -0.3, 0.1);
  // verdict is recomputable from the fit table
  const auto& t = b.tables.front();
  const auto ib = column(t.header, "bracket"), iv = column(t.header, "value");
  std::vector<double> lx, ly;
  for (const auto& r : t.rows) {
    const double br = std::stod(r[ib]);
    if (br < c.fit_lo || br > c.fit_hi) continue;
    lx.push_back(std::log(br));
    ly.push_back(std::log(std::stod(r[iv])));
  }
  const double s0 = -(wickwave::testing::ols_slope(lx, ly) + 2) / 2;
  EXPECT_NEAR(s0, s["s0"].get<double>(), 1e-10);
}

TEST(Experiments, WaveDivergenceIsLogarithmic) {
  const auto b = run(parse_config(
      "experiment = \"diverge\"\nflow = \"wave\"\nobject = \"duh\"\nalpha = 0.5\nT = 0.5\n"
      "N_ladder = [8, 16, 32, 64, 128]\n"));
  const auto s = json::parse(b.summary_json);
  EXPECT_EQ(s["classification"], "logarithmic");
  EXPECT_TRUE(b.pass);
  EXPECT_EQ(b.tables.front().rows.size(), 5u);
}

TEST(Experiments, MomentsVerdictMatchesCsv) {
  const auto b = run(small_moments());
  const auto s = json::parse(b.summary_json);
  const auto& t = b.tables.front();
  EXPECT_EQ(t.header, (std::vector<std::string>{"n_x", "n_y", "t", "mc_mean", "mc_se", "oracle", "z"}));
  EXPECT_EQ(t.rows.size(), 6u);
  double max_z = 0;
  for (const auto& r : t.rows) max_z = std::max(max_z, std::abs(std::stod(r[6])));
  EXPECT_NEAR(max_z, s["max_abs_z"].get<double>(), 1e-12);
  EXPECT_EQ(b.pass, max_z <= 4.0);
}

TEST(Experiments, RerunsAreBitIdenticalAndWorkerIndependent) {
  auto c = small_moments();
  const auto a = run(c), b = run(c);
  EXPECT_EQ(a.tables.front().to_string(), b.tables.front().to_string());
  c.workers = 2;
  const auto p = run(c);
  const auto ra = parse_csv(a.tables.front().to_string()), rp = parse_csv(p.tables.front().to_string());
  ASSERT_EQ(ra.size(), rp.size());
  for (std::size_t i = 1; i < ra.size(); ++i)
    for (std::size_t j : {3u, 4u}) {
      const double x = std::stod(ra[i][j]), y = std::stod(rp[i][j]);
      EXPECT_LE(std::abs(x - y), 1e-12 * std::abs(x));
    }
}

TEST(Experiments, WritesArtifacts) {
  const auto dir = std::filesystem::temp_directory_path() / "wickwave_harness_test";
  std::filesystem::remove_all(dir);
  auto c = small_moments();
  c.out = dir.string();
  const auto b = run(c);
  ASSERT_TRUE(std::filesystem::exists(dir / "moments.csv"));
  EXPECT_EQ(read(dir / "moments.csv"), b.tables.front().to_string());
  const auto summary = json::parse(read(dir / "summary.json"));
  EXPECT_EQ(summary["pass"], b.pass);
  EXPECT_EQ(summary["experiment"], "moments");
  const auto meta = json::parse(read(dir / "meta.json"));
  EXPECT_EQ(meta["version"], kVersion);
  EXPECT_EQ(meta["config"]["N"], 8);
  EXPECT_EQ(meta["conventions"]["lp_block0"], "|n|<=1");
  EXPECT_TRUE(meta["wall_seconds"].is_number());
  std::filesystem::remove_all(dir);
}

TEST(Experiments, SolveReportsBlowup) {
  auto c = parse_config(
      "experiment = \"solve\"\nflow = \"heat\"\nexpansion = \"direct\"\nN = 4\nh = 1/256\nT = 0.25\n"
      "amplitude = 2000\n");
  const auto b = run(c);
  const auto s = json::parse(b.summary_json);
  EXPECT_TRUE(s["blowup"].get<bool>());
  EXPECT_FALSE(b.pass);
  c.amplitude = 0.5;
  const auto calm = run(c);
  EXPECT_TRUE(calm.pass);
  EXPECT_EQ(calm.tables.front().rows.size(), 65u);
}

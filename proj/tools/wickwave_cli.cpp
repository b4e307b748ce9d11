// Command-line front end: one subcommand per experiment plus validate and list.
//
// Exit codes: 0 all assertions pass, 2 usage or config error, 3 assertion failure,
// 1 any other runtime failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wickwave/harness.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitAssertion = 3;

struct Overrides {
  std::string config_path;
  std::string preset;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> direct;  // filled by callbacks, in flag order
  bool print_csv = false;
};

void add_common(CLI::App* sub, Overrides& ov) {
  sub->add_option("--config", ov.config_path, "flat key = value config file");
  sub->add_option("--preset", ov.preset, "start from a catalog experiment (see `list`)");
  sub->add_option("--set", ov.sets, "override any field, key=value (repeatable)");
  auto field = [&](const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&ov, key](const std::string& v) { ov.direct.emplace_back(key, v); }, help);
  };
  field("--seed", "seed", "master seed (u64)");
  field("--workers", "workers", "worker threads (0: all cores)");
  field("--out", "out", "output directory");
  field("--flow", "flow", "wave|heat");
  field("--object", "object", "lin|wick|duh|res");
  field("--alpha", "alpha", "noise roughness");
  field("-N,--N", "N", "truncation");
  field("--N-ladder", "N_ladder", "truncation ladder, e.g. [8,16,32]");
  field("--step", "h", "time step h");
  field("-T,--T", "T", "horizon");
  field("--times", "times", "evaluation times, e.g. [0.25,0.5]");
  field("--modes", "modes", "modes, e.g. [[0,0],[1,0]]");
  field("--track-band", "track_band", "tracked band for duh (0: 2N)");
  field("--band", "band", "solver band (0: 2N)");
  field("-R,--replicas", "replicas", "Monte-Carlo replicas");
  field("--source", "source", "oracle|mc");
  field("--expansion", "expansion", "first_order|second_order|direct");
  sub->add_flag("--print-csv", ov.print_csv, "also print CSV tables to stdout");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

wickwave::ExperimentConfig assemble(const Overrides& ov, const std::optional<std::string>& experiment) {
  wickwave::ExperimentConfig cfg;
  if (!ov.preset.empty()) cfg = wickwave::parse_config(wickwave::find_experiment(ov.preset).config, cfg);
  if (!ov.config_path.empty()) cfg = wickwave::parse_config(read_file(ov.config_path), cfg);
  if (experiment) cfg.experiment = *experiment;
  for (const auto& s : ov.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    wickwave::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [k, v] : ov.direct) wickwave::apply_setting(cfg, k, v);
  return cfg;
}

int run_experiment(const Overrides& ov, const std::string& experiment) {
  const auto cfg = assemble(ov, experiment);
  const auto diag = wickwave::validate(cfg);
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";
  if (!diag.ok()) {
    for (const auto& e : diag.errors) std::cerr << "error: " << e << "\n";
    return kExitUsage;
  }
  const auto bundle = wickwave::run(cfg);
  if (ov.print_csv)
    for (const auto& t : bundle.tables) std::cout << "# " << t.name << ".csv\n" << t.to_string();
  std::cout << bundle.summary_json << "\n";
  if (!cfg.out.empty()) std::cerr << "wrote results to " << cfg.out << "\n";
  return bundle.pass ? 0 : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renormalized stochastic wave and heat experiments"};
  app.set_version_flag("--version", wickwave::kVersion);
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"moments", "Monte-Carlo second moments against the oracle"},
      {"fit", "decay-curve exponent fit"},
      {"diverge", "growth of the variance along an N ladder"},
      {"sharpness", "normalized wave duh variance across frequencies"},
      {"cauchy", "coupled-truncation Cauchy diagnostic"},
      {"solve", "residual or direct solve"},
      {"reconstruct", "direct solve against the residual reconstructions"},
  };
  Overrides ov;
  std::string chosen;
  for (const auto& [name, help] : experiments) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, ov);
    sub->callback([&chosen, n = name] { chosen = n; });
  }
  CLI::App* val = app.add_subcommand("validate", "check a config and print diagnostics");
  add_common(val, ov);
  val->callback([&chosen] { chosen = "validate"; });

  std::string show;
  CLI::App* list = app.add_subcommand("list", "catalog of standing experiments");
  list->add_option("--show", show, "print the config of one catalog entry");
  list->callback([&chosen] { chosen = "list"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (chosen == "list") {
      if (!show.empty()) {
        std::cout << wickwave::find_experiment(show).config;
        return 0;
      }
      for (const auto& e : wickwave::list_experiments())
        std::cout << e.name << "\t" << e.experiment << "\t" << e.claim << "\n";
      return 0;
    }
    if (chosen == "validate") {
      const auto cfg = assemble(ov, std::nullopt);
      const auto diag = wickwave::validate(cfg);
      for (const auto& w : diag.warnings) std::cout << "warning: " << w << "\n";
      for (const auto& e : diag.errors) std::cout << "error: " << e << "\n";
      if (diag.ok()) std::cout << "ok\n";
      return diag.ok() ? 0 : kExitUsage;
    }
    return run_experiment(ov, chosen);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
}

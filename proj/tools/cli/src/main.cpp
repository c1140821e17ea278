// tvsaddle: run, sweep and validate decentralized saddle-point experiments.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tvsaddle/cli/config.hpp"
#include "tvsaddle/cli/experiment.hpp"

namespace {

using namespace tvsaddle::cli;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool has_seed_override(const std::vector<std::string>& sets) {
  for (const auto& s : sets)
    if (s.rfind("seed=", 0) == 0) return true;
  return false;
}

// File < TVSADDLE_SEED < --set seed=...
std::vector<std::string> with_env_seed(std::vector<std::string> sets) {
  if (const char* env = std::getenv("TVSADDLE_SEED"); env && *env && !has_seed_override(sets))
    sets.insert(sets.begin(), std::string("seed=") + env);
  return sets;
}

void print_errors(const std::string& path, const ParseResult& r) {
  for (const auto& e : r.errors) {
    std::cerr << path;
    if (e.line > 0) std::cerr << ":" << e.line;
    std::cerr << ": " << e.field << ": " << e.message << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized extra-step saddle-point solver over time-varying networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;

  auto* run_cmd = app.add_subcommand("run", "Run one configuration");
  run_cmd->add_option("config", config_path, "Config file (key=value per line)")->required();
  run_cmd->add_option("--set", sets, "Override a config key (key=value)")->take_all();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides 'out')");

  std::string over;
  std::string values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one configuration per parameter value");
  sweep_cmd->add_option("config", config_path, "Config file")->required();
  sweep_cmd->add_option("--over", over, "Parameter to vary ('chi' varies the topology)")
      ->required();
  sweep_cmd->add_option("--values", values, "Values, comma- or semicolon-separated")->required();
  sweep_cmd->add_option("--set", sets, "Override a config key (key=value)")->take_all();
  sweep_cmd->add_option("--out", out_dir, "Output directory (overrides 'out')");

  auto* validate_cmd = app.add_subcommand("validate", "Parse and resolve a configuration");
  validate_cmd->add_option("config", config_path, "Config file")->required();
  validate_cmd->add_option("--set", sets, "Override a config key (key=value)")->take_all();

  CLI11_PARSE(app, argc, argv);

  std::string text;
  if (!read_file(config_path, text)) {
    std::cerr << "cannot read config file '" << config_path << "'\n";
    return kExitError;
  }
  sets = with_env_seed(sets);
  const ParseResult parsed = parse_config(text, sets);
  if (!parsed.ok()) {
    print_errors(config_path, parsed);
    return kExitError;
  }
  const RunConfig& cfg = *parsed.config;
  const std::filesystem::path out = out_dir.empty() ? std::filesystem::path(cfg.out) : std::filesystem::path(out_dir);

  if (*validate_cmd) {
    try {
      const ResolvedRun run = resolve(cfg);
      std::cout << serialize(cfg) << "# resolved\n" << header_json(run, "validated");
    } catch (const std::exception& e) {
      std::cerr << config_path << ": " << e.what() << "\n";
      return kExitError;
    }
    return kExitOk;
  }

  ExecuteResult result;
  if (*run_cmd) {
    result = execute(cfg, out);
  } else {
    result = sweep(text, sets, over, split_values(values), out);
  }
  for (const auto& f : result.files) std::cout << "wrote " << f.string() << "\n";
  if (!result.message.empty()) std::cerr << result.message << "\n";
  return result.exit_code;
}

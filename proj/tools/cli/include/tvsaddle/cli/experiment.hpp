#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "tvsaddle/cli/config.hpp"
#include "tvsaddle/metrics.hpp"
#include "tvsaddle/mixing.hpp"
#include "tvsaddle/problems.hpp"
#include "tvsaddle/solver.hpp"

namespace tvsaddle::cli {

/// A RunConfig with every "auto" and default resolved against the library.
struct ResolvedRun {
  RunConfig config;
  ProblemPtr problem;
  std::shared_ptr<const MixingSchedule> schedule;
  SolverConfig solver;
  double chi = 1.0;
  double rho = 0.0;
  std::uint64_t horizon = 0;  // communication rounds the run will consume
  bool gamma_auto = true;
  bool h_auto = true;
};

/// Builds problem, topology and solver settings. Throws ValidationError.
ResolvedRun resolve(const RunConfig& cfg);

/// JSON run header (gamma, H, K, chi, rho, L, L_max, mu, D, seed, problem,
/// topology, plus provenance of auto-resolved values and the run status).
std::string header_json(const ResolvedRun& run, const std::string& status);

/// CSV with columns k,rounds[,dist_sq][,gap],consensus.
std::string trajectory_csv(const std::vector<MetricPoint>& points, const SaddleProblem& problem);

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitDiverged = 2 };

struct ExecuteResult {
  int exit_code = kExitOk;
  std::string message;
  std::vector<std::filesystem::path> files;
  std::vector<MetricPoint> metrics;
  double chi = 1.0;
  double rho = 0.0;
};

/// Runs one configuration, writing <stem>header.json and <stem>trajectory.csv
/// into out_dir. Partial output is kept on divergence.
ExecuteResult execute(const RunConfig& cfg, const std::filesystem::path& out_dir,
                      const std::string& stem = "");

/// One run per value of `param` (any config key; "chi" is an alias for
/// "topology"), then summary.json with fitted rates.
ExecuteResult sweep(const std::string& config_text,
                    const std::vector<std::string>& overrides, const std::string& param,
                    const std::vector<std::string>& values, const std::filesystem::path& out_dir);

/// Splits a --values list on ';' when present, otherwise on ','.
std::vector<std::string> split_values(const std::string& text);

}  // namespace tvsaddle::cli

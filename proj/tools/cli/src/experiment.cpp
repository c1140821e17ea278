#include "tvsaddle/cli/experiment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tvsaddle/errors.hpp"
#include "tvsaddle/gossip.hpp"

namespace tvsaddle::cli {

namespace {

using nlohmann::ordered_json;

std::uint64_t param_u64(const KindSpec& spec, const std::string& key, std::uint64_t fallback) {
  const auto v = spec.get(key);
  return v ? std::stoull(*v) : fallback;
}

double param_real(const KindSpec& spec, const std::string& key) {
  return std::stod(*spec.get(key));
}

ProblemPtr build_problem(const RunConfig& cfg, std::size_t nodes) {
  const KindSpec& p = cfg.problem;
  const std::uint64_t seed = param_u64(p, "seed", cfg.seed);
  if (p.kind == "quadratic") {
    return make_quadratic(random_quadratic_spec(
        nodes, param_u64(p, "nx", 2), param_u64(p, "ny", 2), param_real(p, "mu"),
        param_real(p, "L"), param_real(p, "het"), seed));
  }
  if (p.kind == "matrix_game") {
    return make_matrix_game(
        random_matrix_game_spec(nodes, param_u64(p, "nx", 2), param_u64(p, "ny", 2), seed));
  }
  if (p.kind == "matching_pennies") {
    return make_matrix_game(matching_pennies_spec(nodes, param_real(p, "het"), seed));
  }
  throw ValidationError("unknown problem kind '" + p.kind + "'");
}

TopologySequence build_topology(const RunConfig& cfg, std::size_t nodes) {
  const KindSpec& t = cfg.topology;
  if (t.kind == "ring") return make_static(TopologyKind::kRing, nodes);
  if (t.kind == "path") return make_static(TopologyKind::kPath, nodes);
  if (t.kind == "complete") return make_static(TopologyKind::kComplete, nodes);
  if (t.kind == "star") return make_static(TopologyKind::kStar, nodes);
  if (t.kind == "rotating_star") return make_rotating_star(nodes, param_u64(t, "period", 1));
  if (t.kind == "random")
    return make_random_connected(nodes, param_real(t, "p"), param_u64(t, "seed", cfg.seed));
  throw ValidationError("unknown topology kind '" + t.kind + "'");
}

std::size_t auto_gossip_steps(double chi, const RunConfig& cfg) {
  const double target = cfg.h_auto_eps / static_cast<double>(cfg.iterations);
  return rounds_for_accuracy(chi, target);
}

std::uint64_t total_rounds(std::size_t h, std::size_t k) {
  return 2 * (static_cast<std::uint64_t>(h) + 1) * static_cast<std::uint64_t>(k);
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out.flush()) throw std::runtime_error("write to '" + path.string() + "' failed");
}

ordered_json number_or_null(std::optional<double> v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

ResolvedRun resolve(const RunConfig& cfg) {
  const auto nodes = resolve_nodes(cfg);
  if (!nodes) throw ValidationError("topology '" + cfg.topology.kind + "' requires M");

  ResolvedRun run;
  run.config = cfg;
  ProblemPtr base = build_problem(cfg, *nodes);
  const Vector z0 = random_feasible_point(*base, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  run.problem = base;
  if (cfg.modifier) run.problem = regularize(base, param_real(*cfg.modifier, "eps"), z0);
  run.schedule = std::make_shared<const MixingSchedule>(build_topology(cfg, *nodes));

  run.h_auto = !cfg.gossip_steps.has_value();
  std::size_t h = cfg.gossip_steps.value_or(0);
  run.horizon = total_rounds(h, cfg.iterations);
  run.chi = run.schedule->chi(run.horizon);
  if (run.h_auto) {
    // χ depends on the horizon and the horizon on H; iterate to a fixed point.
    for (int pass = 0; pass < 16; ++pass) {
      h = auto_gossip_steps(run.chi, cfg);
      run.horizon = total_rounds(h, cfg.iterations);
      const double chi = run.schedule->chi(run.horizon);
      if (chi == run.chi) break;
      run.chi = chi;
    }
  }
  run.rho = rho_of(run.chi);

  run.gamma_auto = !cfg.gamma.has_value();
  run.solver.problem = run.problem;
  run.solver.schedule = run.schedule;
  run.solver.gamma = cfg.gamma.value_or(default_stepsize(*run.problem));
  run.solver.check_stepsize = run.gamma_auto;
  run.solver.gossip_steps = h;
  run.solver.iterations = cfg.iterations;
  run.solver.record_every = cfg.record_every;
  run.solver.z0 = z0;
  validate(run.solver);
  return run;
}

std::string header_json(const ResolvedRun& run, const std::string& status) {
  const ProblemConstants& c = run.problem->constants();
  ordered_json h;
  h["gamma"] = run.solver.gamma;
  h["H"] = run.solver.gossip_steps;
  h["K"] = run.solver.iterations;
  h["chi"] = run.chi;
  h["rho"] = run.rho;
  h["L"] = c.l_global;
  h["L_max"] = c.l_max;
  h["mu"] = c.mu;
  h["D"] = number_or_null(c.diameter);
  h["seed"] = run.config.seed;
  h["problem"] = format_spec(run.config.problem);
  h["topology"] = run.schedule->topology().describe();
  h["M"] = run.schedule->node_count();
  if (run.config.modifier) h["modifier"] = format_spec(*run.config.modifier);
  h["gamma_source"] = run.gamma_auto ? "auto:1/(4*L_max)" : "config";
  h["gamma_within_bound"] = run.solver.gamma <= default_stepsize(*run.problem) * (1 + 1e-12);
  h["H_source"] = run.h_auto ? "auto:eps=" + format_number(run.config.h_auto_eps) : "config";
  h["rounds_horizon"] = run.horizon;
  h["status"] = status;
  return h.dump(2) + "\n";
}

std::string trajectory_csv(const std::vector<MetricPoint>& points, const SaddleProblem& problem) {
  const bool with_dist = problem.solution().has_value();
  const bool with_gap = problem.has_gap_oracle();
  std::string out = "k,rounds";
  if (with_dist) out += ",dist_sq";
  if (with_gap) out += ",gap";
  out += ",consensus\n";
  for (const auto& p : points) {
    out += std::to_string(p.k) + "," + std::to_string(p.rounds);
    if (with_dist) out += "," + format_number(p.dist_sq.value_or(NAN));
    if (with_gap) out += "," + format_number(p.gap.value_or(NAN));
    out += "," + format_number(p.consensus) + "\n";
  }
  return out;
}

ExecuteResult execute(const RunConfig& cfg, const std::filesystem::path& out_dir,
                      const std::string& stem) {
  ExecuteResult result;
  ResolvedRun run;
  try {
    run = resolve(cfg);
  } catch (const std::exception& e) {
    result.exit_code = kExitError;
    result.message = e.what();
    return result;
  }
  result.chi = run.chi;
  result.rho = run.rho;

  Trajectory traj;
  std::string status = "converged";
  try {
    traj = tvsaddle::run(run.solver);
  } catch (const RunDiverged& e) {
    traj = e.partial();
    status = "diverged";
    result.exit_code = kExitDiverged;
    result.message = e.what();
  }
  result.metrics = evaluate(traj, *run.problem);

  try {
    std::filesystem::create_directories(out_dir);
    const auto header_path = out_dir / (stem + "header.json");
    const auto csv_path = out_dir / (stem + "trajectory.csv");
    write_file(header_path, header_json(run, status));
    write_file(csv_path, trajectory_csv(result.metrics, *run.problem));
    result.files = {header_path, csv_path};
  } catch (const std::exception& e) {
    result.exit_code = kExitError;
    result.message = e.what();
  }
  return result;
}

std::vector<std::string> split_values(const std::string& text) {
  const char sep = text.find(';') != std::string::npos ? ';' : ',';
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

namespace {

std::optional<double> linear_rate(const std::vector<MetricPoint>& pts) {
  Series s;
  for (const auto& p : pts)
    if (p.dist_sq && *p.dist_sq > 0.0) s.emplace_back(static_cast<double>(p.rounds), *p.dist_sq);
  if (s.size() < 10) return std::nullopt;
  return fit_linear_rate(s);
}

std::optional<double> sublinear_slope(const std::vector<MetricPoint>& pts) {
  Series s;
  for (const auto& p : pts)
    if (p.k > 0 && p.gap && *p.gap > 0.0) s.emplace_back(static_cast<double>(p.k), *p.gap);
  if (s.size() < 10) return std::nullopt;
  return fit_sublinear_rate(s);
}

}  // namespace

ExecuteResult sweep(const std::string& config_text,
                    const std::vector<std::string>& overrides, const std::string& param,
                    const std::vector<std::string>& values, const std::filesystem::path& out_dir) {
  ExecuteResult total;
  const std::string key = param == "chi" ? "topology" : param;
  ordered_json summary;
  summary["over"] = key;
  summary["runs"] = ordered_json::array();

  for (std::size_t i = 0; i < values.size(); ++i) {
    std::vector<std::string> ov = overrides;
    ov.push_back(key + "=" + values[i]);
    const ParseResult parsed = parse_config(config_text, ov);
    ordered_json entry;
    entry["value"] = values[i];
    if (!parsed.ok()) {
      entry["status"] = "invalid";
      entry["error"] = parsed.errors.front().field + ": " + parsed.errors.front().message;
      total.exit_code = kExitError;
      summary["runs"].push_back(entry);
      continue;
    }
    const std::string stem = "sweep_" + std::to_string(i) + "_";
    const ExecuteResult r = execute(*parsed.config, out_dir, stem);
    entry["status"] = r.exit_code == kExitOk         ? "converged"
                      : r.exit_code == kExitDiverged ? "diverged"
                                                     : "error";
    if (!r.message.empty()) entry["message"] = r.message;
    entry["chi"] = r.chi;
    entry["rho"] = r.rho;
    entry["csv"] = stem + "trajectory.csv";
    entry["linear_rate_per_round"] = number_or_null(linear_rate(r.metrics));
    entry["gap_loglog_slope"] = number_or_null(sublinear_slope(r.metrics));
    summary["runs"].push_back(entry);
    total.files.insert(total.files.end(), r.files.begin(), r.files.end());
    if (r.exit_code != kExitOk && total.exit_code == kExitOk) total.exit_code = r.exit_code;
  }

  try {
    std::filesystem::create_directories(out_dir);
    const auto path = out_dir / "summary.json";
    write_file(path, summary.dump(2) + "\n");
    total.files.push_back(path);
  } catch (const std::exception& e) {
    total.exit_code = kExitError;
    total.message = e.what();
  }
  return total;
}

}  // namespace tvsaddle::cli

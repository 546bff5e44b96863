#include "tvcs/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "tvcs/crowd.hpp"
#include "tvcs/experiments.hpp"
#include "tvcs/grn.hpp"
#include "tvcs/log.hpp"
#include "tvcs/projection.hpp"
#include "tvcs/regression.hpp"
#include "tvcs/serialization.hpp"
#include "tvcs/solvers.hpp"

namespace tvcs {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Bad flags or input documents; exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_input(const std::string& path, const std::string& flag) {
  try {
    return read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(flag + ": " + e.what());
  }
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const json& config,
                    std::uint64_t seed, const std::string& started, const json& outputs) {
  json manifest = {{"subcommand", subcommand},
                   {"version", TVCS_VERSION},
                   {"config", config},
                   {"master_seed", seed},
                   {"started_at", started},
                   {"finished_at", utc_now()},
                   {"outputs", outputs}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

/// Writes the last iterate of a failed projection next to the outputs.
fs::path write_diagnostics(const fs::path& dir, const ProjectionError& e) {
  fs::create_directories(dir);
  const auto path = dir / "diagnostics.json";
  json doc = {{"error", e.what()},
              {"iterations", e.last_iterate().iteration},
              {"penalty_value", e.last_iterate().penalty_value},
              {"gap", e.gap()},
              {"x", e.last_iterate().x},
              {"y", e.last_iterate().y}};
  write_file_atomic(path, doc.dump(2) + "\n");
  return path;
}

TvcsStructure load_structure(const std::string& path) {
  auto structure = structure_from_json(read_input(path, "--structure"));
  const auto report = validate_structure(structure);
  if (!report.ok()) throw ConfigError("--structure: " + report.summary());
  return structure;
}

struct ProjectOptions {
  std::string in;
  std::string structure;
  std::string out;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_iters;
  std::optional<double> delta;
  std::optional<double> eps;
  std::optional<double> perturb;
};

struct SolveOptions {
  std::string objective;
  std::string data;
  std::string structure;
  std::string variant = "iht";
  std::optional<double> gamma;
  std::size_t iters = 500;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  std::size_t samples = 64;
  double temperature = 1.0;
  std::string out;
};

struct ExperimentOptions {
  std::string kind;
  std::string config;
  std::string out;
};

int run_project(const ProjectOptions& o, std::ostream& out, std::ostream& err) {
  const auto started = utc_now();
  const auto v = parse_vector(read_input(o.in, "--in"));
  const auto structure = load_structure(o.structure);
  if (v.size() != structure.dimension) {
    throw ConfigError("--in: vector length " + std::to_string(v.size()) +
                      " does not match structure dimension " + std::to_string(structure.dimension));
  }
  ProjectionConfig config;
  config.rng_seed = o.seed;
  if (o.max_iters) config.max_iterations = *o.max_iters;
  if (o.delta) config.binary_tolerance = *o.delta;
  if (o.eps) config.gap_tolerance = *o.eps;
  if (o.perturb) config.perturbation_scale = *o.perturb;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  ProjectionResult result;
  try {
    result = project(v, structure, config);
  } catch (const ProjectionError& e) {
    const auto path = write_diagnostics(o.out.empty() ? fs::current_path() : fs::path(o.out), e);
    err << "tvcs project: " << e.what() << "\ndiagnostics: " << path.string() << "\n";
    return kExitRuntime;
  }
  const auto text = projection_result_to_json(result) + "\n";
  if (o.out.empty()) {
    out << text;
    return kExitOk;
  }
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_file_atomic(dir / "projection.json", text);
  const json resolved = {{"in", o.in},
                         {"structure", o.structure},
                         {"max_iterations", config.max_iterations},
                         {"binary_tolerance", config.binary_tolerance},
                         {"gap_tolerance", config.gap_tolerance},
                         {"perturbation_scale", config.perturbation_scale}};
  write_manifest(dir, "project", resolved, o.seed, started,
                 {{"projection", (dir / "projection.json").string()}});
  return kExitOk;
}

int run_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  const auto started = utc_now();
  const auto structure = load_structure(o.structure);
  const auto text = read_input(o.data, "--data");

  std::unique_ptr<ObjectiveOracle> objective;
  double default_step = 0.0;
  try {
    if (o.objective == "lsq" || o.objective == "hinge") {
      auto data = regression_data_from_json(text);
      data.validate(o.objective == "hinge");
      if (o.objective == "lsq") {
        auto obj = std::make_unique<LeastSquaresObjective>(std::move(data));
        default_step = obj->default_step_size();
        objective = std::move(obj);
      } else {
        auto obj = std::make_unique<SquaredHingeObjective>(std::move(data));
        default_step = obj->default_step_size();
        objective = std::move(obj);
      }
    } else if (o.objective == "grn") {
      const auto data = grn_data_from_csv(text);
      data.validate();
      auto obj = std::make_unique<GrnObjective>(data);
      default_step = obj->default_step_size();
      objective = std::move(obj);
    } else {
      auto model = crowd_model_from_csv(text);
      model.validate();
      default_step = static_cast<double>(model.tasks());
      CrowdObjective::Options options;
      options.samples = o.samples;
      options.temperature = o.temperature;
      options.seed = o.seed;
      objective = std::make_unique<CrowdObjective>(std::move(model), options);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--data: ") + e.what());
  }
  if (objective->dimension() != structure.dimension) {
    throw ConfigError("--structure: dimension " + std::to_string(structure.dimension) +
                      " does not match the " + o.objective + " objective dimension " +
                      std::to_string(objective->dimension()));
  }

  SolverConfig config;
  try {
    config.variant = parse_solver_variant(o.variant);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--variant: ") + e.what());
  }
  config.step_size = o.gamma ? *o.gamma : default_step;
  config.max_outer_iterations = o.iters;
  config.rng_seed = o.seed;
  config.projection.rng_seed = o.seed;
  if (o.tolerance) config.stop_tolerance = *o.tolerance;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  SolveTrace trace;
  try {
    trace = solve(*objective, structure, config);
  } catch (const ProjectionError& e) {
    const auto path = write_diagnostics(o.out.empty() ? fs::current_path() : fs::path(o.out), e);
    err << "tvcs solve: " << e.what() << "\ndiagnostics: " << path.string() << "\n";
    return kExitRuntime;
  }
  if (o.out.empty()) {
    out << solve_trace_to_json(trace) << "\n";
    return kExitOk;
  }
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_file_atomic(dir / "trace.json", solve_trace_to_json(trace) + "\n");
  write_file_atomic(dir / "trace.csv", solve_trace_to_csv(trace));
  const json resolved = {{"objective", o.objective},
                         {"data", o.data},
                         {"structure", o.structure},
                         {"variant", to_string(config.variant)},
                         {"step_size", config.step_size},
                         {"max_outer_iterations", config.max_outer_iterations},
                         {"stop_tolerance", config.stop_tolerance}};
  write_manifest(dir, "solve", resolved, o.seed, started,
                 {{"trace", (dir / "trace.json").string()}, {"csv", (dir / "trace.csv").string()}});
  return kExitOk;
}

int run_experiment_command(const ExperimentOptions& o, std::optional<std::size_t> threads,
                           std::ostream& out) {
  ExperimentKind kind;
  try {
    kind = parse_experiment_kind(o.kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--kind: ") + e.what());
  }
  auto config = o.config.empty() ? ExperimentConfig::defaults(kind)
                                 : experiment_config_from_json(read_input(o.config, "--config"), kind);
  if (threads) config.threads = *threads;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const auto started = utc_now();
  log_message(LogLevel::info, "running " + to_string(kind) + " experiment");
  const auto result = run_experiment(config);
  const auto files = write_experiment_outputs(result, config, o.out, started, utc_now());
  std::size_t failed = 0;
  for (const auto& r : result.trials) failed += !r.error.empty();
  if (failed) log_message(LogLevel::error, std::to_string(failed) + " trial records failed; see the manifest");
  out << files.manifest.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Projection and sparse learning under three-view cardinality structures", "tvcs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(TVCS_VERSION));
  std::optional<std::size_t> threads;
  app.add_option("--threads", threads, "Cap on parallel experiment trials (default: all cores)")
      ->check(CLI::PositiveNumber);

  ProjectOptions po;
  auto* project_cmd = app.add_subcommand("project", "Project a vector onto a structure");
  project_cmd->add_option("--in", po.in, "Vector: JSON array, {\"v\": [...]} or plain numbers")->required();
  project_cmd->add_option("--structure", po.structure, "Structure JSON")->required();
  project_cmd->add_option("--seed", po.seed, "Perturbation seed");
  project_cmd->add_option("--max-iters", po.max_iters, "Iteration cap");
  project_cmd->add_option("--delta", po.delta, "Near-binary tolerance in (0, 0.5)");
  project_cmd->add_option("--eps", po.eps, "Relative duality gap tolerance");
  project_cmd->add_option("--perturb", po.perturb, "Relative perturbation scale; 0 disables");
  project_cmd->add_option("--out", po.out, "Output directory (default: JSON on stdout)");

  SolveOptions so;
  auto* solve_cmd = app.add_subcommand("solve", "Minimize an objective under a structure");
  solve_cmd->add_option("--objective", so.objective, "Objective")
      ->required()
      ->check(CLI::IsMember({"lsq", "hinge", "grn", "crowd"}));
  solve_cmd->add_option("--data", so.data,
                        "lsq/hinge: regression JSON; grn: time series CSV; crowd: quality CSV")
      ->required();
  solve_cmd->add_option("--structure", so.structure, "Structure JSON")->required();
  solve_cmd->add_option("--variant", so.variant, "iht, gradmp, stoiht or stogradmp");
  solve_cmd->add_option("--gamma", so.gamma, "Step size (default: objective specific)");
  solve_cmd->add_option("--iters", so.iters, "Outer iteration cap")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--seed", so.seed, "Seed for stochastic gradients and perturbation");
  solve_cmd->add_option("--tol", so.tolerance, "Relative objective change that stops the run");
  solve_cmd->add_option("--samples", so.samples, "crowd: paired samples per evaluation")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--temperature", so.temperature, "crowd: sigmoid temperature");
  solve_cmd->add_option("--out", so.out, "Output directory (default: JSON trace on stdout)");

  ExperimentOptions eo;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run a seeded experiment sweep");
  experiment_cmd->add_option("--kind", eo.kind, "regression, classification, crowd or grn")->required();
  experiment_cmd->add_option("--config", eo.config, "Experiment config JSON (default: built-in)");
  experiment_cmd->add_option("--out", eo.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForVersion&) {
    out << TVCS_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::Success&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "tvcs: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (project_cmd->parsed()) return run_project(po, out, err);
    if (solve_cmd->parsed()) return run_solve(so, out, err);
    return run_experiment_command(eo, threads, out);
  } catch (const ConfigError& e) {
    err << "tvcs: " << e.what() << "\n";
    return kExitConfig;
  } catch (const StructureError& e) {
    err << "tvcs: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& e) {
    err << "tvcs: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "tvcs: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace tvcs

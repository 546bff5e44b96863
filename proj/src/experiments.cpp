#include "tvcs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "tvcs/crowd.hpp"
#include "tvcs/generators.hpp"
#include "tvcs/grn.hpp"
#include "tvcs/log.hpp"
#include "tvcs/metrics.hpp"
#include "tvcs/regression.hpp"
#include "tvcs/serialization.hpp"

namespace tvcs {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::regression: return "regression";
    case ExperimentKind::classification: return "classification";
    case ExperimentKind::crowd: return "crowd";
    case ExperimentKind::grn: return "grn";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "regression") return ExperimentKind::regression;
  if (name == "classification") return ExperimentKind::classification;
  if (name == "crowd") return ExperimentKind::crowd;
  if (name == "grn") return ExperimentKind::grn;
  throw std::invalid_argument("unknown experiment kind '" + name + "'");
}

ExperimentConfig::ExperimentConfig() {
  solver.variant = SolverVariant::gradmp;
  solver.max_outer_iterations = 50;
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::regression: break;
    case ExperimentKind::classification:
      c.sample_sizes = {50, 100, 150, 200};
      break;
    case ExperimentKind::crowd:
      c.trials = 10;
      c.solver.variant = SolverVariant::sto_iht;
      c.solver.max_outer_iterations = 40;
      c.solver.stop_tolerance = 0.0;
      break;
    case ExperimentKind::grn:
      c.trials = 10;
      c.solver.max_outer_iterations = 30;
      break;
  }
  return c;
}

std::vector<std::string> ExperimentConfig::resolved_methods() const {
  if (!methods.empty()) return methods;
  switch (kind) {
    case ExperimentKind::crowd: return {"optimized", "random"};
    case ExperimentKind::grn: return {"tvcs", "rows", "cols", "overall", "unconstrained"};
    default: return {"tvcs", "rows", "cols", "overall"};
  }
}

std::vector<double> ExperimentConfig::sweep_values() const {
  switch (kind) {
    case ExperimentKind::crowd: return budget_ratios;
    case ExperimentKind::grn: return {noise_fraction};
    default: return {sample_sizes.begin(), sample_sizes.end()};
  }
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (trials == 0) fail("trials must be at least 1");
  if (!(step_size >= 0.0)) fail("step_size must be non-negative");
  {
    auto checked = solver;
    checked.step_size = 1.0;
    checked.validate();
  }
  std::set<std::string> allowed;
  {
    auto all = ExperimentConfig::defaults(kind);
    const auto names = all.resolved_methods();
    allowed.insert(names.begin(), names.end());
  }
  for (const auto& m : methods) {
    if (!allowed.count(m)) fail("methods: '" + m + "' is not available for " + to_string(kind));
  }
  switch (kind) {
    case ExperimentKind::regression:
    case ExperimentKind::classification:
      if (side == 0) fail("side must be positive");
      if (sample_sizes.empty()) fail("sample_sizes must not be empty");
      for (auto n : sample_sizes) {
        if (n == 0) fail("sample_sizes entries must be positive");
      }
      if (!(noise_sd >= 0.0)) fail("noise_sd must be non-negative");
      if (kind == ExperimentKind::classification && test_samples == 0) {
        fail("test_samples must be positive");
      }
      break;
    case ExperimentKind::crowd:
      if (workers == 0 || tasks == 0) fail("workers and tasks must be positive");
      if (budget_ratios.empty()) fail("budget_ratios must not be empty");
      for (double r : budget_ratios) {
        if (!(r > 0.0)) fail("budget_ratios entries must be positive");
      }
      if (!(worker_slack >= 1.0)) fail("worker_slack must be at least 1");
      if (crowd_samples == 0) fail("crowd_samples must be positive");
      if (!(temperature > 0.0)) fail("temperature must be positive");
      if (heldout_draws == 0) fail("heldout_draws must be positive");
      break;
    case ExperimentKind::grn:
      if (genes < 2) fail("genes must be at least 2");
      if (trajectories == 0) fail("trajectories must be positive");
      if (time_points < 2 * trajectories) fail("time_points must allow two points per trajectory");
      if (degree == 0) fail("degree must be positive");
      if (!(noise_fraction >= 0.0)) fail("noise_fraction must be non-negative");
      if (!(growth_bound >= 1.0)) fail("growth_bound must be at least 1");
      break;
  }
}

namespace {

template <typename T>
void read_into(const json& doc, const char* key, T& target, std::set<std::string>& seen) {
  if (!doc.contains(key)) return;
  seen.insert(key);
  try {
    target = doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("config: field '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& doc, const std::set<std::string>& seen, const std::string& where) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!seen.count(it.key())) throw FormatError(where + ": unknown field '" + it.key() + "'");
  }
}

json solver_json(const SolverConfig& s, double step) {
  return {{"variant", to_string(s.variant)},
          {"step_size", step},
          {"max_outer_iterations", s.max_outer_iterations},
          {"stop_tolerance", s.stop_tolerance},
          {"subspace_budget", s.subspace_budget},
          {"warm_start_projection", s.warm_start_projection},
          {"projection",
           {{"max_iterations", s.projection.max_iterations},
            {"binary_tolerance", s.projection.binary_tolerance},
            {"gap_tolerance", s.projection.gap_tolerance},
            {"perturbation_scale", s.projection.perturbation_scale},
            {"rng_seed", s.projection.rng_seed}}}};
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text, ExperimentKind kind) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("config: expected a JSON object");
  if (doc.contains("kind")) {
    const auto named = doc["kind"].is_string() ? doc["kind"].get<std::string>() : std::string();
    if (named != to_string(kind)) {
      throw FormatError("config: kind '" + named + "' does not match --kind " + to_string(kind));
    }
  }
  auto c = ExperimentConfig::defaults(kind);
  std::set<std::string> seen{"kind"};
  read_into(doc, "trials", c.trials, seen);
  read_into(doc, "seed", c.seed, seen);
  read_into(doc, "threads", c.threads, seen);
  read_into(doc, "methods", c.methods, seen);
  read_into(doc, "side", c.side, seen);
  read_into(doc, "sample_sizes", c.sample_sizes, seen);
  read_into(doc, "noise_sd", c.noise_sd, seen);
  read_into(doc, "test_samples", c.test_samples, seen);
  read_into(doc, "workers", c.workers, seen);
  read_into(doc, "tasks", c.tasks, seen);
  read_into(doc, "budget_ratios", c.budget_ratios, seen);
  read_into(doc, "task_slack", c.task_slack, seen);
  read_into(doc, "worker_slack", c.worker_slack, seen);
  read_into(doc, "crowd_samples", c.crowd_samples, seen);
  read_into(doc, "temperature", c.temperature, seen);
  read_into(doc, "heldout_draws", c.heldout_draws, seen);
  read_into(doc, "genes", c.genes, seen);
  read_into(doc, "time_points", c.time_points, seen);
  read_into(doc, "degree", c.degree, seen);
  read_into(doc, "trajectories", c.trajectories, seen);
  read_into(doc, "noise_fraction", c.noise_fraction, seen);
  read_into(doc, "growth_bound", c.growth_bound, seen);
  if (doc.contains("solver")) {
    seen.insert("solver");
    const auto& s = doc["solver"];
    if (!s.is_object()) throw FormatError("config: field 'solver' must be an object");
    std::set<std::string> inner;
    if (s.contains("variant")) {
      inner.insert("variant");
      try {
        c.solver.variant = parse_solver_variant(s["variant"].get<std::string>());
      } catch (const std::exception& e) {
        throw FormatError(std::string("config: solver.variant: ") + e.what());
      }
    }
    read_into(s, "step_size", c.step_size, inner);
    read_into(s, "max_outer_iterations", c.solver.max_outer_iterations, inner);
    read_into(s, "stop_tolerance", c.solver.stop_tolerance, inner);
    read_into(s, "subspace_budget", c.solver.subspace_budget, inner);
    read_into(s, "warm_start_projection", c.solver.warm_start_projection, inner);
    if (s.contains("projection")) {
      inner.insert("projection");
      const auto& p = s["projection"];
      if (!p.is_object()) throw FormatError("config: field 'solver.projection' must be an object");
      std::set<std::string> pk;
      read_into(p, "max_iterations", c.solver.projection.max_iterations, pk);
      read_into(p, "binary_tolerance", c.solver.projection.binary_tolerance, pk);
      read_into(p, "gap_tolerance", c.solver.projection.gap_tolerance, pk);
      read_into(p, "perturbation_scale", c.solver.projection.perturbation_scale, pk);
      read_into(p, "rng_seed", c.solver.projection.rng_seed, pk);
      reject_unknown(p, pk, "config.solver.projection");
    }
    reject_unknown(s, inner, "config.solver");
  }
  reject_unknown(doc, seen, "config");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c, int indent) {
  json doc = {{"kind", to_string(c.kind)},
              {"trials", c.trials},
              {"seed", c.seed},
              {"threads", c.threads},
              {"methods", c.resolved_methods()},
              {"solver", solver_json(c.solver, c.step_size)}};
  switch (c.kind) {
    case ExperimentKind::regression:
    case ExperimentKind::classification:
      doc["side"] = c.side;
      doc["sample_sizes"] = c.sample_sizes;
      doc["noise_sd"] = c.noise_sd;
      if (c.kind == ExperimentKind::classification) doc["test_samples"] = c.test_samples;
      break;
    case ExperimentKind::crowd:
      doc["workers"] = c.workers;
      doc["tasks"] = c.tasks;
      doc["budget_ratios"] = c.budget_ratios;
      doc["task_slack"] = c.task_slack;
      doc["worker_slack"] = c.worker_slack;
      doc["crowd_samples"] = c.crowd_samples;
      doc["temperature"] = c.temperature;
      doc["heldout_draws"] = c.heldout_draws;
      break;
    case ExperimentKind::grn:
      doc["genes"] = c.genes;
      doc["time_points"] = c.time_points;
      doc["degree"] = c.degree;
      doc["trajectories"] = c.trajectories;
      doc["noise_fraction"] = c.noise_fraction;
      doc["growth_bound"] = c.growth_bound;
      break;
  }
  return doc.dump(indent);
}

namespace {

struct Job {
  std::size_t sweep_index;
  double sweep_value;
  std::size_t trial;
};

TvcsStructure method_structure(const std::string& method, const TvcsStructure& full) {
  if (method == "tvcs") return full;
  if (method == "rows") return without_view2(full);
  if (method == "cols") return without_view1(full);
  if (method == "overall") return overall_only_structure(full.dimension, full.overall_budget);
  throw std::invalid_argument("method '" + method + "' has no structure");
}

SolverConfig solver_for(const ExperimentConfig& config, double default_step) {
  auto s = config.solver;
  s.step_size = config.step_size > 0.0 ? config.step_size : default_step;
  return s;
}

std::vector<double> post_project(std::span<const double> w, const ConstraintSystem& full,
                                 const ExperimentConfig& config) {
  return project(w, full, config.solver.projection).projected;
}

template <typename Fn>
void run_method(TrialRecord& record, Fn&& fn) {
  try {
    fn(record.metrics);
  } catch (const std::exception& e) {
    record.error = e.what();
    record.metrics.clear();
    log_message(LogLevel::info, "trial " + std::to_string(record.trial) + " method " +
                                    record.method + " failed: " + e.what());
  }
}

void regression_job(const ExperimentConfig& config, const Job& job, std::uint64_t trial_seed,
                    std::vector<TrialRecord>& records) {
  const bool classify = config.kind == ExperimentKind::classification;
  Rng model_rng(trial_seed);
  const auto full = gen_random_structure(config.side, model_rng);
  const auto w_bar = gen_true_model(full, model_rng, config.solver.projection);
  const auto full_system = build_constraint_system(full);
  Rng data_rng(derive_seed(trial_seed, job.sweep_index + 1));
  const auto n = static_cast<std::size_t>(job.sweep_value);
  std::unique_ptr<ObjectiveOracle> objective;
  double default_step = 0.0;
  RegressionData test;
  if (classify) {
    auto data = gen_classification_data(w_bar, config.side, config.side, n, data_rng);
    Rng test_rng(derive_seed(trial_seed, 1000 + job.sweep_index));
    test = gen_classification_data(w_bar, config.side, config.side, config.test_samples, test_rng);
    auto obj = std::make_unique<SquaredHingeObjective>(std::move(data));
    default_step = obj->default_step_size();
    objective = std::move(obj);
  } else {
    auto data = gen_regression_data(w_bar, config.side, config.side, n, config.noise_sd, data_rng);
    auto obj = std::make_unique<LeastSquaresObjective>(std::move(data));
    default_step = obj->default_step_size();
    objective = std::move(obj);
  }
  const auto solver = solver_for(config, default_step);
  for (auto& record : records) {
    run_method(record, [&](auto& metrics) {
      const auto trace = solve(*objective, method_structure(record.method, full), solver);
      const auto w = record.method == "tvcs" ? trace.final_w : post_project(trace.final_w, full_system, config);
      metrics["recall"] = selection_recall(w, w_bar);
      metrics["recovery"] = recovery_success(w, w_bar) ? 1.0 : 0.0;
      metrics["objective"] = objective->value(w);
      metrics["iterations"] = static_cast<double>(trace.iterations);
      if (classify) metrics["classification_error"] = classification_error(test, w);
    });
  }
}

void crowd_job(const ExperimentConfig& config, const Job& job, std::uint64_t trial_seed,
               std::vector<TrialRecord>& records) {
  Rng model_rng(trial_seed);
  const auto model = gen_crowd_model(config.workers, config.tasks, model_rng);
  const double ratio = job.sweep_value;
  const auto total = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(config.tasks)));
  const auto per_task = std::min<std::size_t>(
      config.workers, static_cast<std::size_t>(std::ceil(ratio)) + config.task_slack);
  const auto per_worker = std::min<std::size_t>(
      config.tasks, static_cast<std::size_t>(std::ceil(config.worker_slack * static_cast<double>(total) /
                                                       static_cast<double>(config.workers))));
  const auto structure = crowd_structure(config.workers, config.tasks, per_worker, per_task, total);
  const auto system = build_constraint_system(structure);

  for (auto& record : records) {
    run_method(record, [&](auto& metrics) {
      Support assignment;
      if (record.method == "optimized") {
        CrowdObjective::Options options;
        options.samples = config.crowd_samples;
        options.temperature = config.temperature;
        options.seed = derive_seed(trial_seed, 77);
        const CrowdObjective objective(model, options);
        auto solver = solver_for(config, static_cast<double>(config.tasks));
        solver.rng_seed = derive_seed(trial_seed, 2000 + job.sweep_index);
        const auto trace = solve(objective, structure, solver);
        assignment = support_of(trace.final_w);
        metrics["smoothed_start"] = -trace.objective.front();
        metrics["smoothed_final"] = -objective.value(trace.final_w);
      } else {
        Rng rng(derive_seed(trial_seed, 3000 + job.sweep_index));
        assignment = random_assignment(structure, rng);
      }
      if (!is_feasible_support(system, assignment)) throw std::runtime_error("infeasible assignment");
      Rng heldout(derive_seed(trial_seed, 5000 + job.sweep_index));
      const auto sim = simulated_accuracy(model, assignment, config.heldout_draws, heldout);
      metrics["heldout_accuracy"] = sim.mean;
      metrics["expected_accuracy"] = exact_expected_accuracy(model, assignment).mean;
      metrics["assigned"] = static_cast<double>(support_indices(assignment).size());
    });
  }
}

void grn_job(const ExperimentConfig& config, const Job&, std::uint64_t trial_seed,
             std::vector<TrialRecord>& records) {
  Rng model_rng(trial_seed);
  GrnSeriesOptions options;
  options.trajectories = config.trajectories;
  options.growth_bound = config.growth_bound;
  const auto instance = gen_grn_series(config.genes, config.time_points, config.degree,
                                       config.noise_fraction, model_rng, options);
  const GrnObjective objective(instance.data);
  const std::size_t n = config.genes;
  const auto full = grn_structure(n, config.degree, config.degree, n * config.degree / 2);
  const auto full_system = build_constraint_system(full);
  const auto solver = solver_for(config, objective.default_step_size());

  for (auto& record : records) {
    run_method(record, [&](auto& metrics) {
      std::vector<double> w;
      if (record.method == "unconstrained") {
        const Support all(objective.dimension(), 1);
        w = objective.subspace_minimize(all, std::vector<double>(objective.dimension(), 0.0), 0, 0.0);
      } else {
        const auto trace = solve(objective, method_structure(record.method, full), solver);
        w = record.method == "tvcs" ? trace.final_w : post_project(trace.final_w, full_system, config);
        metrics["iterations"] = static_cast<double>(trace.iterations);
      }
      const auto eval = confusion_and_metrics(grn_matrix(n, w), instance.network);
      metrics["sn"] = eval.report.sn;
      metrics["sp"] = eval.report.sp;
      metrics["acc"] = eval.report.acc;
      metrics["f_measure"] = eval.report.f_measure;
      metrics["mcc"] = eval.report.mcc;
      metrics["auc"] = eval.report.auc;
    });
  }
}

}  // namespace

std::vector<double> ExperimentResult::means(const std::string& method,
                                            const std::string& metric) const {
  std::vector<double> out;
  for (const auto& row : aggregate) {
    if (row.method == method && row.metric == metric) out.push_back(row.mean);
  }
  return out;
}

std::vector<double> ExperimentResult::standard_errors(const std::string& method,
                                                      const std::string& metric) const {
  std::vector<double> out;
  for (const auto& row : aggregate) {
    if (row.method == method && row.metric == metric) out.push_back(row.standard_error);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto sweep = config.sweep_values();
  const auto methods = config.resolved_methods();

  std::vector<Job> jobs;
  for (std::size_t s = 0; s < sweep.size(); ++s) {
    for (std::size_t t = 0; t < config.trials; ++t) jobs.push_back({s, sweep[s], t});
  }
  std::vector<std::vector<TrialRecord>> slots(jobs.size());

  auto run_job = [&](std::size_t index) {
    const auto& job = jobs[index];
    const auto trial_seed = derive_seed(config.seed, job.trial);
    auto& records = slots[index];
    for (const auto& m : methods) {
      TrialRecord r;
      r.sweep_index = job.sweep_index;
      r.sweep_value = job.sweep_value;
      r.trial = job.trial;
      r.method = m;
      r.seed = trial_seed;
      records.push_back(std::move(r));
    }
    try {
      switch (config.kind) {
        case ExperimentKind::regression:
        case ExperimentKind::classification: regression_job(config, job, trial_seed, records); break;
        case ExperimentKind::crowd: crowd_job(config, job, trial_seed, records); break;
        case ExperimentKind::grn: grn_job(config, job, trial_seed, records); break;
      }
    } catch (const std::exception& e) {
      for (auto& r : records) {
        r.error = std::string("data generation failed: ") + e.what();
        r.metrics.clear();
      }
    }
    log_message(LogLevel::debug, "finished sweep " + std::to_string(job.sweep_index) + " trial " +
                                     std::to_string(job.trial));
  };

  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) run_job(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  ExperimentResult result;
  for (auto& slot : slots) {
    for (auto& r : slot) result.trials.push_back(std::move(r));
  }

  // Aggregate in (sweep, method, metric) order.
  for (std::size_t s = 0; s < sweep.size(); ++s) {
    for (const auto& m : methods) {
      std::map<std::string, std::vector<double>> values;
      for (const auto& r : result.trials) {
        if (r.sweep_index != s || r.method != m || !r.error.empty()) continue;
        for (const auto& [k, v] : r.metrics) values[k].push_back(v);
      }
      for (const auto& [metric, xs] : values) {
        AggregateRow row{sweep[s], m, metric, 0.0, 0.0, xs.size()};
        for (double x : xs) row.mean += x;
        row.mean /= static_cast<double>(xs.size());
        if (xs.size() > 1) {
          double ss = 0.0;
          for (double x : xs) ss += (x - row.mean) * (x - row.mean);
          row.standard_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
        }
        result.aggregate.push_back(std::move(row));
      }
    }
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string trials_to_csv(const ExperimentResult& result, const ExperimentConfig& config) {
  std::set<std::string> names;
  for (const auto& r : result.trials) {
    for (const auto& [k, v] : r.metrics) names.insert(k);
  }
  std::string out = "kind,sweep,trial,method,seed,status";
  for (const auto& n : names) out += "," + n;
  out += "\n";
  for (const auto& r : result.trials) {
    std::string status = r.error.empty() ? "ok" : "failed";
    out += to_string(config.kind) + "," + format_double(r.sweep_value) + "," + std::to_string(r.trial) +
           "," + r.method + "," + std::to_string(r.seed) + "," + status;
    for (const auto& n : names) {
      const auto it = r.metrics.find(n);
      out += ",";
      if (it != r.metrics.end()) out += format_double(it->second);
    }
    out += "\n";
  }
  return out;
}

std::string aggregate_to_csv(const ExperimentResult& result) {
  std::string out = "sweep,method,metric,mean,standard_error,count\n";
  for (const auto& row : result.aggregate) {
    out += format_double(row.sweep_value) + "," + row.method + "," + row.metric + "," +
           format_double(row.mean) + "," + format_double(row.standard_error) + "," +
           std::to_string(row.count) + "\n";
  }
  return out;
}

ExperimentFiles write_experiment_outputs(const ExperimentResult& result,
                                         const ExperimentConfig& config,
                                         const std::filesystem::path& dir,
                                         const std::string& started_at,
                                         const std::string& finished_at) {
  std::filesystem::create_directories(dir);
  ExperimentFiles files{dir / "trials.csv", dir / "aggregate.csv", dir / "manifest.json"};
  write_file_atomic(files.trials, trials_to_csv(result, config));
  write_file_atomic(files.aggregate, aggregate_to_csv(result));

  std::size_t failures = 0;
  std::vector<json> errors;
  for (const auto& r : result.trials) {
    if (r.error.empty()) continue;
    ++failures;
    if (errors.size() < 20) {
      errors.push_back({{"sweep", r.sweep_value}, {"trial", r.trial}, {"method", r.method}, {"error", r.error}});
    }
  }
  json trial_seeds = json::array();
  for (std::size_t t = 0; t < config.trials; ++t) trial_seeds.push_back(derive_seed(config.seed, t));
  json manifest = {{"subcommand", "experiment"},
                   {"version", TVCS_VERSION},
                   {"config", json::parse(experiment_config_to_json(config))},
                   {"master_seed", config.seed},
                   {"trial_seeds", trial_seeds},
                   {"started_at", started_at},
                   {"finished_at", finished_at},
                   {"seconds", result.seconds},
                   {"failed_records", failures},
                   {"failures", errors},
                   {"outputs",
                    {{"trials", files.trials.string()},
                     {"aggregate", files.aggregate.string()},
                     {"manifest", files.manifest.string()}}}};
  write_file_atomic(files.manifest, manifest.dump(2) + "\n");
  return files;
}

}  // namespace tvcs

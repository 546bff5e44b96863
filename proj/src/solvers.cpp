#include "tvcs/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace tvcs {

std::vector<double> ObjectiveOracle::stochastic_gradient(std::span<const double> w, Rng&) const {
  return gradient(w);
}

std::vector<double> ObjectiveOracle::subspace_minimize(std::span<const std::uint8_t> support,
                                                       std::span<const double> start,
                                                       std::size_t budget, double step) const {
  const auto bounds = box();
  std::vector<double> w(start.begin(), start.end());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!support[i]) w[i] = 0.0;
  }
  for (std::size_t it = 0; it < budget; ++it) {
    const auto g = gradient(w);
    double moved = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!support[i]) continue;
      double next = w[i] - step * g[i];
      if (bounds) next = std::clamp(next, bounds->lower, bounds->upper);
      moved = std::max(moved, std::abs(next - w[i]));
      w[i] = next;
    }
    if (moved <= 1e-14) break;
  }
  return w;
}

std::string to_string(SolverVariant variant) {
  switch (variant) {
    case SolverVariant::iht: return "iht";
    case SolverVariant::gradmp: return "gradmp";
    case SolverVariant::sto_iht: return "stoiht";
    case SolverVariant::sto_gradmp: return "stogradmp";
  }
  return "unknown";
}

SolverVariant parse_solver_variant(const std::string& name) {
  std::string key;
  for (char c : name) {
    if (c != '_' && c != '-') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "iht") return SolverVariant::iht;
  if (key == "gradmp") return SolverVariant::gradmp;
  if (key == "stoiht") return SolverVariant::sto_iht;
  if (key == "stogradmp") return SolverVariant::sto_gradmp;
  throw std::invalid_argument("unknown solver variant '" + name + "'");
}

void SolverConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw std::invalid_argument("step_size must be positive");
  }
  if (max_outer_iterations == 0) throw std::invalid_argument("max_outer_iterations must be positive");
  if (!(stop_tolerance >= 0.0)) throw std::invalid_argument("stop_tolerance must be non-negative");
  projection.validate();
}

ProjectionResult project_onto_box(std::span<const double> z, const ConstraintSystem& system,
                                  const Box& box, const ProjectionConfig& config) {
  if (!(box.lower <= 0.0 && 0.0 <= box.upper)) {
    throw std::invalid_argument("box must contain zero");
  }
  std::vector<double> clamped(z.size()), magnitude(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    clamped[i] = std::clamp(z[i], box.lower, box.upper);
    const double miss = clamped[i] - z[i];
    magnitude[i] = std::sqrt(std::max(z[i] * z[i] - miss * miss, 0.0));
  }
  auto result = project(magnitude, system, config);
  for (std::size_t i = 0; i < z.size(); ++i) result.projected[i] = result.support[i] ? clamped[i] : 0.0;
  return result;
}

namespace {

class Projector {
 public:
  Projector(const TvcsStructure& structure, const ObjectiveOracle& objective,
            const SolverConfig& config)
      : system_(build_constraint_system(structure)), box_(objective.box()), config_(config) {}

  std::vector<double> operator()(std::span<const double> z) {
    auto cfg = config_.projection;
    if (config_.warm_start_projection && last_) cfg.warm_start = std::move(last_);
    auto result = box_ ? project_onto_box(z, system_, *box_, cfg) : project(z, system_, cfg);
    iterations_ += result.iterations_used;
    if (config_.warm_start_projection && !result.iterate.x.empty()) last_ = std::move(result.iterate);
    else last_.reset();
    return std::move(result.projected);
  }

  std::size_t iterations() const { return iterations_; }

 private:
  ConstraintSystem system_;
  std::optional<Box> box_;
  const SolverConfig& config_;
  std::optional<PrimalDualIterate> last_;
  std::size_t iterations_ = 0;
};

using Clock = std::chrono::steady_clock;

SolveTrace run(const ObjectiveOracle& objective, const TvcsStructure& structure,
               const SolverConfig& config, bool matching_pursuit, bool stochastic) {
  config.validate();
  const std::size_t p = structure.dimension;
  if (objective.dimension() != p) {
    throw std::invalid_argument("objective dimension " + std::to_string(objective.dimension()) +
                                " does not match structure dimension " + std::to_string(p));
  }
  Projector project_full(structure, objective, config);
  std::optional<Projector> project_doubled;
  if (matching_pursuit) project_doubled.emplace(doubled_budgets(structure), objective, config);
  Rng rng(config.rng_seed);

  SolveTrace trace;
  std::vector<double> w(p, 0.0);
  double f = objective.value(w);
  trace.objective.push_back(f);
  trace.supports.push_back(support_of(w));
  trace.seconds.push_back(0.0);

  for (std::size_t t = 1; t <= config.max_outer_iterations; ++t) {
    const auto start = Clock::now();
    const auto g = stochastic ? objective.stochastic_gradient(w, rng) : objective.gradient(w);
    std::vector<double> next;
    if (!matching_pursuit) {
      std::vector<double> z(p);
      for (std::size_t i = 0; i < p; ++i) z[i] = w[i] - config.step_size * g[i];
      next = project_full(z);
    } else {
      // Gradient support under doubled budgets, merged with the current support.
      auto merged = support_of((*project_doubled)(g));
      for (std::size_t i = 0; i < p; ++i) merged[i] = merged[i] || w[i] != 0.0;
      const auto z = objective.subspace_minimize(merged, w, config.subspace_budget, config.step_size);
      next = project_full(z);
    }
    const double f_next = objective.value(next);
    w = std::move(next);
    trace.objective.push_back(f_next);
    trace.supports.push_back(support_of(w));
    trace.seconds.push_back(std::chrono::duration<double>(Clock::now() - start).count());
    trace.iterations = t;
    const bool settled = std::abs(f_next - f) <= config.stop_tolerance * std::abs(f);
    f = f_next;
    if (settled) {
      trace.converged = true;
      break;
    }
  }
  trace.final_w = std::move(w);
  trace.projection_iterations =
      project_full.iterations() + (project_doubled ? project_doubled->iterations() : 0);
  return trace;
}

}  // namespace

SolveTrace iht(const ObjectiveOracle& objective, const TvcsStructure& structure,
               const SolverConfig& config) {
  return run(objective, structure, config, false, false);
}

SolveTrace gradmp(const ObjectiveOracle& objective, const TvcsStructure& structure,
                  const SolverConfig& config) {
  return run(objective, structure, config, true, false);
}

SolveTrace stochastic_variant(const ObjectiveOracle& objective, const TvcsStructure& structure,
                              const SolverConfig& config) {
  const bool pursuit =
      config.variant == SolverVariant::gradmp || config.variant == SolverVariant::sto_gradmp;
  return run(objective, structure, config, pursuit, true);
}

SolveTrace solve(const ObjectiveOracle& objective, const TvcsStructure& structure,
                 const SolverConfig& config) {
  switch (config.variant) {
    case SolverVariant::iht: return iht(objective, structure, config);
    case SolverVariant::gradmp: return gradmp(objective, structure, config);
    case SolverVariant::sto_iht:
    case SolverVariant::sto_gradmp: return stochastic_variant(objective, structure, config);
  }
  throw std::invalid_argument("unknown solver variant");
}

}  // namespace tvcs

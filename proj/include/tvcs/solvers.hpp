#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvcs/projection.hpp"
#include "tvcs/random.hpp"
#include "tvcs/structure.hpp"

namespace tvcs {

/// Coordinate bounds lower <= w_i <= upper with lower <= 0 <= upper.
struct Box {
  double lower = 0.0;
  double upper = 1.0;
};

/// Differentiable objective f(w) minimized by the outer solvers.
///
/// Implementations must be safe for concurrent const use; any randomness is
/// drawn from the caller-owned stream passed to stochastic_gradient.
class ObjectiveOracle {
 public:
  virtual ~ObjectiveOracle() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(std::span<const double> w) const = 0;
  virtual std::vector<double> gradient(std::span<const double> w) const = 0;

  virtual bool has_stochastic_gradient() const { return false; }
  virtual std::vector<double> stochastic_gradient(std::span<const double> w, Rng& rng) const;

  /// Approximate minimizer over vectors supported on `support`, started from
  /// `start`. The default runs `budget` projected gradient steps of size `step`.
  virtual std::vector<double> subspace_minimize(std::span<const std::uint8_t> support,
                                                std::span<const double> start, std::size_t budget,
                                                double step) const;

  /// Optional coordinate bounds enforced by the solvers alongside the structure.
  virtual std::optional<Box> box() const { return std::nullopt; }
};

enum class SolverVariant { iht, gradmp, sto_iht, sto_gradmp };

std::string to_string(SolverVariant variant);
/// Accepts iht, gradmp, stoiht, stogradmp (case-insensitive); throws std::invalid_argument.
SolverVariant parse_solver_variant(const std::string& name);

struct SolverConfig {
  SolverVariant variant = SolverVariant::iht;
  double step_size = 1.0;
  std::size_t max_outer_iterations = 500;
  /// Stop once |f(w^{t+1}) - f(w^t)| <= stop_tolerance * |f(w^t)|.
  double stop_tolerance = 1e-6;
  std::uint64_t rng_seed = 0;
  /// Inner iterations of the default subspace minimizer.
  std::size_t subspace_budget = 100;
  /// Reuse the previous primal-dual pair when projecting consecutive iterates.
  bool warm_start_projection = true;
  ProjectionConfig projection;

  void validate() const;
};

struct SolveTrace {
  /// objective[0] is f(w^0); entry t is f(w^t).
  std::vector<double> objective;
  std::vector<Support> supports;
  std::vector<double> seconds;
  std::vector<double> final_w;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t projection_iterations = 0;
};

/// Euclidean projection onto {w : supp(w) feasible, lower <= w <= upper}.
///
/// Coordinate i kept at clamp(z_i) reduces the squared distance by
/// z_i^2 - (clamp(z_i) - z_i)^2 >= 0, so the support is the TVCS projection of
/// the square roots of those gains.
ProjectionResult project_onto_box(std::span<const double> z, const ConstraintSystem& system,
                                  const Box& box, const ProjectionConfig& config = {});

SolveTrace iht(const ObjectiveOracle& objective, const TvcsStructure& structure,
               const SolverConfig& config);
SolveTrace gradmp(const ObjectiveOracle& objective, const TvcsStructure& structure,
                  const SolverConfig& config);
/// StoIHT or StoGradMP: the gradient is drawn from objective.stochastic_gradient
/// under a stream seeded with config.rng_seed.
SolveTrace stochastic_variant(const ObjectiveOracle& objective, const TvcsStructure& structure,
                              const SolverConfig& config);

/// Dispatches on config.variant.
SolveTrace solve(const ObjectiveOracle& objective, const TvcsStructure& structure,
                 const SolverConfig& config);

}  // namespace tvcs

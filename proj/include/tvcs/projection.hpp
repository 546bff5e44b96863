#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvcs/random.hpp"
#include "tvcs/structure.hpp"

namespace tvcs {

enum class StepRule {
  /// z <- clamp(z - gamma * grad f(z)) with fixed gamma.
  plain,
  /// Momentum extrapolation with function-value restart; a rejected extrapolated
  /// step falls back to the plain step, so the penalty never increases.
  accelerated,
};

enum class RoundingRule {
  /// Round x once every coordinate is within the binary tolerance of {0, 1}.
  primal,
  /// Additionally test the support of positive reduced profits v^2 - A^T u.
  primal_or_dual,
};

/// Snapshot handed to ProjectionConfig::observer after every iteration.
/// Coordinates are those of the (possibly row-equilibrated) internal system.
struct IterateView {
  std::size_t iteration = 0;
  std::span<const double> x;
  std::span<const double> y;
  double penalty = 0.0;
};

/// Stacked iterate z = (x, y) of the penalty problem; y = (u, w) holds one dual
/// per group row followed by one per box constraint x_i <= 1.
struct PrimalDualIterate {
  std::vector<double> x;
  std::vector<double> y;
  std::size_t iteration = 0;
  double penalty_value = 0.0;
};

struct ProjectionConfig {
  std::size_t max_iterations = 2'000'000;
  /// Near-binary threshold delta, in (0, 0.5).
  double binary_tolerance = 0.1;
  /// Accepted duality gap, relative to ||v^2||_1 of the normalized objective.
  double gap_tolerance = 1e-9;
  /// Relative scale of the uniform tie-breaking perturbation added to v^2; 0 disables it.
  double perturbation_scale = 1e-9;
  std::uint64_t rng_seed = 0;
  /// Fixed step size; 1/L from estimate_step_size when unset.
  std::optional<double> step_size;
  StepRule step_rule = StepRule::accelerated;
  RoundingRule rounding = RoundingRule::primal_or_dual;
  /// Scale each group row by 1/max(s_g, 1) and the duality term to a unit-norm
  /// row. The zero set of the penalty, the LP and its vertices are unchanged.
  bool equilibrate_rows = true;
  /// Iterations between reduced-profit rounding attempts.
  std::size_t dual_check_interval = 10;
  /// Certificate attempts against a polished dual, whose group duals are
  /// improved by exact line searches on the LP dual starting from the current y.
  /// Attempts are spaced max(polish_interval, t / 8) iterations apart; 0 disables them.
  std::size_t polish_interval = 50;
  /// Starting point; x = 0, y = 0 when unset or when its sizes do not match.
  /// project() expects y in the units of v^2, as returned in ProjectionResult::iterate.
  std::optional<PrimalDualIterate> warm_start;
  bool record_history = false;
  std::function<void(const IterateView&)> observer;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Unaccelerated projected gradient with primal rounding only.
  static ProjectionConfig plain_gradient();
};

struct PenaltyGradient {
  std::vector<double> gx;
  std::vector<double> gy;
};

/// Counts matrix nonzeros and vector entries touched by one penalty evaluation.
struct OperationCounter {
  std::uint64_t operations = 0;
};

struct RoundingCertificate {
  bool accepted = false;
  bool feasible = false;
  Support support;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
};

struct FeasibilitySolution {
  PrimalDualIterate iterate;
  Support support;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  double step_size = 0.0;
  double contraction_ratio = 0.0;
  /// max_i min(x_i, 1 - x_i) at termination.
  double max_fractionality = 0.0;
  bool dual_rounding_used = false;
  std::vector<double> penalty_history;
};

struct ProjectionResult {
  Support support;
  std::vector<double> projected;
  std::size_t iterations_used = 0;
  double final_gap = 0.0;
  double contraction_ratio = 0.0;
  double max_fractionality = 0.0;
  bool perturbed = false;
  /// Terminal primal-dual pair, y in the units of v^2; usable as a warm start.
  PrimalDualIterate iterate;
};

/// Raised when the penalty solver exhausts its iteration budget without a certified support.
class ProjectionError : public std::runtime_error {
 public:
  ProjectionError(const std::string& what, PrimalDualIterate last, double gap)
      : std::runtime_error(what), last_(std::move(last)), gap_(gap) {}

  const PrimalDualIterate& last_iterate() const { return last_; }
  double gap() const { return gap_; }

 private:
  PrimalDualIterate last_;
  double gap_;
};

/// Quadratic penalty whose zeros are the primal-dual optimal pairs of the
/// relaxed projection LP:
///
///   1/2 (<[s; 1], y> - <v2, x>)^2 + 1/2 ||[v2 - [A^T I] y]_+||^2 + 1/2 ||[A x - s]_+||^2
///
/// over 0 <= x <= 1, y >= 0. Group rows may carry positive weights (row g of A
/// and s_g scaled by weight_g) and the first term a positive weight; neither
/// changes the LP or the zeros of the penalty.
class FeasibilityPenalty {
 public:
  FeasibilityPenalty(const ConstraintSystem& system, std::vector<double> v2,
                     std::vector<double> row_weights = {}, double duality_weight = 1.0);

  std::size_t primal_size() const { return v2_.size(); }
  std::size_t dual_size() const { return bounds_.size() + v2_.size(); }
  const std::vector<double>& row_weights() const { return weights_; }

  double value(std::span<const double> x, std::span<const double> y) const;
  /// Writes the gradient into gx, gy and returns the value; O(p + |G|).
  double value_and_gradient(std::span<const double> x, std::span<const double> y,
                            std::span<double> gx, std::span<double> gy,
                            OperationCounter* counter = nullptr) const;

  /// Upper bound on the gradient Lipschitz constant: power iteration on the
  /// Hessian of the penalty with every hinge active, inflated by 2%.
  double lipschitz_bound() const;

  /// Weak-duality certificate for `support` against the group duals in y.
  RoundingCertificate certify(Support support, std::span<const double> y, double tolerance) const;

  /// Copy of y whose group duals are improved by `sweeps` rounds of exact
  /// coordinate minimization of the LP dual objective. The dual bound never increases.
  std::vector<double> polished_duals(std::span<const double> y, std::size_t sweeps) const;

  /// Positive reduced profits v2 - A^T u under the group duals in y.
  Support reduced_profit_support(std::span<const double> y) const;

 private:
  const ConstraintSystem* system_;
  std::vector<double> v2_;
  std::vector<double> weights_;
  double duality_weight_ = 1.0;
  std::vector<double> bounds_;
  mutable std::vector<double> scratch_rows_;
  mutable std::vector<double> scratch_cols_;
};

std::vector<double> squared_magnitudes(std::span<const double> v);

/// v2_i + u_i with u_i ~ U(0, scale * max(max(v2), 1)).
std::vector<double> perturb_objective(std::span<const double> v2, double scale, Rng& rng);

double penalty_value(const PrimalDualIterate& iterate, const ConstraintSystem& system,
                     std::span<const double> v2);

PenaltyGradient penalty_gradient(const PrimalDualIterate& iterate, const ConstraintSystem& system,
                                 std::span<const double> v2, OperationCounter* counter = nullptr);

/// Row weights and duality weight applied when ProjectionConfig::equilibrate_rows is set.
struct PenaltyWeights {
  std::vector<double> rows;
  double duality = 1.0;
};
PenaltyWeights equilibration_weights(const ConstraintSystem& system, std::span<const double> v2);

/// gamma = 1/L for the unweighted penalty.
double estimate_step_size(const ConstraintSystem& system, std::span<const double> v2);

/// Projected gradient descent on the penalty from x = 0, y = 0 until a rounded
/// support is certified optimal by weak duality. Throws ProjectionError when
/// the iteration budget runs out.
FeasibilitySolution solve_feasibility(std::span<const double> v2, const ConstraintSystem& system,
                                      const ProjectionConfig& config);

/// Rounds x (half up) and certifies the result: accepted iff A x <= s and
/// <v2, x> >= dual bound - tolerance, where the dual bound keeps the group
/// duals u of y and completes the box duals optimally.
RoundingCertificate certify_rounding(std::span<const double> x, std::span<const double> y,
                                     const ConstraintSystem& system, std::span<const double> v2,
                                     double tolerance);

/// Euclidean projection of v onto the sparsity set of the structure.
ProjectionResult project(std::span<const double> v, const ConstraintSystem& system,
                         const ProjectionConfig& config = {});
ProjectionResult project(std::span<const double> v, const TvcsStructure& structure,
                         const ProjectionConfig& config = {});

/// Exhaustive projection for p <= 24. Among optimal supports the smallest, then
/// the lexicographically first index list, is returned.
ProjectionResult project_bruteforce(std::span<const double> v, const TvcsStructure& structure);

}  // namespace tvcs

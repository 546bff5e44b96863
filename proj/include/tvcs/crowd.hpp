#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tvcs/random.hpp"
#include "tvcs/solvers.hpp"
#include "tvcs/structure.hpp"

namespace tvcs {

/// Binary-label crowdsourcing model: Q(i, j) is the probability that worker i
/// labels task j correctly, priors[j] = P(y_j = 1). Assignments are n x m
/// indicators flattened row-major (worker i, task j -> i * m + j).
struct CrowdModel {
  Eigen::MatrixXd quality;
  std::vector<double> priors;

  std::size_t workers() const { return static_cast<std::size_t>(quality.rows()); }
  std::size_t tasks() const { return static_cast<std::size_t>(quality.cols()); }
  std::size_t dimension() const { return workers() * tasks(); }

  /// log((1 - pi_j) / pi_j).
  double threshold(std::size_t task) const;
  /// log(Q / (1 - Q)).
  double log_odds(std::size_t worker, std::size_t task) const;

  /// Throws std::invalid_argument unless 0 < Q < 1 and 0 < pi < 1 everywhere.
  void validate() const;
};

/// Workers form view1 (tasks per worker), tasks form view2 (workers per task).
TvcsStructure crowd_structure(std::size_t workers, std::size_t tasks, std::size_t per_worker,
                              std::size_t per_task, std::size_t total);

/// 1 iff sum over assigned workers of (2 label - 1) log(Q / (1 - Q)) >= log((1 - pi) / pi).
int bayesian_predict(std::span<const double> quality, std::span<const std::uint8_t> assigned,
                     std::span<const std::uint8_t> labels, double prior);

struct AccuracyReport {
  std::vector<double> per_task;
  double mean = 0.0;
};

/// P(prediction = y) per task by enumerating the labels of its assigned workers.
/// Throws std::invalid_argument if a task has more than 20 workers.
AccuracyReport exact_expected_accuracy(const CrowdModel& model,
                                       std::span<const std::uint8_t> assignment);

/// The smoothed accuracy with S(t) = 1 / (1 + exp(-t)) replacing the decision
/// indicator, evaluated exactly by enumeration (same guard as above).
AccuracyReport exact_smoothed_accuracy(const CrowdModel& model, std::span<const double> assignment,
                                       double temperature = 1.0);

/// Mean accuracy of bayesian_predict over `draws` simulated label sets per task.
struct SimulatedAccuracy {
  double mean = 0.0;
  double standard_error = 0.0;
};
SimulatedAccuracy simulated_accuracy(const CrowdModel& model,
                                     std::span<const std::uint8_t> assignment, std::size_t draws,
                                     Rng& rng);

/// Signed log-odds Z(i, j) = (2 label - 1) log(Q / (1 - Q)) of one simulated
/// label set for each class.
struct CrowdSample {
  Eigen::MatrixXd given_positive;
  Eigen::MatrixXd given_negative;
};
CrowdSample draw_crowd_sample(const CrowdModel& model, Rng& rng);

/// Negated smoothed expected accuracy, so that the solvers minimize
///
///   -(1/m) sum_j [ pi_j S(tau (sum_i Z_ij X_ij - r_j)) + (1 - pi_j) S(tau (r_j - sum_i Z_ij X_ij)) ]
///
/// with Z drawn given y_j = 1 in the first term and y_j = 0 in the second.
/// value() and gradient() average a fixed set of seeded samples;
/// stochastic_gradient() draws fresh ones from the caller's stream.
class CrowdObjective final : public ObjectiveOracle {
 public:
  struct Options {
    std::size_t samples = 64;
    std::size_t stochastic_batch = 1;
    double temperature = 1.0;
    std::uint64_t seed = 0;
  };

  CrowdObjective(CrowdModel model, Options options);
  explicit CrowdObjective(CrowdModel model) : CrowdObjective(std::move(model), Options{}) {}

  std::size_t dimension() const override { return model_.dimension(); }
  double value(std::span<const double> w) const override;
  std::vector<double> gradient(std::span<const double> w) const override;
  bool has_stochastic_gradient() const override { return true; }
  std::vector<double> stochastic_gradient(std::span<const double> w, Rng& rng) const override;
  std::optional<Box> box() const override { return Box{0.0, 1.0}; }

  /// The objective and its gradient for an explicit sample set.
  double sampled_value(std::span<const double> w, std::span<const CrowdSample> samples) const;
  std::vector<double> sampled_gradient(std::span<const double> w,
                                       std::span<const CrowdSample> samples) const;

  const CrowdModel& model() const { return model_; }

 private:
  CrowdModel model_;
  Options options_;
  std::vector<CrowdSample> samples_;
};

/// Uniformly random assignment filled greedily under every budget of `structure`.
Support random_assignment(const TvcsStructure& structure, Rng& rng);

}  // namespace tvcs

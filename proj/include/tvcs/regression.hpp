#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tvcs/solvers.hpp"

namespace tvcs {

/// n samples of rows x cols feature matrices, flattened row-major into the rows
/// of `features`, with one response each.
struct RegressionData {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Eigen::MatrixXd features;
  Eigen::VectorXd responses;

  std::size_t samples() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t dimension() const { return rows * cols; }

  /// Throws std::invalid_argument on shape mismatches, or labels outside {-1, +1}
  /// when `classification` is set.
  void validate(bool classification = false) const;
};

/// Largest eigenvalue of M^T M by power iteration from a fixed start.
double gram_spectral_norm(const Eigen::MatrixXd& m);

/// f(w) = sum_i (<X_i, w> - y_i)^2 with exact restricted least-squares subspace solves.
class LeastSquaresObjective final : public ObjectiveOracle {
 public:
  explicit LeastSquaresObjective(RegressionData data);

  std::size_t dimension() const override { return data_.dimension(); }
  double value(std::span<const double> w) const override;
  std::vector<double> gradient(std::span<const double> w) const override;
  /// Minimum-norm least-squares solution on the support; budget and step are unused.
  std::vector<double> subspace_minimize(std::span<const std::uint8_t> support,
                                        std::span<const double> start, std::size_t budget,
                                        double step) const override;

  /// 1 / L with L = 2 lambda_max(X^T X).
  double default_step_size() const;
  const RegressionData& data() const { return data_; }

 private:
  RegressionData data_;
};

/// f(w) = sum_i max(0, 1 - y_i <X_i, w>)^2.
class SquaredHingeObjective final : public ObjectiveOracle {
 public:
  explicit SquaredHingeObjective(RegressionData data);

  std::size_t dimension() const override { return data_.dimension(); }
  double value(std::span<const double> w) const override;
  std::vector<double> gradient(std::span<const double> w) const override;

  /// 1 / L with L = 2 lambda_max(X^T X).
  double default_step_size() const;
  const RegressionData& data() const { return data_; }

 private:
  RegressionData data_;
};

/// Fraction of samples with sign(<X_i, w>) != y_i, sign(0) = +1.
double classification_error(const RegressionData& data, std::span<const double> w);

}  // namespace tvcs

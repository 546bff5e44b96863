#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tvcs/solvers.hpp"
#include "tvcs/structure.hpp"

namespace tvcs {

/// Gene expression time series. Each entry of `series` is one N x T_k
/// trajectory (column t is x_t); increments are never taken across trajectories.
struct GrnData {
  std::vector<Eigen::MatrixXd> series;

  std::size_t genes() const;
  /// Total number of time points over all trajectories.
  std::size_t time_points() const;
  /// X = [x_1 ... x_{T-1}] per trajectory, concatenated.
  Eigen::MatrixXd predictors() const;
  /// Y = [x_2 - x_1 ... x_T - x_{T-1}] per trajectory, concatenated.
  Eigen::MatrixXd responses() const;

  /// Throws std::invalid_argument unless every trajectory has N rows and >= 2 columns.
  void validate() const;
};

/// Off-diagonal entries of an N x N matrix as a vector of length N (N - 1),
/// row-major with the diagonal skipped.
std::size_t grn_variable_count(std::size_t genes);
std::size_t grn_index(std::size_t genes, std::size_t row, std::size_t col);
std::vector<double> grn_vector(const Eigen::MatrixXd& w);
Eigen::MatrixXd grn_matrix(std::size_t genes, std::span<const double> w);

/// Rows of W form view1 and columns view2, each with a degree budget.
TvcsStructure grn_structure(std::size_t genes, std::size_t row_budget, std::size_t col_budget,
                            std::size_t overall);

/// f(W) = 1/2 ||Y - W X||_F^2 over zero-diagonal W.
class GrnObjective final : public ObjectiveOracle {
 public:
  explicit GrnObjective(const GrnData& data);

  std::size_t dimension() const override { return grn_variable_count(genes_); }
  double value(std::span<const double> w) const override;
  std::vector<double> gradient(std::span<const double> w) const override;
  /// Row-wise minimum-norm least squares on the support; budget and step are unused.
  std::vector<double> subspace_minimize(std::span<const std::uint8_t> support,
                                        std::span<const double> start, std::size_t budget,
                                        double step) const override;

  /// 1 / lambda_max(X X^T).
  double default_step_size() const;
  const Eigen::MatrixXd& predictors() const { return x_; }
  const Eigen::MatrixXd& responses() const { return y_; }

 private:
  std::size_t genes_;
  Eigen::MatrixXd x_;
  Eigen::MatrixXd y_;
};

}  // namespace tvcs

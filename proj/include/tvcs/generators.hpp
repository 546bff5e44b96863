#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "tvcs/crowd.hpp"
#include "tvcs/grn.hpp"
#include "tvcs/projection.hpp"
#include "tvcs/random.hpp"
#include "tvcs/regression.hpp"
#include "tvcs/structure.hpp"

namespace tvcs {

/// Support of the projection of a standard normal vector, filled with fresh
/// standard normal values.
std::vector<double> gen_true_model(const TvcsStructure& structure, Rng& rng,
                                   const ProjectionConfig& config = {});

/// side x side matrix view with row and column budgets uniform on {1..side}
/// and overall = floor(0.8 min(sum of row budgets, sum of column budgets)).
TvcsStructure gen_random_structure(std::size_t side, Rng& rng);

/// y_i = <X_i, w_bar> + e_i, X_i i.i.d. standard normal, e_i ~ N(0, noise_sd^2).
RegressionData gen_regression_data(std::span<const double> w_bar, std::size_t rows,
                                   std::size_t cols, std::size_t samples, double noise_sd, Rng& rng);

/// y_i = sign(<X_i, w_bar>) with sign(0) = +1.
RegressionData gen_classification_data(std::span<const double> w_bar, std::size_t rows,
                                       std::size_t cols, std::size_t samples, Rng& rng);

/// Q ~ U[0.5, 0.9], priors 0.5.
CrowdModel gen_crowd_model(std::size_t workers, std::size_t tasks, Rng& rng);

struct GrnSeriesOptions {
  /// Independent trajectories sharing the time-point budget.
  std::size_t trajectories = 10;
  /// Bound on the spectral radius of I + W_bar.
  double growth_bound = 1.05;
};

struct GrnInstance {
  GrnData data;
  Eigen::MatrixXd network;
};

/// Linear dynamics x_{t+1} = (I + W_bar) x_t with a zero-diagonal network whose
/// row and column degrees are at most `degree`. Each trajectory starts from a
/// standard normal state; increments receive Gaussian noise with standard
/// deviation noise_fraction times the RMS of the noiseless increments.
GrnInstance gen_grn_series(std::size_t genes, std::size_t time_points, std::size_t degree,
                           double noise_fraction, Rng& rng, const GrnSeriesOptions& options = {});

}  // namespace tvcs

#include "tvcs/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace tvcs {

namespace {

std::vector<double> normal_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (auto& a : v) a = normal(rng);
  return v;
}

Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  // Row-major fill so each sample row is drawn contiguously.
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

std::vector<double> gen_true_model(const TvcsStructure& structure, Rng& rng,
                                   const ProjectionConfig& config) {
  const auto probe = normal_vector(structure.dimension, rng);
  const auto support = project(probe, structure, config).support;
  std::normal_distribution<double> normal;
  std::vector<double> w(structure.dimension, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (support[i]) w[i] = normal(rng);
  }
  return w;
}

TvcsStructure gen_random_structure(std::size_t side, Rng& rng) {
  if (side == 0) throw std::invalid_argument("side must be positive");
  std::uniform_int_distribution<std::size_t> budget(1, side);
  std::vector<std::size_t> rows(side), cols(side);
  for (auto& b : rows) b = budget(rng);
  for (auto& b : cols) b = budget(rng);
  const auto row_sum = std::accumulate(rows.begin(), rows.end(), std::size_t{0});
  const auto col_sum = std::accumulate(cols.begin(), cols.end(), std::size_t{0});
  // floor(0.8 m) in integers to avoid rounding 0.8 * 5 down to 3.
  const std::size_t overall = 4 * std::min(row_sum, col_sum) / 5;
  return matrix_view_structure(side, side, rows, cols, overall);
}

RegressionData gen_regression_data(std::span<const double> w_bar, std::size_t rows,
                                   std::size_t cols, std::size_t samples, double noise_sd,
                                   Rng& rng) {
  if (samples == 0) throw std::invalid_argument("sample count must be positive");
  if (w_bar.size() != rows * cols) throw std::invalid_argument("model size does not match shape");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise_sd must be non-negative");
  RegressionData data;
  data.rows = rows;
  data.cols = cols;
  data.features = normal_matrix(static_cast<Eigen::Index>(samples),
                                static_cast<Eigen::Index>(rows * cols), rng);
  const Eigen::Map<const Eigen::VectorXd> w(w_bar.data(), static_cast<Eigen::Index>(w_bar.size()));
  data.responses = data.features * w;
  if (noise_sd > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sd);
    for (Eigen::Index i = 0; i < data.responses.size(); ++i) data.responses[i] += noise(rng);
  }
  return data;
}

RegressionData gen_classification_data(std::span<const double> w_bar, std::size_t rows,
                                       std::size_t cols, std::size_t samples, Rng& rng) {
  auto data = gen_regression_data(w_bar, rows, cols, samples, 0.0, rng);
  for (Eigen::Index i = 0; i < data.responses.size(); ++i) {
    data.responses[i] = data.responses[i] >= 0.0 ? 1.0 : -1.0;
  }
  return data;
}

CrowdModel gen_crowd_model(std::size_t workers, std::size_t tasks, Rng& rng) {
  std::uniform_real_distribution<double> quality(0.5, 0.9);
  CrowdModel model;
  model.quality.resize(static_cast<Eigen::Index>(workers), static_cast<Eigen::Index>(tasks));
  for (std::size_t i = 0; i < workers; ++i) {
    for (std::size_t j = 0; j < tasks; ++j) model.quality(i, j) = quality(rng);
  }
  model.priors.assign(tasks, 0.5);
  return model;
}

GrnInstance gen_grn_series(std::size_t genes, std::size_t time_points, std::size_t degree,
                           double noise_fraction, Rng& rng, const GrnSeriesOptions& options) {
  if (genes < 2) throw std::invalid_argument("at least two genes are required");
  const std::size_t trajectories = std::max<std::size_t>(options.trajectories, 1);
  if (time_points < 2 * trajectories) {
    throw std::invalid_argument("every trajectory needs at least two time points");
  }
  if (!(noise_fraction >= 0.0)) throw std::invalid_argument("noise_fraction must be non-negative");
  if (!(options.growth_bound >= 1.0)) throw std::invalid_argument("growth_bound must be at least 1");
  const auto n = static_cast<Eigen::Index>(genes);

  // Random edges, at most `degree` per row and per column, about half the capacity.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < genes; ++i) {
    for (std::size_t j = 0; j < genes; ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::vector<std::size_t> row_degree(genes, 0), col_degree(genes, 0);
  const std::size_t target = genes * degree / 2;
  std::uniform_real_distribution<double> magnitude(0.5, 1.0);
  std::bernoulli_distribution negative(0.5);
  Eigen::MatrixXd network = Eigen::MatrixXd::Zero(n, n);
  std::size_t edges = 0;
  for (const auto& [i, j] : pairs) {
    if (edges >= target) break;
    if (row_degree[i] >= degree || col_degree[j] >= degree) continue;
    const double value = magnitude(rng);
    network(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
        negative(rng) ? -value : value;
    ++row_degree[i];
    ++col_degree[j];
    ++edges;
  }

  // Largest scale c in [0, 1] (to bisection precision) with rho(I + c W) <= growth_bound.
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  if (spectral_radius(eye + network) > options.growth_bound) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      (spectral_radius(eye + mid * network) <= options.growth_bound ? lo : hi) = mid;
    }
    network *= lo;
  }
  const Eigen::MatrixXd transition = eye + network;

  GrnInstance out;
  out.network = network;
  std::vector<Eigen::MatrixXd> clean;
  double increment_sq = 0.0;
  std::size_t increment_count = 0;
  for (std::size_t k = 0; k < trajectories; ++k) {
    const std::size_t length =
        time_points / trajectories + (k < time_points % trajectories ? 1 : 0);
    Eigen::MatrixXd s(n, static_cast<Eigen::Index>(length));
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < n; ++i) s(i, 0) = normal(rng);
    for (Eigen::Index t = 1; t < s.cols(); ++t) s.col(t) = transition * s.col(t - 1);
    const Eigen::MatrixXd inc = s.rightCols(s.cols() - 1) - s.leftCols(s.cols() - 1);
    increment_sq += inc.squaredNorm();
    increment_count += static_cast<std::size_t>(inc.size());
    clean.push_back(std::move(s));
  }
  const double sd =
      noise_fraction * std::sqrt(increment_sq / static_cast<double>(std::max<std::size_t>(increment_count, 1)));

  // Noise enters the recorded state so that the observed increments carry it.
  for (auto& s : clean) {
    if (sd > 0.0) {
      std::normal_distribution<double> noise(0.0, sd);
      Eigen::MatrixXd noisy = s;
      for (Eigen::Index t = 1; t < s.cols(); ++t) {
        for (Eigen::Index i = 0; i < n; ++i) {
          noisy(i, t) = transition.row(i).dot(noisy.col(t - 1)) + noise(rng);
        }
      }
      s = std::move(noisy);
    }
    out.data.series.push_back(std::move(s));
  }
  return out;
}

}  // namespace tvcs

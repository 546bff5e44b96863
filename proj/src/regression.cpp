#include "tvcs/regression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tvcs {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> w) {
  return {w.data(), static_cast<Eigen::Index>(w.size())};
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void check_length(std::span<const double> w, std::size_t p) {
  if (w.size() != p) {
    throw std::invalid_argument("expected a vector of length " + std::to_string(p) + ", got " +
                                std::to_string(w.size()));
  }
}

}  // namespace

void RegressionData::validate(bool classification) const {
  if (static_cast<std::size_t>(features.cols()) != dimension()) {
    throw std::invalid_argument("feature width " + std::to_string(features.cols()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
  if (features.rows() != responses.size()) {
    throw std::invalid_argument("feature and response counts differ");
  }
  if (classification) {
    for (Eigen::Index i = 0; i < responses.size(); ++i) {
      if (responses[i] != 1.0 && responses[i] != -1.0) {
        throw std::invalid_argument("label " + std::to_string(i) + " is not -1 or +1");
      }
    }
  }
}

double gram_spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m.cols()) / std::sqrt(static_cast<double>(m.cols()));
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Eigen::VectorXd next = m.transpose() * (m * v);
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    v = next / norm;
    const bool settled = std::abs(norm - lambda) <= 1e-12 * norm;
    lambda = norm;
    if (settled) break;
  }
  return lambda;
}

LeastSquaresObjective::LeastSquaresObjective(RegressionData data) : data_(std::move(data)) {
  data_.validate();
}

double LeastSquaresObjective::value(std::span<const double> w) const {
  check_length(w, dimension());
  return (data_.features * as_vector(w) - data_.responses).squaredNorm();
}

std::vector<double> LeastSquaresObjective::gradient(std::span<const double> w) const {
  check_length(w, dimension());
  const Eigen::VectorXd r = data_.features * as_vector(w) - data_.responses;
  return to_std(2.0 * data_.features.transpose() * r);
}

std::vector<double> LeastSquaresObjective::subspace_minimize(std::span<const std::uint8_t> support,
                                                             std::span<const double>, std::size_t,
                                                             double) const {
  const auto idx = support_indices(support);
  std::vector<double> w(dimension(), 0.0);
  if (idx.empty()) return w;
  Eigen::MatrixXd sub(data_.features.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) sub.col(k) = data_.features.col(idx[k]);
  const Eigen::VectorXd coef = sub.completeOrthogonalDecomposition().solve(data_.responses);
  for (std::size_t k = 0; k < idx.size(); ++k) w[idx[k]] = coef[k];
  return w;
}

double LeastSquaresObjective::default_step_size() const {
  return 1.0 / std::max(2.0 * gram_spectral_norm(data_.features), 1e-300);
}

SquaredHingeObjective::SquaredHingeObjective(RegressionData data) : data_(std::move(data)) {
  data_.validate(true);
}

double SquaredHingeObjective::value(std::span<const double> w) const {
  check_length(w, dimension());
  const Eigen::ArrayXd margin =
      (1.0 - data_.responses.array() * (data_.features * as_vector(w)).array()).max(0.0);
  return margin.square().sum();
}

std::vector<double> SquaredHingeObjective::gradient(std::span<const double> w) const {
  check_length(w, dimension());
  const Eigen::ArrayXd margin =
      (1.0 - data_.responses.array() * (data_.features * as_vector(w)).array()).max(0.0);
  const Eigen::VectorXd weight = (-2.0 * margin * data_.responses.array()).matrix();
  return to_std(data_.features.transpose() * weight);
}

double SquaredHingeObjective::default_step_size() const {
  return 1.0 / std::max(2.0 * gram_spectral_norm(data_.features), 1e-300);
}

double classification_error(const RegressionData& data, std::span<const double> w) {
  if (data.samples() == 0) return 0.0;
  const Eigen::VectorXd scores = data.features * as_vector(w);
  std::size_t wrong = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double predicted = scores[i] >= 0.0 ? 1.0 : -1.0;
    wrong += predicted != data.responses[i];
  }
  return static_cast<double>(wrong) / static_cast<double>(data.samples());
}

}  // namespace tvcs

#include "tvcs/grn.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "tvcs/regression.hpp"

namespace tvcs {

std::size_t GrnData::genes() const {
  return series.empty() ? 0 : static_cast<std::size_t>(series.front().rows());
}

std::size_t GrnData::time_points() const {
  std::size_t total = 0;
  for (const auto& s : series) total += static_cast<std::size_t>(s.cols());
  return total;
}

void GrnData::validate() const {
  if (series.empty()) throw std::invalid_argument("no time series");
  const auto n = series.front().rows();
  if (n < 2) throw std::invalid_argument("at least two genes are required");
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k].rows() != n) {
      throw std::invalid_argument("trajectory " + std::to_string(k) + " has " +
                                  std::to_string(series[k].rows()) + " genes, expected " +
                                  std::to_string(n));
    }
    if (series[k].cols() < 2) {
      throw std::invalid_argument("trajectory " + std::to_string(k) + " has fewer than 2 time points");
    }
  }
}

Eigen::MatrixXd GrnData::predictors() const {
  Eigen::Index total = 0;
  for (const auto& s : series) total += s.cols() - 1;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(genes()), total);
  Eigen::Index at = 0;
  for (const auto& s : series) {
    x.middleCols(at, s.cols() - 1) = s.leftCols(s.cols() - 1);
    at += s.cols() - 1;
  }
  return x;
}

Eigen::MatrixXd GrnData::responses() const {
  Eigen::Index total = 0;
  for (const auto& s : series) total += s.cols() - 1;
  Eigen::MatrixXd y(static_cast<Eigen::Index>(genes()), total);
  Eigen::Index at = 0;
  for (const auto& s : series) {
    y.middleCols(at, s.cols() - 1) = s.rightCols(s.cols() - 1) - s.leftCols(s.cols() - 1);
    at += s.cols() - 1;
  }
  return y;
}

std::size_t grn_variable_count(std::size_t genes) { return genes * (genes - 1); }

std::size_t grn_index(std::size_t genes, std::size_t row, std::size_t col) {
  if (row == col || row >= genes || col >= genes) {
    throw std::invalid_argument("no variable for entry (" + std::to_string(row) + ", " +
                                std::to_string(col) + ")");
  }
  return row * (genes - 1) + (col < row ? col : col - 1);
}

std::vector<double> grn_vector(const Eigen::MatrixXd& w) {
  const auto n = static_cast<std::size_t>(w.rows());
  if (w.cols() != w.rows()) throw std::invalid_argument("network matrix must be square");
  std::vector<double> out;
  out.reserve(grn_variable_count(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) out.push_back(w(i, j));
    }
  }
  return out;
}

Eigen::MatrixXd grn_matrix(std::size_t genes, std::span<const double> w) {
  if (w.size() != grn_variable_count(genes)) {
    throw std::invalid_argument("expected " + std::to_string(grn_variable_count(genes)) +
                                " network entries, got " + std::to_string(w.size()));
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(genes, genes);
  std::size_t k = 0;
  for (std::size_t i = 0; i < genes; ++i) {
    for (std::size_t j = 0; j < genes; ++j) {
      if (i != j) out(i, j) = w[k++];
    }
  }
  return out;
}

TvcsStructure grn_structure(std::size_t genes, std::size_t row_budget, std::size_t col_budget,
                            std::size_t overall) {
  if (genes < 2) throw std::invalid_argument("at least two genes are required");
  TvcsStructure s;
  s.dimension = grn_variable_count(genes);
  s.overall_budget = overall;
  s.view1.resize(genes);
  s.view2.resize(genes);
  for (std::size_t i = 0; i < genes; ++i) {
    s.view1[i].budget = row_budget;
    s.view2[i].budget = col_budget;
  }
  for (std::size_t i = 0; i < genes; ++i) {
    for (std::size_t j = 0; j < genes; ++j) {
      if (i == j) continue;
      const auto k = grn_index(genes, i, j);
      s.view1[i].indices.push_back(k);
      s.view2[j].indices.push_back(k);
    }
  }
  for (auto& g : s.view2) std::sort(g.indices.begin(), g.indices.end());
  return s;
}

GrnObjective::GrnObjective(const GrnData& data) {
  data.validate();
  genes_ = data.genes();
  x_ = data.predictors();
  y_ = data.responses();
}

double GrnObjective::value(std::span<const double> w) const {
  const Eigen::MatrixXd wm = grn_matrix(genes_, w);
  return 0.5 * (y_ - wm * x_).squaredNorm();
}

std::vector<double> GrnObjective::gradient(std::span<const double> w) const {
  const Eigen::MatrixXd wm = grn_matrix(genes_, w);
  const Eigen::MatrixXd g = (wm * x_ - y_) * x_.transpose();
  return grn_vector(g);
}

std::vector<double> GrnObjective::subspace_minimize(std::span<const std::uint8_t> support,
                                                    std::span<const double>, std::size_t,
                                                    double) const {
  if (support.size() != dimension()) throw std::invalid_argument("support length mismatch");
  std::vector<double> w(dimension(), 0.0);
  for (std::size_t i = 0; i < genes_; ++i) {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < genes_; ++j) {
      if (j != i && support[grn_index(genes_, i, j)]) cols.push_back(j);
    }
    if (cols.empty()) continue;
    // Row i: min ||Y_i - W_{i,S} X_S|| as a regression on the columns of X_S^T.
    Eigen::MatrixXd design(x_.cols(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) design.col(k) = x_.row(cols[k]).transpose();
    const Eigen::VectorXd coef =
        design.completeOrthogonalDecomposition().solve(y_.row(i).transpose());
    for (std::size_t k = 0; k < cols.size(); ++k) w[grn_index(genes_, i, cols[k])] = coef[k];
  }
  return w;
}

double GrnObjective::default_step_size() const {
  return 1.0 / std::max(gram_spectral_norm(x_.transpose()), 1e-300);
}

}  // namespace tvcs

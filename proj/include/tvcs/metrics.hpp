#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace tvcs {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
};

/// Ratios with a zero denominator are reported as 0.
struct MetricReport {
  double sn = 0.0;
  double sp = 0.0;
  double acc = 0.0;
  /// 2 SN SP / (SN + SP).
  double f_measure = 0.0;
  double mcc = 0.0;
  double auc = 0.0;
  double selection_recall = 0.0;
  bool recovery_success = false;
  double classification_error = 0.0;
};

ConfusionCounts confusion(std::span<const std::uint8_t> predicted,
                          std::span<const std::uint8_t> truth);

/// SN, SP, ACC, F and MCC; the remaining fields are left at zero.
MetricReport metrics_from_counts(const ConfusionCounts& counts);

/// Probability that a random positive outscores a random negative, ties
/// counting one half. 0.5 when either class is empty.
double auc_score(std::span<const double> scores, std::span<const std::uint8_t> truth);

/// Edge scores |W_ij| against the nonzero pattern of `truth`, diagonal excluded.
/// An edge is predicted when |W_ij| > threshold.
struct NetworkEvaluation {
  ConfusionCounts counts;
  MetricReport report;
};
NetworkEvaluation confusion_and_metrics(const Eigen::MatrixXd& estimate,
                                        const Eigen::MatrixXd& truth, double threshold = 0.0);

/// |supp(w_star) & supp(w_bar)| / |supp(w_bar)|. Throws std::invalid_argument if w_bar = 0.
double selection_recall(std::span<const double> w_star, std::span<const double> w_bar);

/// supp(w_star) == supp(w_bar).
bool recovery_success(std::span<const double> w_star, std::span<const double> w_bar);

}  // namespace tvcs

#include "tvcs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace tvcs {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("vector lengths differ");
}

}  // namespace

ConfusionCounts confusion(std::span<const std::uint8_t> predicted,
                          std::span<const std::uint8_t> truth) {
  check_sizes(predicted.size(), truth.size());
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) (predicted[i] ? c.tp : c.fn)++;
    else (predicted[i] ? c.fp : c.tn)++;
  }
  return c;
}

MetricReport metrics_from_counts(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  MetricReport r;
  r.sn = ratio(tp, tp + fn);
  r.sp = ratio(tn, tn + fp);
  r.acc = ratio(tp + tn, tp + tn + fp + fn);
  r.f_measure = ratio(2.0 * r.sn * r.sp, r.sn + r.sp);
  r.mcc = ratio(tp * tn - fp * fn, std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)));
  return r;
}

double auc_score(std::span<const double> scores, std::span<const std::uint8_t> truth) {
  check_sizes(scores.size(), truth.size());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U from mid-ranks.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi < order.size() && scores[order[hi]] == scores[order[lo]]) ++hi;
    const double mid_rank = 0.5 * static_cast<double>(lo + hi - 1) + 1.0;
    for (std::size_t k = lo; k < hi; ++k) {
      if (truth[order[k]]) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    lo = hi;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) return 0.5;
  const double np = static_cast<double>(positives), nn = static_cast<double>(negatives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

NetworkEvaluation confusion_and_metrics(const Eigen::MatrixXd& estimate,
                                        const Eigen::MatrixXd& truth, double threshold) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols() ||
      estimate.rows() != estimate.cols()) {
    throw std::invalid_argument("estimate and truth must be square matrices of the same size");
  }
  std::vector<double> scores;
  std::vector<std::uint8_t> predicted, actual;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      if (i == j) continue;
      const double s = std::abs(estimate(i, j));
      scores.push_back(s);
      predicted.push_back(s > threshold);
      actual.push_back(truth(i, j) != 0.0);
    }
  }
  NetworkEvaluation out;
  out.counts = confusion(predicted, actual);
  out.report = metrics_from_counts(out.counts);
  out.report.auc = auc_score(scores, actual);
  return out;
}

double selection_recall(std::span<const double> w_star, std::span<const double> w_bar) {
  check_sizes(w_star.size(), w_bar.size());
  std::size_t hit = 0, total = 0;
  for (std::size_t i = 0; i < w_bar.size(); ++i) {
    if (w_bar[i] == 0.0) continue;
    ++total;
    hit += w_star[i] != 0.0;
  }
  if (total == 0) throw std::invalid_argument("selection recall is undefined for a zero true model");
  return static_cast<double>(hit) / static_cast<double>(total);
}

bool recovery_success(std::span<const double> w_star, std::span<const double> w_bar) {
  check_sizes(w_star.size(), w_bar.size());
  for (std::size_t i = 0; i < w_bar.size(); ++i) {
    if ((w_star[i] != 0.0) != (w_bar[i] != 0.0)) return false;
  }
  return true;
}

}  // namespace tvcs

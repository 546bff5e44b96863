#include "tvcs/crowd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tvcs {

namespace {

constexpr std::size_t kMaxEnumeratedWorkers = 20;

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void check_probability(double q, const std::string& what) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument(what + " = " + std::to_string(q) + " is not strictly inside (0, 1)");
  }
}

// Workers with a nonzero entry in column `task`.
std::vector<std::size_t> assigned_workers(const CrowdModel& model, std::span<const double> x,
                                          std::size_t task) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < model.workers(); ++i) {
    if (x[i * model.tasks() + task] != 0.0) out.push_back(i);
  }
  if (out.size() > kMaxEnumeratedWorkers) {
    throw std::invalid_argument("task " + std::to_string(task) + " has " +
                                std::to_string(out.size()) + " workers; enumeration is limited to " +
                                std::to_string(kMaxEnumeratedWorkers));
  }
  return out;
}

// Visits every label pattern of the assigned workers with its probability under
// y = 1 and y = 0 and the weighted vote sum.
template <typename Fn>
void enumerate_labels(const CrowdModel& model, std::span<const double> x, std::size_t task,
                      Fn&& fn) {
  const auto workers = assigned_workers(model, x, task);
  const std::size_t k = workers.size();
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    double p1 = 1.0, p0 = 1.0, vote = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      const std::size_t i = workers[b];
      const double q = model.quality(i, task);
      const double weight = x[i * model.tasks() + task] * model.log_odds(i, task);
      if (mask >> b & 1u) {
        p1 *= q;
        p0 *= 1.0 - q;
        vote += weight;
      } else {
        p1 *= 1.0 - q;
        p0 *= q;
        vote -= weight;
      }
    }
    fn(p1, p0, vote);
  }
}

std::vector<double> as_real(std::span<const std::uint8_t> assignment) {
  return {assignment.begin(), assignment.end()};
}

void check_assignment(const CrowdModel& model, std::size_t size) {
  if (size != model.dimension()) {
    throw std::invalid_argument("assignment length " + std::to_string(size) + " does not match " +
                                std::to_string(model.workers()) + " x " +
                                std::to_string(model.tasks()));
  }
}

}  // namespace

double CrowdModel::threshold(std::size_t task) const {
  return std::log((1.0 - priors[task]) / priors[task]);
}

double CrowdModel::log_odds(std::size_t worker, std::size_t task) const {
  const double q = quality(worker, task);
  return std::log(q / (1.0 - q));
}

void CrowdModel::validate() const {
  if (priors.size() != tasks()) {
    throw std::invalid_argument("expected " + std::to_string(tasks()) + " priors, got " +
                                std::to_string(priors.size()));
  }
  for (Eigen::Index i = 0; i < quality.rows(); ++i) {
    for (Eigen::Index j = 0; j < quality.cols(); ++j) {
      check_probability(quality(i, j),
                        "quality(" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
  for (std::size_t j = 0; j < priors.size(); ++j) {
    check_probability(priors[j], "prior " + std::to_string(j));
  }
}

TvcsStructure crowd_structure(std::size_t workers, std::size_t tasks, std::size_t per_worker,
                              std::size_t per_task, std::size_t total) {
  const std::vector<std::size_t> rows(workers, per_worker), cols(tasks, per_task);
  return matrix_view_structure(workers, tasks, rows, cols, total);
}

int bayesian_predict(std::span<const double> quality, std::span<const std::uint8_t> assigned,
                     std::span<const std::uint8_t> labels, double prior) {
  if (quality.size() != assigned.size() || quality.size() != labels.size()) {
    throw std::invalid_argument("quality, assignment and label columns differ in length");
  }
  check_probability(prior, "prior");
  double vote = 0.0;
  for (std::size_t i = 0; i < quality.size(); ++i) {
    if (!assigned[i]) continue;
    check_probability(quality[i], "quality " + std::to_string(i));
    const double w = std::log(quality[i] / (1.0 - quality[i]));
    vote += labels[i] ? w : -w;
  }
  return vote >= std::log((1.0 - prior) / prior) ? 1 : 0;
}

AccuracyReport exact_expected_accuracy(const CrowdModel& model,
                                       std::span<const std::uint8_t> assignment) {
  check_assignment(model, assignment.size());
  const auto x = as_real(assignment);
  AccuracyReport report;
  report.per_task.resize(model.tasks());
  for (std::size_t j = 0; j < model.tasks(); ++j) {
    const double prior = model.priors[j], r = model.threshold(j);
    double acc = 0.0;
    enumerate_labels(model, x, j, [&](double p1, double p0, double vote) {
      acc += vote >= r ? prior * p1 : (1.0 - prior) * p0;
    });
    report.per_task[j] = acc;
  }
  report.mean = model.tasks() ? std::accumulate(report.per_task.begin(), report.per_task.end(), 0.0) /
                                    static_cast<double>(model.tasks())
                              : 0.0;
  return report;
}

AccuracyReport exact_smoothed_accuracy(const CrowdModel& model, std::span<const double> assignment,
                                       double temperature) {
  check_assignment(model, assignment.size());
  AccuracyReport report;
  report.per_task.resize(model.tasks());
  for (std::size_t j = 0; j < model.tasks(); ++j) {
    const double prior = model.priors[j], r = model.threshold(j);
    double acc = 0.0;
    enumerate_labels(model, assignment, j, [&](double p1, double p0, double vote) {
      acc += prior * p1 * sigmoid(temperature * (vote - r)) +
             (1.0 - prior) * p0 * sigmoid(temperature * (r - vote));
    });
    report.per_task[j] = acc;
  }
  report.mean = model.tasks() ? std::accumulate(report.per_task.begin(), report.per_task.end(), 0.0) /
                                    static_cast<double>(model.tasks())
                              : 0.0;
  return report;
}

SimulatedAccuracy simulated_accuracy(const CrowdModel& model,
                                     std::span<const std::uint8_t> assignment, std::size_t draws,
                                     Rng& rng) {
  check_assignment(model, assignment.size());
  const std::size_t n = model.workers(), m = model.tasks();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> q(n);
  std::vector<std::uint8_t> assigned(n), labels(n);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    std::size_t correct = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const int truth = uniform(rng) < model.priors[j] ? 1 : 0;
      for (std::size_t i = 0; i < n; ++i) {
        q[i] = model.quality(i, j);
        assigned[i] = assignment[i * m + j];
        const bool right = uniform(rng) < q[i];
        labels[i] = static_cast<std::uint8_t>(right ? truth : 1 - truth);
      }
      correct += bayesian_predict(q, assigned, labels, model.priors[j]) == truth;
    }
    const double acc = m ? static_cast<double>(correct) / static_cast<double>(m) : 0.0;
    sum += acc;
    sum_sq += acc * acc;
  }
  SimulatedAccuracy out;
  if (draws == 0) return out;
  const double dn = static_cast<double>(draws);
  out.mean = sum / dn;
  const double var = draws > 1 ? std::max(sum_sq - dn * out.mean * out.mean, 0.0) / (dn - 1.0) : 0.0;
  out.standard_error = std::sqrt(var / dn);
  return out;
}

CrowdSample draw_crowd_sample(const CrowdModel& model, Rng& rng) {
  const auto n = model.quality.rows(), m = model.quality.cols();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  CrowdSample s{Eigen::MatrixXd(n, m), Eigen::MatrixXd(n, m)};
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double q = model.quality(i, j);
      const double w = std::log(q / (1.0 - q));
      // Given y = 1 a correct worker answers 1; given y = 0 a correct worker answers 0.
      s.given_positive(i, j) = uniform(rng) < q ? w : -w;
      s.given_negative(i, j) = uniform(rng) < q ? -w : w;
    }
  }
  return s;
}

CrowdObjective::CrowdObjective(CrowdModel model, Options options)
    : model_(std::move(model)), options_(options) {
  model_.validate();
  if (options_.samples == 0) throw std::invalid_argument("sample count must be positive");
  if (options_.stochastic_batch == 0) throw std::invalid_argument("stochastic batch must be positive");
  if (!(options_.temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  Rng rng(options_.seed);
  samples_.reserve(options_.samples);
  for (std::size_t k = 0; k < options_.samples; ++k) samples_.push_back(draw_crowd_sample(model_, rng));
}

double CrowdObjective::sampled_value(std::span<const double> w,
                                     std::span<const CrowdSample> samples) const {
  check_assignment(model_, w.size());
  const auto n = static_cast<Eigen::Index>(model_.workers());
  const auto m = static_cast<Eigen::Index>(model_.tasks());
  if (samples.empty() || m == 0) return 0.0;
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      w.data(), n, m);
  const double tau = options_.temperature;
  double total = 0.0;
  for (const auto& s : samples) {
    const Eigen::RowVectorXd v1 = s.given_positive.cwiseProduct(x).colwise().sum();
    const Eigen::RowVectorXd v0 = s.given_negative.cwiseProduct(x).colwise().sum();
    for (Eigen::Index j = 0; j < m; ++j) {
      const double prior = model_.priors[j], r = model_.threshold(j);
      total += prior * sigmoid(tau * (v1[j] - r)) + (1.0 - prior) * sigmoid(tau * (r - v0[j]));
    }
  }
  return -total / (static_cast<double>(samples.size()) * static_cast<double>(m));
}

std::vector<double> CrowdObjective::sampled_gradient(std::span<const double> w,
                                                     std::span<const CrowdSample> samples) const {
  check_assignment(model_, w.size());
  const auto n = static_cast<Eigen::Index>(model_.workers());
  const auto m = static_cast<Eigen::Index>(model_.tasks());
  std::vector<double> out(w.size(), 0.0);
  if (samples.empty() || m == 0) return out;
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      w.data(), n, m);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> g(out.data(), n,
                                                                                        m);
  const double tau = options_.temperature;
  const double scale = -1.0 / (static_cast<double>(samples.size()) * static_cast<double>(m));
  for (const auto& s : samples) {
    const Eigen::RowVectorXd v1 = s.given_positive.cwiseProduct(x).colwise().sum();
    const Eigen::RowVectorXd v0 = s.given_negative.cwiseProduct(x).colwise().sum();
    for (Eigen::Index j = 0; j < m; ++j) {
      const double prior = model_.priors[j], r = model_.threshold(j);
      const double s1 = sigmoid(tau * (v1[j] - r)), s0 = sigmoid(tau * (r - v0[j]));
      const double c1 = scale * prior * tau * s1 * (1.0 - s1);
      const double c0 = -scale * (1.0 - prior) * tau * s0 * (1.0 - s0);
      g.col(j) += c1 * s.given_positive.col(j) + c0 * s.given_negative.col(j);
    }
  }
  return out;
}

double CrowdObjective::value(std::span<const double> w) const { return sampled_value(w, samples_); }

std::vector<double> CrowdObjective::gradient(std::span<const double> w) const {
  return sampled_gradient(w, samples_);
}

std::vector<double> CrowdObjective::stochastic_gradient(std::span<const double> w, Rng& rng) const {
  std::vector<CrowdSample> batch;
  batch.reserve(options_.stochastic_batch);
  for (std::size_t k = 0; k < options_.stochastic_batch; ++k) {
    batch.push_back(draw_crowd_sample(model_, rng));
  }
  return sampled_gradient(w, batch);
}

Support random_assignment(const TvcsStructure& structure, Rng& rng) {
  const auto system = build_constraint_system(structure);
  std::vector<std::size_t> order(system.cols());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<double> used(system.rows(), 0.0);
  Support out(system.cols(), 0);
  for (std::size_t i : order) {
    bool room = used[0] + 1.0 <= system.bound(0);
    for (auto r : system.view_rows(i)) {
      if (r != ConstraintSystem::kNoRow) room = room && used[r] + 1.0 <= system.bound(r);
    }
    if (!room) continue;
    out[i] = 1;
    used[0] += 1.0;
    for (auto r : system.view_rows(i)) {
      if (r != ConstraintSystem::kNoRow) used[r] += 1.0;
    }
  }
  return out;
}

}  // namespace tvcs

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "support.hpp"
#include "tvcs/crowd.hpp"
#include "tvcs/generators.hpp"
#include "tvcs/grn.hpp"
#include "tvcs/regression.hpp"

using namespace tvcs;

namespace {

// ||fd - g|| / max(||g||, 1) with central differences of step h.
double fd_error(const ObjectiveOracle& f, std::span<const double> w, std::span<const double> g, double h = 1e-6) {
  std::vector<double> x(w.begin(), w.end());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f.value(x);
    x[i] = keep - h;
    const double down = f.value(x);
    x[i] = keep;
    const double fd = (up - down) / (2 * h);
    num += (fd - g[i]) * (fd - g[i]);
    den += g[i] * g[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1.0);
}

RegressionData unit_sample(double response) {
  RegressionData d;
  d.rows = 1;
  d.cols = 3;
  d.features = Eigen::MatrixXd::Zero(1, 3);
  d.features(0, 0) = 1.0;
  d.responses = Eigen::VectorXd::Constant(1, response);
  return d;
}

RegressionData gaussian_design(std::size_t side, std::size_t n, Rng& rng) {
  const std::vector<std::size_t> budgets(side, side);
  const auto s = matrix_view_structure(side, side, budgets, budgets, side * side);
  const auto w_bar = gen_true_model(s, rng);
  return gen_regression_data(w_bar, side, side, n, 0.1, rng);
}

CrowdModel constant_model(std::size_t n, std::size_t m, double q) {
  CrowdModel model;
  model.quality = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m), q);
  model.priors.assign(m, 0.5);
  return model;
}

}  // namespace

TEST_SUITE("objectives") {

TEST_CASE("least squares hand example") {
  const LeastSquaresObjective f(unit_sample(2.0));
  const std::vector<double> zero(3, 0.0);
  CHECK(f.value(zero) == doctest::Approx(4.0));
  CHECK(f.gradient(zero) == std::vector<double>{-4.0, 0.0, 0.0});
}

TEST_CASE("least squares vanishes at the truth without noise") {
  Rng rng(1);
  const std::vector<std::size_t> budgets = {2, 2, 2};
  const auto s = matrix_view_structure(3, 3, budgets, budgets, 5);
  const auto w_bar = gen_true_model(s, rng);
  const LeastSquaresObjective f(gen_regression_data(w_bar, 3, 3, 20, 0.0, rng));
  CHECK(f.value(w_bar) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("least squares gradient and subspace solve") {
  Rng rng(2);
  const LeastSquaresObjective f(gaussian_design(4, 30, rng));
  for (int k = 0; k < 20; ++k) {
    const auto w = testing::normal_vector(16, rng);
    CHECK(fd_error(f, w, f.gradient(w)) <= 1e-6);
  }
  Support support(16, 0);
  for (std::size_t i = 0; i < 16; i += 3) support[i] = 1;
  const auto z = f.subspace_minimize(support, std::vector<double>(16, 0.0), 0, 1.0);
  const auto g = f.gradient(z);
  for (std::size_t i = 0; i < 16; ++i) {
    if (support[i]) CHECK(std::abs(g[i]) < 1e-8);
    else CHECK(z[i] == 0.0);
  }
  CHECK(f.default_step_size() == doctest::Approx(1.0 / (2.0 * gram_spectral_norm(f.data().features))));
}

TEST_CASE("gram spectral norm agrees with an eigen solver") {
  Rng rng(3);
  Eigen::MatrixXd m(12, 5);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  const double exact = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m.transpose() * m).eigenvalues().maxCoeff();
  CHECK(gram_spectral_norm(m) == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("squared hinge hand examples") {
  auto d = unit_sample(1.0);
  const SquaredHingeObjective f(d);
  const std::vector<double> zero(3, 0.0);
  CHECK(f.value(zero) == doctest::Approx(1.0));
  CHECK(f.gradient(zero)[0] == doctest::Approx(-2.0));
  const std::vector<double> far = {1.5, 0.0, 0.0};
  CHECK(f.value(far) == 0.0);
  CHECK(f.gradient(far) == std::vector<double>(3, 0.0));
}

TEST_CASE("squared hinge gradient away from kinks") {
  Rng rng(4);
  const std::vector<std::size_t> budgets(4, 4);
  const auto s = matrix_view_structure(4, 4, budgets, budgets, 16);
  const auto w_bar = gen_true_model(s, rng);
  const auto data = gen_classification_data(w_bar, 4, 4, 30, rng);
  const SquaredHingeObjective f(data);
  int checked = 0;
  for (int k = 0; k < 40; ++k) {
    const auto w = testing::normal_vector(16, rng);
    const Eigen::VectorXd margins =
        data.responses.cwiseProduct(data.features * Eigen::Map<const Eigen::VectorXd>(w.data(), 16));
    if (((margins.array() - 1.0).abs() < 1e-3).any()) continue;
    CHECK(fd_error(f, w, f.gradient(w)) <= 1e-6);
    ++checked;
  }
  CHECK(checked >= 30);
}

TEST_CASE("classification error and label checks") {
  RegressionData d;
  d.rows = 1;
  d.cols = 2;
  d.features.resize(3, 2);
  d.features << 1, 0, -1, 0, 0, 0;
  d.responses.resize(3);
  d.responses << 1, 1, 1;
  const std::vector<double> w = {1.0, 0.0};
  // The third sample scores 0, which counts as +1.
  CHECK(classification_error(d, w) == doctest::Approx(1.0 / 3.0));
  d.responses(0) = 0.5;
  CHECK_THROWS_AS(d.validate(true), std::invalid_argument);
  CHECK_NOTHROW(d.validate(false));
  CHECK_THROWS_AS(LeastSquaresObjective(unit_sample(1.0)).value(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("grn hand example") {
  GrnData data;
  Eigen::MatrixXd series(2, 2);
  series << 1, 2, 0, 1;
  data.series.push_back(series);
  const GrnObjective f(data);
  CHECK(f.dimension() == 2);
  CHECK(f.value(std::vector<double>{0.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("grn data shape checks") {
  GrnData data;
  CHECK_THROWS_AS(data.validate(), std::invalid_argument);
  data.series.push_back(Eigen::MatrixXd::Zero(3, 1));
  CHECK_THROWS_AS(data.validate(), std::invalid_argument);
  data.series[0] = Eigen::MatrixXd::Zero(3, 4);
  data.series.push_back(Eigen::MatrixXd::Zero(2, 4));
  CHECK_THROWS_AS(data.validate(), std::invalid_argument);
}

TEST_CASE("grn increments stay within trajectories") {
  GrnData data;
  Eigen::MatrixXd a(2, 3), b(2, 2);
  a << 1, 2, 4, 0, 1, 3;
  b << 10, 11, 5, 5;
  data.series = {a, b};
  CHECK(data.time_points() == 5);
  const Eigen::MatrixXd x = data.predictors();
  const Eigen::MatrixXd y = data.responses();
  REQUIRE(x.cols() == 3);
  CHECK(x(0, 2) == 10);
  CHECK(y(0, 0) == 1);
  CHECK(y(1, 1) == 2);
  CHECK(y(0, 2) == 1);
  CHECK(y(1, 2) == 0);
}

TEST_CASE("grn truth fits noiseless dynamics") {
  Rng rng(5);
  const auto inst = gen_grn_series(8, 20, 2, 0.0, rng);
  const GrnObjective f(inst.data);
  const auto w = grn_vector(inst.network);
  CHECK(f.value(w) <= 1e-18 * std::max(1.0, inst.data.responses().squaredNorm()) + 1e-20);
  const Eigen::MatrixXd residual = inst.data.responses() - inst.network * inst.data.predictors();
  CHECK(residual.cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, inst.data.predictors().cwiseAbs().maxCoeff()));
}

TEST_CASE("grn gradient, subspace solve and layout") {
  Rng rng(6);
  const auto inst = gen_grn_series(6, 30, 2, 0.1, rng);
  const GrnObjective f(inst.data);
  for (int k = 0; k < 20; ++k) {
    const auto w = testing::normal_vector(f.dimension(), rng);
    CHECK(fd_error(f, w, f.gradient(w)) <= 1e-6);
  }
  Support support(f.dimension(), 0);
  for (std::size_t i = 0; i < support.size(); i += 4) support[i] = 1;
  const auto z = f.subspace_minimize(support, std::vector<double>(f.dimension(), 0.0), 0, 1.0);
  const auto g = f.gradient(z);
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i]) CHECK(std::abs(g[i]) < 1e-8 * std::max(1.0, f.predictors().squaredNorm()));
    else CHECK(z[i] == 0.0);
  }

  const auto w = testing::normal_vector(f.dimension(), rng);
  const Eigen::MatrixXd m = grn_matrix(6, w);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(m(i, i) == 0.0);
  CHECK(grn_vector(m) == w);
  CHECK(m(0, 1) == w[grn_index(6, 0, 1)]);
  CHECK(m(5, 4) == w[grn_index(6, 5, 4)]);
  CHECK_THROWS_AS(grn_index(6, 2, 2), std::invalid_argument);
}

TEST_CASE("grn value under a shifted series is recomputed exactly") {
  Rng rng(7);
  const auto inst = gen_grn_series(5, 30, 2, 0.1, rng);
  GrnData shifted = inst.data;
  Eigen::VectorXd c(5);
  c << 1, -2, 0.5, 3, -1;
  for (auto& s : shifted.series) s.colwise() += c;
  const GrnObjective f(shifted);
  CHECK((f.responses() - inst.data.responses()).cwiseAbs().maxCoeff() <= 1e-12);
  const auto w = testing::normal_vector(20, rng);
  const Eigen::MatrixXd direct = inst.data.responses() - grn_matrix(5, w) * shifted.predictors();
  CHECK(f.value(w) == doctest::Approx(0.5 * direct.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("bayesian rule examples") {
  CHECK(bayesian_predict(std::vector<double>{0.9}, std::vector<std::uint8_t>{1},
                         std::vector<std::uint8_t>{1}, 0.5) == 1);
  CHECK(bayesian_predict(std::vector<double>{0.9}, std::vector<std::uint8_t>{0},
                         std::vector<std::uint8_t>{0}, 0.5) == 1);
  CHECK(bayesian_predict(std::vector<double>{0.8, 0.6}, std::vector<std::uint8_t>{1, 1},
                         std::vector<std::uint8_t>{0, 1}, 0.5) == 0);
  // A strong prior for 0 outweighs one weak vote.
  CHECK(bayesian_predict(std::vector<double>{0.6}, std::vector<std::uint8_t>{1},
                         std::vector<std::uint8_t>{1}, 0.2) == 0);
  CHECK_THROWS_AS(bayesian_predict(std::vector<double>{1.0}, std::vector<std::uint8_t>{1},
                                   std::vector<std::uint8_t>{1}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("exact expected accuracy examples") {
  auto one = constant_model(1, 1, 0.9);
  CHECK(exact_expected_accuracy(one, std::vector<std::uint8_t>{1}).mean == doctest::Approx(0.9));
  CHECK(exact_expected_accuracy(one, std::vector<std::uint8_t>{0}).mean == doctest::Approx(0.5));
  auto two = constant_model(2, 1, 0.8);
  CHECK(exact_expected_accuracy(two, std::vector<std::uint8_t>{1, 1}).mean == doctest::Approx(0.8));
  auto crowd = constant_model(21, 1, 0.7);
  CHECK_THROWS_AS(exact_expected_accuracy(crowd, std::vector<std::uint8_t>(21, 1)), std::invalid_argument);
  CHECK_THROWS_AS(exact_expected_accuracy(two, std::vector<std::uint8_t>{1}), std::invalid_argument);
}

TEST_CASE("model validation") {
  auto model = constant_model(2, 2, 0.7);
  CHECK_NOTHROW(model.validate());
  model.quality(1, 0) = 1.0;
  CHECK_THROWS_AS(model.validate(), std::invalid_argument);
  model = constant_model(2, 2, 0.7);
  model.priors = {0.5};
  CHECK_THROWS_AS(model.validate(), std::invalid_argument);
  model.priors = {0.0, 0.5};
  CHECK_THROWS_AS(model.validate(), std::invalid_argument);
  CHECK(constant_model(1, 1, 0.5).log_odds(0, 0) == 0.0);
}

TEST_CASE("smoothed accuracy approaches the exact accuracy") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto model = gen_crowd_model(4, 5, rng);
    std::vector<std::uint8_t> x(20);
    std::bernoulli_distribution coin(0.6);
    for (auto& b : x) b = coin(rng);
    const std::vector<double> real(x.begin(), x.end());
    const double exact = exact_expected_accuracy(model, x).mean;
    double last = std::numeric_limits<double>::infinity();
    for (double tau : {1.0, 10.0, 100.0}) {
      const double gap = std::abs(exact_smoothed_accuracy(model, real, tau).mean - exact);
      CHECK(gap < last);
      last = gap;
    }
    CHECK(last < 1e-3);
  }
}

TEST_CASE("crowd gradient matches central differences on frozen samples") {
  Rng rng(9);
  const auto model = gen_crowd_model(5, 6, rng);
  for (double tau : {1.0, 3.0}) {
    CrowdObjective::Options opts;
    opts.samples = 16;
    opts.temperature = tau;
    const CrowdObjective f(model, opts);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> w(30);
      for (auto& a : w) a = unit(rng);
      CHECK(fd_error(f, w, f.gradient(w)) <= 1e-5);
      // A freshly drawn set of samples, checked against the same sampled expression.
      std::vector<CrowdSample> batch = {draw_crowd_sample(model, rng), draw_crowd_sample(model, rng)};
      const auto g = f.sampled_gradient(w, batch);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        auto up = w, down = w;
        up[i] += 1e-6;
        down[i] -= 1e-6;
        const double fd = (f.sampled_value(up, batch) - f.sampled_value(down, batch)) / 2e-6;
        num += (fd - g[i]) * (fd - g[i]);
        den += g[i] * g[i];
      }
      CHECK(std::sqrt(num) <= 1e-5 * std::max(std::sqrt(den), 1e-3));
    }
  }
}

TEST_CASE("uninformative workers give a flat objective") {
  const CrowdObjective f(constant_model(3, 4, 0.5));
  std::vector<double> zero(12, 0.0), full(12, 1.0);
  CHECK(f.value(zero) == doctest::Approx(f.value(full)));
  for (double g : f.gradient(full)) CHECK(g == 0.0);
}

TEST_CASE("good workers beat an empty assignment") {
  Rng rng(10);
  auto model = gen_crowd_model(5, 6, rng);
  model.quality.setConstant(0.9);
  const CrowdObjective f(model);
  std::vector<double> zero(30, 0.0), full(30, 1.0);
  CHECK(f.value(full) < f.value(zero));
  CHECK(f.box().has_value());
}

TEST_CASE("stochastic crowd gradients follow the caller stream") {
  Rng rng(11);
  const CrowdObjective f(gen_crowd_model(3, 3, rng));
  const std::vector<double> w(9, 0.5);
  Rng a(4), b(4);
  CHECK(f.stochastic_gradient(w, a) == f.stochastic_gradient(w, b));
  CHECK(f.has_stochastic_gradient());
}

TEST_CASE("exact accuracy agrees with simulation") {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const auto model = gen_crowd_model(4, 3, rng);
    std::vector<std::uint8_t> x(12);
    std::bernoulli_distribution coin(0.5);
    for (auto& b : x) b = coin(rng);
    const double exact = exact_expected_accuracy(model, x).mean;
    const auto sim = simulated_accuracy(model, x, 20000, rng);
    CHECK(std::abs(sim.mean - exact) <= 4.0 * sim.standard_error + 1e-12);
  }
}

TEST_CASE("random assignment is feasible and saturated") {
  Rng rng(13);
  const auto s = crowd_structure(6, 9, 3, 2, 14);
  const auto system = build_constraint_system(s);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_assignment(s, rng);
    CHECK(is_feasible_support(system, x));
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i]) continue;
      auto more = x;
      more[i] = 1;
      CHECK_FALSE(is_feasible_support(system, more));
    }
  }
}

}  // TEST_SUITE

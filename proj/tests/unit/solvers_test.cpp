#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "support.hpp"
#include "tvcs/crowd.hpp"
#include "tvcs/generators.hpp"
#include "tvcs/regression.hpp"
#include "tvcs/solvers.hpp"

using namespace tvcs;

namespace {

// f(w) = 1/2 ||w - v||^2.
class DistanceObjective final : public ObjectiveOracle {
 public:
  explicit DistanceObjective(std::vector<double> v) : v_(std::move(v)) {}
  std::size_t dimension() const override { return v_.size(); }
  double value(std::span<const double> w) const override {
    double total = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) total += 0.5 * (w[i] - v_[i]) * (w[i] - v_[i]);
    return total;
  }
  std::vector<double> gradient(std::span<const double> w) const override {
    std::vector<double> g(v_.size());
    for (std::size_t i = 0; i < v_.size(); ++i) g[i] = w[i] - v_[i];
    return g;
  }

 private:
  std::vector<double> v_;
};

TvcsStructure pair_structure() {
  TvcsStructure s;
  s.dimension = 4;
  s.overall_budget = 2;
  s.view1 = {{{0, 1}, 1}, {{2, 3}, 1}};
  return s;
}

SolverConfig unit_step(SolverVariant variant) {
  SolverConfig c;
  c.variant = variant;
  c.step_size = 1.0;
  return c;
}

}  // namespace

TEST_SUITE("solvers") {

TEST_CASE("variant names") {
  CHECK(parse_solver_variant("IHT") == SolverVariant::iht);
  CHECK(parse_solver_variant("grad_mp") == SolverVariant::gradmp);
  CHECK(parse_solver_variant("sto-iht") == SolverVariant::sto_iht);
  CHECK(parse_solver_variant("StoGradMP") == SolverVariant::sto_gradmp);
  CHECK_THROWS_AS(parse_solver_variant("cosamp"), std::invalid_argument);
  for (auto v : {SolverVariant::iht, SolverVariant::gradmp, SolverVariant::sto_iht, SolverVariant::sto_gradmp}) {
    CHECK(parse_solver_variant(to_string(v)) == v);
  }
}

TEST_CASE("config validation") {
  SolverConfig c;
  c.step_size = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.max_outer_iterations = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  CHECK_THROWS_AS(iht(DistanceObjective({1, 2, 3}), pair_structure(), c), std::invalid_argument);
}

TEST_CASE("iht lands on the projection in one step") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = testing::random_structure(8, rng);
    const auto v = testing::normal_vector(8, rng);
    const DistanceObjective f(v);
    auto cfg = unit_step(SolverVariant::iht);
    const auto trace = iht(f, s, cfg);
    const auto expected = project(v, s, cfg.projection).projected;
    CHECK(trace.final_w == expected);
    // A zero projection leaves the objective unchanged, which stops after one step.
    const bool moved = std::any_of(expected.begin(), expected.end(), [](double x) { return x != 0.0; });
    CHECK(trace.iterations == (moved ? 2u : 1u));
    CHECK(trace.converged);
    CHECK(trace.supports[1] == support_of(expected));
  }
}

TEST_CASE("closed budget keeps every iterate at zero") {
  TvcsStructure s = pair_structure();
  s.overall_budget = 0;
  const DistanceObjective f({3, 1, 2, 5});
  for (auto variant : {SolverVariant::iht, SolverVariant::gradmp}) {
    const auto trace = solve(f, s, unit_step(variant));
    for (const auto& support : trace.supports) CHECK(support == Support(4, 0));
    CHECK(trace.final_w == std::vector<double>(4, 0.0));
  }
}

TEST_CASE("gradmp first iteration is the projection") {
  const std::vector<double> v = {3, 1, 2, 5};
  auto cfg = unit_step(SolverVariant::gradmp);
  cfg.max_outer_iterations = 1;
  const auto trace = gradmp(DistanceObjective(v), pair_structure(), cfg);
  CHECK(trace.final_w == std::vector<double>{3, 0, 0, 5});

  Rng rng(5);
  const std::vector<std::size_t> budgets = {1, 2, 1, 2};
  const auto grid = matrix_view_structure(4, 4, budgets, budgets, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = testing::normal_vector(16, rng);
    const auto t = gradmp(DistanceObjective(w), grid, cfg);
    // The doubled-budget support of -w is merged with the empty start and
    // solved exactly there, so the outer projection sees w on that support.
    const auto doubled = support_of(project(w, doubled_budgets(grid), cfg.projection).projected);
    std::vector<double> restricted(16, 0.0);
    for (std::size_t i = 0; i < 16; ++i) restricted[i] = doubled[i] ? w[i] : 0.0;
    CHECK(t.final_w == project(restricted, grid, cfg.projection).projected);
    CHECK(testing::support_value(w, support_of(t.final_w)) ==
          doctest::Approx(testing::support_value(w, project_bruteforce(w, grid).support)));
  }
}

TEST_CASE("orthonormal design recovers the true support") {
  Rng rng(12);
  const std::vector<std::size_t> budgets = {1, 2, 1};
  const auto s = matrix_view_structure(3, 3, budgets, budgets, 3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto w_bar = gen_true_model(s, rng);
    Eigen::MatrixXd raw(9, 9);
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < raw.size(); ++i) raw.data()[i] = normal(rng);
    Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ();
    RegressionData data;
    data.rows = 3;
    data.cols = 3;
    data.features = q;
    data.responses = q * Eigen::Map<const Eigen::VectorXd>(w_bar.data(), 9);
    const LeastSquaresObjective f(data);
    // The closed-form least-squares solution is w_bar itself; its projection is the oracle.
    const auto oracle = project_bruteforce(w_bar, s).support;
    for (auto variant : {SolverVariant::iht, SolverVariant::gradmp}) {
      SolverConfig cfg;
      cfg.variant = variant;
      cfg.step_size = f.default_step_size();
      const auto trace = solve(f, s, cfg);
      CHECK(support_of(trace.final_w) == oracle);
      CHECK(support_of(trace.final_w) == support_of(w_bar));
    }
  }
}

TEST_CASE("iterates stay feasible and descend on a fixed support") {
  Rng rng(31);
  const auto s = gen_random_structure(5, rng);
  const auto system = build_constraint_system(s);
  const auto w_bar = gen_true_model(s, rng);
  const auto data = gen_regression_data(w_bar, 5, 5, 15, 0.01, rng);
  const LeastSquaresObjective f(data);
  for (auto variant : {SolverVariant::iht, SolverVariant::gradmp}) {
    SolverConfig cfg;
    cfg.variant = variant;
    cfg.step_size = f.default_step_size();
    cfg.max_outer_iterations = 60;
    const auto trace = solve(f, s, cfg);
    CHECK(trace.objective.size() == trace.iterations + 1);
    CHECK(trace.supports.size() == trace.iterations + 1);
    CHECK(trace.seconds.size() == trace.iterations + 1);
    for (const auto& support : trace.supports) CHECK(is_feasible_support(system, support));
    if (variant == SolverVariant::iht) {
      for (std::size_t t = 1; t + 1 < trace.objective.size(); ++t) {
        if (trace.supports[t] == trace.supports[t + 1]) {
          CHECK(trace.objective[t + 1] <= trace.objective[t] * (1 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("stochastic variant with exact gradients matches the deterministic run") {
  Rng rng(6);
  const auto s = testing::random_structure(10, rng);
  const DistanceObjective f(testing::normal_vector(10, rng));
  for (auto [sto, det] : {std::pair{SolverVariant::sto_iht, SolverVariant::iht},
                          std::pair{SolverVariant::sto_gradmp, SolverVariant::gradmp}}) {
    auto a = unit_step(sto);
    auto b = unit_step(det);
    const auto x = solve(f, s, a);
    const auto y = solve(f, s, b);
    CHECK(x.objective == y.objective);
    CHECK(x.final_w == y.final_w);
    CHECK(x.supports == y.supports);
  }
}

TEST_CASE("stochastic crowd runs are reproducible") {
  Rng rng(3);
  const auto model = gen_crowd_model(4, 6, rng);
  CrowdObjective::Options opts;
  opts.samples = 8;
  opts.seed = 5;
  const CrowdObjective f(model, opts);
  const auto s = crowd_structure(4, 6, 3, 2, 8);
  SolverConfig cfg;
  cfg.variant = SolverVariant::sto_iht;
  cfg.step_size = 6.0;
  cfg.max_outer_iterations = 10;
  cfg.rng_seed = 99;
  const auto a = solve(f, s, cfg);
  const auto b = solve(f, s, cfg);
  CHECK(a.objective == b.objective);
  CHECK(a.final_w == b.final_w);
  for (double w : a.final_w) CHECK((w >= 0.0 && w <= 1.0));
}

TEST_CASE("stochastic crowd runs improve the smoothed accuracy") {
  int improved = 0;
  for (int run = 0; run < 30; ++run) {
    Rng rng(derive_seed(400, static_cast<std::uint64_t>(run)));
    const auto model = gen_crowd_model(5, 8, rng);
    CrowdObjective::Options opts;
    opts.samples = 32;
    opts.seed = static_cast<std::uint64_t>(run);
    const CrowdObjective f(model, opts);
    const auto s = crowd_structure(5, 8, 4, 3, 16);
    SolverConfig cfg;
    cfg.variant = run % 2 ? SolverVariant::sto_gradmp : SolverVariant::sto_iht;
    cfg.step_size = 8.0;
    cfg.max_outer_iterations = 15;
    cfg.rng_seed = static_cast<std::uint64_t>(run);
    const auto trace = solve(f, s, cfg);
    // The objective is the negated smoothed accuracy.
    if (f.value(trace.final_w) <= trace.objective.front()) ++improved;
  }
  CHECK(improved >= 27);
}

TEST_CASE("box projection maximizes the distance reduction") {
  Rng rng(10);
  const Box box{-0.5, 1.0};
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testing::random_structure(7, rng);
    const auto system = build_constraint_system(s);
    auto z = testing::normal_vector(7, rng);
    const auto r = project_onto_box(z, system, box);
    CHECK(is_feasible_support(system, r.support));
    // Oracle: brute force over supports of the clamped vector.
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << 7); ++mask) {
      Support sup(7);
      for (std::size_t i = 0; i < 7; ++i) sup[i] = mask >> i & 1u;
      if (!is_feasible_support(system, sup)) continue;
      double d = 0.0;
      for (std::size_t i = 0; i < 7; ++i) {
        const double w = sup[i] ? std::clamp(z[i], box.lower, box.upper) : 0.0;
        d += (w - z[i]) * (w - z[i]);
      }
      best = std::min(best, d);
    }
    double got = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(r.projected[i] >= box.lower);
      CHECK(r.projected[i] <= box.upper);
      got += (r.projected[i] - z[i]) * (r.projected[i] - z[i]);
    }
    CHECK(got == doctest::Approx(best).epsilon(1e-9));
  }
  CHECK_THROWS_AS(project_onto_box(std::vector<double>{1.0}, build_constraint_system(overall_only_structure(1, 1)),
                                   Box{0.5, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("projection failures propagate") {
  Rng rng(2);
  const std::vector<std::size_t> budgets = {2, 2, 2, 2};
  const auto s = matrix_view_structure(4, 4, budgets, budgets, 5);
  auto cfg = unit_step(SolverVariant::iht);
  cfg.projection = ProjectionConfig::plain_gradient();
  cfg.projection.max_iterations = 1;
  CHECK_THROWS_AS(iht(DistanceObjective(testing::normal_vector(16, rng)), s, cfg), ProjectionError);
}

TEST_CASE("default subspace minimizer keeps the support") {
  const DistanceObjective f({1, -2, 3, -4});
  const Support support = {1, 0, 1, 0};
  const auto w = f.subspace_minimize(support, std::vector<double>{0.5, 0.5, 0.5, 0.5}, 200, 0.5);
  CHECK(w[1] == 0.0);
  CHECK(w[3] == 0.0);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[2] == doctest::Approx(3.0));
}

}  // TEST_SUITE

#include "tvcs/projection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace tvcs {

namespace {

constexpr auto kNoRow = ConstraintSystem::kNoRow;
constexpr double kDualityRowNorm2 = 16.0;

double max_fractionality(std::span<const double> x) {
  double worst = 0.0;
  for (double xi : x) worst = std::max(worst, std::min(xi, 1.0 - xi));
  return worst;
}

Support round_half_up(std::span<const double> x) {
  Support s(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] >= 0.5;
  return s;
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

}  // namespace

void ProjectionConfig::validate() const {
  if (max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
  if (!(binary_tolerance > 0.0 && binary_tolerance < 0.5)) {
    throw std::invalid_argument("binary_tolerance must lie in (0, 0.5)");
  }
  if (!(gap_tolerance >= 0.0)) throw std::invalid_argument("gap_tolerance must be non-negative");
  if (!(perturbation_scale >= 0.0)) {
    throw std::invalid_argument("perturbation_scale must be non-negative");
  }
  if (step_size && !(*step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
  if (dual_check_interval == 0) throw std::invalid_argument("dual_check_interval must be positive");
}

ProjectionConfig ProjectionConfig::plain_gradient() {
  ProjectionConfig c;
  c.step_rule = StepRule::plain;
  c.rounding = RoundingRule::primal;
  c.polish_interval = 0;
  return c;
}

FeasibilityPenalty::FeasibilityPenalty(const ConstraintSystem& system, std::vector<double> v2,
                                       std::vector<double> row_weights, double duality_weight)
    : system_(&system), v2_(std::move(v2)), weights_(std::move(row_weights)),
      duality_weight_(duality_weight) {
  if (!(duality_weight_ > 0.0)) throw std::invalid_argument("duality weight must be positive");
  if (v2_.size() != system.cols()) {
    throw std::invalid_argument("objective length does not match the constraint system");
  }
  if (weights_.empty()) weights_.assign(system.rows(), 1.0);
  if (weights_.size() != system.rows()) throw std::invalid_argument("one weight per group row");
  bounds_.resize(system.rows());
  for (std::size_t g = 0; g < bounds_.size(); ++g) bounds_[g] = weights_[g] * system.bound(g);
  scratch_rows_.resize(2 * system.rows());
  scratch_cols_.resize(system.cols());
}

double FeasibilityPenalty::value(std::span<const double> x, std::span<const double> y) const {
  const std::size_t p = v2_.size();
  const std::size_t groups = bounds_.size();
  const auto u = y.first(groups);
  const auto w = y.subspan(groups, p);
  auto ax = std::span(scratch_rows_).first(groups);
  std::fill(ax.begin(), ax.end(), 0.0);

  double vx = 0.0, sw = 0.0, rr = 0.0, hh = 0.0, su = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const auto& r = system_->view_rows(i);
    const double xi = x[i];
    ax[0] += xi;
    double atu = weights_[0] * u[0];
    if (r[0] != kNoRow) {
      ax[r[0]] += xi;
      atu += weights_[r[0]] * u[r[0]];
    }
    if (r[1] != kNoRow) {
      ax[r[1]] += xi;
      atu += weights_[r[1]] * u[r[1]];
    }
    const double res = std::max(v2_[i] - atu - w[i], 0.0);
    rr += res * res;
    vx += v2_[i] * xi;
    sw += w[i];
  }
  for (std::size_t g = 0; g < groups; ++g) {
    const double h = std::max(weights_[g] * ax[g] - bounds_[g], 0.0);
    hh += h * h;
    su += bounds_[g] * u[g];
  }
  const double d = su + sw - vx;
  return 0.5 * (duality_weight_ * d * d + rr + hh);
}

double FeasibilityPenalty::value_and_gradient(std::span<const double> x, std::span<const double> y,
                                              std::span<double> gx, std::span<double> gy,
                                              OperationCounter* counter) const {
  const std::size_t p = v2_.size();
  const std::size_t groups = bounds_.size();
  const auto u = y.first(groups);
  const auto w = y.subspan(groups, p);
  auto ax = std::span(scratch_rows_).first(groups);
  auto ar = std::span(scratch_rows_).subspan(groups, groups);
  auto res = std::span(scratch_cols_);
  std::fill(ax.begin(), ax.end(), 0.0);
  std::fill(ar.begin(), ar.end(), 0.0);
  std::uint64_t ops = 0;

  // Pass 1: A x (scatter), A^T u (gather), dual residual.
  double vx = 0.0, sw = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const auto& r = system_->view_rows(i);
    const double xi = x[i];
    ax[0] += xi;
    double atu = weights_[0] * u[0];
    ops += 2;
    if (r[0] != kNoRow) {
      ax[r[0]] += xi;
      atu += weights_[r[0]] * u[r[0]];
      ops += 2;
    }
    if (r[1] != kNoRow) {
      ax[r[1]] += xi;
      atu += weights_[r[1]] * u[r[1]];
      ops += 2;
    }
    res[i] = std::max(v2_[i] - atu - w[i], 0.0);
    rr += res[i] * res[i];
    vx += v2_[i] * xi;
    sw += w[i];
    ops += 1;
  }

  // Group pass: primal hinge, duality term. ax now holds weight_g * h_g.
  double hh = 0.0, su = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    const double h = std::max(weights_[g] * ax[g] - bounds_[g], 0.0);
    hh += h * h;
    su += bounds_[g] * u[g];
    ax[g] = weights_[g] * h;
    ops += 1;
  }
  const double d = su + sw - vx;
  const double ld = duality_weight_ * d;

  // Pass 2: gx = -d v2 + A^T (W h), gw = d - res, and A res (scatter).
  for (std::size_t i = 0; i < p; ++i) {
    const auto& r = system_->view_rows(i);
    double acc = ax[0];
    ar[0] += res[i];
    ops += 2;
    if (r[0] != kNoRow) {
      acc += ax[r[0]];
      ar[r[0]] += res[i];
      ops += 2;
    }
    if (r[1] != kNoRow) {
      acc += ax[r[1]];
      ar[r[1]] += res[i];
      ops += 2;
    }
    gx[i] = -ld * v2_[i] + acc;
    gy[groups + i] = ld - res[i];
    ops += 1;
  }
  for (std::size_t g = 0; g < groups; ++g) {
    gy[g] = ld * bounds_[g] - weights_[g] * ar[g];
    ops += 1;
  }
  if (counter) counter->operations += ops;
  return 0.5 * (ld * d + rr + hh);
}

double FeasibilityPenalty::lipschitz_bound() const {
  const std::size_t p = v2_.size();
  const std::size_t groups = bounds_.size();
  const std::size_t n = 2 * p + groups;
  std::vector<double> z(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> hz(n);
  std::vector<double> ax(groups);
  double lambda = 0.0;

  for (int iter = 0; iter < 2000; ++iter) {
    const auto x = std::span<const double>(z).first(p);
    const auto u = std::span<const double>(z).subspan(p, groups);
    const auto w = std::span<const double>(z).subspan(p + groups, p);
    auto ox = std::span(hz).first(p);
    auto ou = std::span(hz).subspan(p, groups);
    auto ow = std::span(hz).subspan(p + groups, p);

    // c = [-v2; s; 1]; H = lambda c c^T + [[A^T A, 0, 0], [0, A A^T, A], [0, A^T, I]]
    double cz = 0.0;
    for (std::size_t i = 0; i < p; ++i) cz += -v2_[i] * x[i] + w[i];
    for (std::size_t g = 0; g < groups; ++g) cz += bounds_[g] * u[g];
    cz *= duality_weight_;

    std::fill(ax.begin(), ax.end(), 0.0);
    std::fill(ou.begin(), ou.end(), 0.0);
    for (std::size_t i = 0; i < p; ++i) {
      const auto& r = system_->view_rows(i);
      double q = weights_[0] * u[0] + w[i];
      ax[0] += weights_[0] * x[i];
      if (r[0] != kNoRow) {
        q += weights_[r[0]] * u[r[0]];
        ax[r[0]] += weights_[r[0]] * x[i];
      }
      if (r[1] != kNoRow) {
        q += weights_[r[1]] * u[r[1]];
        ax[r[1]] += weights_[r[1]] * x[i];
      }
      ou[0] += weights_[0] * q;
      if (r[0] != kNoRow) ou[r[0]] += weights_[r[0]] * q;
      if (r[1] != kNoRow) ou[r[1]] += weights_[r[1]] * q;
      ow[i] = q + cz;
    }
    for (std::size_t i = 0; i < p; ++i) {
      const auto& r = system_->view_rows(i);
      double acc = weights_[0] * ax[0];
      if (r[0] != kNoRow) acc += weights_[r[0]] * ax[r[0]];
      if (r[1] != kNoRow) acc += weights_[r[1]] * ax[r[1]];
      ox[i] = acc - v2_[i] * cz;
    }
    for (std::size_t g = 0; g < groups; ++g) ou[g] += bounds_[g] * cz;

    double norm = 0.0;
    for (double v : hz) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    for (std::size_t k = 0; k < n; ++k) z[k] = hz[k] / norm;
    const bool settled = std::abs(norm - lambda) <= 1e-10 * norm;
    lambda = norm;
    if (settled) break;
  }
  return 1.02 * std::max(lambda, 1e-12);
}

RoundingCertificate FeasibilityPenalty::certify(Support support, std::span<const double> y,
                                                double tolerance) const {
  RoundingCertificate cert;
  cert.feasible = is_feasible_support(*system_, support);
  const std::size_t groups = bounds_.size();
  double dual = 0.0;
  for (std::size_t g = 0; g < groups; ++g) dual += bounds_[g] * std::max(y[g], 0.0);
  double primal = 0.0;
  for (std::size_t i = 0; i < v2_.size(); ++i) {
    const auto& r = system_->view_rows(i);
    double atu = weights_[0] * std::max(y[0], 0.0);
    if (r[0] != kNoRow) atu += weights_[r[0]] * std::max(y[r[0]], 0.0);
    if (r[1] != kNoRow) atu += weights_[r[1]] * std::max(y[r[1]], 0.0);
    dual += std::max(v2_[i] - atu, 0.0);
    if (support[i]) primal += v2_[i];
  }
  cert.primal_value = primal;
  cert.dual_value = dual;
  cert.gap = dual - primal;
  cert.accepted = cert.feasible && primal >= dual - tolerance;
  cert.support = std::move(support);
  return cert;
}

namespace {

// Exact minimization of the LP dual along u + t d, t >= 0, u + t d >= 0.
// r holds the reduced profits v2 - A^T u and is updated in place.
double dual_line_search(const ConstraintSystem& system, std::vector<double>& u,
                        std::vector<double>& r, const std::vector<std::pair<std::size_t, double>>& d,
                        std::vector<double>& coef, std::vector<std::pair<double, double>>& breaks) {
  const std::size_t p = r.size();
  std::fill(coef.begin(), coef.end(), 0.0);
  double slope = 0.0;
  double t_max = std::numeric_limits<double>::infinity();
  for (const auto& [g, dg] : d) {
    coef[g] = dg;
    slope += system.bound(g) * dg;
    if (dg < 0.0) t_max = std::min(t_max, u[g] / -dg);
  }
  if (!(t_max > 0.0)) return 0.0;
  breaks.clear();
  for (std::size_t i = 0; i < p; ++i) {
    const auto& rows = system.view_rows(i);
    double alpha = coef[0];
    if (rows[0] != kNoRow) alpha += coef[rows[0]];
    if (rows[1] != kNoRow) alpha += coef[rows[1]];
    if (alpha == 0.0) continue;
    const double t = r[i] / alpha;
    // Items with r_i - t alpha_i > 0 just right of t = 0 add -alpha_i to the slope.
    if (alpha > 0.0 ? t > 0.0 : t <= 0.0) slope -= alpha;
    if (t > 0.0) breaks.emplace_back(t, std::abs(alpha));
  }
  if (slope >= 0.0) return 0.0;
  std::sort(breaks.begin(), breaks.end());
  // When the slope reaches exactly zero the whole segment up to the next
  // breakpoint is optimal; its midpoint keeps the reduced profits apart.
  double step = t_max;
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    const double t = breaks[k].first;
    if (t >= t_max) break;
    slope += breaks[k].second;
    if (slope > 0.0) {
      step = t;
      break;
    }
    if (slope == 0.0) {
      const double next = k + 1 < breaks.size() ? std::min(breaks[k + 1].first, t_max) : t_max;
      step = std::isfinite(next) ? 0.5 * (t + next) : t;
      break;
    }
  }
  if (!std::isfinite(step)) return 0.0;
  for (const auto& [g, dg] : d) u[g] = std::max(u[g] + step * dg, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    const auto& rows = system.view_rows(i);
    double alpha = coef[0];
    if (rows[0] != kNoRow) alpha += coef[rows[0]];
    if (rows[1] != kNoRow) alpha += coef[rows[1]];
    r[i] -= step * alpha;
  }
  return step;
}

}  // namespace

std::vector<double> FeasibilityPenalty::polished_duals(std::span<const double> y,
                                                      std::size_t sweeps) const {
  const std::size_t p = v2_.size();
  const std::size_t groups = bounds_.size();
  std::vector<double> out(y.begin(), y.end());
  // Effective duals u_g = weight_g * y_g; the LP dual is sum_g s_g u_g + sum_i [v2_i - (A^T u)_i]_+.
  std::vector<double> u(groups);
  for (std::size_t g = 0; g < groups; ++g) u[g] = weights_[g] * std::max(y[g], 0.0);
  std::vector<double> r(p);
  system_->multiply_transpose(u, r);
  for (std::size_t i = 0; i < p; ++i) r[i] = v2_[i] - r[i];

  // Search directions: each dual alone, traded against the overall dual, and
  // each whole view traded against the overall dual.
  using Direction = std::vector<std::pair<std::size_t, double>>;
  std::vector<Direction> directions;
  for (std::size_t g = 0; g < groups; ++g) directions.push_back({{g, 1.0}});
  for (std::size_t g = 1; g < groups; ++g) directions.push_back({{0, 1.0}, {g, -1.0}});
  const std::size_t v1 = system_->view1_count();
  if (v1 > 0) {
    Direction d{{0, 1.0}};
    for (std::size_t g = 1; g <= v1; ++g) d.emplace_back(g, -1.0);
    directions.push_back(std::move(d));
  }
  if (groups > 1 + v1) {
    Direction d{{0, 1.0}};
    for (std::size_t g = 1 + v1; g < groups; ++g) d.emplace_back(g, -1.0);
    directions.push_back(std::move(d));
  }

  std::vector<double> coef(groups);
  std::vector<std::pair<double, double>> breaks;
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    bool moved = false;
    for (auto& d : directions) {
      moved = dual_line_search(*system_, u, r, d, coef, breaks) > 0.0 || moved;
      for (auto& [g, dg] : d) dg = -dg;
      moved = dual_line_search(*system_, u, r, d, coef, breaks) > 0.0 || moved;
      for (auto& [g, dg] : d) dg = -dg;
    }
    if (!moved) break;
  }
  for (std::size_t g = 0; g < groups; ++g) out[g] = u[g] / weights_[g];
  return out;
}

Support FeasibilityPenalty::reduced_profit_support(std::span<const double> y) const {
  Support s(v2_.size(), 0);
  for (std::size_t i = 0; i < v2_.size(); ++i) {
    const auto& r = system_->view_rows(i);
    double atu = weights_[0] * y[0];
    if (r[0] != kNoRow) atu += weights_[r[0]] * y[r[0]];
    if (r[1] != kNoRow) atu += weights_[r[1]] * y[r[1]];
    s[i] = v2_[i] - atu > 0.0;
  }
  return s;
}

std::vector<double> squared_magnitudes(std::span<const double> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double a) { return a * a; });
  return out;
}

std::vector<double> perturb_objective(std::span<const double> v2, double scale, Rng& rng) {
  std::vector<double> out(v2.begin(), v2.end());
  if (scale <= 0.0 || v2.empty()) return out;
  const double top = std::max(*std::max_element(v2.begin(), v2.end()), 1.0);
  std::uniform_real_distribution<double> noise(0.0, scale * top);
  for (auto& value : out) value += noise(rng);
  return out;
}

double penalty_value(const PrimalDualIterate& iterate, const ConstraintSystem& system,
                     std::span<const double> v2) {
  FeasibilityPenalty penalty(system, {v2.begin(), v2.end()});
  return penalty.value(iterate.x, iterate.y);
}

PenaltyGradient penalty_gradient(const PrimalDualIterate& iterate, const ConstraintSystem& system,
                                 std::span<const double> v2, OperationCounter* counter) {
  FeasibilityPenalty penalty(system, {v2.begin(), v2.end()});
  PenaltyGradient grad{std::vector<double>(penalty.primal_size()),
                       std::vector<double>(penalty.dual_size())};
  penalty.value_and_gradient(iterate.x, iterate.y, grad.gx, grad.gy, counter);
  return grad;
}

double estimate_step_size(const ConstraintSystem& system, std::span<const double> v2) {
  FeasibilityPenalty penalty(system, {v2.begin(), v2.end()});
  return 1.0 / penalty.lipschitz_bound();
}

RoundingCertificate certify_rounding(std::span<const double> x, std::span<const double> y,
                                     const ConstraintSystem& system, std::span<const double> v2,
                                     double tolerance) {
  FeasibilityPenalty penalty(system, {v2.begin(), v2.end()});
  return penalty.certify(round_half_up(x), y, tolerance);
}

PenaltyWeights equilibration_weights(const ConstraintSystem& system, std::span<const double> v2) {
  PenaltyWeights out;
  out.rows.resize(system.rows());
  for (std::size_t g = 0; g < system.rows(); ++g) out.rows[g] = 1.0 / std::max(system.bound(g), 1.0);
  // The duality row [-v2; W s; 1] is scaled to squared norm at most
  // kDualityRowNorm2, comparable to the curvature of the hinge rows.
  double norm2 = static_cast<double>(system.cols());
  for (double a : v2) norm2 += a * a;
  for (std::size_t g = 0; g < system.rows(); ++g) norm2 += std::pow(out.rows[g] * system.bound(g), 2);
  out.duality = std::min(1.0, kDualityRowNorm2 / norm2);
  return out;
}

FeasibilitySolution solve_feasibility(std::span<const double> v2, const ConstraintSystem& system,
                                      const ProjectionConfig& config) {
  config.validate();
  const std::size_t p = system.cols();
  const std::size_t groups = system.rows();

  const auto scaling = config.equilibrate_rows ? equilibration_weights(system, v2)
                                               : PenaltyWeights{std::vector<double>(groups, 1.0), 1.0};
  const auto& weights = scaling.rows;
  FeasibilityPenalty penalty(system, {v2.begin(), v2.end()}, weights, scaling.duality);
  const std::size_t n = p + penalty.dual_size();
  const double gamma = config.step_size ? *config.step_size : 1.0 / penalty.lipschitz_bound();
  const double tolerance =
      config.gap_tolerance * std::accumulate(v2.begin(), v2.end(), 0.0, [](double a, double b) {
        return a + std::abs(b);
      });

  // z = [x | u | w]
  std::vector<double> z(n, 0.0), z_prev, z_ext(n), z_next(n), grad(n);
  if (const auto& warm = config.warm_start;
      warm && warm->x.size() == p && warm->y.size() == penalty.dual_size()) {
    for (std::size_t k = 0; k < p; ++k) z[k] = std::clamp(warm->x[k], 0.0, 1.0);
    for (std::size_t g = 0; g < groups; ++g) z[p + g] = std::max(warm->y[g] / weights[g], 0.0);
    for (std::size_t k = p + groups; k < n; ++k) z[k] = std::max(warm->y[k - p], 0.0);
  }
  z_prev = z;
  auto xs = [p](std::vector<double>& v) { return std::span(v).first(p); };
  auto ys = [p](std::vector<double>& v) { return std::span(v).subspan(p); };
  auto clamp_step = [&](const std::vector<double>& from, std::vector<double>& to) {
    for (std::size_t k = 0; k < p; ++k) to[k] = std::clamp(from[k] - gamma * grad[k], 0.0, 1.0);
    for (std::size_t k = p; k < n; ++k) to[k] = std::max(from[k] - gamma * grad[k], 0.0);
  };

  FeasibilitySolution out;
  out.step_size = gamma;

  // Recent step lengths for the contraction diagnostic.
  constexpr std::size_t kWindow = 64;
  std::vector<double> steps;

  auto finish = [&](RoundingCertificate cert, std::size_t iteration) {
    out.support = std::move(cert.support);
    out.primal_value = cert.primal_value;
    out.dual_value = cert.dual_value;
    out.gap = cert.gap;
    out.max_fractionality = max_fractionality(xs(z));
    out.iterate.x.assign(z.begin(), z.begin() + p);
    out.iterate.y.assign(z.begin() + p, z.end());
    for (std::size_t g = 0; g < groups; ++g) out.iterate.y[g] *= weights[g];
    out.iterate.iteration = iteration;
    out.iterate.penalty_value = penalty_value(out.iterate, system, v2);
    if (steps.size() >= 2) {
      const std::size_t span = std::min(kWindow, steps.size() - 1);
      const double last = steps.back();
      const double first = steps[steps.size() - 1 - span];
      out.contraction_ratio =
          first > 0.0 && last > 0.0 ? std::pow(last / first, 1.0 / static_cast<double>(span)) : 0.0;
    }
    return out;
  };

  std::size_t next_polish = 0;
  auto try_round = [&](std::size_t iteration) -> std::optional<RoundingCertificate> {
    if (max_fractionality(xs(z)) < config.binary_tolerance) {
      auto cert = penalty.certify(round_half_up(xs(z)), ys(z), tolerance);
      if (cert.accepted) return cert;
    }
    if (config.rounding == RoundingRule::primal_or_dual &&
        iteration % config.dual_check_interval == 0) {
      auto cert = penalty.certify(penalty.reduced_profit_support(ys(z)), ys(z), tolerance);
      if (cert.accepted) {
        out.dual_rounding_used = true;
        return cert;
      }
    }
    if (config.polish_interval > 0 && iteration >= next_polish) {
      next_polish = iteration + std::max(config.polish_interval, iteration / 8);
      const auto polished = penalty.polished_duals(ys(z), 4);
      if (max_fractionality(xs(z)) < config.binary_tolerance) {
        auto cert = penalty.certify(round_half_up(xs(z)), polished, tolerance);
        if (cert.accepted) return cert;
      }
      if (config.rounding == RoundingRule::primal_or_dual) {
        auto cert = penalty.certify(penalty.reduced_profit_support(polished), polished, tolerance);
        if (cert.accepted) {
          out.dual_rounding_used = true;
          return cert;
        }
      }
    }
    return std::nullopt;
  };

  double f = penalty.value(xs(z), ys(z));
  if (config.record_history) out.penalty_history.push_back(f);
  if (auto cert = try_round(0)) return finish(std::move(*cert), 0);

  std::size_t since_restart = 0;
  for (std::size_t t = 1; t <= config.max_iterations; ++t) {
    double f_next = 0.0;
    if (config.step_rule == StepRule::accelerated && since_restart > 0) {
      const double beta = static_cast<double>(since_restart) / static_cast<double>(since_restart + 3);
      for (std::size_t k = 0; k < n; ++k) {
        z_ext[k] = z[k] + beta * (z[k] - z_prev[k]);
        if (k < p) z_ext[k] = std::clamp(z_ext[k], 0.0, 1.0);
        else z_ext[k] = std::max(z_ext[k], 0.0);
      }
      penalty.value_and_gradient(xs(z_ext), ys(z_ext), xs(grad), ys(grad));
      clamp_step(z_ext, z_next);
      f_next = penalty.value(xs(z_next), ys(z_next));
      if (f_next > f) since_restart = 0;
    }
    if (config.step_rule == StepRule::plain || since_restart == 0) {
      penalty.value_and_gradient(xs(z), ys(z), xs(grad), ys(grad));
      clamp_step(z, z_next);
      f_next = penalty.value(xs(z_next), ys(z_next));
    }
    ++since_restart;

    steps.push_back(l2_distance(z_next, z));
    if (steps.size() > 4 * kWindow) steps.erase(steps.begin(), steps.begin() + 2 * kWindow);
    std::swap(z_prev, z);
    std::swap(z, z_next);
    f = f_next;

    if (config.record_history) out.penalty_history.push_back(f);
    if (config.observer) config.observer(IterateView{t, xs(z), ys(z), f});
    if (auto cert = try_round(t)) return finish(std::move(*cert), t);
  }

  PrimalDualIterate last;
  last.x.assign(z.begin(), z.begin() + p);
  last.y.assign(z.begin() + p, z.end());
  for (std::size_t g = 0; g < groups; ++g) last.y[g] *= weights[g];
  last.iteration = config.max_iterations;
  last.penalty_value = penalty_value(last, system, v2);
  const auto cert = penalty.certify(round_half_up(xs(z)), ys(z), tolerance);
  throw ProjectionError("projection did not certify a support within " +
                            std::to_string(config.max_iterations) + " iterations (penalty " +
                            std::to_string(last.penalty_value) + ", gap " +
                            std::to_string(cert.gap) + ")",
                        std::move(last), cert.gap);
}

ProjectionResult project(std::span<const double> v, const ConstraintSystem& system,
                         const ProjectionConfig& config) {
  config.validate();
  if (v.size() != system.cols()) {
    throw std::invalid_argument("vector length " + std::to_string(v.size()) +
                                " does not match dimension " + std::to_string(system.cols()));
  }
  for (double a : v) {
    if (!std::isfinite(a)) throw std::invalid_argument("projection input must be finite");
  }

  ProjectionResult result;
  auto v2 = squared_magnitudes(v);
  const double raw_top = v2.empty() ? 0.0 : *std::max_element(v2.begin(), v2.end());
  if (raw_top == 0.0) {
    result.support.assign(v.size(), 0);
    result.projected.assign(v.size(), 0.0);
    return result;
  }

  // Zero coordinates never add to the objective and the feasible supports are
  // closed under removal, so they are dropped before solving.
  Support keep(v.size(), 0);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v2[i] > 0.0) {
      keep[i] = 1;
      kept.push_back(i);
    }
  }
  const bool reduce = kept.size() < v.size();
  std::optional<ConstraintSystem> reduced;
  if (reduce) {
    reduced.emplace(system.restricted(keep));
    std::vector<double> packed(kept.size());
    for (std::size_t k = 0; k < kept.size(); ++k) packed[k] = v2[kept[k]];
    v2 = std::move(packed);
  }
  const ConstraintSystem& solved = reduce ? *reduced : system;

  if (config.perturbation_scale > 0.0) {
    Rng rng(config.rng_seed);
    v2 = perturb_objective(v2, config.perturbation_scale, rng);
    result.perturbed = true;
  }
  const double top = *std::max_element(v2.begin(), v2.end());
  for (auto& a : v2) a /= top;

  auto solution = [&] {
    if (!config.warm_start) return solve_feasibility(v2, solved, config);
    auto scaled = config;
    auto& warm = *scaled.warm_start;
    const std::size_t groups = system.rows();
    if (reduce && warm.x.size() == v.size() && warm.y.size() == groups + v.size()) {
      std::vector<double> x(kept.size()), y(groups + kept.size());
      std::copy_n(warm.y.begin(), groups, y.begin());
      for (std::size_t k = 0; k < kept.size(); ++k) {
        x[k] = warm.x[kept[k]];
        y[groups + k] = warm.y[groups + kept[k]];
      }
      warm.x = std::move(x);
      warm.y = std::move(y);
    }
    for (auto& a : warm.y) a /= top;
    return solve_feasibility(v2, solved, scaled);
  }();
  result.support.assign(v.size(), 0);
  for (std::size_t k = 0; k < kept.size(); ++k) result.support[kept[k]] = solution.support[k];
  result.projected.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) result.projected[i] = result.support[i] ? v[i] : 0.0;
  result.iterations_used = solution.iterate.iteration;
  result.final_gap = solution.gap * top;
  result.contraction_ratio = solution.contraction_ratio;
  result.max_fractionality = solution.max_fractionality;
  result.iterate = std::move(solution.iterate);
  for (auto& a : result.iterate.y) a *= top;
  result.iterate.penalty_value *= top * top;
  if (reduce) {
    const std::size_t groups = system.rows();
    std::vector<double> x(v.size(), 0.0), y(groups + v.size(), 0.0);
    std::copy_n(result.iterate.y.begin(), groups, y.begin());
    for (std::size_t k = 0; k < kept.size(); ++k) {
      x[kept[k]] = result.iterate.x[k];
      y[groups + kept[k]] = result.iterate.y[groups + k];
    }
    result.iterate.x = std::move(x);
    result.iterate.y = std::move(y);
  }
  return result;
}

ProjectionResult project(std::span<const double> v, const TvcsStructure& structure,
                         const ProjectionConfig& config) {
  return project(v, build_constraint_system(structure), config);
}

ProjectionResult project_bruteforce(std::span<const double> v, const TvcsStructure& structure) {
  const auto system = build_constraint_system(structure);
  const std::size_t p = system.cols();
  if (v.size() != p) throw std::invalid_argument("vector length does not match dimension");
  if (p > 24) throw std::invalid_argument("brute-force projection is limited to p <= 24");

  const auto v2 = squared_magnitudes(v);
  std::vector<double> counts(system.rows());
  double best_value = -1.0;
  std::uint32_t best_mask = 0;
  int best_size = 0;

  // Lexicographic order of sorted index lists: lowest set bit first decides.
  auto lex_less = [](std::uint32_t a, std::uint32_t b) {
    while (a && b) {
      const int ia = __builtin_ctz(a), ib = __builtin_ctz(b);
      if (ia != ib) return ia < ib;
      a &= a - 1;
      b &= b - 1;
    }
    return a == 0 && b != 0;
  };

  const std::uint32_t limit = p == 0 ? 1u : (1u << p);
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    std::fill(counts.begin(), counts.end(), 0.0);
    double value = 0.0;
    bool feasible = true;
    for (std::size_t i = 0; i < p && feasible; ++i) {
      if (!(mask >> i & 1u)) continue;
      value += v2[i];
      counts[0] += 1.0;
      feasible = counts[0] <= system.bound(0);
      for (auto r : system.view_rows(i)) {
        if (r != kNoRow) {
          counts[r] += 1.0;
          feasible = feasible && counts[r] <= system.bound(r);
        }
      }
    }
    if (!feasible) continue;
    const int size = __builtin_popcount(mask);
    const bool better = value > best_value ||
                        (value == best_value &&
                         (size < best_size || (size == best_size && lex_less(mask, best_mask))));
    if (better) {
      best_value = value;
      best_mask = mask;
      best_size = size;
    }
  }

  ProjectionResult result;
  result.support.assign(p, 0);
  result.projected.assign(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    if (best_mask >> i & 1u) {
      result.support[i] = 1;
      result.projected[i] = v[i];
    }
  }
  return result;
}

}  // namespace tvcs

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "tvcs/random.hpp"
#include "tvcs/structure.hpp"

namespace tvcs::testing {

// Splits a random permutation of a random subset of [0, p) into disjoint groups.
inline std::vector<Group> random_view(std::size_t p, Rng& rng) {
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<std::size_t> keep_dist(0, p);
  order.resize(keep_dist(rng));
  std::vector<Group> groups;
  std::size_t at = 0;
  while (at < order.size()) {
    std::uniform_int_distribution<std::size_t> size_dist(1, std::min<std::size_t>(4, order.size() - at));
    const std::size_t size = size_dist(rng);
    Group g;
    g.indices.assign(order.begin() + static_cast<std::ptrdiff_t>(at),
                     order.begin() + static_cast<std::ptrdiff_t>(at + size));
    std::sort(g.indices.begin(), g.indices.end());
    std::uniform_int_distribution<std::size_t> budget_dist(0, size + 1);
    g.budget = budget_dist(rng);
    groups.push_back(std::move(g));
    at += size;
  }
  return groups;
}

// Arbitrary valid structure on p coordinates; groups need not tile a matrix.
inline TvcsStructure random_structure(std::size_t p, Rng& rng) {
  TvcsStructure s;
  s.dimension = p;
  std::uniform_int_distribution<std::size_t> overall_dist(0, p);
  s.overall_budget = overall_dist(rng);
  s.view1 = random_view(p, rng);
  s.view2 = random_view(p, rng);
  return s;
}

inline std::vector<double> normal_vector(std::size_t p, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> v(p);
  for (auto& x : v) x = normal(rng);
  return v;
}

inline double support_value(std::span<const double> v, std::span<const std::uint8_t> support) {
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (support[i]) total += v[i] * v[i];
  }
  return total;
}

inline double l1_squares(std::span<const double> v) {
  double total = 0.0;
  for (double x : v) total += x * x;
  return total;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace tvcs::testing

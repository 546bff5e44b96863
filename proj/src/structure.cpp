#include "tvcs/structure.hpp"

#include <algorithm>
#include <sstream>

namespace tvcs {

namespace {

void check_view(const TvcsStructure& structure, const std::vector<Group>& view,
                const char* name, std::vector<std::string>& violations) {
  const std::size_t p = structure.dimension;
  // owner[i] = 1 + index of the first group in this view that claimed i
  std::vector<std::size_t> owner(p, 0);
  for (std::size_t g = 0; g < view.size(); ++g) {
    const auto& indices = view[g].indices;
    if (indices.empty()) {
      violations.push_back(std::string(name) + " group " + std::to_string(g) + " is empty");
      continue;
    }
    for (std::size_t k = 0; k < indices.size(); ++k) {
      const std::size_t i = indices[k];
      if (i >= p) {
        violations.push_back(std::string(name) + " group " + std::to_string(g) + ": index " +
                             std::to_string(i) + " out of range");
        continue;
      }
      if (k > 0 && indices[k - 1] >= i) {
        violations.push_back(std::string(name) + " group " + std::to_string(g) +
                             ": indices not strictly increasing at position " + std::to_string(k));
      }
      if (owner[i] != 0 && owner[i] != g + 1) {
        violations.push_back(std::string(name) + " groups " + std::to_string(owner[i] - 1) +
                             " and " + std::to_string(g) + " overlap at index " +
                             std::to_string(i));
      } else {
        owner[i] = g + 1;
      }
    }
  }
}

}  // namespace

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (std::size_t k = 0; k < violations.size(); ++k) {
    if (k) out << "; ";
    out << violations[k];
  }
  return out.str();
}

ValidationReport validate_structure(const TvcsStructure& structure) {
  ValidationReport report;
  if (structure.dimension == 0) {
    report.violations.emplace_back("dimension must be positive");
    return report;
  }
  check_view(structure, structure.view1, "view1", report.violations);
  check_view(structure, structure.view2, "view2", report.violations);
  return report;
}

TvcsStructure matrix_view_structure(std::size_t rows, std::size_t cols,
                                    std::span<const std::size_t> row_budgets,
                                    std::span<const std::size_t> col_budgets,
                                    std::size_t overall) {
  if (row_budgets.size() != rows || col_budgets.size() != cols) {
    throw StructureError("matrix view: budget vector lengths must match the matrix shape");
  }
  TvcsStructure s;
  s.dimension = rows * cols;
  s.overall_budget = overall;
  for (std::size_t r = 0; r < rows; ++r) {
    Group g;
    g.budget = row_budgets[r];
    for (std::size_t c = 0; c < cols; ++c) g.indices.push_back(r * cols + c);
    s.view1.push_back(std::move(g));
  }
  for (std::size_t c = 0; c < cols; ++c) {
    Group g;
    g.budget = col_budgets[c];
    for (std::size_t r = 0; r < rows; ++r) g.indices.push_back(r * cols + c);
    s.view2.push_back(std::move(g));
  }
  return s;
}

TvcsStructure overall_only_structure(std::size_t dimension, std::size_t overall) {
  TvcsStructure s;
  s.dimension = dimension;
  s.overall_budget = overall;
  return s;
}

TvcsStructure without_view2(const TvcsStructure& structure) {
  TvcsStructure s = structure;
  s.view2.clear();
  return s;
}

TvcsStructure without_view1(const TvcsStructure& structure) {
  TvcsStructure s = structure;
  s.view1.clear();
  return s;
}

TvcsStructure doubled_budgets(const TvcsStructure& structure) {
  TvcsStructure s = structure;
  s.overall_budget = std::min(2 * structure.overall_budget, structure.dimension);
  for (auto* view : {&s.view1, &s.view2}) {
    for (auto& g : *view) g.budget = std::min(2 * g.budget, g.indices.size());
  }
  return s;
}

ConstraintSystem::ConstraintSystem(const TvcsStructure& structure) {
  const auto report = validate_structure(structure);
  if (!report.ok()) throw StructureError("invalid structure: " + report.summary());

  const std::size_t p = structure.dimension;
  view_rows_.assign(p, {kNoRow, kNoRow});
  view1_count_ = structure.view1.size();
  bounds_.reserve(structure.num_groups());
  bounds_.push_back(static_cast<double>(structure.overall_budget));

  std::int32_t row = 1;
  for (const auto& g : structure.view1) {
    for (auto i : g.indices) view_rows_[i][0] = row;
    bounds_.push_back(static_cast<double>(g.budget));
    ++row;
  }
  for (const auto& g : structure.view2) {
    for (auto i : g.indices) view_rows_[i][1] = row;
    bounds_.push_back(static_cast<double>(g.budget));
    ++row;
  }
}

ConstraintSystem ConstraintSystem::restricted(std::span<const std::uint8_t> keep) const {
  if (keep.size() != cols()) throw std::invalid_argument("restriction mask has the wrong length");
  ConstraintSystem out;
  out.bounds_ = bounds_;
  out.view1_count_ = view1_count_;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i]) out.view_rows_.push_back(view_rows_[i]);
  }
  return out;
}

std::size_t ConstraintSystem::column_nonzeros(std::size_t col) const {
  const auto& r = view_rows_[col];
  return 1 + (r[0] != kNoRow) + (r[1] != kNoRow);
}

void ConstraintSystem::multiply(std::span<const double> x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < view_rows_.size(); ++i) {
    const double xi = x[i];
    total += xi;
    const auto& r = view_rows_[i];
    if (r[0] != kNoRow) out[r[0]] += xi;
    if (r[1] != kNoRow) out[r[1]] += xi;
  }
  out[0] = total;
}

void ConstraintSystem::multiply_transpose(std::span<const double> y, std::span<double> out) const {
  for (std::size_t i = 0; i < view_rows_.size(); ++i) {
    const auto& r = view_rows_[i];
    double acc = y[0];
    if (r[0] != kNoRow) acc += y[r[0]];
    if (r[1] != kNoRow) acc += y[r[1]];
    out[i] = acc;
  }
}

std::vector<std::vector<int>> ConstraintSystem::dense() const {
  std::vector<std::vector<int>> a(rows(), std::vector<int>(cols(), 0));
  for (std::size_t i = 0; i < cols(); ++i) {
    a[0][i] = 1;
    for (auto r : view_rows_[i]) {
      if (r != kNoRow) a[r][i] = 1;
    }
  }
  return a;
}

ConstraintSystem build_constraint_system(const TvcsStructure& structure) {
  return ConstraintSystem(structure);
}

bool is_feasible_support(const ConstraintSystem& system, std::span<const std::uint8_t> x) {
  if (x.size() != system.cols()) {
    throw std::invalid_argument("support length " + std::to_string(x.size()) +
                                " does not match dimension " + std::to_string(system.cols()));
  }
  std::vector<double> counts(system.rows(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x[i]) continue;
    counts[0] += 1.0;
    for (auto r : system.view_rows(i)) {
      if (r != ConstraintSystem::kNoRow) counts[r] += 1.0;
    }
  }
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (counts[r] > system.bound(r)) return false;
  }
  return true;
}

std::vector<std::size_t> support_indices(std::span<const std::uint8_t> support) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i]) out.push_back(i);
  }
  return out;
}

Support support_of(std::span<const double> w) {
  Support s(w.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i) s[i] = w[i] != 0.0;
  return s;
}

}  // namespace tvcs

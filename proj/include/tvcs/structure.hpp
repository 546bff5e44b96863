#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvcs {

/// Binary indicator vector over coordinates (0 or 1 per entry).
using Support = std::vector<std::uint8_t>;

/// A cardinality-constrained index group: at most `budget` of `indices` may be nonzero.
struct Group {
  std::vector<std::size_t> indices;
  std::size_t budget = 0;
};

/// Three-view cardinality structure.
///
/// The overall group spans every coordinate. Groups inside `view1` are pairwise
/// disjoint, as are groups inside `view2`; a view1 group may overlap any view2
/// group. A budget larger than its group size is legal and simply inactive.
struct TvcsStructure {
  std::size_t dimension = 0;
  std::size_t overall_budget = 0;
  std::vector<Group> view1;
  std::vector<Group> view2;

  std::size_t num_groups() const { return 1 + view1.size() + view2.size(); }
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

class StructureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

ValidationReport validate_structure(const TvcsStructure& structure);

/// Structure over a row-major `rows x cols` matrix: rows form view1, columns view2.
TvcsStructure matrix_view_structure(std::size_t rows, std::size_t cols,
                                    std::span<const std::size_t> row_budgets,
                                    std::span<const std::size_t> col_budgets,
                                    std::size_t overall);

/// Structure with only the overall budget active.
TvcsStructure overall_only_structure(std::size_t dimension, std::size_t overall);

/// Copies of `structure` with one view dropped.
TvcsStructure without_view2(const TvcsStructure& structure);
TvcsStructure without_view1(const TvcsStructure& structure);

/// Every budget doubled and capped at its group size (p for the overall group).
TvcsStructure doubled_budgets(const TvcsStructure& structure);

/// Binary constraint matrix A and bound vector s with rows ordered
/// (overall, view1..., view2...).
///
/// Each column has at most three nonzeros: the overall row, at most one view1
/// row and at most one view2 row. The matrix is stored as compact per-column
/// row slots so that A x and A^T y cost O(p + |G|).
class ConstraintSystem {
 public:
  static constexpr std::int32_t kNoRow = -1;

  explicit ConstraintSystem(const TvcsStructure& structure);

  std::size_t rows() const { return bounds_.size(); }
  std::size_t cols() const { return view_rows_.size(); }
  std::size_t view1_count() const { return view1_count_; }
  std::size_t view2_count() const { return rows() - 1 - view1_count_; }

  const std::vector<double>& bounds() const { return bounds_; }
  double bound(std::size_t row) const { return bounds_[row]; }

  /// Row indices of the view1 and view2 groups containing column `col`, or kNoRow.
  const std::array<std::int32_t, 2>& view_rows(std::size_t col) const { return view_rows_[col]; }

  /// Number of nonzeros in column `col` (1 to 3).
  std::size_t column_nonzeros(std::size_t col) const;

  /// out = A x.
  void multiply(std::span<const double> x, std::span<double> out) const;
  /// out = A^T y.
  void multiply_transpose(std::span<const double> y, std::span<double> out) const;

  std::vector<std::vector<int>> dense() const;

  /// Same rows and bounds over the columns with keep[i] set, in order.
  ConstraintSystem restricted(std::span<const std::uint8_t> keep) const;

 private:
  ConstraintSystem() = default;

  std::vector<double> bounds_;
  std::vector<std::array<std::int32_t, 2>> view_rows_;
  std::size_t view1_count_ = 0;
};

/// Validates and materializes A and s; throws StructureError naming the violations.
ConstraintSystem build_constraint_system(const TvcsStructure& structure);

/// True iff A x <= s for the binary vector x. Throws std::invalid_argument on a length mismatch.
bool is_feasible_support(const ConstraintSystem& system, std::span<const std::uint8_t> x);

/// Indices where `support` is set.
std::vector<std::size_t> support_indices(std::span<const std::uint8_t> support);

/// Indicator of the nonzero entries of `w`.
Support support_of(std::span<const double> w);

}  // namespace tvcs

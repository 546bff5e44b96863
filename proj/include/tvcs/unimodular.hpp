#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tvcs {

using IntMatrix = std::vector<std::vector<int>>;

/// Exact determinant by fraction-free (Bareiss) elimination.
std::int64_t integer_determinant(IntMatrix m);

/// True iff every square submatrix of order <= size_cap has determinant in {-1, 0, 1}.
///
/// Entries must lie in {-1, 0, 1}; anything else throws std::invalid_argument.
/// Enumeration is exponential, so this is meant for matrices with a handful of
/// columns. Submatrices with a zero row or two identical rows are skipped since
/// their determinant is 0.
bool check_totally_unimodular(const IntMatrix& m, std::size_t size_cap);

}  // namespace tvcs

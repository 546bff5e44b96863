#include "tvcs/unimodular.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <utility>

namespace tvcs {

std::int64_t integer_determinant(IntMatrix m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  std::vector<std::vector<std::int64_t>> a(n, std::vector<std::int64_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw std::invalid_argument("determinant of a non-square matrix");
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
  }
  int sign = 1;
  std::int64_t prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && a[swap][k] == 0) ++swap;
      if (swap == n) return 0;
      std::swap(a[k], a[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        const __int128 num = static_cast<__int128>(a[i][j]) * a[k][k] -
                             static_cast<__int128>(a[i][k]) * a[k][j];
        a[i][j] = static_cast<std::int64_t>(num / prev);
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

namespace {

// Visits every k-subset of {0..n-1} in lexicographic order; stops when fn returns false.
template <typename Fn>
bool for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return true;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!fn(idx)) return false;
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) return true;
    ++idx[pos - 1];
    for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

}  // namespace

bool check_totally_unimodular(const IntMatrix& m, std::size_t size_cap) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  for (const auto& row : m) {
    if (row.size() != cols) throw std::invalid_argument("ragged matrix");
    for (int v : row) {
      if (v < -1 || v > 1) {
        throw std::invalid_argument("entry " + std::to_string(v) + " outside {-1, 0, 1}");
      }
    }
  }
  const std::size_t max_order = std::min({rows, cols, size_cap});

  for (std::size_t k = 1; k <= max_order; ++k) {
    const bool ok = for_each_subset(cols, k, [&](const std::vector<std::size_t>& col_set) {
      // Distinct nonzero rows restricted to the chosen columns.
      std::vector<std::vector<int>> candidates;
      for (std::size_t r = 0; r < rows; ++r) {
        std::vector<int> restricted(k);
        bool nonzero = false;
        for (std::size_t j = 0; j < k; ++j) {
          restricted[j] = m[r][col_set[j]];
          nonzero = nonzero || restricted[j] != 0;
        }
        if (nonzero && std::find(candidates.begin(), candidates.end(), restricted) == candidates.end()) {
          candidates.push_back(std::move(restricted));
        }
      }
      return for_each_subset(candidates.size(), k, [&](const std::vector<std::size_t>& row_set) {
        IntMatrix sub(k);
        for (std::size_t i = 0; i < k; ++i) sub[i] = candidates[row_set[i]];
        return std::llabs(integer_determinant(std::move(sub))) <= 1;
      });
    });
    if (!ok) return false;
  }
  return true;
}

}  // namespace tvcs

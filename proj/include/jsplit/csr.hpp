// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jsplit/error.hpp"

namespace jsplit {

using Vector = std::vector<double>;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix with 0-based indices.
///
/// Invariants (checked on construction): row_ptr has rows+1 non-decreasing
/// offsets starting at 0 and ending at nnz, every column index is < cols,
/// and column indices are strictly increasing within a row.
class CsrMatrix {
public:
  struct RowView {
    std::span<const std::size_t> cols;
    std::span<const double> values;
  };

  CsrMatrix() : row_ptr_{0} {}

  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
            std::vector<std::size_t> col_idx, std::vector<double> values)
      : rows_(rows),
        cols_(cols),
        row_ptr_(std::move(row_ptr)),
        col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    validate();
  }

  /// Builds a matrix from unordered coordinate entries. Duplicates are summed
  /// in the order they appear in `entries`.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                 std::vector<Triplet> entries) {
    for (const auto& t : entries) {
      if (t.row >= rows || t.col >= cols) {
        throw InvalidMatrixError("triplet (" + std::to_string(t.row) + ", " +
                                 std::to_string(t.col) + ") outside " +
                                 std::to_string(rows) + "x" + std::to_string(cols));
      }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    std::vector<std::size_t> row_ptr(rows + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(entries.size());
    values.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& t = entries[k];
      if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
        values.back() += t.value;
        continue;
      }
      col_idx.push_back(t.col);
      values.push_back(t.value);
      ++row_ptr[t.row + 1];
    }
    std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
    return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
  }

  static CsrMatrix identity(std::size_t n) {
    std::vector<std::size_t> row_ptr(n + 1);
    std::iota(row_ptr.begin(), row_ptr.end(), std::size_t{0});
    std::vector<std::size_t> col_idx(n);
    std::iota(col_idx.begin(), col_idx.end(), std::size_t{0});
    return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::vector<double>(n, 1.0));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  RowView row(std::size_t i) const {
    const auto begin = row_ptr_[i];
    const auto len = row_ptr_[i + 1] - begin;
    return {std::span(col_idx_).subspan(begin, len), std::span(values_).subspan(begin, len)};
  }

  std::size_t row_nnz(std::size_t i) const { return row_ptr_[i + 1] - row_ptr_[i]; }

  /// Stored value at (i, j), or 0 when the entry is not stored.
  double at(std::size_t i, std::size_t j) const {
    auto r = row(i);
    auto it = std::lower_bound(r.cols.begin(), r.cols.end(), j);
    if (it == r.cols.end() || *it != j) return 0.0;
    return r.values[static_cast<std::size_t>(it - r.cols.begin())];
  }

  bool contains(std::size_t i, std::size_t j) const {
    auto r = row(i);
    return std::binary_search(r.cols.begin(), r.cols.end(), j);
  }

  std::vector<Triplet> to_triplets() const {
    std::vector<Triplet> out;
    out.reserve(nnz());
    for (std::size_t i = 0; i < rows_; ++i) {
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        out.push_back({i, col_idx_[k], values_[k]});
      }
    }
    return out;
  }

  CsrMatrix transpose() const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (const auto& e : to_triplets()) t.push_back({e.col, e.row, e.value});
    return from_triplets(cols_, rows_, std::move(t));
  }

  /// Rows [begin, end) as a new matrix with the same column space.
  CsrMatrix row_slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > rows_) throw DimensionError("row slice out of range");
    std::vector<std::size_t> rp(end - begin + 1);
    for (std::size_t i = begin; i <= end; ++i) rp[i - begin] = row_ptr_[i] - row_ptr_[begin];
    std::vector<std::size_t> ci(col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[begin]),
                                col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[end]));
    std::vector<double> va(values_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[begin]),
                           values_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[end]));
    return CsrMatrix(end - begin, cols_, std::move(rp), std::move(ci), std::move(va));
  }

  void validate() const {
    if (row_ptr_.size() != rows_ + 1) throw InvalidMatrixError("row_ptr length must be rows+1");
    if (row_ptr_.front() != 0) throw InvalidMatrixError("row_ptr[0] must be 0");
    if (row_ptr_.back() != col_idx_.size() || col_idx_.size() != values_.size()) {
      throw InvalidMatrixError("row_ptr[rows] must equal nnz");
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      if (row_ptr_[i] > row_ptr_[i + 1]) {
        throw InvalidMatrixError("row_ptr decreases at row " + std::to_string(i));
      }
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        if (col_idx_[k] >= cols_) {
          throw InvalidMatrixError("column index out of range in row " + std::to_string(i));
        }
        if (k > row_ptr_[i] && col_idx_[k - 1] >= col_idx_[k]) {
          throw InvalidMatrixError("columns not strictly increasing in row " + std::to_string(i));
        }
      }
    }
  }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace jsplit

// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "jsplit/csr.hpp"

namespace jsplit {

namespace detail {
inline void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}
}  // namespace detail

/// y = A x, written into a caller-owned buffer.
inline void spmv_into(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  detail::require_same_length(x.size(), a.cols(), "spmv operand");
  detail::require_same_length(y.size(), a.rows(), "spmv result");
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto va = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (auto k = rp[i]; k < rp[i + 1]; ++k) sum += va[k] * x[ci[k]];
    y[i] = sum;
  }
}

inline Vector spmv(const CsrMatrix& a, std::span<const double> x) {
  Vector y(a.rows());
  spmv_into(a, x, y);
  return y;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
  detail::require_same_length(x.size(), y.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

/// Returns y + alpha * x.
inline Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  detail::require_same_length(x.size(), y.size(), "axpy");
  Vector out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
  return out;
}

/// Max-abs entry. A NaN entry makes the result NaN.
inline double inf_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) {
    const double a = std::abs(v);
    if (a != a) return a;
    if (a > m) m = a;
  }
  return m;
}

}  // namespace jsplit

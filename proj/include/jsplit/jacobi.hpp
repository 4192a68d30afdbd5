// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include "jsplit/csr.hpp"
#include "jsplit/kernels.hpp"

namespace jsplit {

enum class Variant { sequential, jb, jbo, jss };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::sequential: return "SEQ";
    case Variant::jb: return "JB";
    case Variant::jbo: return "JBO";
    case Variant::jss: return "JSS";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "SEQ") return Variant::sequential;
  if (s == "JB") return Variant::jb;
  if (s == "JBO") return Variant::jbo;
  if (s == "JSS") return Variant::jss;
  throw Error("unknown variant '" + s + "'");
}

/// How ranks agree that the iteration has converged.
enum class ConvergenceMode {
  global_norm,         ///< max-reduce the local residual norms, compare with epsilon
  simultaneous_local,  ///< logical AND of every rank's local test
};

struct JacobiConfig {
  double epsilon = 1e-8;
  std::size_t max_iterations = 50000;
  Vector initial_guess;  // empty means zero
  ConvergenceMode convergence = ConvergenceMode::global_norm;
  /// Abort once the residual norm exceeds this multiple of the initial norm.
  double divergence_factor = 1e12;
  bool record_history = false;

  void validate() const {
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
    if (max_iterations < 1) throw Error("max_iterations must be at least 1");
  }
};

struct SolveReport {
  Variant variant = Variant::sequential;
  std::size_t n_ranks = 1;
  std::size_t iterations = 0;
  bool converged = false;
  bool diverged = false;
  double comm_time_s = 0.0;
  double total_time_s = 0.0;
  std::uint64_t bytes_exchanged = 0;
  double residual_final = 0.0;
  std::optional<double> efficiency_pct;
  Vector residual_history;
};

struct SolveResult {
  Vector solution;
  SolveReport report;
};

/// d[i] = 1 / A[i,i].
inline Vector extract_inverse_diagonal(const CsrMatrix& a) {
  if (!a.is_square()) throw DimensionError("inverse diagonal needs a square matrix");
  Vector d(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double aii = a.at(i, i);
    if (aii == 0.0) throw SingularDiagonalError(i);
    d[i] = 1.0 / aii;
  }
  return d;
}

/// ||b - A u||_inf. For the Jacobi update this equals ||D (u_next - u)||_inf.
inline double weighted_residual_norm(const CsrMatrix& a, std::span<const double> b,
                                     std::span<const double> u) {
  detail::require_same_length(b.size(), a.rows(), "rhs");
  const Vector q = spmv(a, u);
  double m = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) m = std::max(m, std::abs(b[i] - q[i]));
  return m;
}

inline bool is_diagonally_dominant(const CsrMatrix& a) {
  if (!a.is_square()) throw DimensionError("diagonal dominance needs a square matrix");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double diag = 0.0;
    double off = 0.0;
    const auto r = a.row(i);
    for (std::size_t k = 0; k < r.cols.size(); ++k) {
      if (r.cols[k] == i) {
        diag = std::abs(r.values[k]);
      } else {
        off += std::abs(r.values[k]);
      }
    }
    if (diag < off) return false;
  }
  return true;
}

/// Estimate of rho(D^{-1} N), N = D - A, by power iteration with periodic
/// normalisation. Uses the growth rate over the second half of the steps so the
/// start-vector constant drops out. Meant for small test matrices.
inline double spectral_radius_estimate(const CsrMatrix& a, std::size_t n_iterations = 500,
                                       std::size_t restarts = 3, std::uint64_t seed = 20160101) {
  if (n_iterations < 1) throw Error("spectral radius needs at least one step");
  const Vector d_inv = extract_inverse_diagonal(a);
  const std::size_t n = a.rows();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  double best = 0.0;
  Vector v(n), av(n);
  for (std::size_t attempt = 0; attempt < restarts; ++attempt) {
    for (auto& x : v) x = dist(rng);
    double scale = inf_norm(v);
    for (auto& x : v) x /= scale;

    const std::size_t half = n_iterations / 2;
    double log_growth = 0.0;
    bool vanished = false;
    for (std::size_t k = 1; k <= n_iterations; ++k) {
      spmv_into(a, v, av);
      // T v = v - D^{-1} A v
      for (std::size_t i = 0; i < n; ++i) v[i] -= d_inv[i] * av[i];
      const double norm = inf_norm(v);
      if (norm == 0.0 || !std::isfinite(norm)) {
        vanished = norm == 0.0;
        if (!vanished) log_growth = std::numeric_limits<double>::infinity();
        break;
      }
      for (auto& x : v) x /= norm;
      if (k > half) log_growth += std::log(norm);
    }
    const double estimate =
        vanished ? 0.0 : std::exp(log_growth / static_cast<double>(n_iterations - half));
    best = std::max(best, estimate);
  }
  return best;
}

namespace detail {

/// Outcome of one convergence test.
struct NormCheck {
  bool converged;
  double global_norm;
};

/// Shared iteration driver used by every variant so that all of them apply the
/// identical arithmetic. `residual` refreshes r for the current iterate and
/// returns the convergence decision; `update` applies u += D^{-1} r.
template <class Residual, class Update>
void run_jacobi_loop(const JacobiConfig& cfg, SolveReport& report, Residual&& residual,
                     Update&& update) {
  double initial_norm = 0.0;
  for (std::size_t k = 0;; ++k) {
    const NormCheck check = residual();
    report.residual_final = check.global_norm;
    if (cfg.record_history) report.residual_history.push_back(check.global_norm);
    report.iterations = k;
    if (check.converged) {
      report.converged = true;
      return;
    }
    if (!std::isfinite(check.global_norm)) {
      report.diverged = true;
      return;
    }
    if (k == 0) {
      initial_norm = check.global_norm;
    } else if (check.global_norm > cfg.divergence_factor * initial_norm) {
      report.diverged = true;
      return;
    }
    if (k == cfg.max_iterations) return;
    update();
  }
}

}  // namespace detail

/// Vectorial Jacobi: u <- u + D^{-1}(b - A u) until ||b - A u||_inf <= epsilon.
inline SolveResult sequential_jacobi(const CsrMatrix& a, std::span<const double> b,
                                     const JacobiConfig& cfg) {
  cfg.validate();
  if (!a.is_square()) throw DimensionError("Jacobi needs a square matrix");
  detail::require_same_length(b.size(), a.rows(), "rhs");
  const auto start = std::chrono::steady_clock::now();

  const Vector d_inv = extract_inverse_diagonal(a);
  SolveResult out;
  out.report.variant = Variant::sequential;
  Vector& u = out.solution;
  if (cfg.initial_guess.empty()) {
    u.assign(a.rows(), 0.0);
  } else {
    detail::require_same_length(cfg.initial_guess.size(), a.rows(), "initial guess");
    u = cfg.initial_guess;
  }

  Vector q(a.rows()), r(a.rows());
  detail::run_jacobi_loop(
      cfg, out.report,
      [&] {
        spmv_into(a, u, q);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - q[i];
        const double norm = inf_norm(r);
        return detail::NormCheck{norm <= cfg.epsilon, norm};
      },
      [&] {
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += d_inv[i] * r[i];
      });

  out.report.total_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace jsplit

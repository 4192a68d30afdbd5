// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jsplit/bundle.hpp"
#include "jsplit/fabric.hpp"
#include "jsplit/jacobi.hpp"
#include "jsplit/kernels.hpp"
#include "jsplit/partition.hpp"

namespace jsplit {

/// What one rank returns: its local iterate with global indices and its own
/// report. Entries with owned[k] == 0 are interface copies owned elsewhere.
struct RankOutcome {
  std::vector<std::size_t> global_index;
  Vector values;
  std::vector<char> owned;
  SolveReport report;
};

/// User tags for solver traffic. Collectives use tags >= kReservedTagBase.
inline constexpr int kTagHalo = 100;
inline constexpr int kTagInterface = 200;

/// Collective convergence test over the ranks' owned residual norms.
inline detail::NormCheck check_convergence(RankEndpoint& ep, double local_norm,
                                           ConvergenceMode mode, double epsilon) {
  const double global = all_reduce_max(ep, local_norm);
  if (mode == ConvergenceMode::global_norm) return {global <= epsilon, global};
  return {all_reduce_land(ep, local_norm <= epsilon), global};
}

namespace detail {

class RankClock {
public:
  explicit RankClock(const RankEndpoint& ep)
      : start_(std::chrono::steady_clock::now()), comm0_(ep.comm_time()), bytes0_(ep.bytes_sent()) {}

  void finish(const RankEndpoint& ep, SolveReport& report) const {
    report.total_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    report.comm_time_s = std::min(ep.comm_time() - comm0_, report.total_time_s);
    report.bytes_exchanged = ep.bytes_sent() - bytes0_;
    report.n_ranks = static_cast<std::size_t>(ep.size());
  }

private:
  std::chrono::steady_clock::time_point start_;
  double comm0_;
  std::uint64_t bytes0_;
};

inline Vector initial_slice(const JacobiConfig& cfg, std::size_t begin, std::size_t end,
                            std::size_t global_n) {
  if (cfg.initial_guess.empty()) return Vector(end - begin, 0.0);
  require_same_length(cfg.initial_guess.size(), global_n, "initial guess");
  return Vector(cfg.initial_guess.begin() + static_cast<std::ptrdiff_t>(begin),
                cfg.initial_guess.begin() + static_cast<std::ptrdiff_t>(end));
}

inline Vector band_inverse_diagonal(const BandRowPartition& part) {
  Vector d(part.rows());
  for (std::size_t i = 0; i < part.rows(); ++i) {
    const double aii = part.local_matrix.at(i, part.row_begin + i);
    if (aii == 0.0) throw SingularDiagonalError(part.row_begin + i);
    d[i] = 1.0 / aii;
  }
  return d;
}

/// Band sizes of all ranks, agreed by a sum-reduction of one-hot vectors.
inline std::vector<std::size_t> band_layout(RankEndpoint& ep, std::size_t own_rows) {
  Vector onehot(static_cast<std::size_t>(ep.size()), 0.0);
  onehot[static_cast<std::size_t>(ep.rank())] = static_cast<double>(own_rows);
  const Vector all = all_reduce_sum(ep, onehot);
  std::vector<std::size_t> sizes(all.size());
  for (std::size_t q = 0; q < all.size(); ++q) sizes[q] = static_cast<std::size_t>(all[q]);
  return sizes;
}

inline void check_band(const BandRowPartition& part, const RankEndpoint& ep) {
  if (part.rank != ep.rank()) {
    throw PartitionError("band for rank " + std::to_string(part.rank) + " given to rank " +
                         std::to_string(ep.rank()));
  }
  if (part.local_matrix.rows() != part.rows() || part.local_rhs.size() != part.rows()) {
    throw DimensionError("band " + std::to_string(part.rank) + " has inconsistent sizes");
  }
}

}  // namespace detail

/// Naive band-row Jacobi: gather the whole iterate, multiply the band.
inline RankOutcome jacobi_bandrow_naive(const BandRowPartition& part, RankEndpoint& ep,
                                        const JacobiConfig& cfg) {
  cfg.validate();
  detail::check_band(part, ep);
  const detail::RankClock clock(ep);
  const std::size_t n = part.local_matrix.cols();
  const std::size_t rows = part.rows();

  RankOutcome out;
  out.report.variant = Variant::jb;
  const Vector d_inv = detail::band_inverse_diagonal(part);
  const auto layout = detail::band_layout(ep, rows);
  Vector& u = out.values;
  u = detail::initial_slice(cfg, part.row_begin, part.row_end, n);

  Vector q(rows), r(rows);
  detail::run_jacobi_loop(
      cfg, out.report,
      [&] {
        const Vector full = left_right_allgather(ep, u, layout);
        spmv_into(part.local_matrix, full, q);
        for (std::size_t i = 0; i < rows; ++i) r[i] = part.local_rhs[i] - q[i];
        return check_convergence(ep, inf_norm(r), cfg.convergence, cfg.epsilon);
      },
      [&] {
        for (std::size_t i = 0; i < rows; ++i) u[i] += d_inv[i] * r[i];
      });

  out.global_index.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) out.global_index[i] = part.row_begin + i;
  out.owned.assign(rows, 1);
  clock.finish(ep, out.report);
  return out;
}

namespace detail {

/// Band matrix renumbered onto the extended vector [lower ghosts | owned | higher ghosts].
/// The map is monotone in the global column, so each row keeps its summation order.
inline CsrMatrix compact_band(const BandRowPartition& part, const DependencyLists& deps,
                              std::size_t lower) {
  const std::size_t rows = part.rows();
  const auto& a = part.local_matrix;
  std::vector<std::size_t> col_idx(a.nnz());
  const auto cols = a.col_idx();
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const std::size_t c = cols[k];
    if (c >= part.row_begin && c < part.row_end) {
      col_idx[k] = lower + (c - part.row_begin);
      continue;
    }
    const auto slot = deps.ghost_slot(c);
    if (!slot) {
      throw PartitionError("rank " + std::to_string(part.rank) + ": ghost-slot miss for column " +
                           std::to_string(c));
    }
    col_idx[k] = *slot < lower ? *slot : *slot + rows;
  }
  return CsrMatrix(rows, rows + deps.ghosts.size(),
                   std::vector<std::size_t>(a.row_ptr().begin(), a.row_ptr().end()),
                   std::move(col_idx), std::vector<double>(a.values().begin(), a.values().end()));
}

struct HaloChannel {
  int rank;
  std::vector<std::size_t> send_local;  // owned offsets
  std::vector<std::size_t> recv_ext;    // extended-vector slots
};

}  // namespace detail

/// Sparsity-pattern band-row Jacobi: exchange only the entries each neighbour
/// actually multiplies.
inline RankOutcome jacobi_bandrow_sparsity(const BandRowPartition& part, const DependencyLists& deps,
                                           RankEndpoint& ep, const JacobiConfig& cfg) {
  cfg.validate();
  detail::check_band(part, ep);
  const detail::RankClock clock(ep);
  const std::size_t n = part.local_matrix.cols();
  const std::size_t rows = part.rows();

  RankOutcome out;
  out.report.variant = Variant::jbo;
  const Vector d_inv = detail::band_inverse_diagonal(part);

  const auto lower = static_cast<std::size_t>(
      std::lower_bound(deps.ghosts.begin(), deps.ghosts.end(), part.row_begin) - deps.ghosts.begin());
  const CsrMatrix local = detail::compact_band(part, deps, lower);

  std::vector<detail::HaloChannel> channels;
  for (int k : left_right_order(ep.rank(), ep.size())) {
    const NeighborLists* nl = deps.find(k);
    if (nl == nullptr) continue;
    detail::HaloChannel ch{k, {}, {}};
    for (auto g : nl->send) {
      if (g < part.row_begin || g >= part.row_end) {
        throw PartitionError("rank " + std::to_string(part.rank) + " asked to send unowned index " +
                             std::to_string(g));
      }
      ch.send_local.push_back(g - part.row_begin);
    }
    for (auto g : nl->recv) {
      const auto slot = deps.ghost_slot(g);
      if (!slot) {
        throw PartitionError("rank " + std::to_string(part.rank) + ": ghost-slot miss for index " +
                             std::to_string(g));
      }
      ch.recv_ext.push_back(*slot < lower ? *slot : *slot + rows);
    }
    channels.push_back(std::move(ch));
  }

  Vector ext(rows + deps.ghosts.size(), 0.0);
  const std::span<double> u(ext.data() + lower, rows);
  const Vector u0 = detail::initial_slice(cfg, part.row_begin, part.row_end, n);
  std::copy(u0.begin(), u0.end(), u.begin());

  auto exchange = [&] {
    for (const auto& ch : channels) {
      auto send = [&] {
        if (ch.send_local.empty()) return;
        Vector buf(ch.send_local.size());
        for (std::size_t s = 0; s < buf.size(); ++s) buf[s] = u[ch.send_local[s]];
        ep.send(ch.rank, kTagHalo, std::move(buf));
      };
      auto receive = [&] {
        if (ch.recv_ext.empty()) return;
        const auto buf = ep.recv(ch.rank, kTagHalo, ch.recv_ext.size());
        for (std::size_t s = 0; s < buf.size(); ++s) ext[ch.recv_ext[s]] = buf[s];
      };
      if (ep.rank() < ch.rank) {
        send();
        receive();
      } else {
        receive();
        send();
      }
    }
  };

  Vector q(rows), r(rows);
  detail::run_jacobi_loop(
      cfg, out.report,
      [&] {
        exchange();
        spmv_into(local, ext, q);
        for (std::size_t i = 0; i < rows; ++i) r[i] = part.local_rhs[i] - q[i];
        return check_convergence(ep, inf_norm(r), cfg.convergence, cfg.epsilon);
      },
      [&] {
        for (std::size_t i = 0; i < rows; ++i) u[i] += d_inv[i] * r[i];
      });

  out.values.assign(u.begin(), u.end());
  out.global_index.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) out.global_index[i] = part.row_begin + i;
  out.owned.assign(rows, 1);
  clock.finish(ep, out.report);
  return out;
}

/// Sums partial interface values across sharers. Every sharer adds the
/// contributions in ascending rank order, so all of them get the same bits.
class InterfaceAssembler {
public:
  explicit InterfaceAssembler(const Substructure& sub) : sub_(sub) {
    const std::size_t first = sub.interior_count;
    terms_.resize(sub.interface_count);
    for (std::size_t t = 0; t < terms_.size(); ++t) terms_[t].push_back({sub.rank, kOwn, 0});
    for (std::size_t d = 0; d < sub.interfaces.size(); ++d) {
      const auto& desc = sub.interfaces[d];
      for (std::size_t pos = 0; pos < desc.local_nodes.size(); ++pos) {
        const std::size_t l = desc.local_nodes[pos];
        if (l < first || l >= sub.local_size()) {
          throw PartitionError("rank " + std::to_string(sub.rank) + ": interface list to rank " +
                               std::to_string(desc.neighbor) + " names non-interface node " +
                               std::to_string(l));
        }
        terms_[l - first].push_back({desc.neighbor, d, pos});
      }
    }
    for (auto& t : terms_) {
      std::sort(t.begin(), t.end(), [](const Term& x, const Term& y) { return x.rank < y.rank; });
    }
  }

  /// Collect/send to every neighbour, then receive and sum.
  void assemble(RankEndpoint& ep, std::span<double> v) const {
    for (const auto& desc : sub_.interfaces) {
      Vector buf(desc.local_nodes.size());
      for (std::size_t s = 0; s < buf.size(); ++s) buf[s] = v[desc.local_nodes[s]];
      ep.send(desc.neighbor, kTagInterface, std::move(buf));
    }
    std::vector<Vector> inbox;
    inbox.reserve(sub_.interfaces.size());
    for (const auto& desc : sub_.interfaces) {
      try {
        inbox.push_back(ep.recv(desc.neighbor, kTagInterface, desc.local_nodes.size()));
      } catch (const WorldAborted&) {
        throw;
      } catch (const FabricError& e) {
        throw FabricError("interface misalignment: " + std::string(e.what()));
      }
    }
    const std::size_t first = sub_.interior_count;
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      double acc = 0.0;
      for (const auto& term : terms_[t]) {
        acc += term.desc == kOwn ? v[first + t] : inbox[term.desc][term.pos];
      }
      v[first + t] = acc;
    }
  }

private:
  static constexpr std::size_t kOwn = static_cast<std::size_t>(-1);
  struct Term {
    int rank;
    std::size_t desc;
    std::size_t pos;
  };
  const Substructure& sub_;
  std::vector<std::vector<Term>> terms_;
};

namespace detail {

inline void check_substructure(const Substructure& sub, const RankEndpoint& ep) {
  if (sub.rank != ep.rank()) {
    throw PartitionError("substructure for rank " + std::to_string(sub.rank) + " given to rank " +
                         std::to_string(ep.rank()));
  }
  const std::size_t m = sub.local_size();
  if (sub.local_matrix.rows() != m || sub.local_matrix.cols() != m || sub.local_rhs.size() != m ||
      sub.local_to_global.size() != m || sub.interface_owner.size() != sub.interface_count) {
    throw DimensionError("substructure " + std::to_string(sub.rank) + " has inconsistent sizes");
  }
}

}  // namespace detail

/// Steps 1-3 of a substructuring iteration: local product, then interface assembly.
inline Vector distributed_spmv(RankEndpoint& ep, const Substructure& sub,
                               const InterfaceAssembler& assembler, std::span<const double> u_local) {
  Vector y = spmv(sub.local_matrix, u_local);
  assembler.assemble(ep, y);
  return y;
}

inline Vector distributed_spmv(RankEndpoint& ep, const Substructure& sub,
                               std::span<const double> u_local) {
  detail::check_substructure(sub, ep);
  return distributed_spmv(ep, sub, InterfaceAssembler(sub), u_local);
}

/// Substructuring Jacobi on one subdomain.
inline RankOutcome jacobi_substructuring(const Substructure& sub, RankEndpoint& ep,
                                         const JacobiConfig& cfg) {
  cfg.validate();
  detail::check_substructure(sub, ep);
  const detail::RankClock clock(ep);
  const std::size_t m = sub.local_size();

  RankOutcome out;
  out.report.variant = Variant::jss;
  const InterfaceAssembler assembler(sub);

  Vector d_inv(m);
  for (std::size_t i = 0; i < m; ++i) d_inv[i] = sub.local_matrix.at(i, i);
  assembler.assemble(ep, d_inv);
  for (std::size_t i = 0; i < m; ++i) {
    if (d_inv[i] == 0.0) throw SingularDiagonalError(sub.local_to_global[i]);
    d_inv[i] = 1.0 / d_inv[i];
  }
  Vector b(sub.local_rhs);
  assembler.assemble(ep, b);

  Vector& u = out.values;
  u.assign(m, 0.0);
  if (!cfg.initial_guess.empty()) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto g = sub.local_to_global[i];
      if (g >= cfg.initial_guess.size()) throw DimensionError("initial guess too short");
      u[i] = cfg.initial_guess[g];
    }
  }

  Vector y(m), r(m);
  detail::run_jacobi_loop(
      cfg, out.report,
      [&] {
        spmv_into(sub.local_matrix, u, y);
        assembler.assemble(ep, y);
        double local_norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          r[i] = b[i] - y[i];
          const double a = std::abs(r[i]);
          if (sub.owns(i) && !(a <= local_norm)) local_norm = a;
        }
        return check_convergence(ep, local_norm, cfg.convergence, cfg.epsilon);
      },
      [&] {
        for (std::size_t i = 0; i < m; ++i) u[i] += d_inv[i] * r[i];
      });

  out.global_index = sub.local_to_global;
  out.owned.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.owned[i] = sub.owns(i) ? 1 : 0;
  clock.finish(ep, out.report);
  return out;
}

/// Assembles the global solution and a run-level report: max times over
/// ranks, summed bytes, rank 0's iteration data. Throws if two copies of a
/// shared entry differ.
inline SolveResult combine_outcomes(std::vector<RankOutcome> outcomes, std::size_t global_n) {
  SolveResult result;
  result.solution.assign(global_n, 0.0);
  std::vector<char> seen(global_n, 0);
  if (outcomes.empty()) throw Error("no rank outcomes to combine");
  SolveReport& rep = result.report;
  rep = outcomes.at(0).report;
  rep.n_ranks = outcomes.size();
  rep.bytes_exchanged = 0;
  for (auto& o : outcomes) {
    if (o.report.iterations != rep.iterations || o.report.converged != rep.converged) {
      throw Error("ranks disagree on the iteration outcome");
    }
    rep.comm_time_s = std::max(rep.comm_time_s, o.report.comm_time_s);
    rep.total_time_s = std::max(rep.total_time_s, o.report.total_time_s);
    rep.bytes_exchanged += o.report.bytes_exchanged;
    for (std::size_t k = 0; k < o.global_index.size(); ++k) {
      const auto g = o.global_index[k];
      if (!o.owned[k]) continue;
      if (g >= global_n || seen[g]) {
        throw PartitionError("solution index " + std::to_string(g) + " not owned once");
      }
      seen[g] = 1;
      result.solution[g] = o.values[k];
    }
  }
  for (const auto& o : outcomes) {
    for (std::size_t k = 0; k < o.global_index.size(); ++k) {
      const double mine = o.values[k];
      const double owner = result.solution[o.global_index[k]];
      if (!o.owned[k] && mine != owner && !(std::isnan(mine) && std::isnan(owner))) {
        throw Error("interface copies of node " + std::to_string(o.global_index[k]) + " diverged");
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw PartitionError("gathered solution has unowned entries");
  }
  return result;
}

/// Runs the variant matching `bundle` on a fresh world of bundle.n_ranks() ranks.
inline SolveResult solve_bundle(const PartitionBundle& bundle, const JacobiConfig& cfg,
                                FabricOptions options = FabricOptions::from_env()) {
  const int p = static_cast<int>(bundle.n_ranks());
  std::vector<RankOutcome> outcomes;
  switch (bundle.strategy) {
    case Strategy::bandrow_naive:
      outcomes = spawn_world(
          p,
          [&](RankEndpoint& ep) {
            return jacobi_bandrow_naive(bundle.bands[static_cast<std::size_t>(ep.rank())], ep, cfg);
          },
          options);
      break;
    case Strategy::bandrow_sparsity:
      outcomes = spawn_world(
          p,
          [&](RankEndpoint& ep) {
            const auto r = static_cast<std::size_t>(ep.rank());
            return jacobi_bandrow_sparsity(bundle.bands[r], bundle.dependencies.at(r), ep, cfg);
          },
          options);
      break;
    case Strategy::substructuring:
      outcomes = spawn_world(
          p,
          [&](RankEndpoint& ep) {
            return jacobi_substructuring(bundle.substructures[static_cast<std::size_t>(ep.rank())],
                                         ep, cfg);
          },
          options);
      break;
  }
  return combine_outcomes(std::move(outcomes), bundle.global_n);
}

/// Partitions (A, b) for `variant` on p ranks and solves. JSS uses the element
/// path when `mesh` is given, the algebraic path otherwise.
inline SolveResult solve(const CsrMatrix& a, std::span<const double> b, Variant variant,
                         std::size_t p, const JacobiConfig& cfg,
                         const ElementConnectivity* mesh = nullptr,
                         FabricOptions options = FabricOptions::from_env()) {
  switch (variant) {
    case Variant::sequential:
      return sequential_jacobi(a, b, cfg);
    case Variant::jb:
      return solve_bundle(make_band_bundle(a, b, p, false), cfg, options);
    case Variant::jbo:
      return solve_bundle(make_band_bundle(a, b, p, true), cfg, options);
    case Variant::jss:
      return solve_bundle(make_substructure_bundle(substructure_split(a, b, p, mesh), a.rows()), cfg,
                          options);
  }
  throw Error("unknown variant");
}

}  // namespace jsplit

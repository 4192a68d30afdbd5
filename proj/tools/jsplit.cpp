// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

// jsplit: generate systems, partition them, run the distributed Jacobi
// variants and benchmark them.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jsplit/bench.hpp"
#include "jsplit/bundle.hpp"
#include "jsplit/mm_io.hpp"
#include "jsplit/solver.hpp"
#include "jsplit/testgen.hpp"

namespace fs = std::filesystem;
using namespace jsplit;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kNotConverged = 2, kDiverged = 3 };

struct Loaded {
  CsrMatrix matrix;
  Vector rhs;
  std::optional<ElementConnectivity> mesh;
};

void write_system(const fs::path& dir, const CsrMatrix& a, const Vector& b,
                  const ElementConnectivity* mesh) {
  fs::create_directories(dir);
  write_matrix_market(a, dir / "matrix.mtx");
  write_vector(b, dir / "rhs.vec");
  if (mesh != nullptr) {
    write_element_connectivity(*mesh, dir / "elements.txt");
    write_element_values(*mesh, dir / "element_values.txt");
  }
}

Loaded load_system(const std::string& matrix, const std::string& rhs, const std::string& elements,
                   const std::string& element_values) {
  Loaded sys{read_matrix_market(matrix), {}, std::nullopt};
  sys.rhs = rhs.empty() ? spmv(sys.matrix, Vector(sys.matrix.cols(), 1.0)) : read_vector(rhs);
  if (!elements.empty()) {
    if (element_values.empty()) throw Error("--elements needs --element-values");
    sys.mesh = read_element_mesh(elements, element_values);
  }
  return sys;
}

ConvergenceMode parse_conv_mode(const std::string& s) {
  if (s == "global-norm") return ConvergenceMode::global_norm;
  if (s == "simultaneous-local") return ConvergenceMode::simultaneous_local;
  throw Error("unknown convergence mode '" + s + "'");
}

void print_report(const SolveReport& r) {
  std::printf("variant         %s\n", to_string(r.variant).c_str());
  std::printf("ranks           %zu\n", r.n_ranks);
  std::printf("iterations      %zu\n", r.iterations);
  std::printf("converged       %s\n", r.converged ? "yes" : "no");
  if (r.diverged) std::printf("diverged        yes\n");
  std::printf("residual        %.6e\n", r.residual_final);
  std::printf("comm time (s)   %.6f\n", r.comm_time_s);
  std::printf("total time (s)  %.6f\n", r.total_time_s);
  std::printf("bytes exchanged %llu\n", static_cast<unsigned long long>(r.bytes_exchanged));
}

void print_lists(const PartitionBundle& bundle) {
  auto one_based = [](const std::vector<std::size_t>& v) {
    std::string s = "{";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k] + 1);
    return s + "}";
  };
  for (std::size_t r = 0; r < bundle.dependencies.size(); ++r) {
    for (const auto& n : bundle.dependencies[r].neighbors) {
      if (!n.recv.empty()) {
        std::printf("rank %zu <- rank %d recv %s\n", r + 1, n.rank + 1, one_based(n.recv).c_str());
      }
      if (!n.send.empty()) {
        std::printf("rank %zu -> rank %d send %s\n", r + 1, n.rank + 1, one_based(n.send).c_str());
      }
    }
  }
}

int exit_code_for(const SolveReport& r, bool allow_nonconverged) {
  if (r.converged || allow_nonconverged) return kOk;
  return r.diverged ? kDiverged : kNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed synchronous Jacobi with band-row and substructuring splits"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a Laplace or crafted test system");
  std::string disc = "fd7";
  std::size_t m = 9;
  std::string crafted;
  std::string gen_out;
  gen->add_option("--disc", disc, "fd7 or hex-fem")->check(CLI::IsMember({"fd7", "hex-fem"}));
  gen->add_option("--m", m, "nodes per axis");
  gen->add_option("--crafted", crafted, "fig4-example, fig5-10x10, fig5-10x10-dominant, tridiag-<n>, divergent-2x2");
  gen->add_option("--out", gen_out, "output directory")->required();

  // partition
  auto* part = app.add_subcommand("partition", "Split a system into a per-rank bundle");
  std::string matrix_path, rhs_path, parts_path, elements_path, values_path, part_out;
  std::string strategy = "bandrow";
  std::size_t ranks = 1;
  part->add_option("--matrix", matrix_path)->required()->check(CLI::ExistingFile);
  part->add_option("--rhs", rhs_path, "defaults to A*1")->check(CLI::ExistingFile);
  part->add_option("--strategy", strategy)
      ->check(CLI::IsMember({"bandrow", "bandrow-op", "substructuring"}));
  part->add_option("--ranks", ranks)->check(CLI::PositiveNumber);
  part->add_option("--parts", parts_path, "node partition file (substructuring)")
      ->check(CLI::ExistingFile);
  part->add_option("--elements", elements_path)->check(CLI::ExistingFile);
  part->add_option("--element-values", values_path)->check(CLI::ExistingFile);
  part->add_option("--out", part_out, "bundle directory")->required();

  // shared solver options
  double epsilon = 1e-8;
  std::size_t max_iters = 50000;
  std::string conv_mode = "global-norm";
  auto add_solver_opts = [&](CLI::App* sub) {
    sub->add_option("--epsilon", epsilon, "residual threshold")->check(CLI::PositiveNumber);
    sub->add_option("--max-iters", max_iters)->check(CLI::PositiveNumber);
    sub->add_option("--conv-mode", conv_mode)
        ->check(CLI::IsMember({"global-norm", "simultaneous-local"}));
  };

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Run the variant matching a bundle");
  std::string bundle_dir, csv_path, solution_path;
  bool allow_nonconverged = false;
  solve_cmd->add_option("--bundle", bundle_dir)->required()->check(CLI::ExistingDirectory);
  add_solver_opts(solve_cmd);
  solve_cmd->add_flag("--allow-nonconverged", allow_nonconverged);
  solve_cmd->add_option("--csv", csv_path);
  solve_cmd->add_option("--solution", solution_path);

  // bench
  auto* bench = app.add_subcommand("bench", "Time variants over rank counts");
  std::string variants = "JB,JBO,JSS";
  std::vector<std::size_t> rank_list{1, 2, 4, 8};
  std::size_t repeats = 10;
  std::uint64_t seed = 20160101;
  std::string bench_csv;
  std::string bench_matrix, bench_rhs, bench_elements, bench_values;
  bench->add_option("--matrix", bench_matrix, "matrix file (default: generate)")
      ->check(CLI::ExistingFile);
  bench->add_option("--rhs", bench_rhs)->check(CLI::ExistingFile);
  bench->add_option("--elements", bench_elements)->check(CLI::ExistingFile);
  bench->add_option("--element-values", bench_values)->check(CLI::ExistingFile);
  bench->add_option("--disc", disc)->check(CLI::IsMember({"fd7", "hex-fem"}));
  bench->add_option("--m", m);
  bench->add_option("--variants", variants, "comma list of JB, JBO, JSS");
  bench->add_option("--ranks", rank_list)->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "seed of the spectral-radius check");
  bench->add_option("--csv", bench_csv);
  add_solver_opts(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) {
      if (!crafted.empty()) {
        auto sys = gen_crafted(crafted);
        write_system(gen_out, sys.matrix, sys.rhs, nullptr);
        std::printf("%s: %zu rows, %zu nonzeros\n", crafted.c_str(), sys.matrix.rows(), sys.matrix.nnz());
      } else {
        auto sys = gen_laplace({m, parse_discretization(disc)});
        write_system(gen_out, sys.matrix, sys.rhs, sys.elements ? &*sys.elements : nullptr);
        std::printf("%s m=%zu: %zu unknowns, %zu nonzeros\n", disc.c_str(), m, sys.matrix.rows(),
                    sys.matrix.nnz());
      }
      return kOk;
    }

    if (part->parsed()) {
      auto sys = load_system(matrix_path, rhs_path, elements_path, values_path);
      PartitionBundle bundle;
      if (strategy == "substructuring") {
        std::vector<Substructure> subs;
        if (!parts_path.empty()) {
          subs = import_node_partition(sys.matrix, sys.rhs, fs::path(parts_path));
        } else {
          subs = substructure_split(sys.matrix, sys.rhs, ranks, sys.mesh ? &*sys.mesh : nullptr);
        }
        bundle = make_substructure_bundle(std::move(subs), sys.matrix.rows());
      } else {
        bundle = make_band_bundle(sys.matrix, sys.rhs, ranks, strategy == "bandrow-op");
      }
      write_partition_bundle(bundle, part_out);
      std::printf("%s bundle, %zu ranks, n=%zu -> %s\n", to_string(bundle.strategy).c_str(),
                  bundle.n_ranks(), bundle.global_n, part_out.c_str());
      print_lists(bundle);
      return kOk;
    }

    JacobiConfig cfg;
    cfg.epsilon = epsilon;
    cfg.max_iterations = max_iters;
    cfg.convergence = parse_conv_mode(conv_mode);

    if (solve_cmd->parsed()) {
      const auto bundle = read_partition_bundle(bundle_dir);
      const auto result = solve_bundle(bundle, cfg);
      print_report(result.report);
      if (!csv_path.empty()) write_report_csv(fs::path(csv_path), {result.report});
      if (!solution_path.empty()) write_vector(result.solution, solution_path);
      if (result.report.diverged) std::fprintf(stderr, "diverged: residual grew without bound\n");
      else if (!result.report.converged) std::fprintf(stderr, "not converged after %zu iterations\n", result.report.iterations);
      return exit_code_for(result.report, allow_nonconverged);
    }

    if (bench->parsed()) {
      Loaded sys;
      if (!bench_matrix.empty()) {
        sys = load_system(bench_matrix, bench_rhs, bench_elements, bench_values);
      } else {
        auto gen_sys = gen_laplace({m, parse_discretization(disc)});
        sys = {std::move(gen_sys.matrix), std::move(gen_sys.rhs), std::move(gen_sys.elements)};
      }
      const double rho = spectral_radius_estimate(sys.matrix, 500, 3, seed);
      if (!(rho < 1.0)) {
        std::fprintf(stderr, "spectral radius estimate %.4f >= 1: Jacobi would not converge\n", rho);
        return kDiverged;
      }
      BenchPlan plan;
      plan.variants.clear();
      std::stringstream ss(variants);
      for (std::string v; std::getline(ss, v, ',');) plan.variants.push_back(parse_variant(v));
      plan.ranks = rank_list;
      plan.repeats = repeats;
      plan.config = cfg;
      const auto rows = run_bench(sys.matrix, sys.rhs, plan, sys.mesh ? &*sys.mesh : nullptr);
      std::printf("n=%zu nnz=%zu rho~%.6f repeats=%zu\n", sys.matrix.rows(), sys.matrix.nnz(), rho,
                  repeats);
      std::fputs(format_bench_table(rows).c_str(), stdout);
      if (!bench_csv.empty()) write_report_csv(fs::path(bench_csv), rows);
      return kOk;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}

// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "jsplit/solver.hpp"

namespace jsplit {

/// Parallel efficiency in percent: T_seq / (p * T_p) * 100.
inline double efficiency(double t_seq, std::size_t p, double t_p) {
  if (p < 1) throw Error("efficiency needs p >= 1");
  if (!(t_p > 0.0)) throw Error("efficiency needs a positive parallel time");
  return t_seq / (static_cast<double>(p) * t_p) * 100.0;
}

struct BenchPlan {
  std::vector<Variant> variants{Variant::jb, Variant::jbo, Variant::jss};
  std::vector<std::size_t> ranks{1, 2, 4, 8};
  std::size_t repeats = 10;
  JacobiConfig config;
};

/// Runs every (variant, p) of the plan `repeats` times and reports mean times.
/// p = 1 is always run; it is the efficiency baseline of each variant.
inline std::vector<SolveReport> run_bench(const CsrMatrix& a, std::span<const double> b,
                                          const BenchPlan& plan,
                                          const ElementConnectivity* mesh = nullptr,
                                          FabricOptions options = FabricOptions::from_env()) {
  if (plan.variants.empty()) throw Error("bench plan has no variants");
  if (plan.repeats < 1) throw Error("bench repeats must be at least 1");
  std::vector<std::size_t> ranks = plan.ranks;
  for (auto p : ranks) {
    if (p < 1) throw Error("rank counts must be at least 1");
  }
  ranks.push_back(1);
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());

  std::vector<SolveReport> rows;
  for (Variant v : plan.variants) {
    double t_seq = 0.0;
    for (auto p : ranks) {
      SolveReport mean;
      double comm = 0.0;
      double total = 0.0;
      for (std::size_t rep = 0; rep < plan.repeats; ++rep) {
        auto res = solve(a, b, v, p, plan.config, mesh, options);
        if (res.report.diverged || !res.report.converged) {
          throw Error(to_string(v) + " with p=" + std::to_string(p) + " did not converge");
        }
        comm += res.report.comm_time_s;
        total += res.report.total_time_s;
        mean = std::move(res.report);
      }
      mean.n_ranks = p;
      mean.comm_time_s = comm / static_cast<double>(plan.repeats);
      mean.total_time_s = total / static_cast<double>(plan.repeats);
      if (p == 1) t_seq = mean.total_time_s;
      mean.efficiency_pct = p == 1 ? 100.0 : efficiency(t_seq, p, mean.total_time_s);
      rows.push_back(std::move(mean));
    }
  }
  return rows;
}

/// Table with one line per p and (#iter, comm, total, eff) per variant.
inline std::string format_bench_table(const std::vector<SolveReport>& rows) {
  std::vector<Variant> variants;
  std::map<std::size_t, std::map<Variant, const SolveReport*>> by_p;
  for (const auto& r : rows) {
    if (std::find(variants.begin(), variants.end(), r.variant) == variants.end()) {
      variants.push_back(r.variant);
    }
    by_p[r.n_ranks][r.variant] = &r;
  }
  std::ostringstream out;
  out << std::left << std::setw(5) << "#p";
  for (Variant v : variants) {
    out << " | " << std::setw(36) << to_string(v);
  }
  out << '\n' << std::setw(5) << "";
  for (std::size_t k = 0; k < variants.size(); ++k) {
    out << " | " << std::right << std::setw(7) << "#iter" << std::setw(10) << "comm(s)"
        << std::setw(10) << "total(s)" << std::setw(9) << "eff(%)" << std::left;
  }
  out << '\n';
  for (const auto& [p, cells] : by_p) {
    out << std::left << std::setw(5) << p;
    for (Variant v : variants) {
      out << " | " << std::right;
      auto it = cells.find(v);
      if (it == cells.end()) {
        out << std::setw(36) << "-";
      } else {
        const auto& r = *it->second;
        out << std::setw(7) << r.iterations << std::fixed << std::setprecision(4) << std::setw(10)
            << r.comm_time_s << std::setw(10) << r.total_time_s << std::setprecision(2)
            << std::setw(9) << r.efficiency_pct.value_or(0.0);
        out.unsetf(std::ios::fixed);
      }
      out << std::left;
    }
    out << '\n';
  }
  return out.str();
}

inline constexpr const char* kReportCsvHeader =
    "variant,n_ranks,iterations,converged,diverged,comm_time_s,total_time_s,bytes_exchanged,"
    "residual_final,efficiency_pct";

inline std::string report_csv_row(const SolveReport& r) {
  std::string row = to_string(r.variant);
  row += ',' + std::to_string(r.n_ranks) + ',' + std::to_string(r.iterations) + ',' +
         (r.converged ? "1" : "0") + ',' + (r.diverged ? "1" : "0") + ',' +
         detail::format_real(r.comm_time_s) + ',' + detail::format_real(r.total_time_s) + ',' +
         std::to_string(r.bytes_exchanged) + ',' + detail::format_real(r.residual_final) + ',';
  if (r.efficiency_pct) row += detail::format_real(*r.efficiency_pct);
  return row;
}

inline void write_report_csv(std::ostream& out, const std::vector<SolveReport>& rows) {
  out << kReportCsvHeader << '\n';
  for (const auto& r : rows) out << report_csv_row(r) << '\n';
  if (!out) throw IoError("CSV write failed");
}

inline void write_report_csv(const std::filesystem::path& path, const std::vector<SolveReport>& rows) {
  auto out = detail::open_output(path);
  write_report_csv(out, rows);
}

/// Inverse of write_report_csv. Residual histories are not serialised.
inline std::vector<SolveReport> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kReportCsvHeader) {
    throw FormatError("report CSV: missing or unexpected header");
  }
  std::vector<SolveReport> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 10) {
      throw FormatError("report CSV line " + std::to_string(line_no) + ": expected 10 fields");
    }
    try {
      SolveReport r;
      r.variant = parse_variant(f[0]);
      r.n_ranks = std::stoull(f[1]);
      r.iterations = std::stoull(f[2]);
      r.converged = f[3] == "1";
      r.diverged = f[4] == "1";
      r.comm_time_s = detail::parse_real(f[5], "comm_time_s");
      r.total_time_s = detail::parse_real(f[6], "total_time_s");
      r.bytes_exchanged = std::stoull(f[7]);
      r.residual_final = detail::parse_real(f[8], "residual_final");
      if (!f[9].empty()) r.efficiency_pct = detail::parse_real(f[9], "efficiency_pct");
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw FormatError("report CSV line " + std::to_string(line_no) + ": bad number");
    }
  }
  return rows;
}

}  // namespace jsplit

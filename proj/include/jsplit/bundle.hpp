// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jsplit/mm_io.hpp"
#include "jsplit/partition.hpp"

namespace jsplit {

enum class Strategy { bandrow_naive, bandrow_sparsity, substructuring };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::bandrow_naive: return "bandrow-naive";
    case Strategy::bandrow_sparsity: return "bandrow-sparsity";
    case Strategy::substructuring: return "substructuring";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "bandrow-naive" || s == "bandrow") return Strategy::bandrow_naive;
  if (s == "bandrow-sparsity" || s == "bandrow-op") return Strategy::bandrow_sparsity;
  if (s == "substructuring") return Strategy::substructuring;
  throw Error("unknown strategy '" + s + "'");
}

/// Preprocessed per-rank data for one strategy. Band strategies fill `bands`
/// (and `dependencies` for the sparsity variant); substructuring fills
/// `substructures`.
struct PartitionBundle {
  Strategy strategy = Strategy::bandrow_naive;
  std::size_t global_n = 0;
  std::vector<BandRowPartition> bands;
  std::vector<DependencyLists> dependencies;
  std::vector<Substructure> substructures;

  std::size_t n_ranks() const {
    return strategy == Strategy::substructuring ? substructures.size() : bands.size();
  }

  friend bool operator==(const PartitionBundle&, const PartitionBundle&) = default;
};

inline PartitionBundle make_band_bundle(const CsrMatrix& a, std::span<const double> b,
                                        std::size_t p, bool sparsity) {
  PartitionBundle bundle;
  bundle.strategy = sparsity ? Strategy::bandrow_sparsity : Strategy::bandrow_naive;
  bundle.global_n = a.rows();
  bundle.bands = band_row_split(a, b, p);
  if (sparsity) bundle.dependencies = build_all_dependency_lists(bundle.bands);
  return bundle;
}

inline PartitionBundle make_substructure_bundle(std::vector<Substructure> subs,
                                                std::size_t global_n) {
  PartitionBundle bundle;
  bundle.strategy = Strategy::substructuring;
  bundle.global_n = global_n;
  bundle.substructures = std::move(subs);
  return bundle;
}

/// Throws unless owned rows/nodes tile [0, global_n) exactly once.
inline void validate_bundle(const PartitionBundle& bundle) {
  std::vector<int> owners(bundle.global_n, 0);
  if (bundle.strategy == Strategy::substructuring) {
    validate_substructures(bundle.substructures, bundle.global_n);
    for (const auto& sub : bundle.substructures) {
      for (std::size_t l = 0; l < sub.local_size(); ++l) {
        if (sub.owns(l)) ++owners[sub.local_to_global[l]];
      }
    }
  } else {
    if (bundle.strategy == Strategy::bandrow_sparsity &&
        bundle.dependencies.size() != bundle.bands.size()) {
      throw PartitionError("dependency lists missing for some ranks");
    }
    for (const auto& band : bundle.bands) {
      if (band.row_end > bundle.global_n || band.local_matrix.rows() != band.rows() ||
          band.local_matrix.cols() != bundle.global_n || band.local_rhs.size() != band.rows()) {
        throw PartitionError("band " + std::to_string(band.rank) + " has inconsistent sizes");
      }
      for (auto i = band.row_begin; i < band.row_end; ++i) ++owners[i];
    }
  }
  for (std::size_t g = 0; g < owners.size(); ++g) {
    if (owners[g] != 1) {
      throw PartitionError("global index " + std::to_string(g) + " owned " +
                           std::to_string(owners[g]) + " times");
    }
  }
}

inline constexpr int kBundleFormatVersion = 1;

namespace detail {

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::filesystem::path rank_dir(const std::filesystem::path& dir, std::size_t r) {
  return dir / ("rank_" + std::to_string(r));
}

inline std::string rank_checksum(const std::filesystem::path& rdir) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char* f : {"matrix.mtx", "rhs.vec", "meta.json"}) h = fnv1a(slurp(rdir / f), h);
  std::ostringstream ss;
  ss << std::hex << h;
  return ss.str();
}

inline nlohmann::json neighbor_lists_json(const DependencyLists& deps) {
  auto arr = nlohmann::json::array();
  for (const auto& n : deps.neighbors) {
    arr.push_back({{"rank", n.rank}, {"send", n.send}, {"recv", n.recv}});
  }
  return arr;
}

}  // namespace detail

/// Writes a bundle directory:
///   manifest.json              strategy, n_ranks, global_n, format_version, checksums
///   rank_<r>/matrix.mtx        local matrix
///   rank_<r>/rhs.vec           local right-hand side
///   rank_<r>/meta.json         maps, dependency or interface lists
inline void write_partition_bundle(const PartitionBundle& bundle, const std::filesystem::path& dir) {
  validate_bundle(bundle);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::json manifest{{"format_version", kBundleFormatVersion},
                          {"strategy", to_string(bundle.strategy)},
                          {"n_ranks", bundle.n_ranks()},
                          {"global_n", bundle.global_n},
                          {"checksums", nlohmann::json::array()}};

  for (std::size_t r = 0; r < bundle.n_ranks(); ++r) {
    const auto rdir = detail::rank_dir(dir, r);
    std::filesystem::create_directories(rdir, ec);
    if (ec) throw IoError("cannot create " + rdir.string() + ": " + ec.message());
    nlohmann::json meta{{"rank", r}};
    if (bundle.strategy == Strategy::substructuring) {
      const auto& sub = bundle.substructures[r];
      write_matrix_market(sub.local_matrix, rdir / "matrix.mtx");
      write_vector(sub.local_rhs, rdir / "rhs.vec");
      auto ifaces = nlohmann::json::array();
      for (const auto& d : sub.interfaces) {
        ifaces.push_back({{"neighbor", d.neighbor}, {"local_nodes", d.local_nodes}});
      }
      meta["local_to_global"] = sub.local_to_global;
      meta["interior_count"] = sub.interior_count;
      meta["interface_count"] = sub.interface_count;
      meta["interfaces"] = ifaces;
      meta["interface_owner"] = sub.interface_owner;
    } else {
      const auto& band = bundle.bands[r];
      write_matrix_market(band.local_matrix, rdir / "matrix.mtx");
      write_vector(band.local_rhs, rdir / "rhs.vec");
      meta["row_begin"] = band.row_begin;
      meta["row_end"] = band.row_end;
      if (bundle.strategy == Strategy::bandrow_sparsity) {
        meta["ghosts"] = bundle.dependencies[r].ghosts;
        meta["neighbors"] = detail::neighbor_lists_json(bundle.dependencies[r]);
      }
    }
    {
      auto out = detail::open_output(rdir / "meta.json");
      out << meta.dump(1) << '\n';
    }
    manifest["checksums"].push_back(detail::rank_checksum(rdir));
  }
  auto out = detail::open_output(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + (dir / "manifest.json").string());
}

inline PartitionBundle read_partition_bundle(const std::filesystem::path& dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(detail::slurp(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad manifest: " + std::string(e.what()));
  }
  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != kBundleFormatVersion) {
      throw FormatError("bundle format version " + std::to_string(version) + " (expected " +
                        std::to_string(kBundleFormatVersion) + ")");
    }
    PartitionBundle bundle;
    bundle.strategy = parse_strategy(manifest.at("strategy").get<std::string>());
    bundle.global_n = manifest.at("global_n").get<std::size_t>();
    const auto n_ranks = manifest.at("n_ranks").get<std::size_t>();
    const auto& checksums = manifest.at("checksums");
    if (checksums.size() != n_ranks) throw FormatError("rank count mismatch in manifest");
    for (std::size_t r = 0;; ++r) {
      const bool present = std::filesystem::exists(detail::rank_dir(dir, r));
      if (r < n_ranks && !present) {
        throw FormatError("rank count mismatch: rank_" + std::to_string(r) + " missing");
      }
      if (r >= n_ranks) {
        if (present) throw FormatError("rank count mismatch: extra rank_" + std::to_string(r));
        break;
      }
    }

    for (std::size_t r = 0; r < n_ranks; ++r) {
      const auto rdir = detail::rank_dir(dir, r);
      if (detail::rank_checksum(rdir) != checksums[r].get<std::string>()) {
        throw FormatError("checksum failure for rank " + std::to_string(r));
      }
      const auto meta = nlohmann::json::parse(detail::slurp(rdir / "meta.json"));
      auto matrix = read_matrix_market(rdir / "matrix.mtx");
      auto rhs = read_vector(rdir / "rhs.vec");
      if (bundle.strategy == Strategy::substructuring) {
        Substructure sub;
        sub.rank = static_cast<int>(r);
        sub.local_matrix = std::move(matrix);
        sub.local_rhs = std::move(rhs);
        sub.local_to_global = meta.at("local_to_global").get<std::vector<std::size_t>>();
        sub.interior_count = meta.at("interior_count").get<std::size_t>();
        sub.interface_count = meta.at("interface_count").get<std::size_t>();
        for (const auto& d : meta.at("interfaces")) {
          sub.interfaces.push_back({d.at("neighbor").get<int>(),
                                    d.at("local_nodes").get<std::vector<std::size_t>>()});
        }
        sub.interface_owner = meta.at("interface_owner").get<std::vector<int>>();
        bundle.substructures.push_back(std::move(sub));
      } else {
        BandRowPartition band;
        band.rank = static_cast<int>(r);
        band.row_begin = meta.at("row_begin").get<std::size_t>();
        band.row_end = meta.at("row_end").get<std::size_t>();
        band.local_matrix = std::move(matrix);
        band.local_rhs = std::move(rhs);
        bundle.bands.push_back(std::move(band));
        if (bundle.strategy == Strategy::bandrow_sparsity) {
          DependencyLists deps;
          deps.ghosts = meta.at("ghosts").get<std::vector<std::size_t>>();
          for (const auto& n : meta.at("neighbors")) {
            deps.neighbors.push_back({n.at("rank").get<int>(),
                                      n.at("send").get<std::vector<std::size_t>>(),
                                      n.at("recv").get<std::vector<std::size_t>>()});
          }
          bundle.dependencies.push_back(std::move(deps));
        }
      }
    }
    validate_bundle(bundle);
    return bundle;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad bundle metadata: " + std::string(e.what()));
  }
}

}  // namespace jsplit

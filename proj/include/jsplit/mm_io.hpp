// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "jsplit/csr.hpp"

namespace jsplit {

enum class MmField { real, integer };
enum class MmSymmetry { general, symmetric };

struct MatrixMarketHeader {
  MmField field = MmField::real;
  MmSymmetry symmetry = MmSymmetry::general;
};

namespace detail {

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

/// Shortest-safe decimal for a double: 17 significant digits.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_real(std::string_view tok, const std::string& where) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw FormatError(where + ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace detail

inline MatrixMarketHeader parse_matrix_market_banner(const std::string& line) {
  std::istringstream ss(line);
  std::string banner, object, format, field, symmetry;
  ss >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw FormatError("missing %%MatrixMarket banner");
  object = detail::lowercase(object);
  format = detail::lowercase(format);
  field = detail::lowercase(field);
  symmetry = detail::lowercase(symmetry);
  if (object != "matrix") throw FormatError("unsupported object '" + object + "'");
  if (format != "coordinate") throw FormatError("unsupported format '" + format + "'");

  MatrixMarketHeader h;
  if (field == "real") {
    h.field = MmField::real;
  } else if (field == "integer") {
    h.field = MmField::integer;
  } else {
    throw FormatError("unsupported field '" + field + "'");
  }
  if (symmetry == "general") {
    h.symmetry = MmSymmetry::general;
  } else if (symmetry == "symmetric") {
    h.symmetry = MmSymmetry::symmetric;
  } else {
    throw FormatError("unsupported symmetry '" + symmetry + "'");
  }
  return h;
}

inline CsrMatrix read_matrix_market(std::istream& in, const std::string& name = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(name + ": empty file");
  const auto header = parse_matrix_market_banner(line);

  while (std::getline(in, line) && detail::blank_or_comment(line)) {
  }
  std::size_t rows = 0, cols = 0, entries = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> entries)) throw FormatError(name + ": bad size line");
  }

  std::vector<Triplet> triplets;
  triplets.reserve(header.symmetry == MmSymmetry::symmetric ? 2 * entries : entries);
  std::size_t seen = 0;
  while (seen < entries && std::getline(in, line)) {
    if (detail::blank_or_comment(line)) continue;
    std::istringstream ss(line);
    long long i = 0, j = 0;
    std::string tok;
    if (!(ss >> i >> j >> tok)) throw FormatError(name + ": bad entry line '" + line + "'");
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows ||
        static_cast<std::size_t>(j) > cols) {
      throw FormatError(name + ": entry (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") outside declared bounds");
    }
    const double v = detail::parse_real(tok, name);
    const auto r = static_cast<std::size_t>(i - 1);
    const auto c = static_cast<std::size_t>(j - 1);
    triplets.push_back({r, c, v});
    if (header.symmetry == MmSymmetry::symmetric && r != c) triplets.push_back({c, r, v});
    ++seen;
  }
  if (seen != entries) {
    throw FormatError(name + ": expected " + std::to_string(entries) + " entries, found " +
                      std::to_string(seen));
  }
  return CsrMatrix::from_triplets(rows, cols, std::move(triplets));
}

inline CsrMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_matrix_market(in, path.string());
}

inline void write_matrix_market(const CsrMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t k = 0; k < r.cols.size(); ++k) {
      out << i + 1 << ' ' << r.cols[k] + 1 << ' ' << detail::format_real(r.values[k]) << '\n';
    }
  }
}

inline void write_matrix_market(const CsrMatrix& a, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_matrix_market(a, out);
  if (!out) throw IoError("write failed: " + path.string());
}

/// Vector file: a length line followed by one decimal value per line.
inline Vector read_vector(std::istream& in, const std::string& name = "<stream>") {
  std::string line;
  while (std::getline(in, line) && detail::blank_or_comment(line)) {
  }
  std::size_t n = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> n)) throw FormatError(name + ": bad vector length line");
  }
  Vector v;
  v.reserve(n);
  while (v.size() < n && std::getline(in, line)) {
    if (detail::blank_or_comment(line)) continue;
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    v.push_back(detail::parse_real(tok, name));
  }
  if (v.size() != n) throw FormatError(name + ": vector shorter than its length line");
  return v;
}

inline Vector read_vector(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_vector(in, path.string());
}

inline void write_vector(std::span<const double> v, std::ostream& out) {
  out << v.size() << '\n';
  for (double x : v) out << detail::format_real(x) << '\n';
}

inline void write_vector(std::span<const double> v, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_vector(v, out);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace jsplit

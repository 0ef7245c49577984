#pragma once

// Grid fields on disk: one JSON header line, then one CSV row per grid point
// in flat index order. Scalar rows hold one value; J rows hold J[k][p]
// row-major (dim * dim values).
//
//   {"kind": "scalar", "dim": 2, "h": 0.125, "lo": [-4, -4], "hi": [4, 4]}
//   0.25
//   ...

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "twistcart/elliptic_grid.hpp"

namespace twistcart {

namespace detail {

inline nlohmann::ordered_json grid_header(const ChartGrid& g, const char* kind) {
  return {{"kind", kind}, {"dim", g.dim}, {"h", g.h}, {"lo", g.lo}, {"hi", g.hi}};
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct RawField {
  std::string kind;
  ChartGrid grid;
  std::vector<std::vector<double>> rows;
};

inline RawField read_raw_field(std::istream& in, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Parse, what + ": empty file");
  RawField r;
  try {
    auto h = nlohmann::json::parse(line);
    r.kind = h.at("kind").get<std::string>();
    r.grid.dim = h.at("dim").get<int>();
    r.grid.h = h.at("h").get<double>();
    r.grid.lo = h.at("lo").get<std::vector<int>>();
    r.grid.hi = h.at("hi").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, what + ": bad header: " + e.what());
  }
  r.grid.validate();
  std::size_t width = r.kind == "J" ? static_cast<std::size_t>(r.grid.dim * r.grid.dim) : 1;
  if (r.kind != "J" && r.kind != "scalar") throw Error(ErrorKind::Parse, what + ": unknown field kind " + r.kind);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double x = 0;
      try {
        x = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, what + ": not a number: '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw Error(ErrorKind::Parse, what + ": trailing text in '" + cell + "'");
      row.push_back(x);
    }
    if (row.size() != width) throw Error(ErrorKind::Parse, what + ": row " + std::to_string(r.rows.size() + 1) + " has the wrong width");
    r.rows.push_back(std::move(row));
  }
  if (r.rows.size() != r.grid.size())
    throw Error(ErrorKind::Parse, what + ": expected " + std::to_string(r.grid.size()) + " rows, got " + std::to_string(r.rows.size()));
  return r;
}

inline RawField open_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  return read_raw_field(in, path);
}

}  // namespace detail

inline void write_field(std::ostream& out, const ScalarField& f) {
  out << detail::grid_header(f.grid, "scalar").dump() << "\n";
  for (double x : f.v) out << detail::fmt(x) << "\n";
}

inline void write_field(std::ostream& out, const AlmostComplexField& f) {
  out << detail::grid_header(f.grid, "J").dump() << "\n";
  for (const auto& m : f.j) {
    bool first = true;
    for (const auto& row : m)
      for (double x : row) {
        out << (first ? "" : ",") << detail::fmt(x);
        first = false;
      }
    out << "\n";
  }
}

inline ScalarField load_scalar_field(const std::string& path) {
  detail::RawField r = detail::open_field(path);
  if (r.kind != "scalar") throw Error(ErrorKind::Parse, path + ": expected a scalar field");
  ScalarField f{r.grid, std::vector<double>(r.rows.size())};
  for (std::size_t i = 0; i < r.rows.size(); ++i) f.v[i] = r.rows[i][0];
  return f;
}

// Goes through sample_j, so J^2 = -1 is checked at every point.
inline AlmostComplexField load_j_field(const std::string& path) {
  detail::RawField r = detail::open_field(path);
  if (r.kind != "J") throw Error(ErrorKind::Parse, path + ": expected a J field");
  std::size_t m = static_cast<std::size_t>(r.grid.dim);
  std::size_t i = 0;
  return sample_j(r.grid, [&](const std::vector<double>&) {
    DMat j = dzeros(m);
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t p = 0; p < m; ++p) j[k][p] = r.rows[i][k * m + p];
    ++i;
    return j;
  });
}

}  // namespace twistcart

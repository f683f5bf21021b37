#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "tslb/bench.hpp"
#include "tslb/fields.hpp"

namespace tslb {

namespace detail {

inline void put_e9(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  os << buf;
}

}  // namespace detail

/// Legacy VTK structured-points file, ASCII, node order x-fastest (VTK's
/// native order, which matches the field storage). Values are printed as
/// %.9e so files are byte-stable across platforms. Vector fields with fewer
/// than three components are zero-padded.
template <typename T>
void write_vtk(
    std::ostream& os, const GridDims& g,
    const std::vector<std::pair<std::string, const FieldArray<T>*>>& scalars,
    const std::vector<std::pair<std::string, const std::vector<FieldArray<T>>*>>&
        vectors = {},
    const std::string& title = "lattice fields") {
  os << "# vtk DataFile Version 3.0\n"
     << title << "\n"
     << "ASCII\n"
     << "DATASET STRUCTURED_POINTS\n"
     << "DIMENSIONS " << g.nx << " " << g.ny << " " << g.nz << "\n"
     << "ORIGIN 0 0 0\n"
     << "SPACING 1 1 1\n"
     << "POINT_DATA " << g.n() << "\n";
  const char* tname = sizeof(T) == 4 ? "float" : "double";
  for (const auto& [name, field] : scalars) {
    os << "SCALARS " << name << " " << tname << " 1\n"
       << "LOOKUP_TABLE default\n";
    for (std::size_t idx = 0; idx < g.n(); ++idx) {
      detail::put_e9(os, double((*field)[Eigen::Index(idx)]));
      os << "\n";
    }
  }
  for (const auto& [name, comps] : vectors) {
    os << "VECTORS " << name << " " << tname << "\n";
    for (std::size_t idx = 0; idx < g.n(); ++idx) {
      for (int d = 0; d < 3; ++d) {
        if (d) os << " ";
        const double v = d < int(comps->size())
                             ? double((*comps)[std::size_t(d)][Eigen::Index(idx)])
                             : 0.0;
        detail::put_e9(os, v);
      }
      os << "\n";
    }
  }
}

template <typename T>
void write_vtk_file(
    const std::string& path, const GridDims& g,
    const std::vector<std::pair<std::string, const FieldArray<T>*>>& scalars,
    const std::vector<std::pair<std::string, const std::vector<FieldArray<T>>*>>&
        vectors = {},
    const std::string& title = "lattice fields") {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_vtk(os, g, scalars, vectors, title);
}

/// Comma-separated table, header row then %.9e data rows.
inline void write_csv(std::ostream& os, const std::vector<std::string>& cols,
                      const std::vector<std::vector<double>>& rows) {
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) os << ",";
    os << cols[c];
  }
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ",";
      detail::put_e9(os, row[c]);
    }
    os << "\n";
  }
}

inline void write_csv_file(const std::string& path,
                           const std::vector<std::string>& cols,
                           const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_csv(os, cols, rows);
}

/// Two-column whitespace-separated reference table; '#' starts a comment.
inline std::vector<std::array<double, 2>> load_table(std::istream& in) {
  std::vector<std::array<double, 2>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double a, b;
    if (ls >> a >> b) {
      rows.push_back({a, b});
    } else if (!line.empty() &&
               line.find_first_not_of(" \t\r") != std::string::npos) {
      throw std::runtime_error("table line " + std::to_string(lineno) +
                               ": expected two numbers");
    }
  }
  return rows;
}

inline std::vector<std::array<double, 2>> load_table_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_table(in);
}

/// Machine-readable benchmark record.
inline nlohmann::json bench_summary(const BenchResult& r,
                                    const MachineModel& m) {
  nlohmann::json j;
  j["lattice"] = r.lattice;
  j["dims"] = {r.dims.nx, r.dims.ny, r.dims.nz};
  j["steps"] = r.steps;
  j["workers"] = r.workers;
  j["seconds"] = r.seconds;
  j["glups"] = r.glups;
  j["mlups"] = r.mlups;
  j["flops_per_update"] = r.cost.flops;
  j["bytes_per_update"] = r.cost.bytes;
  j["intensity"] = r.cost.intensity;
  if (m.peak_flops > 0 && m.peak_bandwidth > 0) {
    j["roofline_bound"] = roofline_bound(m, r.cost.intensity);
    j["machine"] = {{"peak_flops", m.peak_flops},
                    {"peak_bandwidth", m.peak_bandwidth}};
  } else {
    j["roofline_bound"] = nullptr;
  }
  j["state_digest"] = r.digest;
  return j;
}

}  // namespace tslb

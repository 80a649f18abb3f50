#pragma once

/// Node-field export: legacy VTK structured points and a flat CSV.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "phifd/errors.hpp"
#include "phifd/geometry.hpp"

namespace phifd {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_for_writing(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

} // namespace detail

/// Writes `u` as ASCII legacy VTK STRUCTURED_POINTS. 2D grids get a unit
/// third dimension.
inline void write_vtk(std::span<const double> u, const CartesianGrid& g, const std::string& path,
                      const std::string& name = "u") {
  if (u.size() != g.node_count()) throw ConfigError("write_vtk: field size mismatch");
  std::ostringstream s;
  const int m = g.nodes_per_axis();
  const int mz = g.dim() == 3 ? m : 1;
  const auto& o = g.origin();
  s << "# vtk DataFile Version 3.0\n"
    << name << " on a " << g.dim() << "D Cartesian grid\n"
    << "ASCII\nDATASET STRUCTURED_POINTS\n"
    << "DIMENSIONS " << m << ' ' << m << ' ' << mz << '\n'
    << "ORIGIN " << detail::format_real(o[0]) << ' ' << detail::format_real(o[1]) << ' '
    << detail::format_real(g.dim() == 3 ? o[2] : 0.0) << '\n'
    << "SPACING " << detail::format_real(g.spacing()) << ' ' << detail::format_real(g.spacing())
    << ' ' << detail::format_real(g.dim() == 3 ? g.spacing() : 1.0) << '\n'
    << "POINT_DATA " << u.size() << '\n'
    << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (double v : u) s << detail::format_real(v) << '\n';
  auto out = detail::open_for_writing(path);
  out << s.str();
  if (!out) throw IoError("write failed: " + path);
}

/// Writes one row per node: i, j[, k], x, y[, z], value.
inline void write_field_csv(std::span<const double> u, const CartesianGrid& g,
                            const std::string& path, const std::string& name = "u") {
  if (u.size() != g.node_count()) throw ConfigError("write_field_csv: field size mismatch");
  std::ostringstream s;
  s << (g.dim() == 3 ? "i,j,k,x,y,z," : "i,j,x,y,") << name << '\n';
  for (std::size_t k = 0; k < u.size(); ++k) {
    const MultiIndex a = g.multi_index(k);
    for (int d = 0; d < g.dim(); ++d) s << a[d] << ',';
    for (int d = 0; d < g.dim(); ++d) s << detail::format_real(g.coordinate(d, a[d])) << ',';
    s << detail::format_real(u[k]) << '\n';
  }
  auto out = detail::open_for_writing(path);
  out << s.str();
  if (!out) throw IoError("write failed: " + path);
}

/// Reads the value column of a CSV written by write_field_csv.
inline std::vector<double> read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  return values;
}

/// Writes `<stem>.vtk` and `<stem>.csv`.
inline void export_field(std::span<const double> u, const CartesianGrid& g,
                         const std::string& stem) {
  write_vtk(u, g, stem + ".vtk");
  write_field_csv(u, g, stem + ".csv");
}

} // namespace phifd

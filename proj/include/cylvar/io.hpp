#pragma once

// Plain-text artifacts: sweep and one-dimensional CSV tables, solver traces
// and nodal field dumps. Numbers are printed with 17 significant digits so
// that reruns compare byte for byte.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cylvar/asymptotics.hpp"
#include "cylvar/onedim.hpp"

namespace cylvar {

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kSweepColumns =
    "ell,h,dist_half,energy_cyl,energy_per_length,cross_energy,sandwich_gap,slice_energy_max,"
    "collar_grad_max,iterations,wall_seconds";

inline std::string sweep_csv_row(const SweepRecord& r) {
  std::string s = fmt_num(r.ell);
  for (double v : {r.h, r.dist_half, r.energy_cyl, r.energy_per_length, r.cross_energy, r.sandwich_gap,
                   r.slice_energy_max, r.collar_grad_max})
    s += "," + fmt_num(v);
  s += "," + std::to_string(r.iterations) + "," + fmt_num(r.wall_seconds);
  return s;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& recs) {
  os << kSweepColumns << '\n';
  for (const auto& r : recs) os << sweep_csv_row(r) << '\n';
}

/// Noise floors and failures, which have no place in the fixed sweep columns.
inline void write_sweep_notes(std::ostream& os, const std::vector<SweepRecord>& recs) {
  os << "ell,noise_floor,ok,failure\n";
  for (const auto& r : recs)
    os << fmt_num(r.ell) << ',' << fmt_num(r.noise_floor) << ',' << (r.ok ? 1 : 0) << ",\""
       << r.failure << "\"\n";
}

inline constexpr const char* kOneDimColumns = "ell,u_at_0,m_mid,max_v,violations";

inline void write_onedim_csv(std::ostream& os, const std::vector<OneDimRecord>& recs) {
  os << kOneDimColumns << '\n';
  for (const auto& r : recs)
    os << fmt_num(r.ell) << ',' << fmt_num(r.u_at_0) << ',' << fmt_num(r.m_mid) << ',' << fmt_num(r.max_v)
       << ',' << r.violations << '\n';
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iteration,energy,step,grad_norm\n";
  for (const auto& t : trace)
    os << t.iteration << ',' << fmt_num(t.energy) << ',' << fmt_num(t.step) << ',' << fmt_num(t.grad_norm)
       << '\n';
}

inline const char* class_name(BoundaryClass c) {
  switch (c) {
    case BoundaryClass::interior: return "interior";
    case BoundaryClass::lateral: return "lateral";
    case BoundaryClass::end: return "end";
  }
  return "unknown";
}

/// One line per node: index, coordinates, boundary class, value.
inline void write_field(std::ostream& os, const Field& u) {
  const Mesh& m = *u.mesh;
  const bool cyl = m.has_x1_axis();
  os << "index";
  for (int a = 0; a < m.dim(); ++a) os << " x" << (cyl ? a + 1 : a + 2);
  os << " class value\n";
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    os << i;
    for (int a = 0; a < m.dim(); ++a) os << ' ' << fmt_num(m.coord(i, a));
    os << ' ' << class_name(m.node_class(i)) << ' ' << fmt_num(u.values[i]) << '\n';
  }
}

/// Writes text to a file, creating parent directories.
inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

template <class Writer>
inline void write_with(const std::filesystem::path& path, Writer&& w) {
  std::ostringstream os;
  w(os);
  write_file(path, os.str());
}

}  // namespace cylvar

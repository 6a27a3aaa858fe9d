#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cylvar/error.hpp"
#include "cylvar/mesh.hpp"

namespace cylvar {

/// Which boundary conditions a field carries.
///  dirichlet_all    u = 0 on the whole boundary            (W_0^{1,q})
///  tied_ends        u = 0 laterally, u(-ell, X2) = u(ell, X2)
///  lateral_only     u = 0 laterally, end faces free
///  endpoint_values  end nodes hold prescribed values      (1-D coercive)
enum class Constraint { dirichlet_all, tied_ends, lateral_only, endpoint_values };

inline std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::dirichlet_all: return "dirichlet-all";
    case Constraint::tied_ends: return "tied-ends";
    case Constraint::lateral_only: return "lateral-only";
    case Constraint::endpoint_values: return "endpoint-values";
  }
  return "unknown";
}

struct Field {
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> values;
  Constraint constraint = Constraint::dirichlet_all;

  static Field zeros(std::shared_ptr<const Mesh> m, Constraint c = Constraint::dirichlet_all) {
    Field f;
    f.values.assign(m->node_count(), 0.0);
    f.mesh = std::move(m);
    f.constraint = c;
    return f;
  }

  /// Nodal interpolant of g(x) with x = (x1, x2[, x3]) or the cross-section
  /// coordinates for a cross-section mesh.
  template <class Fn>
  static Field interpolate(std::shared_ptr<const Mesh> m, Fn&& g,
                           Constraint c = Constraint::dirichlet_all) {
    Field f = zeros(m, c);
    std::array<double, 3> x{};
    for (std::size_t i = 0; i < m->node_count(); ++i) {
      for (int a = 0; a < m->dim(); ++a) x[static_cast<std::size_t>(a)] = m->coord(i, a);
      f.values[i] = g(std::span<const double>(x.data(), static_cast<std::size_t>(m->dim())));
    }
    return f;
  }

  Field operator-(const Field& other) const {
    detail::require(mesh == other.mesh || (mesh && other.mesh && mesh->axes() == other.mesh->axes()),
                    "fields live on different meshes");
    Field r = *this;
    for (std::size_t i = 0; i < values.size(); ++i) r.values[i] -= other.values[i];
    return r;
  }

  Field scaled(double c) const {
    Field r = *this;
    for (double& v : r.values) v *= c;
    return r;
  }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }

  bool all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  }
};

/// Free degrees of freedom of a constrained nodal space. Constrained nodes
/// map to -1 and keep their nodal value; tied end nodes share one dof.
struct DofMap {
  std::vector<int> node_to_dof;
  int ndof = 0;

  static DofMap build(const Mesh& m, Constraint c) {
    DofMap map;
    map.node_to_dof.assign(m.node_count(), -1);
    const bool cyl = m.has_x1_axis();
    const int last_plane = cyl ? m.x1_axis().cells : 0;
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      const auto cls = m.node_class(i);
      bool free = false;
      switch (cls) {
        case BoundaryClass::interior: free = true; break;
        case BoundaryClass::lateral: free = false; break;
        case BoundaryClass::end: {
          // a node on both an end face and the lateral boundary stays 0
          bool lateral_too = false;
          const auto idx = m.multi_index(i);
          for (int a = 1; a < m.dim(); ++a) {
            const int k = idx[static_cast<std::size_t>(a)];
            if (k == 0 || k == m.axes()[static_cast<std::size_t>(a)].cells) lateral_too = true;
          }
          if (c == Constraint::tied_ends) {
            if (lateral_too) break;
            if (m.x1_index(i) == last_plane) continue;  // merged below
            free = true;
          } else if (c == Constraint::lateral_only) {
            free = !lateral_too;
          }
          break;
        }
      }
      if (free) map.node_to_dof[i] = map.ndof++;
    }
    if (c == Constraint::tied_ends && cyl) {
      const std::size_t cc = m.cross_count();
      const std::size_t offset = static_cast<std::size_t>(last_plane) * cc;
      for (std::size_t j = 0; j < cc; ++j)
        if (m.node_class(offset + j) == BoundaryClass::end)
          map.node_to_dof[offset + j] = map.node_to_dof[j];
    }
    return map;
  }

  std::vector<double> gather(const std::vector<double>& nodal) const {
    std::vector<double> x(static_cast<std::size_t>(ndof), 0.0);
    for (std::size_t i = 0; i < node_to_dof.size(); ++i)
      if (node_to_dof[i] >= 0) x[static_cast<std::size_t>(node_to_dof[i])] = nodal[i];
    return x;
  }

  /// Writes dof values into the free nodes of `nodal`.
  void scatter(std::span<const double> x, std::vector<double>& nodal) const {
    for (std::size_t i = 0; i < node_to_dof.size(); ++i)
      if (node_to_dof[i] >= 0) nodal[i] = x[static_cast<std::size_t>(node_to_dof[i])];
  }

  /// Sums nodal contributions into dofs.
  void accumulate(std::span<const double> nodal, std::span<double> x) const {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < node_to_dof.size(); ++i)
      if (node_to_dof[i] >= 0) x[static_cast<std::size_t>(node_to_dof[i])] += nodal[i];
  }
};

/// Largest violation of a field's constraint (0 when satisfied exactly).
inline double constraint_violation(const Field& u) {
  const Mesh& m = *u.mesh;
  const DofMap map = DofMap::build(m, u.constraint);
  double worst = 0.0;
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    if (map.node_to_dof[i] >= 0) continue;
    if (u.constraint == Constraint::endpoint_values && m.node_class(i) == BoundaryClass::end)
      continue;
    worst = std::max(worst, std::abs(u.values[i]));
  }
  if (u.constraint == Constraint::tied_ends && m.has_x1_axis()) {
    const std::size_t off = static_cast<std::size_t>(m.x1_axis().cells) * m.cross_count();
    for (std::size_t j = 0; j < m.cross_count(); ++j)
      worst = std::max(worst, std::abs(u.values[off + j] - u.values[j]));
  }
  return worst;
}

/// A region of a cylinder mesh described by x1-intervals, e.g. a slab
/// (s, t) x omega2 or a collar. Elements are selected by their x1 midpoint.
struct Region {
  std::vector<Interval> pieces;

  static Region whole() {
    return {{Interval{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}}};
  }
  static Region slab(double s, double t) { return {{Interval{s, t}}}; }

  bool contains(double x1) const {
    return std::any_of(pieces.begin(), pieces.end(),
                       [x1](const Interval& p) { return x1 > p.lo && x1 < p.hi; });
  }
};

/// Slab (s, t) x omega2 snapped to grid planes, and its collar
/// D_{s,t} = ((s-1, t+1) \ (s, t)) x omega2, clipped to the cylinder.
struct SliceSpec {
  double s = 0.0;
  double t = 0.0;
  double snap_distance = 0.0;

  Region slab() const { return Region::slab(s, t); }
  Region collar(double ell) const {
    Region r;
    const double lo = std::max(-ell, s - 1.0);
    const double hi = std::min(ell, t + 1.0);
    if (lo < s) r.pieces.push_back({lo, s});
    if (t < hi) r.pieces.push_back({t, hi});
    return r;
  }
};

inline double snap_to_plane(const Mesh& m, double x, double* moved = nullptr) {
  const auto& ax = m.x1_axis();
  const int i = std::clamp(static_cast<int>(std::lround((x - ax.lo) / ax.h)), 0, ax.cells);
  const double snapped = ax.coord(i);
  if (moved) *moved = std::abs(snapped - x);
  return snapped;
}

inline SliceSpec make_slice(const Mesh& m, double s, double t) {
  const double ell = m.x1_axis().hi();
  detail::require(-ell - 1e-12 <= s && s < t && t <= ell + 1e-12, "slice requires -ell <= s < t <= ell");
  SliceSpec sl;
  double ds = 0.0, dt = 0.0;
  sl.s = snap_to_plane(m, s, &ds);
  sl.t = snap_to_plane(m, t, &dt);
  sl.snap_distance = std::max(ds, dt);
  return sl;
}

/// D_{ell0}: the unit collar (Omega_{ell0+1} \ Omega_{ell0}) clipped to Omega_ell.
inline Region collar_region(double ell0, double ell) {
  return SliceSpec{-ell0, ell0, 0.0}.collar(ell);
}

inline Region half_cylinder(double ell) { return Region::slab(-ell / 2.0, ell / 2.0); }

namespace detail {

/// Constant gradient of a P1 field on a Kuhn element.
inline void element_gradient(const Mesh& m, const Element& e, std::span<const double> u,
                             std::span<double> g) {
  const int d = m.dim();
  for (int k = 0; k < d; ++k) {
    const auto a = e.axis[static_cast<std::size_t>(k)];
    g[a] = (u[static_cast<std::size_t>(e.v[static_cast<std::size_t>(k + 1)])] -
            u[static_cast<std::size_t>(e.v[static_cast<std::size_t>(k)])]) /
           m.axes()[a].h;
  }
}

inline bool element_in(const Mesh& m, const Element& e, const Region* region) {
  if (!region) return true;
  const auto [lo, hi] = m.element_x1_range(e);
  return region->contains(0.5 * (lo + hi));
}

inline double pow_q(double r2, double q) {
  if (q == 2.0) return r2;
  if (q == 4.0) return r2 * r2;
  return std::pow(r2, q / 2.0);
}

}  // namespace detail

/// Sum over elements in the region of |T| |grad u|^q.
inline double grad_q_norm(const Field& u, double q, const Region* region = nullptr) {
  const Mesh& m = *u.mesh;
  std::array<double, 3> g{};
  double total = 0.0;
  for (const auto& e : m.elements()) {
    if (!detail::element_in(m, e, region)) continue;
    detail::element_gradient(m, e, u.values, g);
    double r2 = 0.0;
    for (int a = 0; a < m.dim(); ++a) r2 += g[static_cast<std::size_t>(a)] * g[static_cast<std::size_t>(a)];
    total += detail::pow_q(r2, q);
  }
  return total * m.element_volume();
}

inline double grad_q_norm(const Field& u, double q, const Region& region) {
  return grad_q_norm(u, q, &region);
}

/// Integral of |d u / d x_axis|^q, one gradient component only.
inline double grad_component_q_norm(const Field& u, int axis, double q) {
  const Mesh& m = *u.mesh;
  std::array<double, 3> g{};
  double total = 0.0;
  for (const auto& e : m.elements()) {
    detail::element_gradient(m, e, u.values, g);
    total += std::pow(std::abs(g[static_cast<std::size_t>(axis)]), q);
  }
  return total * m.element_volume();
}

/// Copies a cross-section field onto every x1 plane of a cylinder mesh.
inline Field extend_in_x1(const Field& u_cross, std::shared_ptr<const Mesh> cyl) {
  detail::require(cyl->has_x1_axis(), "extension target must be a cylinder mesh");
  detail::require(!u_cross.mesh->has_x1_axis() && u_cross.mesh->axes() == cyl->cross_axes(),
                  "cross-section grid is incompatible with the cylinder's X2 grid");
  Field f = Field::zeros(cyl, Constraint::tied_ends);
  const std::size_t cc = cyl->cross_count();
  for (std::size_t i = 0; i < cyl->node_count(); ++i) f.values[i] = u_cross.values[i % cc];
  return f;
}

/// Values on the x1 plane with index `plane`, as a cross-section field.
inline Field restrict_to_plane(const Field& u, int plane, std::shared_ptr<const Mesh> cross) {
  const Mesh& m = *u.mesh;
  detail::require(plane >= 0 && plane <= m.x1_axis().cells, "plane index out of range");
  detail::require(cross->axes() == m.cross_axes(), "cross-section grid is incompatible");
  Field f = Field::zeros(cross);
  const std::size_t cc = m.cross_count();
  for (std::size_t j = 0; j < cc; ++j) f.values[j] = u.values[static_cast<std::size_t>(plane) * cc + j];
  return f;
}

// ---------------------------------------------------------------- sources

/// Right-hand side f(X2); it never depends on x1.
struct SourceTerm {
  enum class Form { constant, polynomial, nodal };
  struct Monomial {
    double coef = 0.0;
    std::array<int, 2> power{0, 0};  ///< exponents of the X2 coordinates
  };

  Form form = Form::constant;
  double value = 0.0;
  std::vector<Monomial> terms;
  std::vector<double> samples;  ///< nodal samples on the cross-section grid

  static SourceTerm constant(double c) {
    SourceTerm s;
    s.value = c;
    return s;
  }
  /// sum_k coefs[k] x2^k
  static SourceTerm polynomial(const std::vector<double>& coefs) {
    SourceTerm s;
    s.form = Form::polynomial;
    for (std::size_t k = 0; k < coefs.size(); ++k)
      s.terms.push_back({coefs[k], {static_cast<int>(k), 0}});
    return s;
  }
  static SourceTerm nodal(std::vector<double> samples) {
    SourceTerm s;
    s.form = Form::nodal;
    s.samples = std::move(samples);
    return s;
  }

  double at(std::span<const double> x2) const {
    double r = 0.0;
    switch (form) {
      case Form::constant: return value;
      case Form::polynomial:
        for (const auto& t : terms) {
          double v = t.coef;
          for (std::size_t a = 0; a < x2.size() && a < 2; ++a) v *= std::pow(x2[a], t.power[a]);
          r += v;
        }
        return r;
      case Form::nodal: break;
    }
    throw InputError("nodal source has no pointwise formula");
  }

  /// f at every node of a mesh (cylinder, cross-section or 1-D interval).
  std::vector<double> nodal_values(const Mesh& m) const {
    std::vector<double> out(m.node_count(), 0.0);
    if (form == Form::nodal) {
      detail::require(samples.size() == m.cross_count(),
                      "nodal source samples do not match the cross-section grid");
      for (std::size_t i = 0; i < m.node_count(); ++i) out[i] = samples[m.cross_index(i)];
      return out;
    }
    const int first = m.has_x1_axis() ? 1 : 0;
    std::array<double, 2> x2{};
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      for (int a = first; a < m.dim(); ++a) x2[static_cast<std::size_t>(a - first)] = m.coord(i, a);
      out[i] = at(std::span<const double>(x2.data(), static_cast<std::size_t>(m.dim() - first)));
    }
    return out;
  }

  /// |f|_{q', omega2}, by Gauss quadrature on the cross-section mesh (the
  /// nodal form is integrated as its piecewise-linear interpolant).
  double q_dual_norm(const Mesh& cross, double q_dual) const;
};

inline double SourceTerm::q_dual_norm(const Mesh& cross, double q_dual) const {
  if (form == Form::constant) return std::abs(value) * std::pow(cross.measure(), 1.0 / q_dual);
  static constexpr std::array<double, 5> gx{0.04691007703066800, 0.23076534494715845, 0.5,
                                            0.76923465505284155, 0.95308992296933200};
  static constexpr std::array<double, 5> gw{0.11846344252809454, 0.23931433524968324,
                                            0.28444444444444444, 0.23931433524968324,
                                            0.11846344252809454};
  const std::vector<double> fv = nodal_values(cross);
  const int d = cross.dim();
  double total = 0.0;
  std::array<double, 2> x{};
  for (const auto& e : cross.elements()) {
    // Duffy map of the Kuhn path v0 -> v1 (-> v2): point = v0 + u (v1 - v0) + u w (v2 - v1)
    const auto p0 = cross.multi_index(static_cast<std::size_t>(e.v[0]));
    const auto f0 = fv[static_cast<std::size_t>(e.v[0])];
    const auto f1 = fv[static_cast<std::size_t>(e.v[1])];
    const double f2 = d == 2 ? fv[static_cast<std::size_t>(e.v[2])] : 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double u = gx[i];
      const std::size_t nj = d == 2 ? gx.size() : 1;
      for (std::size_t j = 0; j < nj; ++j) {
        const double w = d == 2 ? gx[j] : 0.0;
        for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] = cross.axes()[static_cast<std::size_t>(a)].coord(p0[static_cast<std::size_t>(a)]);
        x[e.axis[0]] += u * cross.axes()[e.axis[0]].h;
        if (d == 2) x[e.axis[1]] += u * w * cross.axes()[e.axis[1]].h;
        double val;
        if (form == Form::nodal) val = f0 + u * (f1 - f0) + u * w * (f2 - f1);
        else val = at(std::span<const double>(x.data(), static_cast<std::size_t>(d)));
        const double weight = d == 2 ? gw[i] * gw[j] * u * 2.0 : gw[i];
        total += weight * std::pow(std::abs(val), q_dual);
      }
    }
  }
  return std::pow(total * cross.element_volume(), 1.0 / q_dual);
}

/// Vertex-rule quadrature of the integral of f u: sum_T |T|/(d+1) sum_v f_v u_v.
inline double integrate_fu(const Field& u, const SourceTerm& f) {
  const Mesh& m = *u.mesh;
  const auto fv = f.nodal_values(m);
  double s = 0.0;
  for (std::size_t i = 0; i < m.node_count(); ++i) s += m.lumped_weight(i) * fv[i] * u.values[i];
  return s;
}

}  // namespace cylvar

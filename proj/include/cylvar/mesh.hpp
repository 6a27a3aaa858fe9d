#pragma once

// Structured simplicial meshes of boxes.
//
// A box is a tensor grid of cells; every cell is split into d! simplices by
// Kuhn subdivision, one simplex per ordering of the axes. A Kuhn simplex walks
// from its first vertex along one axis at a time, so the gradient of a
// piecewise-linear field on it is read off edge differences:
//
//   grad u [axis[k]] = (u[v[k+1]] - u[v[k]]) / h[axis[k]].
//
// Cylinder meshes put x1 on axis 0 and the cross-section on the remaining
// axes; nodes are numbered with x1 slowest, so node = i1 * cross_count + j
// and j is the index of the node's X2 point in the cross-section mesh.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "cylvar/error.hpp"

namespace cylvar {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// omega2: an interval (n = 2) or an axis-aligned rectangle (n = 3).
struct CrossSection {
  std::vector<Interval> sides;

  int dim() const { return static_cast<int>(sides.size()); }
  double measure() const {
    double m = 1.0;
    for (const auto& s : sides) m *= s.length();
    return m;
  }
  void validate() const {
    detail::require(dim() == 1 || dim() == 2, "cross-section must be an interval or a rectangle");
    for (const auto& s : sides)
      detail::require(s.hi > s.lo, "cross-section is degenerate (zero measure)");
  }
  bool operator==(const CrossSection&) const = default;
};

/// Omega_ell = (-ell, ell) x omega2; the axis dimension p is fixed to 1.
struct CylinderSpec {
  double ell = 2.0;
  CrossSection omega2{{Interval{0.0, 1.0}}};

  int n() const { return 1 + omega2.dim(); }
  double measure() const { return 2.0 * ell * omega2.measure(); }
  void validate() const {
    detail::require(ell > 1.0, "cylinder half-length ell must be > 1");
    omega2.validate();
  }
};

enum class BoundaryClass : std::uint8_t { interior, lateral, end };

struct GridAxis {
  double lo = 0.0;
  double h = 1.0;
  int cells = 1;

  int nodes() const { return cells + 1; }
  double coord(int i) const { return i == cells ? lo + h * cells : lo + h * i; }
  double hi() const { return lo + h * cells; }
  bool operator==(const GridAxis&) const = default;
};

struct Element {
  std::array<int, 4> v{};             ///< Kuhn path vertices, d + 1 used
  std::array<std::uint8_t, 3> axis{}; ///< axis stepped between v[k] and v[k+1]
};

class Mesh {
public:
  int dim() const { return static_cast<int>(axes_.size()); }
  const std::vector<GridAxis>& axes() const { return axes_; }
  bool has_x1_axis() const { return has_x1_; }
  double target_h() const { return target_h_; }

  std::size_t node_count() const { return node_class_.size(); }
  std::size_t element_count() const { return elements_.size(); }
  const std::vector<Element>& elements() const { return elements_; }
  double element_volume() const { return element_volume_; }

  BoundaryClass node_class(std::size_t node) const { return node_class_[node]; }
  /// Vertex-rule quadrature weight of a node, sum over incident |T| / (d + 1).
  double lumped_weight(std::size_t node) const { return lumped_[node]; }
  const std::vector<double>& lumped_weights() const { return lumped_; }

  /// Grid multi-index of a node, axis 0 slowest.
  std::array<int, 3> multi_index(std::size_t node) const {
    std::array<int, 3> idx{};
    std::size_t rest = node;
    for (int a = dim() - 1; a >= 0; --a) {
      const auto n = static_cast<std::size_t>(axes_[static_cast<std::size_t>(a)].nodes());
      idx[static_cast<std::size_t>(a)] = static_cast<int>(rest % n);
      rest /= n;
    }
    return idx;
  }

  double coord(std::size_t node, int axis) const {
    return axes_[static_cast<std::size_t>(axis)].coord(multi_index(node)[static_cast<std::size_t>(axis)]);
  }

  // Cylinder-specific views (axis 0 is x1).
  std::size_t cross_count() const {
    std::size_t c = 1;
    for (int a = has_x1_ ? 1 : 0; a < dim(); ++a) c *= static_cast<std::size_t>(axes_[static_cast<std::size_t>(a)].nodes());
    return c;
  }
  int x1_index(std::size_t node) const {
    return has_x1_ ? static_cast<int>(node / cross_count()) : 0;
  }
  std::size_t cross_index(std::size_t node) const {
    return has_x1_ ? node % cross_count() : node;
  }
  /// The cross-section axes (all axes for a cross-section mesh).
  std::vector<GridAxis> cross_axes() const {
    return {axes_.begin() + (has_x1_ ? 1 : 0), axes_.end()};
  }
  const GridAxis& x1_axis() const {
    detail::require(has_x1_, "mesh has no x1 axis");
    return axes_.front();
  }
  /// x1 range [lo, hi] covered by an element.
  std::pair<double, double> element_x1_range(const Element& e) const {
    const auto& ax = x1_axis();
    int lo = x1_index(static_cast<std::size_t>(e.v[0]));
    int hi = x1_index(static_cast<std::size_t>(e.v[static_cast<std::size_t>(dim())]));
    return {ax.coord(lo), ax.coord(hi)};
  }
  /// Volume of the meshed box.
  double measure() const {
    double m = 1.0;
    for (const auto& ax : axes_) m *= ax.hi() - ax.lo;
    return m;
  }

  /// Builds a Kuhn-subdivided box mesh. With has_x1 the first axis is the
  /// cylinder axis: nodes on its end planes are `end`, other boundary nodes
  /// `lateral`. Without it every boundary node is `lateral`.
  static Mesh box(std::vector<GridAxis> axes, bool has_x1, double target_h);

private:
  std::vector<GridAxis> axes_;
  bool has_x1_ = false;
  double target_h_ = 0.0;
  double element_volume_ = 0.0;
  std::vector<Element> elements_;
  std::vector<BoundaryClass> node_class_;
  std::vector<double> lumped_;
};

inline Mesh Mesh::box(std::vector<GridAxis> axes, bool has_x1, double target_h) {
  const int d = static_cast<int>(axes.size());
  detail::require(d >= 1 && d <= 3, "mesh dimension must be 1, 2 or 3");
  for (const auto& ax : axes)
    detail::require(ax.cells >= 1 && ax.h > 0.0, "mesh axis is degenerate");

  Mesh m;
  m.axes_ = std::move(axes);
  m.has_x1_ = has_x1;
  m.target_h_ = target_h;

  std::array<int, 3> nn{1, 1, 1};
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) {
    nn[static_cast<std::size_t>(a)] = m.axes_[static_cast<std::size_t>(a)].nodes();
    total *= static_cast<std::size_t>(nn[static_cast<std::size_t>(a)]);
  }
  const auto node_of = [&](const std::array<int, 3>& idx) {
    int id = 0;
    for (int a = 0; a < d; ++a) id = id * nn[static_cast<std::size_t>(a)] + idx[static_cast<std::size_t>(a)];
    return id;
  };

  m.node_class_.assign(total, BoundaryClass::interior);
  for (std::size_t node = 0; node < total; ++node) {
    const auto idx = m.multi_index(node);
    bool on_end = false, on_lateral = false;
    for (int a = 0; a < d; ++a) {
      const int i = idx[static_cast<std::size_t>(a)];
      const bool edge = i == 0 || i == nn[static_cast<std::size_t>(a)] - 1;
      if (!edge) continue;
      if (has_x1 && a == 0) on_end = true;
      else on_lateral = true;
    }
    m.node_class_[node] = on_end ? BoundaryClass::end
                          : on_lateral ? BoundaryClass::lateral
                                       : BoundaryClass::interior;
  }

  std::array<std::uint8_t, 3> perm{0, 1, 2};
  std::vector<std::array<std::uint8_t, 3>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.begin() + d));

  double cell_volume = 1.0;
  for (const auto& ax : m.axes_) cell_volume *= ax.h;
  double factorial = 1.0;
  for (int k = 2; k <= d; ++k) factorial *= k;
  m.element_volume_ = cell_volume / factorial;

  std::array<int, 3> cells{1, 1, 1};
  for (int a = 0; a < d; ++a) cells[static_cast<std::size_t>(a)] = m.axes_[static_cast<std::size_t>(a)].cells;
  m.elements_.reserve(static_cast<std::size_t>(cells[0]) * static_cast<std::size_t>(cells[1]) *
                      static_cast<std::size_t>(cells[2]) * perms.size());
  std::array<int, 3> c{};
  for (c[0] = 0; c[0] < cells[0]; ++c[0])
    for (c[1] = 0; c[1] < cells[1]; ++c[1])
      for (c[2] = 0; c[2] < cells[2]; ++c[2])
        for (const auto& p : perms) {
          Element e;
          auto idx = c;
          e.v[0] = node_of(idx);
          for (int k = 0; k < d; ++k) {
            idx[p[static_cast<std::size_t>(k)]] += 1;
            e.v[static_cast<std::size_t>(k + 1)] = node_of(idx);
            e.axis[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k)];
          }
          m.elements_.push_back(e);
        }

  m.lumped_.assign(total, 0.0);
  const double share = m.element_volume_ / (d + 1);
  for (const auto& e : m.elements_)
    for (int k = 0; k <= d; ++k) m.lumped_[static_cast<std::size_t>(e.v[static_cast<std::size_t>(k)])] += share;
  return m;
}

namespace detail {

inline int cells_for(double length, double h) {
  return std::max(1, static_cast<int>(std::ceil(length / h - 1e-9)));
}

inline std::vector<GridAxis> cross_axes_for(const CrossSection& omega2, double h) {
  std::vector<GridAxis> axes;
  for (const auto& s : omega2.sides) {
    const int n = cells_for(s.length(), h);
    axes.push_back({s.lo, s.length() / n, n});
  }
  return axes;
}

/// x1 axis on (-ell, ell) with a cell count divisible by 4, so that the
/// planes x1 = +-ell/2 are grid planes.
inline GridAxis x1_axis_for(double ell, double h) {
  const int quarter = cells_for(ell / 2.0, h);
  const int n = 4 * quarter;
  return {-ell, 2.0 * ell / n, n};
}

}  // namespace detail

/// Simplicial mesh of Omega_ell = (-ell, ell) x omega2.
inline std::shared_ptr<const Mesh> build_cylinder_mesh(const CylinderSpec& spec, double h) {
  spec.validate();
  detail::require(h > 0.0, "mesh size h must be > 0");
  auto axes = detail::cross_axes_for(spec.omega2, h);
  axes.insert(axes.begin(), detail::x1_axis_for(spec.ell, h));
  return std::make_shared<const Mesh>(Mesh::box(std::move(axes), true, h));
}

/// Simplicial mesh of omega2; every boundary node is Dirichlet.
inline std::shared_ptr<const Mesh> build_cross_section_mesh(const CrossSection& omega2, double h) {
  omega2.validate();
  detail::require(h > 0.0, "mesh size h must be > 0");
  return std::make_shared<const Mesh>(Mesh::box(detail::cross_axes_for(omega2, h), false, h));
}

/// Mesh of the interval (-ell, ell) for the one-dimensional problems; the two
/// endpoints are `end` nodes.
inline std::shared_ptr<const Mesh> build_interval_mesh(double ell, double h) {
  detail::require(ell > 0.0, "interval half-length must be > 0");
  detail::require(h > 0.0, "mesh size h must be > 0");
  return std::make_shared<const Mesh>(Mesh::box({detail::x1_axis_for(ell, h)}, true, h));
}

}  // namespace cylvar

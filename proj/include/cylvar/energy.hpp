#pragma once

// Discrete energy
//
//   E(u) = sum_T |T| F(grad u|_T) - sum_i w_i f_i u_i [+ sum_i w_i |u_i|^r]
//
// over piecewise-linear fields, with w_i the vertex-rule weights. The F term
// is exact for P1 fields. The optional reaction term |u|^r is the coercive
// one-dimensional problem.
//
// The integrand may take more components than the mesh has axes: with
// grad_offset = 1 the argument is (0, grad_{X2} u), i.e. the cross-section
// density F(0, .).

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cylvar/field.hpp"
#include "cylvar/integrand.hpp"

namespace cylvar {

class EnergyProblem {
public:
  EnergyProblem(std::shared_ptr<const Mesh> mesh, IntegrandSpec F, const SourceTerm& f,
                Field base, int grad_offset = 0, std::optional<double> reaction = {})
      : mesh_(std::move(mesh)),
        F_(std::move(F)),
        f_(f.nodal_values(*mesh_)),
        base_(std::move(base)),
        offset_(grad_offset),
        reaction_(reaction),
        dofs_(DofMap::build(*mesh_, base_.constraint)),
        scratch_(base_.values),
        nodal_grad_(mesh_->node_count(), 0.0),
        direction_(mesh_->node_count(), 0.0) {
    detail::require(base_.mesh == mesh_, "base field must live on the problem mesh");
    detail::require(F_.n == mesh_->dim() + offset_,
                    "integrand dimension does not match the problem (expected n = " +
                        std::to_string(mesh_->dim() + offset_) + ")");
    dof_weight_.assign(static_cast<std::size_t>(dofs_.ndof), 0.0);
    dofs_.accumulate(mesh_->lumped_weights(), dof_weight_);
  }

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const IntegrandSpec& integrand() const { return F_; }
  IntegrandSpec& integrand() { return F_; }
  const DofMap& dofs() const { return dofs_; }
  const std::vector<double>& source() const { return f_; }
  const std::vector<double>& dof_weights() const { return dof_weight_; }
  int grad_offset() const { return offset_; }
  std::optional<double> reaction() const { return reaction_; }
  const Field& base() const { return base_; }

  std::size_t ndof() const { return static_cast<std::size_t>(dofs_.ndof); }

  std::vector<double> initial_dofs() const { return dofs_.gather(base_.values); }

  Field field_from(std::span<const double> x) const {
    Field u = base_;
    dofs_.scatter(x, u.values);
    return u;
  }

  /// Energy of nodal values, optionally restricted to a region (elements by
  /// x1 midpoint; linear and reaction terms by element vertex rule).
  double energy_nodal(std::span<const double> u, const Region* region = nullptr) const {
    const Mesh& m = *mesh_;
    const int d = m.dim();
    const double vol = m.element_volume();
    std::array<double, 4> xi{};
    const std::span<double> xs(xi.data(), static_cast<std::size_t>(F_.n));
    const std::span<double> g(xi.data() + offset_, static_cast<std::size_t>(d));
    double fterm = 0.0, lin = 0.0;
    for (const auto& e : m.elements()) {
      if (!detail::element_in(m, e, region)) continue;
      detail::element_gradient(m, e, u, g);
      fterm += evaluate_unchecked(F_, xs);
      if (region) {
        for (int k = 0; k <= d; ++k) {
          const auto v = static_cast<std::size_t>(e.v[static_cast<std::size_t>(k)]);
          lin += (f_[v] * u[v] - reaction_term(u[v])) * vol / (d + 1);
        }
      }
    }
    if (!region)
      for (std::size_t i = 0; i < m.node_count(); ++i)
        lin += m.lumped_weight(i) * (f_[i] * u[i] - reaction_term(u[i]));
    return fterm * vol - lin;
  }

  double energy(const Field& u, const Region* region = nullptr) const {
    return energy_nodal(u.values, region);
  }

  double value(std::span<const double> x) {
    dofs_.scatter(x, scratch_);
    return energy_nodal(scratch_);
  }

  /// Energy and an element of its subdifferential with respect to the dofs.
  double value_and_gradient(std::span<const double> x, std::span<double> grad) {
    const Mesh& m = *mesh_;
    dofs_.scatter(x, scratch_);
    const int d = m.dim();
    const double vol = m.element_volume();
    std::array<double, 4> xi{};
    std::array<double, 4> sg{};
    const std::span<double> xs(xi.data(), static_cast<std::size_t>(F_.n));
    const std::span<double> ss(sg.data(), static_cast<std::size_t>(F_.n));
    const std::span<double> g(xi.data() + offset_, static_cast<std::size_t>(d));
    std::fill(nodal_grad_.begin(), nodal_grad_.end(), 0.0);
    double fterm = 0.0;
    for (const auto& e : m.elements()) {
      detail::element_gradient(m, e, scratch_, g);
      fterm += evaluate_unchecked(F_, xs);
      subgradient_unchecked(F_, xs, ss);
      for (int k = 0; k < d; ++k) {
        const auto a = e.axis[static_cast<std::size_t>(k)];
        const double c = vol * sg[static_cast<std::size_t>(offset_) + a] / m.axes()[a].h;
        nodal_grad_[static_cast<std::size_t>(e.v[static_cast<std::size_t>(k + 1)])] += c;
        nodal_grad_[static_cast<std::size_t>(e.v[static_cast<std::size_t>(k)])] -= c;
      }
    }
    double lin = 0.0;
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      const double w = m.lumped_weight(i);
      const double ui = scratch_[i];
      lin += w * (f_[i] * ui - reaction_term(ui));
      nodal_grad_[i] -= w * (f_[i] - reaction_slope(ui));
    }
    dofs_.accumulate(nodal_grad_, grad);
    return fterm * vol - lin;
  }

  /// E(x + t d) - E(x), summed from per-element increments so that it stays
  /// accurate when the change is far below the rounding level of E itself.
  double energy_change(std::span<const double> x, std::span<const double> dir, double t) {
    const Mesh& m = *mesh_;
    dofs_.scatter(x, scratch_);
    std::fill(direction_.begin(), direction_.end(), 0.0);
    dofs_.scatter(dir, direction_);
    for (double& v : direction_) v *= t;
    const int d = m.dim();
    std::array<double, 4> xi{};
    std::array<double, 4> eta{};
    const std::span<const double> xs(xi.data(), static_cast<std::size_t>(F_.n));
    const std::span<const double> es(eta.data(), static_cast<std::size_t>(F_.n));
    const std::span<double> g(xi.data() + offset_, static_cast<std::size_t>(d));
    const std::span<double> dg(eta.data() + offset_, static_cast<std::size_t>(d));
    double fterm = 0.0;
    for (const auto& e : m.elements()) {
      detail::element_gradient(m, e, scratch_, g);
      detail::element_gradient(m, e, direction_, dg);
      fterm += increment_unchecked(F_, xs, es);
    }
    double lin = 0.0;
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      const double du = direction_[i];
      if (du == 0.0) continue;
      double r = f_[i] * du;
      if (reaction_) r -= detail::pow_abs_increment(scratch_[i], du, *reaction_);
      lin += m.lumped_weight(i) * r;
    }
    return fterm * m.element_volume() - lin;
  }

private:
  double reaction_term(double u) const {
    return reaction_ ? detail::pow_abs(u, *reaction_) : 0.0;
  }
  double reaction_slope(double u) const {
    return reaction_ ? *reaction_ * detail::pow_sign(u, *reaction_) : 0.0;
  }

  std::shared_ptr<const Mesh> mesh_;
  IntegrandSpec F_;
  std::vector<double> f_;
  Field base_;
  int offset_ = 0;
  std::optional<double> reaction_;
  DofMap dofs_;
  std::vector<double> scratch_;
  std::vector<double> nodal_grad_;
  std::vector<double> direction_;
  std::vector<double> dof_weight_;
};

}  // namespace cylvar

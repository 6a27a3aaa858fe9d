#pragma once

// One-dimensional problems on (-ell, ell).
//
// Source problem: minimize int F(u') - gamma u with u(+-ell) = 0. Its
// solution grows without bound as ell grows; for F = x^2/2 it is the
// parabola gamma (ell^2 - x^2) / 2.
//
// Coercive problem: minimize int F(v') + |v|^q with v(-ell) = a, v(ell) = b.
// The solution stays in [0, max(a, b)] and its mass on (-ell/2, ell/2) decays
// exponentially in ell.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cylvar/asymptotics.hpp"

namespace cylvar {

struct OneDimSourceSpec {
  double gamma = 1.0;
  double ell = 2.0;
  IntegrandSpec F = IntegrandSpec::quadratic_form({0.5}, 1);

  void validate() const {
    detail::require(gamma > 0.0, "gamma must be > 0");
    detail::require(ell > 0.0, "ell must be > 0");
    F.validate();
    detail::require(F.n == 1, "one-dimensional problems need an integrand with n = 1");
  }
};

/// Boundary values a, b (the convexity moduli keep the names alpha, beta).
struct OneDimCoerciveSpec {
  double bv_left = 1.0;
  double bv_right = 1.0;
  double q = 2.0;
  IntegrandSpec F = IntegrandSpec::quadratic_form({1.0}, 1);

  void validate() const {
    detail::require(bv_left >= 0.0 && bv_right >= 0.0, "boundary values a, b must be >= 0");
    detail::require(q > 1.0, "q must be > 1");
    F.validate();
    detail::require(F.n == 1, "one-dimensional problems need an integrand with n = 1");
  }
};

/// gamma (ell^2 - x^2) / 2, the minimizer for F(x) = x^2 / 2.
inline double explicit_parabola(double gamma, double ell, double x) {
  detail::require(std::abs(x) <= ell, "explicit_parabola needs |x| <= ell");
  return gamma * (ell * ell - x * x) / 2.0;
}

inline Solution solve_source_1d(const OneDimSourceSpec& spec, double h, const SolverOptions& opts) {
  spec.validate();
  auto mesh = build_interval_mesh(spec.ell, h);
  EnergyProblem P(mesh, spec.F, SourceTerm::constant(spec.gamma), Field::zeros(mesh), 0);
  return solve_problem(P, opts, SolutionRole::u_ell);
}

/// Value at x = 0 (always a node of an interval mesh).
inline double value_at_origin(const Field& u) {
  return u.values[static_cast<std::size_t>(u.mesh->x1_axis().cells / 2)];
}

struct UnimodalReport {
  double argmax_x = 0.0;
  int violations = 0;
  int negative = 0;  ///< nodes below -tol
  double tol = 0.0;
  bool pass() const { return violations == 0 && negative == 0; }
};

/// Nondecreasing up to the argmax, nonincreasing after it (tol 1e-10 scale).
inline UnimodalReport check_unimodal(const Field& u) {
  detail::require(u.mesh->dim() == 1, "unimodality check needs a one-dimensional field");
  const auto& v = u.values;
  UnimodalReport rep;
  rep.tol = 1e-10 * u.sup_norm();
  const auto top = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  rep.argmax_x = u.mesh->coord(top, 0);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double step = v[i + 1] - v[i];
    if (i < top ? step < -rep.tol : step > rep.tol) ++rep.violations;
  }
  for (double x : v)
    if (x < -rep.tol) ++rep.negative;
  return rep;
}

inline UnimodalReport check_unimodal(const Solution& u) { return check_unimodal(u.field); }

inline Solution solve_coercive_1d(const OneDimCoerciveSpec& spec, double ell, double h,
                                  const SolverOptions& opts) {
  spec.validate();
  auto mesh = build_interval_mesh(ell, h);
  Field base = Field::zeros(mesh, Constraint::endpoint_values);
  base.values.front() = spec.bv_left;
  base.values.back() = spec.bv_right;
  EnergyProblem P(mesh, spec.F, SourceTerm::constant(0.0), std::move(base), 0, spec.q);
  return solve_problem(P, opts, SolutionRole::v_ell);
}

/// int |v'|^q + |v|^q over the region (whole interval when null); the
/// second term uses the element vertex rule.
inline double coercive_mass(const Field& v, double q, const Region* region = nullptr) {
  const Mesh& m = *v.mesh;
  double s = grad_q_norm(v, q, region);
  const double share = m.element_volume() / (m.dim() + 1);
  for (const auto& e : m.elements()) {
    if (!detail::element_in(m, e, region)) continue;
    for (int k = 0; k <= m.dim(); ++k)
      s += share * std::pow(std::abs(v.values[static_cast<std::size_t>(e.v[static_cast<std::size_t>(k)])]), q);
  }
  return s;
}

struct CoerciveBoundsReport {
  bool endpoints_exact = true;
  int interior_violations = 0;
  double max_v = 0.0;
  double min_v = 0.0;
  bool pass() const { return endpoints_exact && interior_violations == 0; }
};

/// 0 <= v <= max(a, b): exact at the endpoints, within 1e-10 max(a, b) inside.
inline CoerciveBoundsReport check_coercive_bounds(const Field& v, const OneDimCoerciveSpec& spec) {
  CoerciveBoundsReport rep;
  const double top = std::max(spec.bv_left, spec.bv_right);
  const double tol = 1e-10 * top;
  rep.endpoints_exact = v.values.front() == spec.bv_left && v.values.back() == spec.bv_right;
  rep.max_v = *std::max_element(v.values.begin(), v.values.end());
  rep.min_v = *std::min_element(v.values.begin(), v.values.end());
  for (std::size_t i = 1; i + 1 < v.values.size(); ++i)
    if (v.values[i] < -tol || v.values[i] > top + tol) ++rep.interior_violations;
  return rep;
}

struct MidDecay {
  std::vector<double> ell;
  std::vector<double> m_mid;
  std::vector<double> total;  ///< int |v'|^q + |v|^q over the whole interval
  std::vector<double> max_v;
  std::vector<int> violations;
  std::optional<RateFit> fit;
  std::string note;
};

/// m(ell) = int_{-ell/2}^{ell/2} |v'|^q + |v|^q for each ell and its
/// exponential fit (skipped for a = b = 0, where v = 0).
inline MidDecay fit_middecay(const OneDimCoerciveSpec& spec, const std::vector<double>& ells, double h,
                             const SolverOptions& opts) {
  detail::require(ells.size() >= 3, "mid-interval decay needs at least 3 values of ell");
  MidDecay out;
  for (double ell : ells) {
    const Solution v = solve_coercive_1d(spec, ell, h, opts);
    const Region mid = half_cylinder(ell);
    const auto b = check_coercive_bounds(v.field, spec);
    out.ell.push_back(ell);
    out.m_mid.push_back(coercive_mass(v.field, spec.q, &mid));
    out.total.push_back(coercive_mass(v.field, spec.q));
    out.max_v.push_back(b.max_v);
    out.violations.push_back(b.interior_violations + (b.endpoints_exact ? 0 : 1));
  }
  if (spec.bv_left == 0.0 && spec.bv_right == 0.0) {
    out.note = "a = b = 0: the minimizer is zero, fit skipped";
    return out;
  }
  out.fit = fit_exponential(out.ell, out.m_mid);
  return out;
}

/// One row per ell of the combined one-dimensional table.
struct OneDimRecord {
  double ell = 0.0;
  double u_at_0 = 0.0;
  double m_mid = 0.0;
  double max_v = 0.0;
  int violations = 0;  ///< unimodality, sign and coercive-bound violations
};

struct OneDimResult {
  std::vector<OneDimRecord> records;
  MidDecay decay;
  bool blowup_ok = true;  ///< u(0) strictly increasing in ell
};

inline OneDimResult run_onedim(double gamma, const IntegrandSpec& source_F, const OneDimCoerciveSpec& coercive,
                               const std::vector<double>& ells, double h, const SolverOptions& opts) {
  OneDimResult res;
  res.decay = fit_middecay(coercive, ells, h, opts);
  for (std::size_t i = 0; i < ells.size(); ++i) {
    const Solution u = solve_source_1d({gamma, ells[i], source_F}, h, opts);
    const auto uni = check_unimodal(u);
    OneDimRecord r;
    r.ell = ells[i];
    r.u_at_0 = value_at_origin(u.field);
    r.m_mid = res.decay.m_mid[i];
    r.max_v = res.decay.max_v[i];
    r.violations = uni.violations + uni.negative + res.decay.violations[i];
    if (i && !(r.u_at_0 > res.records.back().u_at_0)) res.blowup_ok = false;
    res.records.push_back(r);
  }
  return res;
}

}  // namespace cylvar

#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cylvar/energy.hpp"

namespace cylvar {

enum class SolveMethod { automatic, iterative, direct };

struct SolverOptions {
  int max_iters = 20000;
  double energy_tol = 1e-10;  ///< relative energy decrease over `window` iterations
  int window = 50;
  /// Scaled residual max_i |dE/dx_i| / w_i below which iteration stops.
  double grad_tol = 1e-9;
  double armijo_c = 1e-4;
  double backtrack_rho = 0.5;
  bool bb_steps = true;  ///< spectral (Barzilai-Borwein) scaling of the initial step
  int lbfgs_memory = 8;  ///< 0 gives plain steepest descent
  /// Precondition by the inverse of the H^1 matrix (stiffness plus lumped
  /// mass); removes the h^-2 growth of the iteration count.
  bool precondition = true;
  std::vector<double> smoothing_schedule{1e-2, 1e-4, 0.0};
  SolveMethod method = SolveMethod::automatic;
  std::uint64_t seed = 0;
  bool record_trace = false;

  void validate() const {
    detail::require(armijo_c > 0.0 && armijo_c < 1.0, "armijo_c must lie in (0, 1)");
    detail::require(backtrack_rho > 0.0 && backtrack_rho < 1.0, "backtrack_rho must lie in (0, 1)");
    detail::require(max_iters >= 1, "max_iters must be >= 1");
    detail::require(window >= 1, "window must be >= 1");
    detail::require(energy_tol >= 0.0 && grad_tol >= 0.0, "tolerances must be >= 0");
    detail::require(lbfgs_memory >= 0, "lbfgs_memory must be >= 0");
    detail::require(!smoothing_schedule.empty(), "smoothing schedule must not be empty");
  }
};

struct TraceRow {
  int iteration = 0;
  double energy = 0.0;
  double step = 0.0;
  double grad_norm = 0.0;
};

enum class SolutionRole { u_ell, u_infty, w_ell, v_ell };

inline std::string to_string(SolutionRole r) {
  switch (r) {
    case SolutionRole::u_ell: return "u_ell";
    case SolutionRole::u_infty: return "u_infty";
    case SolutionRole::w_ell: return "w_ell";
    case SolutionRole::v_ell: return "v_ell";
  }
  return "unknown";
}

struct Solution {
  Field field;
  SolutionRole role = SolutionRole::u_ell;
  double energy = 0.0;
  double initial_energy = 0.0;
  int iterations = 0;
  /// Estimated bound on int |grad(u - u*)|^q: remaining energy gap over alpha.
  std::optional<double> certificate;
  bool converged = false;
  std::string stop_reason;
  std::vector<TraceRow> trace;
  /// Direct solves: the nodal iterative-refinement correction, a measure of
  /// the rounding noise in `field`. Empty for iterative solves.
  std::vector<double> correction;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double scaled_residual(const std::vector<double>& g, const std::vector<double>& w) {
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) r = std::max(r, std::abs(g[i]) / w[i]);
  return r;
}

/// Remaining energy gap extrapolated from the per-iteration decreases of the
/// last two windows, assuming geometric decay.
inline double extrapolated_gap(const std::vector<double>& decreases, int window) {
  const auto n = static_cast<int>(decreases.size());
  if (n == 0) return 0.0;
  const int w = std::max(1, std::min(window, n / 2));
  double d2 = 0.0, d1 = 0.0;
  for (int k = n - w; k < n; ++k) d2 += decreases[static_cast<std::size_t>(k)];
  if (n < 2 * w) return d2;
  for (int k = n - 2 * w; k < n - w; ++k) d1 += decreases[static_cast<std::size_t>(k)];
  if (d1 <= 0.0) return d2;
  const double rho = d2 / d1;
  return rho < 1.0 ? d2 * rho / (1.0 - rho) : d2;
}

/// z = (K + M)^{-1} v on the free dofs, K the Laplacian stiffness matrix and
/// M the lumped mass matrix.
class H1Preconditioner {
public:
  explicit H1Preconditioner(const EnergyProblem& P) {
    const Mesh& m = P.mesh();
    const int d = m.dim();
    const auto& map = P.dofs().node_to_dof;
    const double vol = m.element_volume();
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& e : m.elements()) {
      for (int k = 0; k < d; ++k) {
        // each Kuhn edge carries one gradient component
        const double c = vol / (m.axes()[e.axis[static_cast<std::size_t>(k)]].h *
                                m.axes()[e.axis[static_cast<std::size_t>(k)]].h);
        const int a = map[static_cast<std::size_t>(e.v[static_cast<std::size_t>(k)])];
        const int b = map[static_cast<std::size_t>(e.v[static_cast<std::size_t>(k + 1)])];
        if (a >= 0) trip.emplace_back(a, a, c);
        if (b >= 0) trip.emplace_back(b, b, c);
        if (a >= 0 && b >= 0) {
          trip.emplace_back(a, b, -c);
          trip.emplace_back(b, a, -c);
        }
      }
    }
    for (std::size_t i = 0; i < m.node_count(); ++i)
      if (map[i] >= 0) trip.emplace_back(map[i], map[i], m.lumped_weight(i));
    const auto n = static_cast<Eigen::Index>(P.ndof());
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    ldlt_.compute(L);
    if (ldlt_.info() != Eigen::Success) throw SolverError("preconditioner factorization failed");
  }

  void apply(const std::vector<double>& v, std::vector<double>& z) const {
    const auto n = static_cast<Eigen::Index>(v.size());
    const Eigen::Map<const Eigen::VectorXd> vin(v.data(), n);
    Eigen::Map<Eigen::VectorXd>(z.data(), n) = ldlt_.solve(vin);
  }

private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

struct MinimizeOutcome {
  std::vector<double> x;
  double energy = 0.0;
  double initial_energy = 0.0;
  double initial_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string reason;
  std::vector<double> decreases;  ///< -(E_{k+1} - E_k), computed stably
  std::vector<TraceRow> trace;
};

/// L-BFGS directions with Armijo backtracking; every accepted step decreases
/// the energy. The initial step is scaled by the spectral ratio s.y / y.y.
/// `reference_residual` (when positive) anchors the stagnation level; the
/// smoothing passes share the residual of the first one.
inline MinimizeOutcome lbfgs_armijo(EnergyProblem& P, std::vector<double> x,
                                    const SolverOptions& opt, int iteration_offset,
                                    double reference_residual = 0.0,
                                    const H1Preconditioner* pre = nullptr) {
  MinimizeOutcome out;
  const std::size_t n = x.size();
  std::vector<double> g(n), g_new(n), d(n), x_new(n), hv(n), hy(n);
  double E = P.value_and_gradient(x, g);
  if (!std::isfinite(E)) throw SolverError("non-finite energy at the initial iterate");
  out.initial_energy = E;
  const auto& w = P.dof_weights();

  std::deque<std::vector<double>> S, Y;
  std::deque<double> RHO;
  double last_step = 1.0;
  double res = n ? scaled_residual(g, w) : 0.0;
  out.initial_residual = res;
  if (opt.record_trace) out.trace.push_back({iteration_offset, E, 0.0, res});

  if (n == 0 || res <= opt.grad_tol) {
    out.x = std::move(x);
    out.energy = E;
    out.converged = true;
    out.reason = n == 0 ? "no free degrees of freedom" : "residual below grad_tol";
    return out;
  }

  double best_res = res;
  // stagnation only counts once the residual has fallen this far
  const double stagnation_level = std::sqrt(std::numeric_limits<double>::epsilon()) *
                                  (reference_residual > 0.0 ? reference_residual : res);
  int best_at = 0;
  int it = 0;
  for (; it < opt.max_iters; ++it) {
    // direction: two-loop recursion around H0 = gamma * (K + M)^{-1}
    const auto apply_h0 = [&](std::vector<double>& v) {
      if (!pre) return;
      pre->apply(v, hv);
      v.swap(hv);
    };
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    if (opt.lbfgs_memory > 0 && !S.empty()) {
      std::vector<double> alpha(S.size());
      for (std::size_t k = S.size(); k-- > 0;) {
        alpha[k] = RHO[k] * dot(S[k], d);
        for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[k] * Y[k][i];
      }
      double gamma = 1.0;
      if (opt.bb_steps) {
        hy = Y.back();
        apply_h0(hy);
        gamma = dot(S.back(), Y.back()) / dot(Y.back(), hy);
      }
      apply_h0(d);
      for (double& v : d) v *= gamma;
      for (std::size_t k = 0; k < S.size(); ++k) {
        const double beta = RHO[k] * dot(Y[k], d);
        for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[k] - beta) * S[k][i];
      }
    } else {
      apply_h0(d);
    }
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      S.clear(), Y.clear(), RHO.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      apply_h0(d);
      slope = dot(g, d);
    }

    double t = 1.0;
    if (opt.lbfgs_memory == 0 && !S.empty()) {
      if (!opt.bb_steps) {
        t = 2.0 * last_step;
      } else if (pre) {
        hy = Y.back();
        apply_h0(hy);
        t = dot(S.back(), Y.back()) / dot(Y.back(), hy);
      } else {
        t = dot(S.back(), S.back()) / dot(S.back(), Y.back());
      }
    }

    double dE = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      dE = P.energy_change(x, d, t);
      if (std::isfinite(dE) && dE <= opt.armijo_c * t * slope) {
        accepted = true;
        break;
      }
      t *= opt.backtrack_rho;
    }
    if (!accepted) {
      if (!S.empty()) {
        // retry from a steepest-descent direction with fresh memory
        S.clear(), Y.clear(), RHO.clear();
        continue;
      }
      out.converged = true;
      out.reason = "line search stagnation";
      break;
    }
    for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + t * d[i];
    P.value_and_gradient(x_new, g_new);

    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-300) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      RHO.push_back(1.0 / sy);
      const std::size_t cap = static_cast<std::size_t>(std::max(1, opt.lbfgs_memory));
      while (S.size() > cap) S.pop_front(), Y.pop_front(), RHO.pop_front();
    }
    x.swap(x_new);
    g.swap(g_new);
    E += dE;
    last_step = t;
    out.decreases.push_back(-dE);
    res = scaled_residual(g, w);
    if (opt.record_trace) out.trace.push_back({iteration_offset + it + 1, E, t, res});

    if (res <= opt.grad_tol) {
      ++it;
      out.converged = true;
      out.reason = "residual below grad_tol";
      break;
    }
    if (res < 0.5 * best_res) {
      best_res = res;
      best_at = it;
    } else if (it - best_at >= 2 * opt.window && res <= stagnation_level) {
      // the residual sits at its rounding floor
      ++it;
      out.converged = true;
      out.reason = "residual stagnation";
      break;
    }
    const auto k = out.decreases.size();
    if (k >= static_cast<std::size_t>(opt.window)) {
      double drop = 0.0;
      for (std::size_t j = k - static_cast<std::size_t>(opt.window); j < k; ++j) drop += out.decreases[j];
      if (drop <= opt.energy_tol * std::max(std::abs(E), 1e-300)) {
        ++it;
        out.converged = true;
        out.reason = "windowed energy decrease below energy_tol";
        break;
      }
    }
  }
  if (!out.converged) out.reason = "max_iters reached";
  out.iterations = it;
  out.x = std::move(x);
  out.energy = E;
  return out;
}

}  // namespace detail

/// Minimizes the discrete energy from the problem's base field. Nonsmooth
/// aniso-max integrands run the smoothing schedule as an outer loop, ending
/// with the exact density.
inline Solution minimize(EnergyProblem& P, const SolverOptions& opts,
                         SolutionRole role = SolutionRole::u_ell) {
  opts.validate();
  std::vector<double> x = P.initial_dofs();
  std::vector<double> schedule{P.integrand().smoothing_mu};
  if (P.integrand().kind == IntegrandKind::aniso_max) schedule = opts.smoothing_schedule;

  Solution sol;
  sol.role = role;
  sol.initial_energy = P.energy(P.base());
  if (!std::isfinite(sol.initial_energy))
    throw SolverError("non-finite energy at the initial iterate");
  const double mu0 = P.integrand().smoothing_mu;
  detail::MinimizeOutcome last;
  double reference = 0.0;
  std::optional<detail::H1Preconditioner> pre;
  if (opts.precondition && P.ndof() > 0) pre.emplace(P);
  for (double mu : schedule) {
    P.integrand().smoothing_mu = mu;
    last = detail::lbfgs_armijo(P, std::move(x), opts, sol.iterations, reference,
                                pre ? &*pre : nullptr);
    if (reference == 0.0) reference = last.initial_residual;
    x = last.x;
    sol.iterations += last.iterations;
    sol.trace.insert(sol.trace.end(), last.trace.begin(), last.trace.end());
  }
  P.integrand().smoothing_mu = mu0;
  sol.field = P.field_from(x);
  sol.energy = P.energy(sol.field);
  if (!std::isfinite(sol.energy)) throw SolverError("non-finite energy at the final iterate");
  sol.converged = last.converged;
  sol.stop_reason = last.reason;
  if (P.integrand().alpha > 0.0)
    sol.certificate = detail::extrapolated_gap(last.decreases, opts.window) / P.integrand().alpha;
  return sol;
}

/// Exact minimizer of a quadratic energy: assembles the SPD system
/// 2 (A grad u, grad v) [+ 2 (u, v)_lumped] = (f, v) on the free dofs and
/// factorizes it.
inline Solution solve_quadratic_direct(EnergyProblem& P, SolutionRole role = SolutionRole::u_ell) {
  const IntegrandSpec& F = P.integrand();
  detail::require(F.is_quadratic(), "direct solve requires a quadratic integrand (q = 2)");
  detail::require(!P.reaction() || *P.reaction() == 2.0,
                  "direct solve requires a quadratic reaction term");
  const Mesh& m = P.mesh();
  const int d = m.dim();
  const int n = F.n;
  const int off = P.grad_offset();
  const auto A = F.quadratic_matrix();
  const auto& map = P.dofs().node_to_dof;
  const std::vector<double>& fixed = P.base().values;
  const double vol = m.element_volume();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.element_count() * static_cast<std::size_t>((d + 1) * (d + 1)));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(P.ndof()));

  // gradient operator rows: grad[axis[k]] = (u[v[k+1]] - u[v[k]]) / h
  std::array<std::array<double, 4>, 3> B{};
  for (const auto& e : m.elements()) {
    for (auto& row : B) row.fill(0.0);
    for (int k = 0; k < d; ++k) {
      const auto a = e.axis[static_cast<std::size_t>(k)];
      const double h = m.axes()[a].h;
      B[a][static_cast<std::size_t>(k + 1)] += 1.0 / h;
      B[a][static_cast<std::size_t>(k)] -= 1.0 / h;
    }
    for (int i = 0; i <= d; ++i) {
      const int ni = e.v[static_cast<std::size_t>(i)];
      const int di = map[static_cast<std::size_t>(ni)];
      if (di < 0) continue;
      for (int j = 0; j <= d; ++j) {
        double kij = 0.0;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            kij += B[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] *
                   A[static_cast<std::size_t>((a + off) * n + (b + off))] *
                   B[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
        kij *= 2.0 * vol;
        const int nj = e.v[static_cast<std::size_t>(j)];
        const int dj = map[static_cast<std::size_t>(nj)];
        if (dj >= 0) trip.emplace_back(di, dj, kij);
        else rhs[di] -= kij * fixed[static_cast<std::size_t>(nj)];
      }
    }
  }
  const auto& f = P.source();
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    const int di = map[i];
    if (di < 0) continue;
    rhs[di] += m.lumped_weight(i) * f[i];
    if (P.reaction()) trip.emplace_back(di, di, 2.0 * m.lumped_weight(i));
  }

  Solution sol;
  sol.role = role;
  sol.initial_energy = P.energy(P.base());
  std::vector<double> x(P.ndof(), 0.0);
  if (P.ndof() > 0) {
    Eigen::SparseMatrix<double> K(static_cast<Eigen::Index>(P.ndof()), static_cast<Eigen::Index>(P.ndof()));
    K.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
    if (ldlt.info() != Eigen::Success) throw SolverError("stiffness factorization failed");
    Eigen::VectorXd sx = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success) throw SolverError("stiffness solve failed");
    // one step of iterative refinement
    const Eigen::VectorXd r = rhs - K * sx;
    const Eigen::VectorXd dx = ldlt.solve(r);
    sx += dx;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = sx[static_cast<Eigen::Index>(i)];
    sol.correction.assign(m.node_count(), 0.0);
    for (std::size_t i = 0; i < m.node_count(); ++i)
      if (map[i] >= 0) sol.correction[i] = dx[map[i]];
  } else {
    sol.correction.assign(m.node_count(), 0.0);
  }
  sol.field = P.field_from(x);
  sol.energy = P.energy(sol.field);
  sol.converged = true;
  sol.stop_reason = "direct factorization";
  sol.certificate = 0.0;
  return sol;
}

/// Dispatches on SolverOptions::method; `automatic` uses the direct solve
/// whenever the energy is quadratic.
inline Solution solve_problem(EnergyProblem& P, const SolverOptions& opts, SolutionRole role) {
  const bool quadratic = P.integrand().is_quadratic() && (!P.reaction() || *P.reaction() == 2.0);
  const bool direct = opts.method == SolveMethod::direct ||
                      (opts.method == SolveMethod::automatic && quadratic);
  return direct ? solve_quadratic_direct(P, role) : minimize(P, opts, role);
}

// ------------------------------------------------------------ problem drivers

inline void check_cylinder_integrand(const IntegrandSpec& F, int n) {
  F.validate();
  detail::require(F.n == n, "integrand dimension n = " + std::to_string(F.n) +
                                " does not match the cylinder dimension " + std::to_string(n));
}

/// u_infty: minimizer of int F(0, grad_{X2} u) - f u over W_0^{1,q}(omega2).
inline Solution solve_cross_section(std::shared_ptr<const Mesh> cross, const IntegrandSpec& F,
                                    const SourceTerm& f, const SolverOptions& opts) {
  check_cylinder_integrand(F, cross->dim() + 1);
  EnergyProblem P(cross, F, f, Field::zeros(cross, Constraint::dirichlet_all), 1);
  return solve_problem(P, opts, SolutionRole::u_infty);
}

inline Solution solve_cross_section(const CrossSection& omega2, const IntegrandSpec& F,
                                    const SourceTerm& f, double h, const SolverOptions& opts) {
  return solve_cross_section(build_cross_section_mesh(omega2, h), F, f, opts);
}

/// Warm start for u_ell: the extension of u_infty with its end faces zeroed.
inline Field clipped_extension(const Field& u_inf, std::shared_ptr<const Mesh> cyl) {
  Field init = extend_in_x1(u_inf, cyl);
  init.constraint = Constraint::dirichlet_all;
  for (std::size_t i = 0; i < cyl->node_count(); ++i)
    if (cyl->node_class(i) != BoundaryClass::interior) init.values[i] = 0.0;
  return init;
}

/// u_ell on a given cylinder mesh; `u_inf` (optional) seeds the iteration.
inline Solution solve_cylinder(std::shared_ptr<const Mesh> cyl, const IntegrandSpec& F,
                               const SourceTerm& f, const SolverOptions& opts,
                               const Field* u_inf = nullptr) {
  check_cylinder_integrand(F, cyl->dim());
  Field init = u_inf ? clipped_extension(*u_inf, cyl) : Field::zeros(cyl, Constraint::dirichlet_all);
  EnergyProblem P(cyl, F, f, std::move(init), 0);
  return solve_problem(P, opts, SolutionRole::u_ell);
}

inline Solution solve_cylinder(const CylinderSpec& spec, const IntegrandSpec& F,
                               const SourceTerm& f, double h, const SolverOptions& opts) {
  auto cyl = build_cylinder_mesh(spec, h);
  const Solution u_inf = solve_cross_section(spec.omega2, F, f, h, opts);
  return solve_cylinder(cyl, F, f, opts, &u_inf.field);
}

/// w_ell: minimizer over V^{1,q}, lateral Dirichlet with the two end faces
/// merged into shared dofs.
inline Solution solve_tied_ends(std::shared_ptr<const Mesh> cyl, const IntegrandSpec& F,
                                const SourceTerm& f, const SolverOptions& opts,
                                const Field* init = nullptr) {
  check_cylinder_integrand(F, cyl->dim());
  Field base = Field::zeros(cyl, Constraint::tied_ends);
  if (init) {
    base.values = init->values;
    detail::require(constraint_violation(base) == 0.0, "initial field violates the tied-ends constraint");
  }
  EnergyProblem P(cyl, F, f, std::move(base), 0);
  return solve_problem(P, opts, SolutionRole::w_ell);
}

inline Solution solve_tied_ends(const CylinderSpec& spec, const IntegrandSpec& F,
                                const SourceTerm& f, double h, const SolverOptions& opts) {
  return solve_tied_ends(build_cylinder_mesh(spec, h), F, f, opts);
}

inline Solution solve_quadratic_direct(const CylinderSpec& spec, const IntegrandSpec& F,
                                       const SourceTerm& f, double h) {
  auto cyl = build_cylinder_mesh(spec, h);
  check_cylinder_integrand(F, cyl->dim());
  EnergyProblem P(cyl, F, f, Field::zeros(cyl), 0);
  return solve_quadratic_direct(P, SolutionRole::u_ell);
}

inline Solution solve_quadratic_direct(const CrossSection& omega2, const IntegrandSpec& F,
                                       const SourceTerm& f, double h) {
  auto cross = build_cross_section_mesh(omega2, h);
  check_cylinder_integrand(F, cross->dim() + 1);
  EnergyProblem P(cross, F, f, Field::zeros(cross), 1);
  return solve_quadratic_direct(P, SolutionRole::u_infty);
}

/// Discrete energy of a field for a given integrand and source; the
/// grad_offset is inferred (cross-section meshes use F(0, .)).
inline double assemble_energy(const Field& u, const IntegrandSpec& F, const SourceTerm& f,
                              const Region* region = nullptr) {
  const int off = u.mesh->has_x1_axis() ? 0 : 1;
  EnergyProblem P(u.mesh, F, f, u, off);
  return P.energy(u, region);
}

/// Subgradient of the discrete energy with respect to the free dofs of u.
inline std::vector<double> assemble_subgradient(const Field& u, const IntegrandSpec& F,
                                                const SourceTerm& f) {
  const int off = u.mesh->has_x1_axis() ? 0 : 1;
  EnergyProblem P(u.mesh, F, f, u, off);
  std::vector<double> g(P.ndof());
  P.value_and_gradient(P.initial_dofs(), g);
  return g;
}

}  // namespace cylvar

// Energy assembly, minimization and the direct quadratic solve.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cylvar/solver.hpp"

using namespace cylvar;

namespace {

const CrossSection kUnit{{Interval{0.0, 1.0}}};

SolverOptions iterative(double grad_tol = 1e-11) {
  SolverOptions o;
  o.method = SolveMethod::iterative;
  o.grad_tol = grad_tol;
  o.energy_tol = 0.0;
  return o;
}

Field random_feasible(std::shared_ptr<const Mesh> m, Constraint c, std::uint64_t seed, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  const auto dm = DofMap::build(*m, c);
  std::vector<double> x(static_cast<std::size_t>(dm.ndof));
  for (double& v : x) v = u(rng);
  Field f = Field::zeros(m, c);
  dm.scatter(x, f.values);
  return f;
}

// Discrete q=4 source energy on (-2, 2) with nodes at -2..2 and h = 1:
// sum over cells |u_{k+1} - u_k|^4 - gamma (u1 + u2 + u3).
double chain_energy(const std::array<double, 5>& u, double gamma) {
  double e = 0.0;
  for (int k = 0; k < 4; ++k) e += std::pow(u[k + 1] - u[k], 4);
  return e - gamma * (u[1] + u[2] + u[3]);
}

// Coordinate descent, each coordinate minimized by Newton's method to 1e-12.
std::array<double, 5> chain_oracle(double gamma) {
  std::array<double, 5> u{};
  for (int sweep = 0; sweep < 20000; ++sweep) {
    double moved = 0.0;
    for (int i = 1; i <= 3; ++i) {
      double x = u[i];
      for (int it = 0; it < 100; ++it) {
        const double a = x - u[i - 1], b = x - u[i + 1];
        const double g = 4 * a * a * a + 4 * b * b * b - gamma;
        const double H = 12 * a * a + 12 * b * b;
        if (H == 0.0) {
          x += 1e-3;
          continue;
        }
        const double dx = g / H;
        x -= dx;
        if (std::abs(dx) < 1e-12) break;
      }
      moved = std::max(moved, std::abs(x - u[i]));
      u[i] = x;
    }
    if (moved < 1e-13) break;
  }
  return u;
}

}  // namespace

TEST(Energy, AssembleExamples) {
  auto cyl = build_cylinder_mesh({2.0, kUnit}, 0.125);
  const auto F = IntegrandSpec::power(2.0, 2);
  EXPECT_EQ(assemble_energy(Field::zeros(cyl), F, SourceTerm::constant(1.0)), 0.0);
  const Field u = random_feasible(cyl, Constraint::dirichlet_all, 4);
  EXPECT_GT(assemble_energy(u, F, SourceTerm::constant(0.0)), 0.0);
}

TEST(Energy, CrossSectionInterpolantApproachesClosedForm) {
  const auto F = IntegrandSpec::power(2.0, 2);
  double prev = INFINITY;
  for (double h : {1.0 / 8, 1.0 / 32, 1.0 / 128}) {
    auto cross = build_cross_section_mesh(kUnit, h);
    auto u = Field::interpolate(cross, [](auto x) { return x[0] * (1 - x[0]) / 4; });
    const double err = std::abs(assemble_energy(u, F, SourceTerm::constant(1.0)) + 1.0 / 48);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(Energy, SubgradientZeroAtOriginWithoutSource) {
  auto cyl = build_cylinder_mesh({2.0, kUnit}, 0.25);
  for (const auto& F : {IntegrandSpec::power(2.0, 2), IntegrandSpec::power(4.0, 2)}) {
    const auto g = assemble_subgradient(Field::zeros(cyl), F, SourceTerm::constant(0.0));
    for (double v : g) EXPECT_EQ(v, 0.0);
  }
}

TEST(Energy, SubgradientVanishesAtDirectMinimizer) {
  auto cyl = build_cylinder_mesh({3.0, kUnit}, 0.125);
  const auto F = IntegrandSpec::quadratic_form({1, 0, 0, 2}, 2);
  const auto f = SourceTerm::constant(1.0);
  EnergyProblem P(cyl, F, f, Field::zeros(cyl), 0);
  const Solution s = solve_quadratic_direct(P);
  const auto g = assemble_subgradient(s.field, F, f);
  // scale: the load on one node
  const double scale = cyl->element_volume() * 3;
  for (double v : g) EXPECT_LE(std::abs(v), 1e-8 * scale);
}

TEST(Energy, SubgradientMatchesFiniteDifferences) {
  auto cyl = build_cylinder_mesh({2.0, kUnit}, 0.25);
  const auto f = SourceTerm::polynomial({1.0, -0.5});
  auto aniso = IntegrandSpec::aniso_max(3.0, 0.7, 2);
  aniso.smoothing_mu = 0.05;
  for (const auto& F : {IntegrandSpec::power(2.0, 2), IntegrandSpec::power(4.0, 2),
                        IntegrandSpec::quadratic_form({2, 0.5, 0.5, 1}, 2), aniso}) {
    EnergyProblem P(cyl, F, f, Field::zeros(cyl), 0);
    for (std::uint64_t k = 0; k < 10; ++k) {
      const Field u = random_feasible(cyl, Constraint::dirichlet_all, 100 + k);
      const Field d = random_feasible(cyl, Constraint::dirichlet_all, 200 + k);
      auto x = P.dofs().gather(u.values);
      auto dx = P.dofs().gather(d.values);
      std::vector<double> g(x.size());
      P.value_and_gradient(x, g);
      double gd = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) gd += g[i] * dx[i];
      const double t = 1e-5;
      auto xp = x, xm = x;
      for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] += t * dx[i];
        xm[i] -= t * dx[i];
      }
      const double fd = (P.value(xp) - P.value(xm)) / (2 * t);
      EXPECT_NEAR(gd, fd, 1e-5 * std::max(1.0, std::abs(fd))) << to_string(F.kind) << " q=" << F.q;
    }
  }
}

TEST(Solver, ZeroSourceGivesZero) {
  auto cyl = build_cylinder_mesh({2.0, kUnit}, 0.125);
  // the density is degenerate at 0 for q > 2: the residual scales like |u|^{q-1}
  for (const auto& F : {IntegrandSpec::power(2.0, 2), IntegrandSpec::power(3.0, 2), IntegrandSpec::power(4.0, 2)}) {
    EnergyProblem P(cyl, F, SourceTerm::constant(0.0), random_feasible(cyl, Constraint::dirichlet_all, 7), 0);
    const Solution s = minimize(P, iterative(1e-30));
    EXPECT_LE(s.field.sup_norm(), 1e-8) << "q=" << F.q;
    EXPECT_LE(s.energy, s.initial_energy);
  }
}

TEST(Solver, IterativeMatchesDirect) {
  const CylinderSpec spec{4.0, kUnit};
  const auto F = IntegrandSpec::quadratic_form({1, 0, 0, 1}, 2);
  const auto f = SourceTerm::constant(1.0);
  const Solution it = solve_cylinder(spec, F, f, 1.0 / 16, iterative());
  const Solution dir = solve_quadratic_direct(spec, F, f, 1.0 / 16);
  EXPECT_TRUE(it.converged);
  EXPECT_LE(std::abs(it.energy - dir.energy) / std::abs(dir.energy), 1e-6);
  EXPECT_LE((it.field - dir.field).sup_norm() / dir.field.sup_norm(), 1e-5);
}

TEST(Solver, CoordinateDescentOracleQ4) {
  auto m = build_interval_mesh(2.0, 1.0);
  ASSERT_EQ(m->node_count(), 5u);
  EnergyProblem P(m, IntegrandSpec::power(4.0, 1), SourceTerm::constant(1.0), Field::zeros(m), 0);
  const Solution s = minimize(P, iterative(1e-13));
  const auto u = chain_oracle(1.0);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(s.field.values[i], u[i], 1e-6);
  EXPECT_NEAR(s.energy, chain_energy(u, 1.0), 1e-9);
}

TEST(Solver, MaxItersReturnsPartialResult) {
  auto cyl = build_cylinder_mesh({4.0, kUnit}, 1.0 / 16);
  EnergyProblem P(cyl, IntegrandSpec::power(4.0, 2), SourceTerm::constant(1.0), Field::zeros(cyl), 0);
  SolverOptions o = iterative(0.0);
  o.max_iters = 3;
  const Solution s = minimize(P, o);
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.stop_reason, "max_iters reached");
  EXPECT_LT(s.energy, 0.0);
}

TEST(Solver, OptionsValidated) {
  SolverOptions o;
  o.armijo_c = 1.0;
  EXPECT_THROW(o.validate(), InputError);
  o = {};
  o.backtrack_rho = 0.0;
  EXPECT_THROW(o.validate(), InputError);
}

TEST(Solver, CylinderExamples) {
  const CylinderSpec spec{3.0, kUnit};
  for (const auto& F : {IntegrandSpec::power(2.0, 2), IntegrandSpec::power(4.0, 2)}) {
    const auto u_inf = solve_cross_section(kUnit, F, SourceTerm::constant(1.0), 1.0 / 16, iterative());
    const Solution u = solve_cylinder(spec, F, SourceTerm::constant(1.0), 1.0 / 16, iterative());
    EXPECT_LE(u.energy, 0.0);
    const double top = u_inf.field.sup_norm();
    for (double v : u.field.values) {
      EXPECT_GE(v, -1e-10);
      EXPECT_LE(v, top + 1e-8 * top);
    }
    const Solution z = solve_cylinder(spec, F, SourceTerm::constant(0.0), 1.0 / 16, iterative());
    EXPECT_EQ(z.field.sup_norm(), 0.0);
  }
}

TEST(Solver, CrossSectionClosedForm) {
  const auto F = IntegrandSpec::power(2.0, 2);
  for (const auto opts : {iterative(1e-13), SolverOptions{}}) {
    const Solution u = solve_cross_section(kUnit, F, SourceTerm::constant(1.0), 1.0 / 32, opts);
    const Mesh& m = *u.field.mesh;
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      const double x = m.coord(i, 0);
      EXPECT_NEAR(u.field.values[i], x * (1 - x) / 4, 1e-10);
    }
    EXPECT_NEAR(u.field.values[16], 1.0 / 16, 1e-10);
  }
  const Solution z = solve_cross_section(kUnit, F, SourceTerm::constant(0.0), 1.0 / 32, iterative());
  EXPECT_EQ(z.field.sup_norm(), 0.0);
}

TEST(Solver, TiedEndsReproduceCrossSection) {
  const CylinderSpec spec{4.0, kUnit};
  const double h = 1.0 / 16;
  for (const auto& F : {IntegrandSpec::power(2.0, 2), IntegrandSpec::power(4.0, 2)}) {
    const auto opts = iterative(1e-12);
    auto cyl = build_cylinder_mesh(spec, h);
    const Solution u_inf = solve_cross_section(spec.omega2, F, SourceTerm::constant(1.0), h, opts);
    const Solution w = solve_tied_ends(cyl, F, SourceTerm::constant(1.0), opts);
    EXPECT_EQ(w.role, SolutionRole::w_ell);
    EXPECT_EQ(constraint_violation(w.field), 0.0);
    EXPECT_LE(grad_q_norm(w.field - extend_in_x1(u_inf.field, cyl), F.q), 1e-6) << "q=" << F.q;
    EXPECT_NEAR(w.energy / (2 * spec.ell), u_inf.energy, 1e-6 * std::abs(u_inf.energy));
    const Solution z = solve_tied_ends(cyl, F, SourceTerm::constant(0.0), opts);
    EXPECT_EQ(z.field.sup_norm(), 0.0);
  }
}

TEST(Solver, DirectOneDimensionalParabola) {
  // int |u'|^2 - gamma u gives u = gamma (ell^2 - x^2) / 4
  const double gamma = 3.0, ell = 2.0;
  auto m = build_interval_mesh(ell, 1.0 / 8);
  EnergyProblem P(m, IntegrandSpec::quadratic_form({1.0}, 1), SourceTerm::constant(gamma), Field::zeros(m), 0);
  const Solution s = solve_quadratic_direct(P);
  for (std::size_t i = 0; i < m->node_count(); ++i) {
    const double x = m->coord(i, 0);
    EXPECT_NEAR(s.field.values[i], gamma * (ell * ell - x * x) / 4, 1e-12);
  }
  EnergyProblem Z(m, IntegrandSpec::quadratic_form({1.0}, 1), SourceTerm::constant(0.0), Field::zeros(m), 0);
  EXPECT_EQ(solve_quadratic_direct(Z).field.sup_norm(), 0.0);
  EnergyProblem Q(m, IntegrandSpec::power(4.0, 1), SourceTerm::constant(1.0), Field::zeros(m), 0);
  EXPECT_THROW(solve_quadratic_direct(Q), InputError);
}

TEST(Solver, AnisoMaxRunsSmoothingSchedule) {
  const CylinderSpec spec{2.0, kUnit};
  auto F = IntegrandSpec::aniso_max(2.0, 1.0, 2);
  auto cyl = build_cylinder_mesh(spec, 1.0 / 8);
  EnergyProblem P(cyl, F, SourceTerm::constant(1.0), Field::zeros(cyl), 0);
  const Solution s = minimize(P, iterative(1e-10));
  EXPECT_LT(s.energy, 0.0);
  EXPECT_EQ(P.integrand().smoothing_mu, 0.0);
  ASSERT_TRUE(s.certificate.has_value());
  EXPECT_GE(*s.certificate, 0.0);
  // no feasible perturbation improves on the result
  for (std::uint64_t k = 0; k < 5; ++k) {
    const Field d = random_feasible(cyl, Constraint::dirichlet_all, 50 + k, 1e-3);
    Field v = s.field;
    for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] += d.values[i];
    EXPECT_GE(P.energy(v), s.energy - 1e-9);
  }
}

// ---------------------------------------------------------------- properties

TEST(SolverProperty, EnergyNonincreasingAlongIterates) {
  auto cyl = build_cylinder_mesh({3.0, kUnit}, 1.0 / 16);
  for (const auto& F : {IntegrandSpec::power(2.0, 2), IntegrandSpec::power(4.0, 2)}) {
    EnergyProblem P(cyl, F, SourceTerm::constant(1.0), random_feasible(cyl, Constraint::dirichlet_all, 3, 0.1), 0);
    SolverOptions o = iterative();
    o.record_trace = true;
    const Solution s = minimize(P, o);
    ASSERT_GT(s.trace.size(), 2u);
    for (std::size_t i = 1; i < s.trace.size(); ++i)
      EXPECT_LE(s.trace[i].energy, s.trace[i - 1].energy + 1e-15 * std::abs(s.trace[i - 1].energy));
  }
}

TEST(SolverProperty, DirichletEnergiesNonpositiveAndAboveCrossSection) {
  const double h = 1.0 / 16;
  for (const auto& F : {IntegrandSpec::power(2.0, 2), IntegrandSpec::power(3.0, 2),
                        IntegrandSpec::quadratic_form({1.5, 0.2, 0.2, 1}, 2)})
    for (double ell : {2.0, 4.0}) {
      const auto opts = iterative(1e-12);
      const Solution u_inf = solve_cross_section(kUnit, F, SourceTerm::constant(1.0), h, opts);
      const Solution u = solve_cylinder({ell, kUnit}, F, SourceTerm::constant(1.0), h, opts);
      EXPECT_LE(u.energy, 0.0);
      EXPECT_LE(u_inf.energy, u.energy / (2 * ell) + 1e-6);
    }
}

TEST(SolverProperty, ConvexityGapBoundsDistance) {
  const double h = 1.0 / 16;
  for (const auto& F : {IntegrandSpec::power(2.0, 2), IntegrandSpec::power(4.0, 2)}) {
    auto cyl = build_cylinder_mesh({2.0, kUnit}, h);
    EnergyProblem P(cyl, F, SourceTerm::constant(1.0), Field::zeros(cyl), 0);
    const Solution s = minimize(P, iterative(1e-13));
    for (std::uint64_t k = 0; k < 5; ++k) {
      const Field d = random_feasible(cyl, Constraint::dirichlet_all, 70 + k, 0.05);
      Field v = s.field;
      for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] += d.values[i];
      EXPECT_LE(F.alpha * grad_q_norm(v - s.field, F.q), P.energy(v) - s.energy + 1e-10) << "q=" << F.q;
    }
  }
}

TEST(SolverProperty, QuadraticOracleEquivalence) {
  const auto f = SourceTerm::polynomial({1.0, 1.0});
  for (const auto& F : {IntegrandSpec::power(2.0, 2), IntegrandSpec::quadratic_form({2, 0, 0, 1}, 2),
                        IntegrandSpec::quadratic_form({1, 0.3, 0.3, 0.8}, 2)})
    for (double ell : {2.0, 4.0}) {
      const CylinderSpec spec{ell, kUnit};
      const Solution it = solve_cylinder(spec, F, f, 1.0 / 16, iterative());
      const Solution dir = solve_quadratic_direct(spec, F, f, 1.0 / 16);
      EXPECT_LE(std::abs(it.energy - dir.energy) / std::abs(dir.energy), 1e-6);
    }
  // cross-section and a rectangular cross-section in three dimensions
  const CrossSection rect{{Interval{0, 1}, Interval{0, 1}}};
  const auto F3 = IntegrandSpec::power(2.0, 3);
  const Solution a = solve_cross_section(rect, F3, SourceTerm::constant(1.0), 0.125, iterative());
  const Solution b = solve_quadratic_direct(rect, F3, SourceTerm::constant(1.0), 0.125);
  EXPECT_LE(std::abs(a.energy - b.energy) / std::abs(b.energy), 1e-6);
  const Solution c = solve_cylinder({2.0, rect}, F3, SourceTerm::constant(1.0), 0.25, iterative());
  const Solution d = solve_quadratic_direct(CylinderSpec{2.0, rect}, F3, SourceTerm::constant(1.0), 0.25);
  EXPECT_LE(std::abs(c.energy - d.energy) / std::abs(d.energy), 1e-6);
}

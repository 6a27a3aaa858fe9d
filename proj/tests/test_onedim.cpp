// One-dimensional source and coercive problems against closed forms.

#include <gtest/gtest.h>

#include <cmath>

#include "cylvar/onedim.hpp"

using namespace cylvar;

namespace {

std::vector<IntegrandSpec> builtins_1d() {
  return {IntegrandSpec::quadratic_form({0.5}, 1), IntegrandSpec::power(2.0, 1), IntegrandSpec::power(3.0, 1),
          IntegrandSpec::power(4.0, 1), IntegrandSpec::aniso_max(2.0, 1.0, 1)};
}

SolverOptions tight() {
  SolverOptions o;
  o.energy_tol = 0.0;
  o.grad_tol = 1e-12;
  return o;
}

// v = cosh x / cosh ell solves -v'' + v = 0 with v(+-ell) = 1.
double cosh_profile(double x, double ell) { return std::cosh(x) / std::cosh(ell); }

}  // namespace

TEST(Parabola, Examples) {
  EXPECT_DOUBLE_EQ(explicit_parabola(1.0, 2.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(explicit_parabola(2.0, 3.0, 1.0), 8.0);
  EXPECT_EQ(explicit_parabola(5.0, 3.0, 3.0), 0.0);
  EXPECT_EQ(explicit_parabola(5.0, 3.0, -3.0), 0.0);
  EXPECT_THROW(explicit_parabola(1.0, 2.0, 2.5), InputError);
}

TEST(SourceProblem, QuadraticIsNodallyExact) {
  for (double h : {0.5, 0.25, 1.0 / 16, 1.0 / 64}) {
    const Solution u = solve_source_1d({1.0, 2.0}, h, {});
    const Mesh& m = *u.field.mesh;
    for (std::size_t i = 0; i < m.node_count(); ++i)
      EXPECT_NEAR(u.field.values[i], explicit_parabola(1.0, 2.0, m.coord(i, 0)), 1e-8) << "h=" << h;
  }
  SolverOptions it = tight();
  it.method = SolveMethod::iterative;
  const Solution u = solve_source_1d({1.0, 2.0}, 1.0 / 16, it);
  for (std::size_t i = 0; i < u.field.values.size(); ++i)
    EXPECT_NEAR(u.field.values[i], explicit_parabola(1.0, 2.0, u.field.mesh->coord(i, 0)), 1e-8);
}

TEST(SourceProblem, QuarticPeak) {
  // 4|u'|^2 u' = -x gives u(0) = (3/4) 4^{-1/3} ell^{4/3}
  const double ell = 2.0;
  const double peak = 0.75 * std::cbrt(0.25) * std::pow(ell, 4.0 / 3.0);
  const Solution u = solve_source_1d({1.0, ell, IntegrandSpec::power(4.0, 1)}, 1.0 / 64, tight());
  EXPECT_NEAR(value_at_origin(u.field), peak, 0.01 * peak);
  EXPECT_NEAR(peak, 1.1905, 1e-4);
}

TEST(SourceProblem, GrowsWithEll) {
  for (const auto& F : builtins_1d()) {
    const double u4 = value_at_origin(solve_source_1d({1.0, 4.0, F}, 1.0 / 16, tight()).field);
    const double u8 = value_at_origin(solve_source_1d({1.0, 8.0, F}, 1.0 / 16, tight()).field);
    EXPECT_GT(u8, u4) << to_string(F.kind) << " q=" << F.q;
  }
}

TEST(SourceProblem, InvalidSpecRejected) {
  EXPECT_THROW(solve_source_1d({0.0, 2.0}, 0.1, {}), InputError);
  EXPECT_THROW(solve_source_1d({1.0, 2.0, IntegrandSpec::power(2.0, 2)}, 0.1, {}), InputError);
}

TEST(Unimodal, Examples) {
  const Solution p = solve_source_1d({1.0, 2.0}, 1.0 / 16, {});
  auto rep = check_unimodal(p);
  EXPECT_EQ(rep.argmax_x, 0.0);
  EXPECT_TRUE(rep.pass());
  auto m = build_interval_mesh(2.0, 0.25);
  EXPECT_TRUE(check_unimodal(Field::zeros(m)).pass());
  const Solution q4 = solve_source_1d({1.0, 3.0, IntegrandSpec::power(4.0, 1)}, 1.0 / 32, tight());
  EXPECT_EQ(check_unimodal(q4).violations, 0);
  Field bumpy = Field::interpolate(m, [](auto x) { return std::cos(3.0 * x[0]) + 2.0; });
  EXPECT_FALSE(check_unimodal(bumpy).pass());
}

TEST(Coercive, CoshProfile) {
  const OneDimCoerciveSpec spec;  // F = xi^2, q = 2, a = b = 1
  const Solution v = solve_coercive_1d(spec, 3.0, 1.0 / 64, {});
  EXPECT_NEAR(value_at_origin(v.field), 1.0 / std::cosh(3.0), 0.02 / std::cosh(3.0));
  const Mesh& m = *v.field.mesh;
  for (std::size_t i = 0; i < m.node_count(); ++i)
    EXPECT_NEAR(v.field.values[i], cosh_profile(m.coord(i, 0), 3.0), 1e-3);
  SolverOptions it = tight();
  it.method = SolveMethod::iterative;
  const Solution w = solve_coercive_1d(spec, 3.0, 1.0 / 64, it);
  EXPECT_LE((w.field - v.field).sup_norm(), 1e-7);
}

TEST(Coercive, BoundsAndEndpoints) {
  const OneDimCoerciveSpec spec;
  for (double ell : {2.0, 5.0}) {
    const Solution v = solve_coercive_1d(spec, ell, 1.0 / 32, {});
    const auto rep = check_coercive_bounds(v.field, spec);
    EXPECT_TRUE(rep.pass());
    EXPECT_EQ(rep.max_v, 1.0);
    EXPECT_EQ(v.field.values.front(), 1.0);
    EXPECT_EQ(v.field.values.back(), 1.0);
  }
}

// int v'^2 + v^2 = [v v'] = 2 tanh(ell): increasing in ell, bounded by 2.
TEST(Coercive, TotalEnergyUniformlyBounded) {
  const OneDimCoerciveSpec spec;
  for (double ell : {2.0, 4.0, 8.0, 16.0}) {
    const Solution v = solve_coercive_1d(spec, ell, 1.0 / 64, {});
    const double total = coercive_mass(v.field, 2.0);
    EXPECT_NEAR(total, 2.0 * std::tanh(ell), 2e-3);
    EXPECT_LE(total, 2.0 + 2e-3);
  }
}

TEST(MidDecay, QuadraticRate) {
  const auto d = fit_middecay({}, {2, 4, 8, 16}, 1.0 / 64, {});
  ASSERT_TRUE(d.fit.has_value());
  EXPECT_GE(d.fit->rate, 0.85);
  EXPECT_LE(d.fit->rate, 1.15);
  for (std::size_t i = 0; i < d.ell.size(); ++i) {
    // closed form m = sinh(ell) / cosh(ell)^2
    const double exact = std::sinh(d.ell[i]) / std::pow(std::cosh(d.ell[i]), 2);
    EXPECT_NEAR(d.m_mid[i], exact, 0.01 * exact);
  }
}

TEST(MidDecay, Examples) {
  const std::vector<double> ell{1, 2, 3, 4};
  std::vector<double> m;
  for (double x : ell) m.push_back(std::exp(-x));
  const auto f = fit_exponential(ell, m);
  EXPECT_NEAR(f.rate, 1.0, 1e-12);
  OneDimCoerciveSpec zero;
  zero.bv_left = zero.bv_right = 0.0;
  const auto d = fit_middecay(zero, {2, 4, 8}, 1.0 / 16, {});
  EXPECT_FALSE(d.fit.has_value());
  EXPECT_FALSE(d.note.empty());
  for (double v : d.max_v) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(fit_middecay({}, {2, 4}, 1.0 / 16, {}), InputError);
}

TEST(RunOneDim, BlowupAndDecay) {
  const auto r = run_onedim(1.0, IntegrandSpec::quadratic_form({0.5}, 1), {}, {2, 4, 8, 16}, 1.0 / 32, {});
  EXPECT_TRUE(r.blowup_ok);
  ASSERT_EQ(r.records.size(), 4u);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.violations, 0);
    EXPECT_NEAR(rec.u_at_0, rec.ell * rec.ell / 2, 1e-8);
  }
}

// ---------------------------------------------------------------- properties

TEST(OneDimProperty, SourceSolutionsNonnegativeUnimodal) {
  for (const auto& F : builtins_1d())
    for (double gamma : {0.5, 2.0}) {
      const Solution u = solve_source_1d({gamma, 3.0, F}, 1.0 / 32, tight());
      const auto rep = check_unimodal(u);
      EXPECT_EQ(rep.violations, 0) << to_string(F.kind) << " q=" << F.q;
      EXPECT_EQ(rep.negative, 0);
    }
}

TEST(OneDimProperty, PeakStrictlyIncreasing) {
  for (const auto& F : builtins_1d()) {
    double prev = 0.0;
    for (double ell : {2.0, 4.0, 8.0, 16.0}) {
      const double u0 = value_at_origin(solve_source_1d({1.0, ell, F}, 1.0 / 16, tight()).field);
      EXPECT_GT(u0, prev) << to_string(F.kind) << " q=" << F.q << " ell=" << ell;
      prev = u0;
    }
  }
}

TEST(OneDimProperty, CoerciveBoundsForUnequalEnds) {
  for (double q : {2.0, 3.0, 4.0}) {
    OneDimCoerciveSpec spec;
    spec.bv_left = 2.0;
    spec.bv_right = 0.5;
    spec.q = q;
    spec.F = IntegrandSpec::power(q, 1);
    const Solution v = solve_coercive_1d(spec, 4.0, 1.0 / 32, tight());
    EXPECT_TRUE(check_coercive_bounds(v.field, spec).pass()) << "q=" << q;
  }
}

TEST(OneDimProperty, MidMassStrictlyDecreasing) {
  for (double q : {2.0, 3.0}) {
    OneDimCoerciveSpec spec;
    spec.q = q;
    spec.F = IntegrandSpec::power(q, 1);
    const auto d = fit_middecay(spec, {2, 4, 6, 8}, 1.0 / 32, tight());
    for (std::size_t i = 1; i < d.m_mid.size(); ++i) EXPECT_LT(d.m_mid[i], d.m_mid[i - 1]) << "q=" << q;
  }
}

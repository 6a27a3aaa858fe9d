// Densities, subgradients and the structural audits.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cylvar/audit.hpp"
#include "cylvar/integrand.hpp"

using namespace cylvar;

namespace {

std::vector<IntegrandSpec> builtins(int n) {
  std::vector<double> a(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i * n + i)] = 1.0 + i;
  return {IntegrandSpec::power(2.0, n), IntegrandSpec::power(3.0, n), IntegrandSpec::power(4.0, n),
          IntegrandSpec::quadratic_form(a, n), IntegrandSpec::aniso_max(2.0, 1.0, n),
          IntegrandSpec::aniso_max(4.0, 0.5, n)};
}

Vec random_vec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Vec v(static_cast<std::size_t>(n));
  for (double& x : v) x = g(rng);
  return v;
}

double diff_quotient(const IntegrandSpec& F, const Vec& xi, const Vec& d, double t) {
  Vec y = xi;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * d[i];
  return (evaluate(F, y) - evaluate(F, xi)) / t;
}

}  // namespace

TEST(Integrand, EvaluateExamples) {
  EXPECT_DOUBLE_EQ(evaluate(IntegrandSpec::power(2.0, 2), Vec{3.0, 4.0}), 25.0);
  EXPECT_DOUBLE_EQ(evaluate(IntegrandSpec::quadratic_form({2, 0, 0, 1}, 2), Vec{1.0, 1.0}), 3.0);
  for (const auto& F : builtins(3)) EXPECT_EQ(evaluate(F, Vec{0.0, 0.0, 0.0}), 0.0);
}

TEST(Integrand, DimensionMismatchRejected) {
  const auto F = IntegrandSpec::power(2.0, 2);
  EXPECT_THROW(evaluate(F, Vec{1.0, 2.0, 3.0}), InputError);
  EXPECT_THROW(subgradient(F, Vec{1.0}), InputError);
}

TEST(Integrand, InvalidSpecsRejected) {
  EXPECT_THROW(IntegrandSpec::quadratic_form({1, 2, 0, 1}, 2).validate(), InputError);
  EXPECT_THROW(IntegrandSpec::quadratic_form({1, 0, 0, -1}, 2).validate(), InputError);
  EXPECT_THROW(IntegrandSpec::power(1.5, 2).validate(), InputError);
  auto F = IntegrandSpec::power(2.0, 2);
  F.lambda_hi = 0.5;
  EXPECT_THROW(F.validate(), InputError);
  EXPECT_THROW(IntegrandSpec::aniso_max(2.0, 0.0, 2).validate(), InputError);
}

TEST(Integrand, SubgradientExamples) {
  auto g = subgradient(IntegrandSpec::power(2.0, 2), Vec{3.0, 4.0});
  EXPECT_DOUBLE_EQ(g[0], 6.0);
  EXPECT_DOUBLE_EQ(g[1], 8.0);
  g = subgradient(IntegrandSpec::power(4.0, 3), Vec{0.0, 0.0, 0.0});
  for (double x : g) EXPECT_EQ(x, 0.0);
  g = subgradient(IntegrandSpec::aniso_max(2.0, 1.0, 2), Vec{1.0, 1.0});
  EXPECT_DOUBLE_EQ(g[0], 3.0);
  EXPECT_DOUBLE_EQ(g[1], 3.0);
}

// A subgradient g satisfies g.d <= F'(xi; d) for every direction, and the
// forward difference quotient of a convex function bounds F'(xi; d) above.
TEST(Integrand, TieSubgradientBelowDirectionalDerivatives) {
  const auto F = IntegrandSpec::aniso_max(2.0, 1.0, 2);
  const Vec xi{1.0, 1.0};
  const Vec g = subgradient(F, xi);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const Vec d = random_vec(rng, 2);
    const double gd = g[0] * d[0] + g[1] * d[1];
    EXPECT_LE(gd, diff_quotient(F, xi, d, 1e-7) + 1e-6);
  }
  // along (1,-1) the max term grows at rate 2 either way; g.d = 0 sits inside [-2, 2]
  EXPECT_NEAR(diff_quotient(F, xi, {1.0, -1.0}, 1e-8), 2.0, 1e-6);
  EXPECT_NEAR(diff_quotient(F, xi, {-1.0, 1.0}, 1e-8), 2.0, 1e-6);
}

TEST(Integrand, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(11);
  for (auto F : builtins(2)) {
    if (F.kind == IntegrandKind::aniso_max) F.smoothing_mu = 1e-2;
    for (int k = 0; k < 20; ++k) {
      const Vec xi = random_vec(rng, 2);
      const Vec g = subgradient(F, xi);
      for (int a = 0; a < 2; ++a) {
        Vec p = xi, m = xi;
        const double t = 1e-6;
        p[static_cast<std::size_t>(a)] += t;
        m[static_cast<std::size_t>(a)] -= t;
        const double fd = (evaluate(F, p) - evaluate(F, m)) / (2 * t);
        EXPECT_NEAR(g[static_cast<std::size_t>(a)], fd, 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST(Integrand, SmoothingApproachesMax) {
  auto F = IntegrandSpec::aniso_max(2.0, 1.0, 2);
  const Vec xi{0.3, -0.8};
  const double exact = evaluate(F, xi);
  double prev = INFINITY;
  for (double mu : {1e-1, 1e-2, 1e-4}) {
    F.smoothing_mu = mu;
    const double err = std::abs(evaluate(F, xi) - exact);
    EXPECT_LE(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Audit, ConvexityPowerQ2IsExact) {
  const auto F = IntegrandSpec::power(2.0, 2);
  const auto rep = check_uniform_convexity(F, 0.5, 10000, 42);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(std::abs(rep.worst_margin), 1e-12);
  EXPECT_FALSE(check_uniform_convexity(F, 0.6, 10000, 42).pass);
  EXPECT_FALSE(check_uniform_convexity(F, 0.51, 10000, 42).pass);
}

TEST(Audit, ConvexityQuadraticFormSharpAlpha) {
  const auto F = IntegrandSpec::quadratic_form({2, 0, 0, 1}, 2);
  EXPECT_TRUE(check_uniform_convexity(F, 0.5, 10000, 1).pass);
  const auto bad = check_uniform_convexity(F, 0.51, 10000, 1);
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(bad.sampled_sharp, 0.5, 1e-9);
}

TEST(Audit, UpperModulus) {
  const auto rep = check_upper_modulus(IntegrandSpec::power(2.0, 2), 0.5, 10000, 5);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(std::abs(rep.worst_margin), 1e-12);
  EXPECT_TRUE(check_upper_modulus(IntegrandSpec::quadratic_form({2, 0, 0, 1}, 2), 1.0, 10000, 5).pass);
  EXPECT_FALSE(check_upper_modulus(IntegrandSpec::quadratic_form({2, 0, 0, 1}, 2), 0.9, 10000, 5).pass);
  EXPECT_THROW(check_upper_modulus(IntegrandSpec::power(4.0, 2), 0.5, 100, 5), InputError);
}

TEST(Audit, GrowthEnvelope) {
  for (double q : {2.0, 3.0, 4.0}) {
    const auto rep = check_growth(IntegrandSpec::power(q, 2), 2000, 9);
    EXPECT_NEAR(rep.lambda_hat, 1.0, 1e-12);
    EXPECT_NEAR(rep.Lambda_hat, 1.0, 1e-12);
    EXPECT_TRUE(rep.pass);
  }
  auto A = IntegrandSpec::quadratic_form({2, 0, 0, 1}, 2);
  auto rep = check_growth(A, 20000, 9);
  EXPECT_NEAR(rep.lambda_hat, 1.0, 1e-3);
  EXPECT_NEAR(rep.Lambda_hat, 2.0, 1e-3);
  EXPECT_TRUE(rep.pass);
  // |xi|^4 against a declared quadratic envelope
  EXPECT_FALSE(check_growth(IntegrandSpec::power(4.0, 2), 2000, 9, 2.0).pass);
}

TEST(Audit, LipschitzExamples) {
  auto r = check_lipschitz_estimate(IntegrandSpec::power(2.0, 2), {0, 0}, {1, 0});
  EXPECT_DOUBLE_EQ(r.lhs, 1.0);
  EXPECT_DOUBLE_EQ(r.rhs, 4.0);
  EXPECT_TRUE(r.pass);
  r = check_lipschitz_estimate(IntegrandSpec::power(4.0, 2), {1, 0}, {2, 0});
  EXPECT_DOUBLE_EQ(r.lhs, 15.0);
  EXPECT_DOUBLE_EQ(r.rhs, 128.0);
  r = check_lipschitz_estimate(IntegrandSpec::power(4.0, 2), {1, 2}, {1, 2});
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(Audit, DerivedAlpha) {
  auto rep = derive_alpha_from_monotonicity(IntegrandSpec::power(2.0, 2), 5000, 3);
  EXPECT_NEAR(rep.a_hat, 2.0, 1e-9);
  EXPECT_NEAR(rep.alpha_derived, 0.5, 1e-9);
  EXPECT_TRUE(rep.derived_check.pass);
  rep = derive_alpha_from_monotonicity(IntegrandSpec::quadratic_form({1, 0, 0, 1}, 2), 5000, 3);
  EXPECT_NEAR(rep.alpha_derived, 0.5, 1e-9);
}

TEST(Audit, ReportsAreDeterministic) {
  const auto F = IntegrandSpec::aniso_max(4.0, 1.0, 2);
  EXPECT_EQ(check_uniform_convexity(F, F.alpha, 3000, 8).to_text(),
            check_uniform_convexity(F, F.alpha, 3000, 8).to_text());
}

// ---------------------------------------------------------------- properties

TEST(IntegrandProperty, DeclaredAlphaHoldsForBuiltins) {
  for (int n : {1, 2, 3})
    for (const auto& F : builtins(n)) {
      const auto rep = check_uniform_convexity(F, F.alpha, 10000, 17);
      EXPECT_GE(rep.worst_margin, -1e-10) << to_string(F.kind) << " q=" << F.q << " n=" << n;
    }
}

TEST(IntegrandProperty, ParallelogramIdentity) {
  const auto F = IntegrandSpec::power(2.0, 3);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10000; ++k) {
    const Vec a = random_vec(rng, 3), b = random_vec(rng, 3);
    Vec mid(3), d(3);
    double d2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      mid[i] = 0.5 * (a[i] + b[i]);
      d2 += (a[i] - b[i]) * (a[i] - b[i]);
    }
    EXPECT_NEAR(evaluate(F, a) + evaluate(F, b) - 2 * evaluate(F, mid) - 0.5 * d2, 0.0, 1e-12);
  }
}

TEST(IntegrandProperty, GrowthEnvelopeHolds) {
  std::mt19937_64 rng(4);
  for (const auto& F : builtins(2))
    for (int k = 0; k < 2000; ++k) {
      const Vec xi = random_vec(rng, 2, 10.0);
      const double r = std::pow(std::hypot(xi[0], xi[1]), F.q);
      const double v = evaluate(F, xi);
      EXPECT_GE(v, F.lambda_lo * r * (1 - 1e-12));
      EXPECT_LE(v, F.lambda_hi * r * (1 + 1e-12));
    }
}

TEST(IntegrandProperty, LipschitzEstimateHolds) {
  std::mt19937_64 rng(5);
  for (const auto& F : builtins(2))
    for (int k = 0; k < 10000; ++k)
      EXPECT_TRUE(check_lipschitz_estimate(F, random_vec(rng, 2, 3.0), random_vec(rng, 2, 3.0)).pass);
}

TEST(IntegrandProperty, SubgradientInequality) {
  std::mt19937_64 rng(6);
  for (const auto& F : builtins(2))
    for (int k = 0; k < 5000; ++k) {
      Vec xi = random_vec(rng, 2), eta = random_vec(rng, 2);
      if (k % 10 == 0) xi[1] = xi[0];  // aniso-max ties
      const Vec g = subgradient(F, xi);
      const double lin = evaluate(F, xi) + g[0] * (eta[0] - xi[0]) + g[1] * (eta[1] - xi[1]);
      EXPECT_GE(evaluate(F, eta) - lin, -1e-10 * std::max(1.0, std::abs(lin)));
    }
}

TEST(IntegrandProperty, DerivedAlphaBelowSampledSharp) {
  for (const auto& F : builtins(2)) {
    const auto m = derive_alpha_from_monotonicity(F, 4000, 12);
    const auto c = check_uniform_convexity(F, F.alpha, 4000, 12);
    ASSERT_TRUE(m.detected);
    EXPECT_LE(m.alpha_derived, c.sampled_sharp + 1e-9) << to_string(F.kind) << " q=" << F.q;
  }
}

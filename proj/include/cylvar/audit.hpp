#pragma once

// Sampling audits of the structural hypotheses on F: the midpoint
// (uniform-convexity) inequality, its reverse for q = 2, the two-sided
// q-growth envelope, the local Lipschitz bound, and a convexity modulus
// recovered from strong monotonicity of the subgradient.
//
// Pairs are drawn with log-uniform radii in [1e-3, 1e3] and uniform
// directions, after a fixed list of special pairs (origin, unit vectors,
// coordinate ties). The inequalities are homogeneous of degree q, so their
// margins are reported relative to |xi|^q + |eta|^q; otherwise the 12 decades
// of sampled scale would drown the comparison in rounding error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cylvar/integrand.hpp"
#include "cylvar/report.hpp"

namespace cylvar {

inline constexpr double kAuditTol = 1e-9;
/// Pairs with |xi - eta|^q below this fraction of |xi|^q + |eta|^q do not
/// enter the sampled sharp constant.
inline constexpr double kSharpConditioning = 1e-4;

struct AuditReport {
  std::string name;
  bool pass = true;
  double claimed = 0.0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::pair<Vec, Vec> worst_pair;
  /// Extremal constant over the samples: the "sampled sharp" modulus.
  double sampled_sharp = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_samples = 0;
  std::string message;

  std::string to_text() const {
    ReportText t;
    t.set("audit", name);
    t.set("claimed", claimed);
    t.set("message", message);
    t.set("n_samples", n_samples);
    t.set("pass", pass);
    t.set("sampled_sharp", sampled_sharp);
    t.set("worst_margin", worst_margin);
    t.set("worst_xi", worst_pair.first);
    t.set("worst_eta", worst_pair.second);
    return t.str();
  }
};

struct GrowthReport {
  double lambda_hat = std::numeric_limits<double>::infinity();
  double Lambda_hat = 0.0;
  double exponent = 2.0;
  bool pass = true;

  std::string to_text() const {
    ReportText t;
    t.set("Lambda_hat", Lambda_hat);
    t.set("audit", std::string("growth"));
    t.set("exponent", exponent);
    t.set("lambda_hat", lambda_hat);
    t.set("pass", pass);
    return t.str();
  }
};

struct LipschitzReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

struct MonotonicityReport {
  double a_hat = 0.0;
  double alpha_derived = 0.0;
  bool detected = false;
  std::string message;
  AuditReport derived_check;  ///< convexity audit run at alpha_derived
};

namespace detail {

/// Sample stream: special pairs first, then random pairs.
class PairSampler {
public:
  PairSampler(int n, std::uint64_t seed, bool include_special = true) : n_(n), rng_(seed) {
    if (!include_special) return;
    const Vec zero(static_cast<std::size_t>(n), 0.0);
    special_.emplace_back(zero, zero);
    for (int i = 0; i < n; ++i) {
      Vec e = zero;
      e[static_cast<std::size_t>(i)] = 1.0;
      Vec me = e;
      me[static_cast<std::size_t>(i)] = -1.0;
      special_.emplace_back(zero, e);
      special_.emplace_back(e, me);
    }
    if (n >= 2) {
      // coordinate ties, the kinks of the max-type term
      Vec ones(static_cast<std::size_t>(n), 1.0);
      Vec alt = ones;
      for (std::size_t i = 1; i < alt.size(); i += 2) alt[i] = -1.0;
      special_.emplace_back(ones, alt);
      special_.emplace_back(ones, zero);
      Vec e0 = zero;
      e0[0] = 2.0;
      special_.emplace_back(ones, e0);
      // step along a coordinate that is not the active max at either end
      Vec side = e0;
      side[static_cast<std::size_t>(n - 1)] = 1.0;
      special_.emplace_back(e0, side);
    }
  }

  std::pair<Vec, Vec> next() {
    if (pos_ < special_.size()) return special_[pos_++];
    return {draw(), draw()};
  }

  Vec draw() {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> logr(-3.0, 3.0);
    Vec v(static_cast<std::size_t>(n_));
    double r2 = 0.0;
    do {
      r2 = 0.0;
      for (double& x : v) {
        x = gauss(rng_);
        r2 += x * x;
      }
    } while (r2 == 0.0);
    const double radius = std::pow(10.0, logr(rng_));
    const double s = radius / std::sqrt(r2);
    for (double& x : v) x *= s;
    return v;
  }

private:
  int n_;
  std::mt19937_64 rng_;
  std::vector<std::pair<Vec, Vec>> special_;
  std::size_t pos_ = 0;
};

inline Vec midpoint(const Vec& a, const Vec& b) {
  Vec m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
  return m;
}

inline double dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

/// F(xi) + F(eta) - 2 F((xi + eta)/2)
inline double midpoint_gap(const IntegrandSpec& spec, const Vec& xi, const Vec& eta) {
  return evaluate(spec, xi) + evaluate(spec, eta) - 2.0 * evaluate(spec, midpoint(xi, eta));
}

inline double pair_scale(double q, const Vec& xi, const Vec& eta) {
  return radial_pow(norm2(xi), q) + radial_pow(norm2(eta), q);
}

}  // namespace detail

/// Audits 2F(mid) + alpha |xi - eta|^q <= F(xi) + F(eta).
inline AuditReport check_uniform_convexity(const IntegrandSpec& spec, double alpha_claim,
                                           std::size_t n_samples, std::uint64_t seed) {
  detail::require(n_samples >= 1, "n_samples must be >= 1");
  AuditReport rep;
  rep.name = "uniform-convexity";
  rep.claimed = alpha_claim;
  rep.n_samples = n_samples;
  rep.sampled_sharp = std::numeric_limits<double>::infinity();
  detail::PairSampler sampler(spec.n, seed);
  for (std::size_t s = 0; s < n_samples; ++s) {
    auto [xi, eta] = sampler.next();
    const double gap = detail::midpoint_gap(spec, xi, eta);
    const double d = detail::dist(xi, eta);
    const double dq = detail::radial_pow(d * d, spec.q);
    const double scale = detail::pair_scale(spec.q, xi, eta);
    const double margin = scale > 0.0 ? (gap - alpha_claim * dq) / scale : 0.0;
    // the ratio loses digits when |xi - eta| is tiny next to |xi|, |eta|
    if (dq > kSharpConditioning * scale) rep.sampled_sharp = std::min(rep.sampled_sharp, gap / dq);
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_pair = {xi, eta};
    }
  }
  rep.pass = rep.worst_margin >= -kAuditTol;
  rep.message = rep.pass ? "midpoint inequality holds on all sampled pairs (sampled sharp alpha reported)"
                         : "midpoint inequality violated at worst_xi, worst_eta";
  return rep;
}

/// Audits F(xi) + F(eta) - 2F(mid) <= beta |xi - eta|^2; q = 2 only, since for
/// q > 2 only affine functions satisfy the reverse inequality.
inline AuditReport check_upper_modulus(const IntegrandSpec& spec, double beta_claim,
                                       std::size_t n_samples, std::uint64_t seed) {
  if (spec.q != 2.0)
    throw InputError(
        "upper modulus audit requires q = 2: for q > 2 only affine functions satisfy the "
        "reverse midpoint inequality, and they are not uniformly convex");
  detail::require(n_samples >= 1, "n_samples must be >= 1");
  AuditReport rep;
  rep.name = "upper-modulus";
  rep.claimed = beta_claim;
  rep.n_samples = n_samples;
  rep.sampled_sharp = 0.0;
  detail::PairSampler sampler(spec.n, seed);
  for (std::size_t s = 0; s < n_samples; ++s) {
    auto [xi, eta] = sampler.next();
    const double gap = detail::midpoint_gap(spec, xi, eta);
    const double d = detail::dist(xi, eta);
    const double scale = detail::pair_scale(2.0, xi, eta);
    const double margin = scale > 0.0 ? (beta_claim * d * d - gap) / scale : 0.0;
    if (d * d > kSharpConditioning * scale) rep.sampled_sharp = std::max(rep.sampled_sharp, gap / (d * d));
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_pair = {xi, eta};
    }
  }
  rep.pass = rep.worst_margin >= -kAuditTol;
  rep.message = rep.pass ? "reverse midpoint inequality holds on all sampled pairs"
                         : "reverse midpoint inequality violated at worst_xi, worst_eta";
  return rep;
}

/// Estimates the envelope lambda_hat |xi|^r <= F(xi) <= Lambda_hat |xi|^r,
/// r = exponent (defaults to spec.q), and compares it with the declared one.
inline GrowthReport check_growth(const IntegrandSpec& spec, std::size_t n_samples,
                                 std::uint64_t seed, std::optional<double> exponent = {}) {
  GrowthReport rep;
  rep.exponent = exponent.value_or(spec.q);
  detail::PairSampler sampler(spec.n, seed, /*include_special=*/false);
  for (std::size_t s = 0; s < n_samples; ++s) {
    Vec xi = sampler.draw();
    if (s < static_cast<std::size_t>(spec.n)) {
      // unit vectors and their extreme scales come first
      std::fill(xi.begin(), xi.end(), 0.0);
      xi[s] = s % 2 ? 1e3 : 1e-3;
    }
    const double ratio = evaluate(spec, xi) / detail::radial_pow(detail::norm2(xi), rep.exponent);
    rep.lambda_hat = std::min(rep.lambda_hat, ratio);
    rep.Lambda_hat = std::max(rep.Lambda_hat, ratio);
  }
  const double tol = kAuditTol * std::max(1.0, spec.lambda_hi);
  rep.pass = spec.lambda_lo <= rep.lambda_hat + tol && rep.Lambda_hat <= spec.lambda_hi + tol;
  return rep;
}

/// |F(Q) - F(P)| <= 2^q Lambda max(|P|, |Q|)^{q-1} |Q - P|
inline LipschitzReport check_lipschitz_estimate(const IntegrandSpec& spec, const Vec& p,
                                                const Vec& q_point) {
  LipschitzReport rep;
  rep.lhs = std::abs(evaluate(spec, q_point) - evaluate(spec, p));
  const double r = std::max(detail::norm(p), detail::norm(q_point));
  rep.rhs = std::pow(2.0, spec.q) * spec.lambda_hi * std::pow(r, spec.q - 1.0) *
            detail::dist(p, q_point);
  rep.pass = rep.lhs <= rep.rhs + kAuditTol * std::max(1.0, rep.rhs);
  return rep;
}

/// a_hat = min (dF(xi) - dF(eta)).(xi - eta) / |xi - eta|^q over sampled pairs;
/// strong monotonicity with constant a_hat gives the midpoint inequality with
/// alpha = a_hat / (2q).
inline MonotonicityReport derive_alpha_from_monotonicity(const IntegrandSpec& spec,
                                                         std::size_t n_samples,
                                                         std::uint64_t seed) {
  MonotonicityReport rep;
  rep.a_hat = std::numeric_limits<double>::infinity();
  detail::PairSampler sampler(spec.n, seed);
  for (std::size_t s = 0; s < n_samples; ++s) {
    auto [xi, eta] = sampler.next();
    const double d = detail::dist(xi, eta);
    if (d == 0.0) continue;
    const Vec gx = subgradient(spec, xi);
    const Vec ge = subgradient(spec, eta);
    double dot = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) dot += (gx[i] - ge[i]) * (xi[i] - eta[i]);
    rep.a_hat = std::min(rep.a_hat, dot / detail::radial_pow(d * d, spec.q));
  }
  if (!(rep.a_hat > 0.0)) {
    rep.detected = false;
    rep.alpha_derived = 0.0;
    rep.message = "no strong monotonicity detected at sampled pairs";
    return rep;
  }
  rep.detected = true;
  rep.alpha_derived = rep.a_hat / (2.0 * spec.q);
  rep.derived_check = check_uniform_convexity(spec, rep.alpha_derived, n_samples, seed + 1);
  rep.message = rep.derived_check.pass ? "derived alpha passes the convexity audit"
                                       : "derived alpha fails the convexity audit";
  return rep;
}

}  // namespace cylvar

#pragma once

// Convex energy densities F : R^n -> R with q-growth.
//
// Three families are built in:
//   quadratic-form   F(xi) = A xi . xi                 (q = 2, A SPD)
//   power            F(xi) = |xi|^q
//   aniso-max        F(xi) = |xi|^q + c max_i |xi_i|^q (nonsmooth on ties)
//
// The aniso-max density is not differentiable where two coordinates tie in
// absolute value. With smoothing_mu > 0 the max is replaced by the
// l^{1/mu} norm of (|xi_1|^q, ..., |xi_n|^q), which is convex, smooth away
// from the origin and tends to the max as mu -> 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cylvar/error.hpp"

namespace cylvar {

enum class IntegrandKind { quadratic_form, power, aniso_max };

inline std::string to_string(IntegrandKind k) {
  switch (k) {
    case IntegrandKind::quadratic_form: return "quadratic-form";
    case IntegrandKind::power: return "power";
    case IntegrandKind::aniso_max: return "aniso-max";
  }
  return "unknown";
}

inline IntegrandKind integrand_kind_from_string(const std::string& s) {
  if (s == "quadratic-form") return IntegrandKind::quadratic_form;
  if (s == "power") return IntegrandKind::power;
  if (s == "aniso-max") return IntegrandKind::aniso_max;
  throw InputError("unknown integrand kind '" + s + "'");
}

struct IntegrandSpec {
  IntegrandKind kind = IntegrandKind::power;
  int n = 2;                  ///< dimension of the argument xi
  double q = 2.0;
  double lambda_lo = 1.0;     ///< lower growth constant
  double lambda_hi = 1.0;     ///< upper growth constant
  double alpha = 0.5;         ///< uniform-convexity modulus
  std::optional<double> beta; ///< upper modulus, q = 2 only
  std::vector<double> matrix; ///< quadratic-form: row-major n x n
  double weight = 0.0;        ///< aniso-max: c
  double smoothing_mu = 0.0;

  double q_dual() const { return q / (q - 1.0); }

  bool is_quadratic() const {
    return kind == IntegrandKind::quadratic_form ||
           (kind == IntegrandKind::power && q == 2.0);
  }

  /// The matrix A with F(xi) = A xi . xi, for quadratic integrands.
  std::vector<double> quadratic_matrix() const {
    detail::require(is_quadratic(), "integrand is not quadratic");
    if (kind == IntegrandKind::quadratic_form) return matrix;
    std::vector<double> eye(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) eye[static_cast<std::size_t>(i * n + i)] = 1.0;
    return eye;
  }

  void validate() const;

  // Built-in densities with their declared constants. The power constant
  // alpha = 2^{1-q} is Clarkson's inequality for the Euclidean norm.
  static IntegrandSpec power(double q, int n) {
    IntegrandSpec s;
    s.kind = IntegrandKind::power;
    s.n = n;
    s.q = q;
    s.lambda_lo = 1.0;
    s.lambda_hi = 1.0;
    s.alpha = std::pow(2.0, 1.0 - q);
    if (q == 2.0) s.beta = 0.5;
    return s;
  }

  static IntegrandSpec quadratic_form(std::vector<double> a, int n);

  static IntegrandSpec aniso_max(double q, double c, int n) {
    IntegrandSpec s = power(q, n);
    s.kind = IntegrandKind::aniso_max;
    s.weight = c;
    s.lambda_hi = 1.0 + c;
    s.beta.reset();
    return s;
  }
};

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
  const auto at = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i * n + j)];
  };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int r = p + 1; r < n; ++r) {
        if (at(p, r) == 0.0) continue;
        const double theta = (at(r, r) - at(p, p)) / (2.0 * at(p, r));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p), akr = at(k, r);
          at(k, p) = c * akp - s * akr;
          at(k, r) = s * akp + c * akr;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k), ark = at(r, k);
          at(p, k) = c * apk - s * ark;
          at(r, k) = s * apk + c * ark;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline IntegrandSpec IntegrandSpec::quadratic_form(std::vector<double> a, int n) {
  detail::require(n >= 1 && a.size() == static_cast<std::size_t>(n * n),
                  "quadratic-form matrix must be n x n");
  const auto ev = symmetric_eigenvalues(a, n);
  IntegrandSpec s;
  s.kind = IntegrandKind::quadratic_form;
  s.n = n;
  s.q = 2.0;
  s.matrix = std::move(a);
  s.lambda_lo = ev.front();
  s.lambda_hi = ev.back();
  s.alpha = ev.front() / 2.0;
  s.beta = ev.back() / 2.0;
  return s;
}

inline void IntegrandSpec::validate() const {
  using detail::require;
  require(n >= 1, "integrand dimension n must be >= 1");
  require(q >= 2.0, "q must be >= 2");
  require(lambda_lo > 0.0, "lambda must be > 0");
  require(lambda_lo <= lambda_hi, "lambda must not exceed Lambda");
  require(alpha > 0.0, "alpha must be > 0");
  if (beta) require(*beta >= alpha, "beta must be >= alpha");
  require(smoothing_mu >= 0.0, "smoothing mu must be >= 0");
  switch (kind) {
    case IntegrandKind::quadratic_form: {
      require(q == 2.0, "quadratic-form requires q = 2");
      require(matrix.size() == static_cast<std::size_t>(n * n),
              "quadratic-form matrix must be n x n");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
          require(matrix[static_cast<std::size_t>(i * n + j)] ==
                      matrix[static_cast<std::size_t>(j * n + i)],
                  "quadratic-form matrix must be symmetric");
      require(symmetric_eigenvalues(matrix, n).front() > 0.0,
              "quadratic-form matrix must be positive definite");
      break;
    }
    case IntegrandKind::power: break;
    case IntegrandKind::aniso_max:
      require(weight > 0.0, "aniso-max weight c must be > 0");
      break;
  }
}

namespace detail {

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double pow_abs(double x, double q) {
  const double a = std::abs(x);
  if (q == 2.0) return a * a;
  if (q == 4.0) return (a * a) * (a * a);
  return std::pow(a, q);
}

/// |x|^{q-2} x
inline double pow_sign(double x, double q) {
  if (q == 2.0) return x;
  if (q == 4.0) return x * x * x;
  return x == 0.0 ? 0.0 : std::pow(std::abs(x), q - 2.0) * x;
}

/// |xi|^q from |xi|^2
inline double radial_pow(double r2, double q) {
  if (q == 2.0) return r2;
  if (q == 4.0) return r2 * r2;
  return std::pow(r2, q / 2.0);
}

inline void check_dim(const IntegrandSpec& spec, std::size_t size) {
  if (size != static_cast<std::size_t>(spec.n))
    throw InputError("integrand argument has dimension " + std::to_string(size) +
                     ", expected " + std::to_string(spec.n));
}

/// max-type term M(xi) = max_i |xi_i|^q, or its l^{1/mu} smoothing.
inline double aniso_term(std::span<const double> xi, double q, double mu) {
  double amax = 0.0;
  for (double v : xi) amax = std::max(amax, pow_abs(v, q));
  if (mu <= 0.0 || amax == 0.0) return amax;
  const double k = 1.0 / mu;
  double sum = 0.0;
  for (double v : xi) sum += std::pow(pow_abs(v, q) / amax, k);
  return amax * std::pow(sum, mu);
}

/// Adds weight * (subgradient of the max-type term) to out.
inline void aniso_term_grad(std::span<const double> xi, double q, double mu, double weight,
                            std::span<double> out) {
  double amax = 0.0;
  for (double v : xi) amax = std::max(amax, pow_abs(v, q));
  if (amax == 0.0) return;  // q >= 2: zero is the only subgradient at 0
  if (mu <= 0.0) {
    // canonical selection at ties: average of the active branches
    std::size_t active = 0;
    for (double v : xi)
      if (pow_abs(v, q) == amax) ++active;
    const double w = weight / static_cast<double>(active);
    for (std::size_t i = 0; i < xi.size(); ++i)
      if (pow_abs(xi[i], q) == amax) out[i] += w * q * pow_sign(xi[i], q);
    return;
  }
  const double k = 1.0 / mu;
  double sum = 0.0;
  for (double v : xi) sum += std::pow(pow_abs(v, q) / amax, k);
  const double outer = std::pow(sum, mu - 1.0);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const double r = pow_abs(xi[i], q) / amax;
    if (r == 0.0) continue;
    out[i] += weight * outer * std::pow(r, k - 1.0) * q * pow_sign(xi[i], q);
  }
}

}  // namespace detail

/// F(xi), without the dimension check; used in assembly loops.
inline double evaluate_unchecked(const IntegrandSpec& spec, std::span<const double> xi) {
  switch (spec.kind) {
    case IntegrandKind::quadratic_form: {
      const std::size_t n = xi.size();
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += spec.matrix[i * n + j] * xi[j];
        s += row * xi[i];
      }
      return s;
    }
    case IntegrandKind::power:
      return detail::radial_pow(detail::norm2(xi), spec.q);
    case IntegrandKind::aniso_max:
      return detail::radial_pow(detail::norm2(xi), spec.q) +
             spec.weight * detail::aniso_term(xi, spec.q, spec.smoothing_mu);
  }
  return 0.0;
}

/// Writes an element of the subdifferential of F at xi into out.
inline void subgradient_unchecked(const IntegrandSpec& spec, std::span<const double> xi,
                                  std::span<double> out) {
  const std::size_t n = xi.size();
  std::fill(out.begin(), out.end(), 0.0);
  switch (spec.kind) {
    case IntegrandKind::quadratic_form:
      // A symmetric: grad = 2 A xi
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += spec.matrix[i * n + j] * xi[j];
        out[i] = 2.0 * row;
      }
      return;
    case IntegrandKind::power:
    case IntegrandKind::aniso_max: {
      const double r2 = detail::norm2(xi);
      double scale;
      if (spec.q == 2.0) scale = 2.0;
      else if (spec.q == 4.0) scale = 4.0 * r2;
      else scale = r2 == 0.0 ? 0.0 : spec.q * std::pow(r2, spec.q / 2.0 - 1.0);
      for (std::size_t i = 0; i < n; ++i) out[i] = scale * xi[i];
      if (spec.kind == IntegrandKind::aniso_max)
        detail::aniso_term_grad(xi, spec.q, spec.smoothing_mu, spec.weight, out);
      return;
    }
  }
}

namespace detail {

/// (s0 + ds)^{q/2} - s0^{q/2} without cancellation, s0 >= 0, s0 + ds >= 0.
inline double radial_increment(double s0, double ds, double q) {
  if (q == 2.0) return ds;
  if (q == 4.0) return ds * (2.0 * s0 + ds);
  if (s0 == 0.0) return radial_pow(std::max(0.0, ds), q);
  return radial_pow(s0, q) * std::expm1(0.5 * q * std::log1p(ds / s0));
}

/// |u + du|^q - |u|^q without cancellation.
inline double pow_abs_increment(double u, double du, double q) {
  return radial_increment(u * u, du * (2.0 * u + du), q);
}

}  // namespace detail

/// F(xi + eta) - F(xi), accurate when eta is small relative to xi. The
/// max-type term of aniso-max is differenced directly.
inline double increment_unchecked(const IntegrandSpec& spec, std::span<const double> xi,
                                  std::span<const double> eta) {
  const std::size_t n = xi.size();
  switch (spec.kind) {
    case IntegrandKind::quadratic_form: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += spec.matrix[i * n + j] * (2.0 * xi[j] + eta[j]);
        s += row * eta[i];
      }
      return s;
    }
    case IntegrandKind::power:
    case IntegrandKind::aniso_max: {
      double s0 = 0.0, ds = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s0 += xi[i] * xi[i];
        ds += eta[i] * (2.0 * xi[i] + eta[i]);
      }
      double r = detail::radial_increment(s0, ds, spec.q);
      if (spec.kind == IntegrandKind::aniso_max) {
        std::array<double, 8> moved{};
        std::vector<double> big;
        std::span<double> m(moved.data(), std::min<std::size_t>(n, moved.size()));
        if (n > moved.size()) {
          big.assign(n, 0.0);
          m = big;
        }
        for (std::size_t i = 0; i < n; ++i) m[i] = xi[i] + eta[i];
        r += spec.weight * (detail::aniso_term(m, spec.q, spec.smoothing_mu) -
                            detail::aniso_term(xi, spec.q, spec.smoothing_mu));
      }
      return r;
    }
  }
  return 0.0;
}

inline double evaluate(const IntegrandSpec& spec, std::span<const double> xi) {
  detail::check_dim(spec, xi.size());
  return evaluate_unchecked(spec, xi);
}

inline std::vector<double> subgradient(const IntegrandSpec& spec, std::span<const double> xi) {
  detail::check_dim(spec, xi.size());
  std::vector<double> out(xi.size(), 0.0);
  subgradient_unchecked(spec, xi, out);
  return out;
}

}  // namespace cylvar

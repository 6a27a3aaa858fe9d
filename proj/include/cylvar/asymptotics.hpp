#pragma once

// ell-sweeps of the cylinder problem: distance of u_ell to u_infty on the
// half cylinder, energy per unit length against the cross-section energy,
// slice and collar diagnostics, rate fits and the order checks.
//
// Every record carries a noise floor, the part of dist_half that the solver
// cannot resolve. Iterative solves measure it as the distance between a warm
// and a cold start; direct solves as the size of an iterative-refinement
// correction. Fits drop distances within 1e2 of their floor and the
// monotonicity checks allow for it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cylvar/report.hpp"
#include "cylvar/solver.hpp"

namespace cylvar {

/// Everything except ell that defines one sweep.
struct SweepProblem {
  CrossSection omega2{{Interval{0.0, 1.0}}};
  IntegrandSpec F = IntegrandSpec::power(2.0, 2);
  SourceTerm f = SourceTerm::constant(1.0);
  double h = 1.0 / 32.0;
  SolverOptions opts;
  bool parallel = false;
  /// Re-solve iterative problems from zero to measure the noise floor.
  bool probe_noise = true;
  /// Fill wall_seconds; off by default so that artifacts are reproducible.
  bool timing = false;
};

struct SweepRecord {
  double ell = 0.0;
  double h = 0.0;
  double dist_half = 0.0;
  double energy_cyl = 0.0;
  double energy_per_length = 0.0;
  double cross_energy = 0.0;
  double sandwich_gap = 0.0;
  double slice_energy_max = 0.0;
  double collar_grad_max = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;

  double noise_floor = 0.0;
  bool ok = true;
  std::string failure;
};

struct SweepResult {
  Solution u_inf;
  std::vector<SweepRecord> records;
  /// u_ell for each record; empty fields for failed records.
  std::vector<Solution> solutions;
};

// ------------------------------------------------------------- diagnostics

inline double distance_half_cylinder(const Field& u_ell, const Field& u_inf, double q) {
  const Field ext = extend_in_x1(u_inf, u_ell.mesh);
  return grad_q_norm(u_ell - ext, q, half_cylinder(u_ell.mesh->x1_axis().hi()));
}

inline double distance_half_cylinder(const Solution& u_ell, const Solution& u_inf, double q) {
  return distance_half_cylinder(u_ell.field, u_inf.field, q);
}

namespace detail {

/// Lower ends of unit slabs covering (-ell, ell); the last slab ends at ell.
inline std::vector<double> unit_slab_starts(double ell) {
  std::vector<double> s;
  for (double a = -ell; a + 1.0 <= ell + 1e-9; a += 1.0) s.push_back(a);
  if (s.empty() || s.back() + 1.0 < ell - 1e-9) s.push_back(ell - 1.0);
  return s;
}

}  // namespace detail

/// E_{(s,s+1) x omega2}(u) over unit slabs covering the cylinder.
inline std::vector<double> slice_energies(const Field& u, const IntegrandSpec& F, const SourceTerm& f) {
  EnergyProblem P(u.mesh, F, f, u, 0);
  std::vector<double> out;
  for (double s : detail::unit_slab_starts(u.mesh->x1_axis().hi())) {
    const SliceSpec sl = make_slice(*u.mesh, s, s + 1.0);
    const Region r = sl.slab();
    out.push_back(P.energy(u, &r));
  }
  return out;
}

struct CollarReport {
  std::vector<double> ell0;
  std::vector<double> values;
  double max = 0.0;
  /// Informational: the outermost collar exceeds 1.1x every inner one.
  bool grows_in_ell0 = false;
};

/// int_{D_ell0} |grad u|^q for each ell0 with ell0 + 1 <= ell.
inline CollarReport check_collar_gradient(const Field& u, double q, std::vector<double> ell0_list = {}) {
  const double ell = u.mesh->x1_axis().hi();
  if (ell0_list.empty())
    for (double a = 1.0; a + 1.0 <= ell + 1e-9; a += 1.0) ell0_list.push_back(a);
  CollarReport rep;
  for (double a : ell0_list) {
    detail::require(a >= 0.0 && a + 1.0 <= ell + 1e-9, "collar requires 0 <= ell0 <= ell - 1");
    rep.ell0.push_back(a);
    rep.values.push_back(grad_q_norm(u, q, collar_region(a, ell)));
  }
  for (double v : rep.values) rep.max = std::max(rep.max, v);
  if (rep.values.size() >= 2) {
    const double inner = *std::max_element(rep.values.begin(), rep.values.end() - 1);
    rep.grows_in_ell0 = rep.values.back() > 1.1 * inner;
  }
  return rep;
}

/// True when the last value is not above the largest earlier one by more
/// than the relative `slack` (sign aware, slice energies are negative).
inline bool no_increasing_trend(const std::vector<double>& v, double slack = 0.1) {
  if (v.size() < 2) return true;
  const double m = *std::max_element(v.begin(), v.end() - 1);
  return v.back() <= m + slack * std::abs(m);
}

// ------------------------------------------------------------------ sweep

namespace detail {

inline SweepRecord measure_ell(const SweepProblem& pb, double ell, const Solution& u_inf,
                               Solution* keep) {
  SweepRecord rec;
  rec.ell = ell;
  rec.h = pb.h;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto cyl = build_cylinder_mesh(CylinderSpec{ell, pb.omega2}, pb.h);
    Solution u = solve_cylinder(cyl, pb.F, pb.f, pb.opts, &u_inf.field);
    const double q = pb.F.q;
    const Region half = half_cylinder(ell);
    rec.dist_half = distance_half_cylinder(u, u_inf, q);
    if (!u.correction.empty()) {
      Field c = Field::zeros(cyl);
      c.values = u.correction;
      rec.noise_floor = grad_q_norm(c, q, half);
    } else if (pb.probe_noise) {
      const Solution cold = solve_cylinder(cyl, pb.F, pb.f, pb.opts, nullptr);
      rec.noise_floor = grad_q_norm(u.field - cold.field, q, half);
    }
    rec.energy_cyl = u.energy;
    rec.energy_per_length = u.energy / (2.0 * ell);
    rec.cross_energy = u_inf.energy;
    rec.sandwich_gap = rec.energy_per_length - rec.cross_energy;
    const auto slices = slice_energies(u.field, pb.F, pb.f);
    rec.slice_energy_max = *std::max_element(slices.begin(), slices.end());
    rec.collar_grad_max = ell >= 2.0 ? check_collar_gradient(u.field, q).max : 0.0;
    rec.iterations = u.iterations;
    if (!u.converged) {
      rec.ok = false;
      rec.failure = "solver did not converge: " + u.stop_reason;
    }
    if (keep) *keep = std::move(u);
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.failure = e.what();
  }
  if (pb.timing)
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace detail

/// Solves u_infty once, then u_ell for every ell. A failing ell yields a
/// record with ok = false and the sweep goes on. `on_record` sees records in
/// ell order as they become available.
inline SweepResult run_sweep(const std::vector<double>& ells, const SweepProblem& pb,
                             const std::function<void(const SweepRecord&)>& on_record = {}) {
  detail::require(!ells.empty(), "sweep needs at least one ell");
  for (std::size_t i = 0; i < ells.size(); ++i) {
    detail::require(ells[i] > 2.0, "sweep ells must be > 2");
    if (i) detail::require(ells[i] > ells[i - 1], "sweep ells must be strictly increasing");
  }
  detail::require(pb.h > 0.0, "mesh size h must be > 0");
  pb.omega2.validate();

  SweepResult res;
  res.u_inf = solve_cross_section(pb.omega2, pb.F, pb.f, pb.h, pb.opts);
  res.records.resize(ells.size());
  res.solutions.resize(ells.size());

  if (pb.parallel) {
    std::vector<std::future<SweepRecord>> jobs;
    for (std::size_t i = 0; i < ells.size(); ++i)
      jobs.push_back(std::async(std::launch::async, [&, i] {
        return detail::measure_ell(pb, ells[i], res.u_inf, &res.solutions[i]);
      }));
    for (std::size_t i = 0; i < ells.size(); ++i) {
      res.records[i] = jobs[i].get();
      if (on_record) on_record(res.records[i]);
    }
  } else {
    for (std::size_t i = 0; i < ells.size(); ++i) {
      res.records[i] = detail::measure_ell(pb, ells[i], res.u_inf, &res.solutions[i]);
      if (on_record) on_record(res.records[i]);
    }
  }
  return res;
}

// ------------------------------------------------------------------ fits

struct RateFit {
  std::string model;  ///< "power" or "exponential"
  double A = 0.0;
  double rate = 0.0;
  double r_squared = 0.0;
  /// 1/(q-1) for the power model; none for the exponential one (B > 0).
  std::optional<double> theory_rate;
  bool bound_satisfied = false;
  int points = 0;
  int excluded = 0;
  std::string note;

  std::string to_text() const {
    ReportText t;
    t.set("model", model);
    t.set("A", A);
    t.set("rate", rate);
    t.set("r_squared", r_squared);
    if (theory_rate) t.set("theory_rate", *theory_rate);
    else t.set("theory_rate", "B > 0");
    t.set("bound_satisfied", bound_satisfied);
    t.set("points", points);
    t.set("excluded", excluded);
    if (!note.empty()) t.set("note", note);
    return t.str();
  }
};

inline constexpr double kNoiseFactor = 1e2;
inline constexpr double kExpR2Threshold = 0.98;

namespace detail {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, "fit abscissae must not all coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ssr += r * r;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  return f;
}

/// Keeps points with d > 0 and d >= kNoiseFactor * floor.
inline void select_points(const std::vector<double>& ell, const std::vector<double>& d,
                          const std::vector<double>& floor, std::vector<double>& xs,
                          std::vector<double>& ys, RateFit& fit) {
  require(ell.size() == d.size(), "fit inputs differ in length");
  require(floor.empty() || floor.size() == d.size(), "noise floors differ in length");
  int nonpos = 0, noisy = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0) || !std::isfinite(d[i])) {
      ++nonpos;
      continue;
    }
    if (!floor.empty() && d[i] < kNoiseFactor * floor[i]) {
      ++noisy;
      continue;
    }
    xs.push_back(ell[i]);
    ys.push_back(std::log(d[i]));
  }
  fit.excluded = nonpos + noisy;
  fit.points = static_cast<int>(xs.size());
  if (fit.excluded)
    fit.note = "excluded " + std::to_string(nonpos) + " nonpositive and " + std::to_string(noisy) +
               " below-noise values";
  if (xs.size() < 3)
    throw InputError("rate fit needs at least 3 usable values, have " + std::to_string(xs.size()) +
                     (fit.note.empty() ? "" : " (" + fit.note + ")"));
}

inline void unpack(const std::vector<SweepRecord>& recs, std::vector<double>& ell,
                   std::vector<double>& d, std::vector<double>& floor) {
  for (const auto& r : recs) {
    if (!r.ok) continue;
    ell.push_back(r.ell);
    d.push_back(r.dist_half);
    floor.push_back(r.noise_floor);
  }
}

}  // namespace detail

/// Least squares on (log ell, log d): d ~ A ell^-rate. The bound holds when
/// the decay is at least 1/(q-1) - 0.1.
inline RateFit fit_power(const std::vector<double>& ell, const std::vector<double>& d, double q,
                         const std::vector<double>& floor = {}) {
  detail::require(q > 1.0, "power fit needs q > 1");
  RateFit fit;
  fit.model = "power";
  std::vector<double> xs, ys;
  detail::select_points(ell, d, floor, xs, ys, fit);
  for (double& x : xs) x = std::log(x);
  const auto lf = detail::least_squares(xs, ys);
  fit.A = std::exp(lf.intercept);
  fit.rate = -lf.slope;
  fit.r_squared = lf.r_squared;
  fit.theory_rate = 1.0 / (q - 1.0);
  fit.bound_satisfied = fit.rate >= *fit.theory_rate - 0.1;
  return fit;
}

/// Least squares on (ell, log d): d ~ A exp(-rate ell). The bound holds when
/// rate > 0 and r^2 reaches the threshold.
inline RateFit fit_exponential(const std::vector<double>& ell, const std::vector<double>& d,
                               const std::vector<double>& floor = {},
                               double r2_threshold = kExpR2Threshold) {
  RateFit fit;
  fit.model = "exponential";
  std::vector<double> xs, ys;
  detail::select_points(ell, d, floor, xs, ys, fit);
  const auto lf = detail::least_squares(xs, ys);
  fit.A = std::exp(lf.intercept);
  fit.rate = -lf.slope;
  fit.r_squared = lf.r_squared;
  fit.bound_satisfied = fit.rate > 0.0 && fit.r_squared >= r2_threshold;
  return fit;
}

inline RateFit fit_power(const std::vector<SweepRecord>& recs, double q) {
  std::vector<double> ell, d, floor;
  detail::unpack(recs, ell, d, floor);
  return fit_power(ell, d, q, floor);
}

inline RateFit fit_exponential(const std::vector<SweepRecord>& recs,
                               double r2_threshold = kExpR2Threshold) {
  std::vector<double> ell, d, floor;
  detail::unpack(recs, ell, d, floor);
  return fit_exponential(ell, d, floor, r2_threshold);
}

// ------------------------------------------------------------- sweep checks

struct MonotoneDistanceReport {
  bool pass = true;
  int violations = 0;
  std::string message;
};

/// dist_half along the sweep: nonincreasing up to the noise floors (in the
/// q-th root, where the triangle inequality holds), or strictly decreasing.
inline MonotoneDistanceReport check_distance_decreasing(const std::vector<SweepRecord>& recs, double q,
                                                        bool strict = false) {
  MonotoneDistanceReport rep;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const auto& a = recs[i - 1];
    const auto& b = recs[i];
    bool ok;
    if (strict) {
      ok = b.dist_half < a.dist_half;
    } else {
      const double r = 1.0 / q;
      const double slack = std::pow(a.noise_floor, r) + std::pow(b.noise_floor, r);
      ok = std::pow(b.dist_half, r) <= std::pow(a.dist_half, r) + slack;
    }
    if (!ok) {
      ++rep.violations;
      rep.message += "dist_half rises from ell=" + std::to_string(a.ell) + " to ell=" +
                     std::to_string(b.ell) + "; ";
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

struct SandwichReport {
  double min_gap = std::numeric_limits<double>::infinity();
  double C_empirical = 0.0;  ///< max over records of gap * ell
  double C_median = 0.0;
  bool lower_ok = true;
  bool bounded_ok = true;  ///< max / median of gap * ell within the window
  bool growth_ok = true;   ///< gap * ell <= 2x its value at the smallest ell
  bool pass = true;

  std::string to_text() const {
    ReportText t;
    t.set("min_gap", min_gap);
    t.set("C_empirical", C_empirical);
    t.set("C_median", C_median);
    t.set("lower_ok", lower_ok);
    t.set("bounded_ok", bounded_ok);
    t.set("growth_ok", growth_ok);
    t.set("pass", pass);
    return t.str();
  }
};

/// Energy per unit length against the cross-section energy:
/// 0 - tol <= gap <= C / ell with a stable empirical C.
inline SandwichReport check_energy_sandwich(const std::vector<SweepRecord>& recs, double C_window = 3.0,
                                            double lower_tol = 1e-6) {
  detail::require(recs.size() >= 2, "energy sandwich needs at least 2 records");
  SandwichReport rep;
  std::vector<double> c;
  for (const auto& r : recs) {
    rep.min_gap = std::min(rep.min_gap, r.sandwich_gap);
    c.push_back(r.sandwich_gap * r.ell);
  }
  rep.lower_ok = rep.min_gap >= -lower_tol;
  rep.C_empirical = *std::max_element(c.begin(), c.end());
  std::vector<double> sorted = c;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  rep.C_median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const double tiny = lower_tol;
  rep.bounded_ok = rep.C_empirical <= tiny || rep.C_empirical <= C_window * rep.C_median;
  for (double v : c)
    if (v > 2.0 * std::max(c.front(), 0.0) + tiny) rep.growth_ok = false;
  rep.pass = rep.lower_ok && rep.bounded_ok && rep.growth_ok;
  return rep;
}

struct OrderReport {
  bool skipped = false;
  std::string notice;
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst = 0.0;  ///< largest excess over the bound
  double tol = 0.0;
  bool pass() const { return skipped || violations == 0; }
};

namespace detail {

inline constexpr double kOrderTol = 1e-8;

inline bool source_nonnegative(const SourceTerm& f, std::shared_ptr<const Mesh> m) {
  const auto cross = std::make_shared<const Mesh>(Mesh::box(m->cross_axes(), false, m->target_h()));
  for (double v : f.nodal_values(*cross))
    if (v < 0.0) return false;
  return true;
}

inline void tally(OrderReport& rep, double excess) {
  ++rep.checked;
  if (excess > rep.tol) {
    ++rep.violations;
    rep.worst = std::max(rep.worst, excess);
  }
}

}  // namespace detail

/// 0 <= u_ell <= ext(u_infty) nodally, for f >= 0.
inline OrderReport check_pointwise_bounds(const Solution& u_ell, const Solution& u_inf,
                                          const SourceTerm& f) {
  OrderReport rep;
  if (!detail::source_nonnegative(f, u_ell.field.mesh)) {
    rep.skipped = true;
    rep.notice = "f changes sign on omega2; pointwise bounds not checked";
    return rep;
  }
  const Field ext = extend_in_x1(u_inf.field, u_ell.field.mesh);
  rep.tol = detail::kOrderTol * std::max(ext.sup_norm(), u_ell.field.sup_norm());
  for (std::size_t i = 0; i < ext.values.size(); ++i) {
    const double u = u_ell.field.values[i];
    detail::tally(rep, std::max(-u, u - ext.values[i]));
  }
  return rep;
}

/// Nodal values of u (on a shorter cylinder) at the nodes of `target`,
/// extended by zero outside its cylinder.
inline Field extend_by_zero(const Field& u, std::shared_ptr<const Mesh> target) {
  const Mesh& m = *u.mesh;
  detail::require(m.cross_axes() == target->cross_axes(), "cylinders have different X2 grids");
  const auto& ax = m.x1_axis();
  const std::size_t cc = m.cross_count();
  Field out = Field::zeros(target);
  for (std::size_t i = 0; i < target->node_count(); ++i) {
    const double x1 = target->coord(i, 0);
    if (x1 <= ax.lo || x1 >= ax.hi()) continue;
    const double t = (x1 - ax.lo) / ax.h;
    const int k = std::clamp(static_cast<int>(std::floor(t)), 0, ax.cells - 1);
    const double w = t - k;
    const std::size_t j = target->cross_index(i);
    out.values[i] = (1.0 - w) * u.values[static_cast<std::size_t>(k) * cc + j] +
                    w * u.values[static_cast<std::size_t>(k + 1) * cc + j];
  }
  return out;
}

/// u_ell <= u_ell' for ell < ell', comparing on the ell' mesh.
inline OrderReport check_monotone_in_ell(const Solution& shorter, const Solution& longer,
                                         const SourceTerm& f) {
  OrderReport rep;
  if (!detail::source_nonnegative(f, longer.field.mesh)) {
    rep.skipped = true;
    rep.notice = "f changes sign on omega2; monotonicity in ell not checked";
    return rep;
  }
  detail::require(shorter.field.mesh->x1_axis().hi() <= longer.field.mesh->x1_axis().hi() + 1e-12,
                  "monotonicity check expects the shorter cylinder first");
  const Field ext = extend_by_zero(shorter.field, longer.field.mesh);
  rep.tol = detail::kOrderTol * std::max(ext.sup_norm(), longer.field.sup_norm());
  for (std::size_t i = 0; i < ext.values.size(); ++i)
    detail::tally(rep, ext.values[i] - longer.field.values[i]);
  return rep;
}

/// Pointwise bounds for every record and monotonicity between neighbours.
inline OrderReport check_sweep_order(const SweepResult& res, const SourceTerm& f) {
  OrderReport total;
  const Solution* prev = nullptr;
  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    if (!res.records[i].ok) continue;
    const Solution& s = res.solutions[i];
    for (const auto& rep : {check_pointwise_bounds(s, res.u_inf, f),
                            prev ? check_monotone_in_ell(*prev, s, f) : OrderReport{}}) {
      if (rep.skipped) {
        total.skipped = true;
        total.notice = rep.notice;
      }
      total.checked += rep.checked;
      total.violations += rep.violations;
      total.worst = std::max(total.worst, rep.worst);
      total.tol = std::max(total.tol, rep.tol);
    }
    prev = &s;
  }
  return total;
}

}  // namespace cylvar

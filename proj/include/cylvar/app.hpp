#pragma once

// Command runner behind the cylvar executable. Every run writes
// summary.json (checks with anchor, values and verdict) and metadata.json
// (timestamps, wall time); all other artifacts are deterministic for a fixed
// configuration and seed.
//
// Exit codes: 0 success, 1 a check failed, 2 configuration error,
// 3 solver failure.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cylvar/asymptotics.hpp"
#include "cylvar/audit.hpp"
#include "cylvar/config.hpp"
#include "cylvar/io.hpp"
#include "cylvar/onedim.hpp"

namespace cylvar {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitSolver = 3 };

struct CheckResult {
  std::string name;
  std::string anchor;
  nlohmann::json values = nlohmann::json::object();
  bool pass = true;
  bool skipped = false;
  std::string note;
};

class RunSummary {
public:
  explicit RunSummary(std::string command) : command_(std::move(command)) {}

  CheckResult& add(std::string name, std::string anchor, bool pass) {
    checks_.push_back({std::move(name), std::move(anchor), nlohmann::json::object(), pass, false, {}});
    return checks_.back();
  }
  void solver_failure(const std::string& what) { solver_failures_.push_back(what); }

  bool all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const CheckResult& c) { return c.pass; });
  }
  int exit_code() const {
    if (!solver_failures_.empty()) return kExitSolver;
    return all_pass() ? kExitOk : kExitCheckFailed;
  }
  const std::vector<CheckResult>& checks() const { return checks_; }

  std::string to_json() const {
    nlohmann::json j;
    j["command"] = command_;
    j["pass"] = all_pass() && solver_failures_.empty();
    j["exit_code"] = exit_code();
    j["solver_failures"] = solver_failures_;
    auto arr = nlohmann::json::array();
    for (const auto& c : checks_) {
      nlohmann::json e{{"name", c.name}, {"anchor", c.anchor}, {"values", c.values}, {"pass", c.pass}};
      if (c.skipped) e["skipped"] = true;
      if (!c.note.empty()) e["note"] = c.note;
      arr.push_back(e);
    }
    j["checks"] = arr;
    return j.dump(2) + "\n";
  }

private:
  std::string command_;
  std::vector<CheckResult> checks_;
  std::vector<std::string> solver_failures_;
};

namespace detail {

inline nlohmann::json audit_values(const AuditReport& r) {
  return {{"claimed", r.claimed},
          {"worst_margin", r.worst_margin},
          {"sampled_sharp", r.sampled_sharp},
          {"n_samples", r.n_samples}};
}

/// Audits the declared constants; false aborts the run.
inline bool audit_gate(const IntegrandSpec& F, const RunConfig& cfg, RunSummary& sum) {
  const auto n = static_cast<std::size_t>(cfg.audit.samples);
  const auto conv = check_uniform_convexity(F, F.alpha, n, cfg.seed);
  sum.add("convexity_audit", "uniform convexity of power q", conv.pass).values = audit_values(conv);

  const auto growth = check_growth(F, n, cfg.seed);
  auto& g = sum.add("growth_audit", "growth condition lambda|xi|^q <= F <= Lambda|xi|^q", growth.pass);
  g.values = {{"lambda_declared", F.lambda_lo}, {"Lambda_declared", F.lambda_hi},
              {"lambda_hat", growth.lambda_hat}, {"Lambda_hat", growth.Lambda_hat}};

  bool ok = conv.pass && growth.pass;
  if (F.beta) {
    if (F.q == 2.0) {
      const auto up = check_upper_modulus(F, *F.beta, n, cfg.seed);
      sum.add("upper_modulus_audit", "reverse midpoint inequality with beta (q = 2)", up.pass).values =
          audit_values(up);
      ok = ok && up.pass;
    } else {
      auto& c = sum.add("upper_modulus_audit", "reverse midpoint inequality with beta (q = 2)", false);
      c.note = "beta declared for q != 2; only affine functions satisfy the reverse inequality then";
      ok = false;
    }
  }
  return ok;
}

inline std::filesystem::path out_dir(const RunConfig& cfg, const std::string& override_dir) {
  return override_dir.empty() ? std::filesystem::path(cfg.output.directory) : std::filesystem::path(override_dir);
}

inline void write_metadata(const std::filesystem::path& dir, const RunConfig& cfg, double seconds) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  nlohmann::json j{{"command", cfg.command}, {"seed", cfg.seed}, {"finished_utc", stamp}, {"wall_seconds", seconds}};
  write_file(dir / "metadata.json", j.dump(2) + "\n");
}

inline void run_audit(const IntegrandSpec& F, const RunConfig& cfg, RunSummary& sum,
                      const std::filesystem::path& dir) {
  const auto n = static_cast<std::size_t>(cfg.audit.samples);
  const auto mono = derive_alpha_from_monotonicity(F, n, cfg.seed);
  auto& c = sum.add("derived_alpha", "uniform convexity of power q", true);
  c.values = {{"a_hat", mono.a_hat}, {"alpha_derived", mono.alpha_derived}, {"detected", mono.detected}};
  c.note = mono.message + " (informational)";
  std::string text = check_uniform_convexity(F, F.alpha, n, cfg.seed).to_text() + "\n" +
                     check_growth(F, n, cfg.seed).to_text();
  if (F.beta && F.q == 2.0) text += "\n" + check_upper_modulus(F, *F.beta, n, cfg.seed).to_text();
  write_file(dir / "audit.txt", text);
}

inline void run_solve(const IntegrandSpec& F, const RunConfig& cfg, RunSummary& sum,
                      const std::filesystem::path& dir) {
  const double ell = cfg.domain->ells.front();
  const double h = cfg.domain->h;
  const CylinderSpec spec{ell, make_cross_section(cfg)};
  const SourceTerm f = make_source(cfg);
  SolverOptions opts = make_solver_options(cfg);
  opts.record_trace = cfg.wants("trace");

  const Solution u_inf = solve_cross_section(spec.omega2, F, f, h, opts);
  auto cyl = build_cylinder_mesh(spec, h);
  const Solution u = solve_cylinder(cyl, F, f, opts, &u_inf.field);
  const Solution w = solve_tied_ends(cyl, F, f, opts, nullptr);
  for (const Solution* s : {&u_inf, &u, &w})
    if (!s->converged) sum.solver_failure(to_string(s->role) + ": " + s->stop_reason);

  if (cfg.wants("field")) {
    write_with(dir / "u_ell.txt", [&](std::ostream& os) { write_field(os, u.field); });
    write_with(dir / "u_infty.txt", [&](std::ostream& os) { write_field(os, u_inf.field); });
    write_with(dir / "w_ell.txt", [&](std::ostream& os) { write_field(os, w.field); });
  }
  if (cfg.wants("trace")) {
    write_with(dir / "trace_u_ell.csv", [&](std::ostream& os) { write_trace_csv(os, u.trace); });
    write_with(dir / "trace_u_infty.csv", [&](std::ostream& os) { write_trace_csv(os, u_inf.trace); });
  }

  auto& info = sum.add("solution", "minimizer on the cylinder", true);
  info.values = {{"ell", ell},
                 {"h", h},
                 {"energy_cyl", u.energy},
                 {"cross_energy", u_inf.energy},
                 {"energy_per_length", u.energy / (2.0 * ell)},
                 {"dist_half", distance_half_cylinder(u, u_inf, F.q)},
                 {"iterations", u.iterations},
                 {"stop_reason", u.stop_reason}};
  if (u.certificate) info.values["certificate"] = *u.certificate;

  const double tied = grad_q_norm(w.field - extend_in_x1(u_inf.field, cyl), F.q);
  sum.add("tied_ends", "minimizer with tied ends equals u_infty", tied <= 1e-6).values = {
      {"grad_q_distance", tied}, {"tolerance", 1e-6}};

  const auto pb = check_pointwise_bounds(u, u_inf, f);
  auto& c = sum.add("pointwise_bounds", "pointwise estimate 0 <= u_ell <= u_infty", pb.pass());
  c.values = {{"checked", pb.checked}, {"violations", pb.violations}, {"worst", pb.worst}, {"tol", pb.tol}};
  c.skipped = pb.skipped;
  c.note = pb.notice;
}

inline void run_sweep_command(const IntegrandSpec& F, const RunConfig& cfg, RunSummary& sum,
                              const std::filesystem::path& dir) {
  SweepProblem pb;
  pb.omega2 = make_cross_section(cfg);
  pb.F = F;
  pb.f = make_source(cfg);
  pb.h = cfg.domain->h;
  pb.opts = make_solver_options(cfg);
  pb.parallel = cfg.solver.parallel;
  pb.timing = cfg.output.timing;
  const auto& ells = cfg.domain->ells;

  const SweepResult res = run_sweep(ells, pb);
  if (!res.u_inf.converged) sum.solver_failure("u_infty: " + res.u_inf.stop_reason);
  for (const auto& r : res.records)
    if (!r.ok) sum.solver_failure("ell=" + fmt_num(r.ell) + ": " + r.failure);

  if (cfg.wants("csv")) {
    write_with(dir / "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, res.records); });
    write_with(dir / "sweep_noise.csv", [&](std::ostream& os) { write_sweep_notes(os, res.records); });
  }
  if (cfg.wants("field")) {
    write_with(dir / "u_infty.txt", [&](std::ostream& os) { write_field(os, res.u_inf.field); });
    write_with(dir / ("u_ell_" + fmt_num(ells.back()) + ".txt"),
               [&](std::ostream& os) { write_field(os, res.solutions.back().field); });
  }

  std::vector<SweepRecord> ok;
  for (const auto& r : res.records)
    if (r.ok) ok.push_back(r);

  const bool quadratic = F.is_quadratic();
  const auto mono = check_distance_decreasing(ok, F.q, quadratic);
  sum.add("dist_half_decreasing", quadratic ? "strictly decreasing half-cylinder distance"
                                            : "nonincreasing half-cylinder distance (up to noise floor)",
          mono.pass)
      .note = mono.message;

  std::string rates;
  const auto fit_check = [&](const char* name, const char* anchor, auto&& fitter) {
    try {
      const RateFit fit = fitter();
      rates += fit.to_text() + "\n";
      auto& c = sum.add(name, anchor, fit.bound_satisfied);
      c.values = {{"A", fit.A}, {"rate", fit.rate}, {"r_squared", fit.r_squared},
                  {"points", fit.points}, {"excluded", fit.excluded}};
      if (fit.theory_rate) c.values["theory_rate"] = *fit.theory_rate;
      c.note = fit.note;
    } catch (const InputError& e) {
      sum.add(name, anchor, false).note = e.what();
    }
  };
  if (quadratic)
    fit_check("exponential_rate", "exponential decay of the half-cylinder distance",
              [&] { return fit_exponential(ok); });
  else
    fit_check("power_rate", "half-cylinder distance decays at least like l^(-1/(q-1))",
              [&] { return fit_power(ok, F.q); });
  write_file(dir / "rates.txt", rates);

  if (ok.size() >= 2) {
    const auto sw = check_energy_sandwich(ok);
    auto& c = sum.add("energy_sandwich", "convergence of energy per unit length", sw.pass);
    c.values = {{"min_gap", sw.min_gap}, {"C_empirical", sw.C_empirical}, {"C_median", sw.C_median},
                {"lower_ok", sw.lower_ok}, {"bounded_ok", sw.bounded_ok}, {"growth_ok", sw.growth_ok}};
  }

  const auto order = check_sweep_order(res, pb.f);
  auto& oc = sum.add("order_properties", "pointwise estimate and monotonicity in ell", order.pass());
  oc.values = {{"checked", order.checked}, {"violations", order.violations}, {"worst", order.worst}};
  oc.skipped = order.skipped;
  oc.note = order.notice;

  std::vector<double> slices, collars;
  for (const auto& r : ok) {
    slices.push_back(r.slice_energy_max);
    collars.push_back(r.collar_grad_max);
  }
  sum.add("slice_energy_bounded", "slab energies bounded independently of ell", no_increasing_trend(slices))
      .values = {{"slice_energy_max", slices}};
  sum.add("collar_gradient_bounded", "gradient estimate on collars", no_increasing_trend(collars)).values = {
      {"collar_grad_max", collars}};
}

inline void run_onedim_command(const IntegrandSpec& F, const RunConfig& cfg, RunSummary& sum,
                               const std::filesystem::path& dir) {
  const auto& od = *cfg.onedim;
  OneDimCoerciveSpec cs;
  cs.bv_left = od.a;
  cs.bv_right = od.b;
  cs.q = F.q;
  cs.F = F;
  const SolverOptions opts = make_solver_options(cfg);
  const auto res = run_onedim(od.gamma, F, cs, cfg.domain->ells, cfg.domain->h, opts);
  if (cfg.wants("csv"))
    write_with(dir / "onedim.csv", [&](std::ostream& os) { write_onedim_csv(os, res.records); });

  int violations = 0;
  std::vector<double> u0;
  for (const auto& r : res.records) {
    violations += r.violations;
    u0.push_back(r.u_at_0);
  }
  sum.add("onedim_order", "unimodal source solutions and 0 <= v <= max(a, b)", violations == 0).values = {
      {"violations", violations}};
  sum.add("blowup", "u_ell(0) grows without bound", res.blowup_ok).values = {{"u_at_0", u0}};

  const auto& d = res.decay;
  sum.add("coercive_energy_bounded", "int |v'|^q + |v|^q bounded uniformly in ell", no_increasing_trend(d.total))
      .values = {{"total", d.total}};
  if (d.fit) {
    bool decreasing = true;
    for (std::size_t i = 1; i < d.m_mid.size(); ++i)
      if (!(d.m_mid[i] < d.m_mid[i - 1])) decreasing = false;
    auto& c = sum.add("middecay", "exponential decay of the coercive solution in the bulk",
                      d.fit->rate > 0.0 && decreasing);
    c.values = {{"A", d.fit->A}, {"rate", d.fit->rate}, {"r_squared", d.fit->r_squared}, {"m_mid", d.m_mid}};
    write_file(dir / "rates.txt", d.fit->to_text());
  } else {
    auto& c = sum.add("middecay", "exponential decay of the coercive solution in the bulk", true);
    c.skipped = true;
    c.note = d.note;
  }
}

}  // namespace detail

/// Runs a validated configuration; artifacts go to out_override when given,
/// else to the configured output directory.
inline int run(const RunConfig& cfg, const std::string& out_override = {}, std::ostream& log = std::cerr) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = detail::out_dir(cfg, out_override);
  RunSummary sum(cfg.command);
  try {
    std::filesystem::create_directories(dir);
    write_file(dir / "config.json", serialize(cfg));
    const IntegrandSpec F = make_integrand(cfg);
    if (detail::audit_gate(F, cfg, sum)) {
      if (cfg.command == "audit") detail::run_audit(F, cfg, sum, dir);
      else if (cfg.command == "solve") detail::run_solve(F, cfg, sum, dir);
      else if (cfg.command == "sweep") detail::run_sweep_command(F, cfg, sum, dir);
      else if (cfg.command == "onedim") detail::run_onedim_command(F, cfg, sum, dir);
    } else {
      log << "audit gate failed: declared constants do not hold; no solve was run\n";
    }
  } catch (const SolverError& e) {
    sum.solver_failure(e.what());
  } catch (const InputError& e) {
    log << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    sum.solver_failure(e.what());
  }
  try {
    write_file(dir / "summary.json", sum.to_json());
    detail::write_metadata(dir, cfg, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  for (const auto& c : sum.checks())
    log << (c.pass ? "PASS " : "FAIL ") << c.name << (c.skipped ? " (skipped)" : "") << "\n";
  return sum.exit_code();
}

}  // namespace cylvar

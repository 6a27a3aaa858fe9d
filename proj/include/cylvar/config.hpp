#pragma once

// Run configuration: a JSON document with the blocks
//
//   command    "solve" | "sweep" | "audit" | "onedim"
//   seed       integer (optional)
//   integrand  kind, q, n, matrix, weight, declared lambda, Lambda, alpha, beta
//   domain     ell or ells, omega2 (list of [lo, hi]), h
//   source     form "constant" (value) | "polynomial" (coefs in x2)
//   solver     SolverOptions fields, plus parallel
//   output     directory, formats, timing
//   onedim     gamma, a, b
//   audit      samples
//
// Parsing collects every problem it finds, each tagged with its JSON path.

#include <nlohmann/json.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cylvar/integrand.hpp"
#include "cylvar/mesh.hpp"
#include "cylvar/solver.hpp"

namespace cylvar {

struct ConfigError : InputError {
  std::vector<std::string> errors;
  explicit ConfigError(std::vector<std::string> errs)
      : InputError(join(errs)), errors(std::move(errs)) {}

  static std::string join(const std::vector<std::string>& errs) {
    std::string s = "invalid configuration:";
    for (const auto& e : errs) s += "\n  " + e;
    return s;
  }
};

struct RunConfig {
  struct Integrand {
    std::string kind = "power";
    double q = 2.0;
    std::optional<int> n;
    std::vector<double> matrix;
    double weight = 1.0;
    std::optional<double> lambda, Lambda, alpha, beta;
    bool operator==(const Integrand&) const = default;
  };
  struct Domain {
    std::vector<double> ells;
    std::vector<Interval> omega2{Interval{0.0, 1.0}};
    double h = 1.0 / 32.0;
    bool operator==(const Domain&) const = default;
  };
  struct Source {
    std::string form = "constant";
    double value = 1.0;
    std::vector<double> coefs;
    bool operator==(const Source&) const = default;
  };
  struct Solver {
    int max_iters = 20000;
    double energy_tol = 1e-10;
    int window = 50;
    double grad_tol = 1e-9;
    double armijo_c = 1e-4;
    double backtrack_rho = 0.5;
    bool bb_steps = true;
    int lbfgs_memory = 8;
    bool precondition = true;
    std::vector<double> smoothing_schedule{1e-2, 1e-4, 0.0};
    std::string method = "automatic";
    bool parallel = false;
    bool operator==(const Solver&) const = default;
  };
  struct Output {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "field", "trace"};
    bool timing = false;
    bool operator==(const Output&) const = default;
  };
  struct OneDim {
    double gamma = 1.0;
    double a = 1.0;
    double b = 1.0;
    bool operator==(const OneDim&) const = default;
  };
  struct Audit {
    int samples = 10000;
    bool operator==(const Audit&) const = default;
  };

  std::string command;
  std::uint64_t seed = 0;
  std::optional<Integrand> integrand;
  std::optional<Domain> domain;
  std::optional<Source> source;
  Solver solver;
  Output output;
  std::optional<OneDim> onedim;
  Audit audit;

  bool operator==(const RunConfig&) const = default;

  bool wants(const std::string& format) const {
    return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
  }
};

namespace detail {

using nlohmann::json;

class ConfigReader {
public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [k, v] : obj.items())
      if (!allowed.count(k)) error(path + "." + k, "unknown key");
  }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    error(path, "must be an object");
    return false;
  }

  template <class T>
  void get(const json& obj, const std::string& key, const std::string& path, T& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::runtime_error("must be a number");
      } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_integer()) throw std::runtime_error("must be an integer");
        if constexpr (std::is_same_v<T, std::uint64_t>)
          if (v.get<long long>() < 0) throw std::runtime_error("must be >= 0");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::runtime_error("must be true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::runtime_error("must be a string");
      } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!v.is_array()) throw std::runtime_error("must be a list of numbers");
        for (const auto& x : v)
          if (!x.is_number()) throw std::runtime_error("must be a list of numbers");
      } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
        if (!v.is_array()) throw std::runtime_error("must be a list of strings");
        for (const auto& x : v)
          if (!x.is_string()) throw std::runtime_error("must be a list of strings");
      }
      out = v.get<T>();
    } catch (const std::exception& e) {
      error(path + "." + key, e.what());
    }
  }

  template <class T>
  void get(const json& obj, const std::string& key, const std::string& path, std::optional<T>& out) {
    if (!obj.contains(key)) return;
    T v{};
    const auto before = errors.size();
    get(obj, key, path, v);
    if (errors.size() == before) out = v;
  }
};

}  // namespace detail

/// Parses and validates a configuration; throws ConfigError listing every
/// problem found.
inline RunConfig parse_config(const std::string& text) {
  using detail::json;
  detail::ConfigReader rd;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("$: not valid JSON (") + e.what() + ")"});
  }
  if (!root.is_object()) throw ConfigError({"$: configuration must be a JSON object"});

  RunConfig c;
  rd.check_keys(root, "$", {"command", "seed", "integrand", "domain", "source", "solver", "output", "onedim", "audit"});
  if (!root.contains("command")) rd.error("$.command", "missing");
  rd.get(root, "command", "$", c.command);
  static const std::set<std::string> commands{"solve", "sweep", "audit", "onedim"};
  if (root.contains("command") && root["command"].is_string() && !commands.count(c.command))
    rd.error("$.command", "must be one of solve, sweep, audit, onedim");
  rd.get(root, "seed", "$", c.seed);

  if (root.contains("integrand") && rd.object(root["integrand"], "$.integrand")) {
    const json& j = root["integrand"];
    RunConfig::Integrand in;
    rd.check_keys(j, "$.integrand", {"kind", "q", "n", "matrix", "weight", "lambda", "Lambda", "alpha", "beta"});
    rd.get(j, "kind", "$.integrand", in.kind);
    if (in.kind != "power" && in.kind != "quadratic-form" && in.kind != "aniso-max")
      rd.error("$.integrand.kind", "must be one of power, quadratic-form, aniso-max");
    rd.get(j, "q", "$.integrand", in.q);
    if (!(in.q >= 2.0)) rd.error("$.integrand.q", "q must be ≥ 2");
    if (in.kind == "quadratic-form" && in.q != 2.0) rd.error("$.integrand.q", "quadratic-form requires q = 2");
    rd.get(j, "n", "$.integrand", in.n);
    if (in.n && (*in.n < 1 || *in.n > 3)) rd.error("$.integrand.n", "must be 1, 2 or 3");
    rd.get(j, "matrix", "$.integrand", in.matrix);
    if (in.kind == "quadratic-form" && !j.contains("matrix"))
      rd.error("$.integrand.matrix", "missing (required for quadratic-form)");
    rd.get(j, "weight", "$.integrand", in.weight);
    if (in.weight < 0.0) rd.error("$.integrand.weight", "must be >= 0");
    rd.get(j, "lambda", "$.integrand", in.lambda);
    rd.get(j, "Lambda", "$.integrand", in.Lambda);
    rd.get(j, "alpha", "$.integrand", in.alpha);
    rd.get(j, "beta", "$.integrand", in.beta);
    if (in.alpha && !(*in.alpha > 0.0)) rd.error("$.integrand.alpha", "must be > 0");
    if (in.lambda && !(*in.lambda > 0.0)) rd.error("$.integrand.lambda", "must be > 0");
    if (in.lambda && in.Lambda && *in.Lambda < *in.lambda) rd.error("$.integrand.Lambda", "must be >= lambda");
    c.integrand = in;
  }

  if (root.contains("domain") && rd.object(root["domain"], "$.domain")) {
    const json& j = root["domain"];
    RunConfig::Domain d;
    rd.check_keys(j, "$.domain", {"ell", "ells", "omega2", "h"});
    if (j.contains("ell") && j.contains("ells")) rd.error("$.domain", "give either ell or ells, not both");
    double ell = 0.0;
    if (j.contains("ell")) {
      rd.get(j, "ell", "$.domain", ell);
      d.ells = {ell};
    }
    rd.get(j, "ells", "$.domain", d.ells);
    for (std::size_t i = 0; i < d.ells.size(); ++i) {
      if (!(d.ells[i] > 0.0)) rd.error("$.domain.ells[" + std::to_string(i) + "]", "must be > 0");
      if (i && !(d.ells[i] > d.ells[i - 1])) rd.error("$.domain.ells", "must be strictly increasing");
    }
    if (j.contains("omega2")) {
      const json& o = j["omega2"];
      if (!o.is_array() || o.empty() || o.size() > 2) {
        rd.error("$.domain.omega2", "must be a list of one or two [lo, hi] intervals");
      } else {
        d.omega2.clear();
        for (std::size_t i = 0; i < o.size(); ++i) {
          const std::string p = "$.domain.omega2[" + std::to_string(i) + "]";
          if (!o[i].is_array() || o[i].size() != 2 || !o[i][0].is_number() || !o[i][1].is_number()) {
            rd.error(p, "must be [lo, hi]");
            continue;
          }
          Interval iv{o[i][0].get<double>(), o[i][1].get<double>()};
          if (!(iv.hi > iv.lo)) rd.error(p, "cross-section is degenerate (zero measure)");
          d.omega2.push_back(iv);
        }
      }
    }
    rd.get(j, "h", "$.domain", d.h);
    if (!(d.h > 0.0)) rd.error("$.domain.h", "must be > 0");
    c.domain = d;
  }

  if (root.contains("source") && rd.object(root["source"], "$.source")) {
    const json& j = root["source"];
    RunConfig::Source s;
    rd.check_keys(j, "$.source", {"form", "value", "coefs"});
    rd.get(j, "form", "$.source", s.form);
    rd.get(j, "value", "$.source", s.value);
    rd.get(j, "coefs", "$.source", s.coefs);
    if (s.form != "constant" && s.form != "polynomial") rd.error("$.source.form", "must be constant or polynomial");
    if (s.form == "polynomial" && s.coefs.empty()) rd.error("$.source.coefs", "missing (required for polynomial)");
    c.source = s;
  }

  if (root.contains("solver") && rd.object(root["solver"], "$.solver")) {
    const json& j = root["solver"];
    auto& s = c.solver;
    rd.check_keys(j, "$.solver", {"max_iters", "energy_tol", "window", "grad_tol", "armijo_c", "backtrack_rho",
                                  "bb_steps", "lbfgs_memory", "precondition", "smoothing_schedule", "method",
                                  "parallel"});
    rd.get(j, "max_iters", "$.solver", s.max_iters);
    rd.get(j, "energy_tol", "$.solver", s.energy_tol);
    rd.get(j, "window", "$.solver", s.window);
    rd.get(j, "grad_tol", "$.solver", s.grad_tol);
    rd.get(j, "armijo_c", "$.solver", s.armijo_c);
    rd.get(j, "backtrack_rho", "$.solver", s.backtrack_rho);
    rd.get(j, "bb_steps", "$.solver", s.bb_steps);
    rd.get(j, "lbfgs_memory", "$.solver", s.lbfgs_memory);
    rd.get(j, "precondition", "$.solver", s.precondition);
    rd.get(j, "smoothing_schedule", "$.solver", s.smoothing_schedule);
    rd.get(j, "method", "$.solver", s.method);
    rd.get(j, "parallel", "$.solver", s.parallel);
    if (s.max_iters < 1) rd.error("$.solver.max_iters", "must be >= 1");
    if (s.window < 1) rd.error("$.solver.window", "must be >= 1");
    if (s.energy_tol < 0.0) rd.error("$.solver.energy_tol", "must be >= 0");
    if (s.grad_tol < 0.0) rd.error("$.solver.grad_tol", "must be >= 0");
    if (!(s.armijo_c > 0.0 && s.armijo_c < 1.0)) rd.error("$.solver.armijo_c", "must lie in (0, 1)");
    if (!(s.backtrack_rho > 0.0 && s.backtrack_rho < 1.0)) rd.error("$.solver.backtrack_rho", "must lie in (0, 1)");
    if (s.lbfgs_memory < 0) rd.error("$.solver.lbfgs_memory", "must be >= 0");
    if (s.smoothing_schedule.empty()) rd.error("$.solver.smoothing_schedule", "must not be empty");
    if (s.method != "automatic" && s.method != "iterative" && s.method != "direct")
      rd.error("$.solver.method", "must be automatic, iterative or direct");
  }

  if (root.contains("output") && rd.object(root["output"], "$.output")) {
    const json& j = root["output"];
    rd.check_keys(j, "$.output", {"directory", "formats", "timing"});
    rd.get(j, "directory", "$.output", c.output.directory);
    rd.get(j, "formats", "$.output", c.output.formats);
    rd.get(j, "timing", "$.output", c.output.timing);
    for (const auto& f : c.output.formats)
      if (f != "csv" && f != "field" && f != "trace") rd.error("$.output.formats", "unknown format '" + f + "'");
  }

  if (root.contains("onedim") && rd.object(root["onedim"], "$.onedim")) {
    const json& j = root["onedim"];
    RunConfig::OneDim o;
    rd.check_keys(j, "$.onedim", {"gamma", "a", "b"});
    rd.get(j, "gamma", "$.onedim", o.gamma);
    rd.get(j, "a", "$.onedim", o.a);
    rd.get(j, "b", "$.onedim", o.b);
    if (!(o.gamma > 0.0)) rd.error("$.onedim.gamma", "must be > 0");
    if (o.a < 0.0 || o.b < 0.0) rd.error("$.onedim", "boundary values a, b must be >= 0");
    c.onedim = o;
  }

  if (root.contains("audit") && rd.object(root["audit"], "$.audit")) {
    const json& j = root["audit"];
    rd.check_keys(j, "$.audit", {"samples"});
    rd.get(j, "samples", "$.audit", c.audit.samples);
    if (c.audit.samples < 1) rd.error("$.audit.samples", "must be >= 1");
  }

  // blocks required by the command
  const auto need = [&](bool present, const std::string& block) {
    if (!present) rd.error("$." + block, "missing block (required by command '" + c.command + "')");
  };
  if (c.command == "solve" || c.command == "sweep" || c.command == "onedim") {
    need(root.contains("integrand"), "integrand");
    need(root.contains("domain"), "domain");
  }
  if (c.command == "audit") need(root.contains("integrand"), "integrand");
  if (c.command == "solve" || c.command == "sweep") need(root.contains("source"), "source");
  if (c.command == "onedim") need(root.contains("onedim"), "onedim");
  if (c.domain) {
    const auto& ells = c.domain->ells;
    if ((c.command == "solve" || c.command == "sweep" || c.command == "onedim") && ells.empty())
      rd.error("$.domain", "missing ell or ells");
    if (c.command == "solve" && ells.size() > 1) rd.error("$.domain.ells", "solve takes a single ell");
    if (c.command == "solve" && !ells.empty() && !(ells[0] > 1.0)) rd.error("$.domain.ell", "must be > 1");
    if (c.command == "sweep") {
      if (ells.size() < 3) rd.error("$.domain.ells", "a sweep needs at least 3 values");
      for (double e : ells)
        if (!(e > 2.0)) {
          rd.error("$.domain.ells", "sweep values must be > 2");
          break;
        }
    }
    if (c.command == "onedim" && ells.size() < 3) rd.error("$.domain.ells", "onedim needs at least 3 values");
  }
  if (c.integrand && c.command != "audit") {
    const int expected = c.command == "onedim" ? 1 : 1 + static_cast<int>(c.domain ? c.domain->omega2.size() : 1);
    if (c.integrand->n && *c.integrand->n != expected)
      rd.error("$.integrand.n", "must be " + std::to_string(expected) + " for this domain");
  }
  if (c.integrand && c.integrand->kind == "quadratic-form" && !c.integrand->matrix.empty()) {
    const int n = c.integrand->n.value_or(c.command == "onedim" ? 1
                                          : c.domain ? 1 + static_cast<int>(c.domain->omega2.size())
                                                     : 2);
    if (c.integrand->matrix.size() != static_cast<std::size_t>(n * n))
      rd.error("$.integrand.matrix", "must have n*n = " + std::to_string(n * n) + " entries");
  }

  if (!rd.errors.empty()) throw ConfigError(rd.errors);
  return c;
}

/// Canonical JSON text of a configuration, every field explicit.
inline std::string serialize(const RunConfig& c) {
  using nlohmann::json;
  json j;
  j["command"] = c.command;
  j["seed"] = c.seed;
  if (c.integrand) {
    const auto& in = *c.integrand;
    json i{{"kind", in.kind}, {"q", in.q}, {"weight", in.weight}};
    if (in.n) i["n"] = *in.n;
    if (!in.matrix.empty()) i["matrix"] = in.matrix;
    if (in.lambda) i["lambda"] = *in.lambda;
    if (in.Lambda) i["Lambda"] = *in.Lambda;
    if (in.alpha) i["alpha"] = *in.alpha;
    if (in.beta) i["beta"] = *in.beta;
    j["integrand"] = i;
  }
  if (c.domain) {
    json o = json::array();
    for (const auto& iv : c.domain->omega2) o.push_back({iv.lo, iv.hi});
    j["domain"] = {{"ells", c.domain->ells}, {"omega2", o}, {"h", c.domain->h}};
  }
  if (c.source) {
    json s{{"form", c.source->form}, {"value", c.source->value}};
    if (!c.source->coefs.empty()) s["coefs"] = c.source->coefs;
    j["source"] = s;
  }
  const auto& s = c.solver;
  j["solver"] = {{"max_iters", s.max_iters},   {"energy_tol", s.energy_tol},
                 {"window", s.window},         {"grad_tol", s.grad_tol},
                 {"armijo_c", s.armijo_c},     {"backtrack_rho", s.backtrack_rho},
                 {"bb_steps", s.bb_steps},     {"lbfgs_memory", s.lbfgs_memory},
                 {"precondition", s.precondition}, {"smoothing_schedule", s.smoothing_schedule},
                 {"method", s.method},         {"parallel", s.parallel}};
  j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}, {"timing", c.output.timing}};
  if (c.onedim) j["onedim"] = {{"gamma", c.onedim->gamma}, {"a", c.onedim->a}, {"b", c.onedim->b}};
  j["audit"] = {{"samples", c.audit.samples}};
  return j.dump(2) + "\n";
}

// ------------------------------------------------------- config to domain

inline int integrand_dimension(const RunConfig& c) {
  if (c.command == "onedim") return 1;
  if (c.domain) return 1 + static_cast<int>(c.domain->omega2.size());
  return c.integrand && c.integrand->n ? *c.integrand->n : 2;
}

/// The integrand with its declared constants applied over the defaults.
inline IntegrandSpec make_integrand(const RunConfig& c) {
  detail::require(c.integrand.has_value(), "configuration has no integrand block");
  const auto& in = *c.integrand;
  const int n = integrand_dimension(c);
  IntegrandSpec F;
  if (in.kind == "power") F = IntegrandSpec::power(in.q, n);
  else if (in.kind == "quadratic-form") F = IntegrandSpec::quadratic_form(in.matrix, n);
  else F = IntegrandSpec::aniso_max(in.q, in.weight, n);
  if (in.lambda) F.lambda_lo = *in.lambda;
  if (in.Lambda) F.lambda_hi = *in.Lambda;
  if (in.alpha) F.alpha = *in.alpha;
  // The upper modulus is audited only when the configuration declares it.
  F.beta = in.beta;
  F.validate();
  return F;
}

inline CrossSection make_cross_section(const RunConfig& c) {
  CrossSection cs;
  cs.sides = c.domain ? c.domain->omega2 : std::vector<Interval>{Interval{0.0, 1.0}};
  return cs;
}

inline SourceTerm make_source(const RunConfig& c) {
  if (!c.source) return SourceTerm::constant(1.0);
  if (c.source->form == "polynomial") return SourceTerm::polynomial(c.source->coefs);
  return SourceTerm::constant(c.source->value);
}

inline SolverOptions make_solver_options(const RunConfig& c) {
  const auto& s = c.solver;
  SolverOptions o;
  o.max_iters = s.max_iters;
  o.energy_tol = s.energy_tol;
  o.window = s.window;
  o.grad_tol = s.grad_tol;
  o.armijo_c = s.armijo_c;
  o.backtrack_rho = s.backtrack_rho;
  o.bb_steps = s.bb_steps;
  o.lbfgs_memory = s.lbfgs_memory;
  o.precondition = s.precondition;
  o.smoothing_schedule = s.smoothing_schedule;
  o.method = s.method == "direct"      ? SolveMethod::direct
             : s.method == "iterative" ? SolveMethod::iterative
                                       : SolveMethod::automatic;
  o.seed = c.seed;
  return o;
}

}  // namespace cylvar

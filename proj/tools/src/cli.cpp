/*
 Copyright 2026 The anticip_smp Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "anticip_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "anticip/error.hpp"
#include "anticip/examples.hpp"
#include "anticip/isdde.hpp"
#include "anticip/smp.hpp"

namespace anticip::cli {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw ValidationError(field + " " + why);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) invalid(where.empty() ? "config" : where, "must be a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      invalid(where.empty() ? item.key() : where + "." + item.key(), "is not a known field");
    }
  }
}

double number(const json& obj, const std::string& key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) invalid(where + key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(where + key, "must be finite");
  return x;
}

std::size_t count(const json& obj, const std::string& key, const std::string& where,
                  std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    invalid(where + key, "must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::string text(const json& obj, const std::string& key, const std::string& where,
                 const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) invalid(where + key, "must be a string");
  return obj.at(key).get<std::string>();
}

const std::map<std::string, std::set<std::string>>& example_fields() {
  static const std::map<std::string, std::set<std::string>> fields = {
      {"consumption", {"a", "b", "rho", "xi", "horizon"}},
      {"climate",
       {"kappa", "beta", "eta", "lambda", "mu", "theta", "R", "y_bar", "horizon", "tail_tol",
        "extension"}},
      {"lq",
       {"A", "B", "C", "D", "E", "F", "L", "Ltilde", "delay", "xi", "eta", "phi", "horizon"}},
  };
  return fields;
}

TimeFn constant(double c) {
  return [c](double) { return c; };
}

double param(const RunConfig& c, const std::string& key, double fallback) {
  return number(c.params, key, "params.", fallback);
}

ConsumptionParams consumption_params(const RunConfig& c) {
  ConsumptionParams p;
  p.a = param(c, "a", p.a);
  p.b = param(c, "b", p.b);
  p.rho = param(c, "rho", p.rho);
  p.xi = param(c, "xi", p.xi);
  p.horizon = param(c, "horizon", p.horizon);
  return p;
}

ClimateParams climate_params(const RunConfig& c) {
  ClimateParams p;
  p.kappa = param(c, "kappa", p.kappa);
  p.beta = param(c, "beta", p.beta);
  p.eta = param(c, "eta", p.eta);
  p.lambda = param(c, "lambda", p.lambda);
  p.mu = param(c, "mu", p.mu);
  p.theta = param(c, "theta", p.theta);
  const double R = param(c, "R", 1.0);
  p.R = constant(R);
  p.y_bar = param(c, "y_bar", p.y_bar);
  p.horizon = param(c, "horizon", p.horizon);
  p.tail_tol = param(c, "tail_tol", p.tail_tol);
  const std::string ext = text(c.params, "extension", "params.", "hold");
  if (ext == "hold") {
    p.extension = AdjointExtension::hold_terminal;
  } else if (ext == "zero") {
    p.extension = AdjointExtension::zero;
  } else {
    invalid("params.extension", "must be \"hold\" or \"zero\"");
  }
  return p;
}

struct LqConstants {
  LqParams params;
  bool stochastic = false;
};

LqConstants lq_params(const RunConfig& c) {
  LqParams p;
  const auto coef = [&](const std::string& key, TimeFn& slot, double fallback) {
    const double v = param(c, key, fallback);
    slot = constant(v);
    return v;
  };
  coef("A", p.A, 0.1);
  coef("B", p.B, 0.2);
  const double C = coef("C", p.C, 0.0);
  const double D = coef("D", p.D, 0.0);
  coef("E", p.E, 1.0);
  coef("F", p.F, 0.5);
  coef("L", p.L, 1.0);
  coef("Ltilde", p.Ltilde, 1.0);
  coef("xi", p.xi, 1.0);
  coef("eta", p.eta, 0.0);
  coef("phi", p.phi, 0.0);
  p.delay = param(c, "delay", p.delay);
  p.horizon = param(c, "horizon", p.horizon);
  return {p, C != 0.0 || D != 0.0};
}

ConditionalEstimator estimator_of(const RunConfig& c) {
  if (c.estimator == "poly_regression") return ConditionalEstimator::poly_regression(c.degree);
  if (c.estimator == "nested_mc") return ConditionalEstimator::nested_mc(c.inner_paths);
  return ConditionalEstimator::deterministic();
}

SolveSettings settings_of(const RunConfig& c, std::size_t state_paths) {
  SolveSettings s;
  s.state_paths = state_paths;
  s.adjoint_paths = c.n_paths;
  s.seed = c.seed;
  s.estimator = estimator_of(c);
  s.picard_tol = c.picard_tol;
  s.picard_max_iter = c.picard_max_iter;
  return s;
}

// The example with its optimal control; a stochastic LQ adjoint gives a
// per-path control built from the configured estimator.
ExampleSetup build(const RunConfig& c, std::size_t n_steps) {
  if (c.example == "consumption") return consumption_problem(consumption_params(c), n_steps);
  if (c.example == "climate") return climate_problem(climate_params(c), n_steps);
  const LqConstants lq = lq_params(c);
  ExampleSetup setup = lq_problem(lq.params, n_steps);
  if (lq.stochastic && c.n_paths > 1) {
    const IncrementEnsemble incs = brownian_increments(setup.problem.grid, c.n_paths, c.seed);
    const PathEnsemble p = lq_adjoint_segments(lq_adjoint_coefficients(lq.params), lq.params.delay,
                                               setup.problem.grid, incs);
    setup.u_star = lq_optimal_control(lq.params, setup.problem, p, incs, estimator_of(c));
  }
  return setup;
}

double default_tolerance(const RunConfig& c, const ExampleSetup& setup) {
  return c.stationarity_tol ? *c.stationarity_tol : stationarity_tolerance(setup);
}

// Summary values keyed by summary_keys(); absent keys are written as null.
class Summary {
 public:
  void set(const std::string& key, double v) { numbers_[key] = v; }
  void set(const std::string& key, const std::string& v) { strings_[key] = v; }
  void set(const std::string& key, bool v) { bools_[key] = v; }

  std::string render() const {
    std::string out = "{\n";
    const auto& keys = summary_keys();
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const std::string& k = keys[i];
      out += "  " + json(k).dump() + ": ";
      if (auto it = numbers_.find(k); it != numbers_.end()) {
        out += std::isfinite(it->second) ? format_number(it->second) : "null";
      } else if (auto st = strings_.find(k); st != strings_.end()) {
        out += json(st->second).dump();
      } else if (auto b = bools_.find(k); b != bools_.end()) {
        out += b->second ? "true" : "false";
      } else {
        out += "null";
      }
      out += i + 1 < keys.size() ? ",\n" : "\n";
    }
    return out + "}\n";
  }

 private:
  std::map<std::string, double> numbers_;
  std::map<std::string, std::string> strings_;
  std::map<std::string, bool> bools_;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  bool first = true;
  for (double v : values) {
    if (!first) row += ',';
    row += format_number(v);
    first = false;
  }
  return row + "\n";
}

Summary base_summary(const std::string& command, const RunConfig& c) {
  Summary s;
  s.set("command", command);
  s.set("example", c.example);
  s.set("n_steps", static_cast<double>(c.n_steps));
  s.set("n_paths", static_cast<double>(c.n_paths));
  s.set("seed", static_cast<double>(c.seed));
  return s;
}

std::string node_table(const SmpReport& report, const PathEnsemble& u) {
  const TimeGrid& grid = u.grid();
  std::string csv = "t,u_star,G_mean,G_se,p_mean,p_se,Y_mean,Y_se,Z_mean,Z_se\n";
  const auto& Y = report.trajectory.state.Y;
  const auto& Z = report.trajectory.state.Z;
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    csv += csv_row({grid.time(node), u.mean(node), report.stationarity.mean(node),
                    report.stationarity.standard_error(node), report.p.mean(node),
                    report.p.standard_error(node), Y.mean(node), Y.standard_error(node),
                    Z.mean(node), Z.standard_error(node)});
  }
  return csv;
}

PathEnsemble shifted(const PathEnsemble& u, double by, const ControlBox& box) {
  PathEnsemble out = u;
  const TimeGrid& grid = u.grid();
  for (std::size_t node = grid.zero_node(); node < grid.node_count(); ++node) {
    for (std::size_t q = 0; q < u.n_paths(); ++q) out(q, node) = box.clip(u(q, node) + by);
  }
  return out;
}

int finish(const std::filesystem::path& dir, const RunConfig& c, Summary& summary, bool passed,
           const std::string& csv) {
  summary.set("passed", passed);
  write_file(dir / c.csv_name, csv);
  write_file(dir / c.summary_name, summary.render());
  return passed ? ok : check_failure;
}

double fitted_rate(const std::vector<double>& h, const std::vector<double>& err) {
  double mx = 0.0;
  double my = 0.0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    mx += std::log(h[i]) / n;
    my += std::log(err[i]) / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    sxy += (std::log(h[i]) - mx) * (std::log(err[i]) - my);
    sxx += (std::log(h[i]) - mx) * (std::log(h[i]) - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

// Adjoint error at one resolution: RMS at T against the segment recursion
// (lq) or max-node error against the closed form (consumption, climate).
double adjoint_error(const RunConfig& c, std::size_t n) {
  const ExampleSetup setup = build(c, n);
  const ControlProblem& problem = setup.problem;
  const TimeGrid& grid = problem.grid;
  const SolveSettings settings = settings_of(c, 1);
  const PathEnsemble u = c.example == "lq" ? control_path(problem, [](double) { return 0.0; })
                                           : setup.u_star;
  const Trajectory traj =
      solve_state(problem, u, brownian_increments(grid, 1, c.seed), settings);
  const ForwardProblem adjoint = assemble_adjoint(problem, linearize(problem, traj));
  if (c.example == "lq") {
    const LqConstants lq = lq_params(c);
    const IncrementEnsemble incs = brownian_increments(grid, c.n_paths, c.seed);
    const PathEnsemble p = euler_maruyama(adjoint, grid, incs);
    const PathEnsemble ref = lq_adjoint_segments(lq_adjoint_coefficients(lq.params),
                                                 lq.params.delay, grid, incs);
    double sum = 0.0;
    for (std::size_t q = 0; q < c.n_paths; ++q) {
      const double d = p(q, grid.terminal_node()) - ref(q, grid.terminal_node());
      sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(c.n_paths));
  }
  const PathEnsemble p = euler_maruyama(adjoint, grid, brownian_increments(grid, 1, c.seed));
  double worst = 0.0;
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    const double t = grid.time(node);
    const double exact = c.example == "consumption"
                             ? -std::cosh(std::sqrt(consumption_params(c).b) * t)
                             : climate_adjoint(climate_params(c), t);
    worst = std::max(worst, std::abs(p(0, node) - exact));
  }
  return worst;
}

}  // namespace

const std::vector<std::string>& summary_keys() {
  static const std::vector<std::string> keys = {
      "command",           "example",          "n_steps",          "n_paths",
      "seed",              "cost",             "max_violation",    "stationarity_tol",
      "duality_gap",       "gradient_fd",      "gradient_pairing", "gradient_rel_error",
      "picard_iterations", "convergence_rate", "probe_min_margin", "probe_slack",
      "passed"};
  return keys;
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

RunConfig parse_config(const json& doc) {
  RunConfig c;
  check_keys(doc, "",
             {"example", "params", "grid", "n_paths", "seed", "estimator", "tolerances", "checks",
              "outputs"});
  c.example = text(doc, "example", "", c.example);
  if (doc.contains("params")) {
    c.params = doc.at("params");
    if (!c.params.is_object()) invalid("params", "must be a JSON object");
  }
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    check_keys(g, "grid", {"n_steps"});
    c.n_steps = count(g, "n_steps", "grid.", c.n_steps);
  }
  c.n_paths = count(doc, "n_paths", "", c.n_paths);
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) invalid("seed", "must be a nonnegative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("estimator")) {
    const json& e = doc.at("estimator");
    check_keys(e, "estimator", {"kind", "degree", "inner_paths"});
    c.estimator = text(e, "kind", "estimator.", c.estimator);
    c.degree = static_cast<int>(count(e, "degree", "estimator.", static_cast<std::size_t>(c.degree)));
    c.inner_paths = count(e, "inner_paths", "estimator.", c.inner_paths);
  }
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    check_keys(t, "tolerances",
               {"picard_tol", "picard_max_iter", "stationarity_tol", "gradient_eps",
                "gradient_tol", "duality_tol"});
    c.picard_tol = number(t, "picard_tol", "tolerances.", c.picard_tol);
    c.picard_max_iter = count(t, "picard_max_iter", "tolerances.", c.picard_max_iter);
    if (t.contains("stationarity_tol")) {
      c.stationarity_tol = number(t, "stationarity_tol", "tolerances.", 0.0);
    }
    c.gradient_eps = number(t, "gradient_eps", "tolerances.", c.gradient_eps);
    c.gradient_tol = number(t, "gradient_tol", "tolerances.", c.gradient_tol);
    c.duality_tol = number(t, "duality_tol", "tolerances.", c.duality_tol);
  }
  if (doc.contains("checks")) {
    const json& k = doc.at("checks");
    check_keys(k, "checks", {"gradient_shift", "halvings", "probe_count", "probe_magnitude"});
    c.gradient_shift = number(k, "gradient_shift", "checks.", c.gradient_shift);
    c.halvings = count(k, "halvings", "checks.", c.halvings);
    c.probe_count = count(k, "probe_count", "checks.", c.probe_count);
    c.probe_magnitude = number(k, "probe_magnitude", "checks.", c.probe_magnitude);
  }
  if (doc.contains("outputs")) {
    const json& o = doc.at("outputs");
    check_keys(o, "outputs", {"dir", "csv", "summary"});
    c.out_dir = text(o, "dir", "outputs.", c.out_dir);
    c.csv_name = text(o, "csv", "outputs.", c.csv_name);
    c.summary_name = text(o, "summary", "outputs.", c.summary_name);
  }
  return c;
}

void validate(const RunConfig& c) {
  const auto& fields = example_fields();
  const auto it = fields.find(c.example);
  if (it == fields.end()) invalid("example", "must be one of consumption, climate, lq");
  check_keys(c.params, "params", it->second);
  for (const auto& item : c.params.items()) {
    if (item.key() == "extension") continue;
    number(c.params, item.key(), "params.", 0.0);
  }
  if (c.n_steps < 1) invalid("grid.n_steps", "must be at least 1");
  if (c.n_paths < 1) invalid("n_paths", "must be at least 1");
  if (c.estimator != "deterministic" && c.estimator != "poly_regression" &&
      c.estimator != "nested_mc") {
    invalid("estimator.kind", "must be deterministic, poly_regression or nested_mc");
  }
  if (c.inner_paths < 1) invalid("estimator.inner_paths", "must be at least 1");
  const auto positive = [](double v, const std::string& field) {
    if (!(v > 0.0)) invalid(field, "must be positive");
  };
  positive(c.picard_tol, "tolerances.picard_tol");
  if (c.picard_max_iter < 1) invalid("tolerances.picard_max_iter", "must be at least 1");
  if (c.stationarity_tol) positive(*c.stationarity_tol, "tolerances.stationarity_tol");
  positive(c.gradient_eps, "tolerances.gradient_eps");
  positive(c.gradient_tol, "tolerances.gradient_tol");
  positive(c.duality_tol, "tolerances.duality_tol");
  if (c.halvings < 2) invalid("checks.halvings", "must be at least 2");
  if (c.probe_magnitude < 0.0) invalid("checks.probe_magnitude", "must be nonnegative");
  if (c.out_dir.empty()) invalid("outputs.dir", "must not be empty");

  const double horizon = number(c.params, "horizon", "params.", 1.0);
  positive(horizon, "params.horizon");
  if (c.example == "consumption") {
    const ConsumptionParams p = consumption_params(c);
    positive(p.a, "params.a");
    if (p.b < 0.0) invalid("params.b", "must be nonnegative");
    if (!(p.rho > 0.0 && p.rho < 1.0)) invalid("params.rho", "must lie in (0, 1)");
  } else if (c.example == "climate") {
    const ClimateParams p = climate_params(c);
    for (const char* key : {"kappa", "eta", "lambda", "mu", "theta", "R"}) {
      positive(param(c, key, 1.0), std::string("params.") + key);
    }
    if (p.beta < 0.0) invalid("params.beta", "must be nonnegative");
    if (!(p.tail_tol > 0.0 && p.tail_tol < 1.0)) invalid("params.tail_tol", "must lie in (0, 1)");
  } else {
    const LqConstants lq = lq_params(c);
    positive(lq.params.delay, "params.delay");
    positive(lq.params.L(0.0), "params.L");
    positive(lq.params.Ltilde(0.0), "params.Ltilde");
    const double steps = lq.params.delay / horizon * static_cast<double>(c.n_steps);
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
      invalid("params.delay", "must be a whole number of grid steps");
    }
  }
}

int run_command(const std::string& command, const RunConfig& c, std::ostream& log) {
  namespace fs = std::filesystem;
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  Summary summary = base_summary(command, c);

  if (command == "convergence") {
    std::vector<double> hs;
    std::vector<double> errs;
    std::string csv = "h,strong_error\n";
    for (std::size_t j = 0; j < c.halvings; ++j) {
      const std::size_t n = c.n_steps << j;
      const double err = adjoint_error(c, n);
      const double h = number(c.params, "horizon", "params.", 1.0) / static_cast<double>(n);
      hs.push_back(h);
      errs.push_back(err);
      csv += csv_row({h, err});
      log << "h = " << format_number(h) << " error = " << format_number(err) << "\n";
    }
    const double rate = fitted_rate(hs, errs);
    summary.set("convergence_rate", rate);
    const bool passed = c.example == "lq" ? (rate >= 0.35 && rate <= 0.65) : rate >= 0.8;
    return finish(dir, c, summary, passed, csv);
  }

  const ExampleSetup setup = build(c, c.n_steps);
  const ControlProblem& problem = setup.problem;
  const SolveSettings settings = settings_of(c, setup.u_star.n_paths());
  const double tol = default_tolerance(c, setup);
  summary.set("stationarity_tol", tol);

  if (command == "run" || command == "duality-check") {
    const SmpReport report = evaluate_smp(problem, setup.u_star, settings, c.gradient_eps);
    summary.set("cost", report.cost);
    summary.set("max_violation", report.max_violation);
    summary.set("duality_gap", report.duality_gap);
    summary.set("gradient_fd", report.gradient.fd);
    summary.set("gradient_pairing", report.gradient.pairing);
    summary.set("gradient_rel_error", report.gradient.rel_error);
    summary.set("picard_iterations", static_cast<double>(report.picard_iterations));
    log << "cost " << format_number(report.cost) << ", max violation "
        << format_number(report.max_violation) << "\n";
    const bool passed = command == "run" ? report.max_violation <= tol
                                         : report.duality_gap <= c.duality_tol;
    return finish(dir, c, summary, passed, node_table(report, setup.u_star));
  }

  // finite-difference costs only see the control on [0, T), which matches the
  // zero-extension adjoint
  ExampleSetup truncated = setup;
  if (c.example == "climate") {
    ClimateParams p = climate_params(c);
    p.extension = AdjointExtension::zero;
    truncated = climate_problem(p, c.n_steps);
  }

  if (command == "gradient-check") {
    const PathEnsemble u = shifted(truncated.u_star, c.gradient_shift, problem.box);
    const SmpReport report = evaluate_smp(truncated.problem, u, settings, c.gradient_eps);
    summary.set("cost", report.cost);
    summary.set("max_violation", report.max_violation);
    summary.set("duality_gap", report.duality_gap);
    summary.set("gradient_fd", report.gradient.fd);
    summary.set("gradient_pairing", report.gradient.pairing);
    summary.set("gradient_rel_error", report.gradient.rel_error);
    summary.set("picard_iterations", static_cast<double>(report.picard_iterations));
    log << "fd " << format_number(report.gradient.fd) << ", pairing "
        << format_number(report.gradient.pairing) << "\n";
    return finish(dir, c, summary, report.gradient.rel_error <= c.gradient_tol,
                  node_table(report, u));
  }

  if (command == "sufficiency-probe") {
    const ExampleSetup& probe_setup = truncated;
    const double slack = 10.0 * problem.grid.step() * probe_setup.scale * c.probe_magnitude *
                         problem.grid.horizon();
    const auto probes = sufficiency_probe(probe_setup.problem, probe_setup.u_star, c.probe_count,
                                          c.probe_magnitude, c.seed, settings);
    std::string csv = "index,cost_star,cost_perturbed\n";
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < probes.size(); ++k) {
      csv += csv_row({static_cast<double>(k), probes[k].cost_star, probes[k].cost_perturbed});
      margin = std::min(margin, probes[k].cost_perturbed - probes[k].cost_star);
    }
    if (!probes.empty()) summary.set("cost", probes.front().cost_star);
    summary.set("probe_min_margin", probes.empty() ? 0.0 : margin);
    summary.set("probe_slack", slack);
    return finish(dir, c, summary, probes.empty() || margin >= -slack, csv);
  }
  invalid("command", "must be run, convergence, gradient-check, duality-check or sufficiency-probe");
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic control with measure-valued delay and anticipation"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::string> example;
  std::optional<std::size_t> n_steps;
  std::optional<std::size_t> n_paths;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> halvings;
  std::optional<std::size_t> probe_count;
  std::optional<double> magnitude;
  std::optional<double> eps;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"run", "Evaluate the maximum-principle report at the optimal control"},
      {"convergence", "Adjoint error under h-halving with a fitted rate"},
      {"gradient-check", "Finite-difference gradient against the stationarity pairing"},
      {"duality-check", "Discrete duality gap between adjoint and variation"},
      {"sufficiency-probe", "Cost at random perturbations of the optimal control"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--example", example, "consumption, climate or lq");
    sub->add_option("--n", n_steps, "Number of time steps");
    sub->add_option("--paths", n_paths, "Number of Monte Carlo paths");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--out-dir", out_dir, "Output directory");
    sub->add_option("--halvings", halvings, "Number of grids in the convergence study");
    sub->add_option("--count", probe_count, "Number of probe perturbations");
    sub->add_option("--magnitude", magnitude, "Probe perturbation size");
    sub->add_option("--eps", eps, "Finite-difference step");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return validation_error;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig config;
  try {
    json doc = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) invalid("--config", "cannot be opened: " + config_path);
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        invalid("--config", std::string("is not valid JSON: ") + e.what());
      }
    }
    config = parse_config(doc);
    if (example) config.example = *example;
    if (n_steps) config.n_steps = *n_steps;
    if (n_paths) config.n_paths = *n_paths;
    if (seed) config.seed = *seed;
    if (out_dir) config.out_dir = *out_dir;
    if (halvings) config.halvings = *halvings;
    if (probe_count) config.probe_count = *probe_count;
    if (magnitude) config.probe_magnitude = *magnitude;
    if (eps) config.gradient_eps = *eps;
    validate(config);
  } catch (const ValidationError& e) {
    err << "error: invalid config: " << e.what() << "\n";
    return validation_error;
  }

  try {
    return run_command(command, config, out);
  } catch (const ValidationError& e) {
    err << "error: invalid config: " << e.what() << "\n";
    return validation_error;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return solver_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return solver_error;
  }
}

}  // namespace anticip::cli

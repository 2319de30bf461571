// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file cli.hpp
 * @brief Run configuration, subcommand execution and result persistence for
 * the command-line front-end.
 */

#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ssvqd/checks.hpp"
#include "ssvqd/drivers.hpp"
#include "ssvqd/error.hpp"
#include "ssvqd/fci.hpp"
#include "ssvqd/hamio.hpp"

namespace ssvqd::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kParseError = 3,
  kNotConverged = 4,
  kInvariantViolation = 5,
};

struct RunConfig {
  std::string fcidump_path;
  int n_active = 0;  ///< active spin-orbitals N; 0 means all
  int n_states = 1;  ///< K
  std::vector<double> weights;  ///< empty: K, K-1, ..., 1
  std::vector<double> betas;    ///< empty: 15 Ha for every lower state
  OptimizerConfig optimizer;
  std::vector<std::vector<int>> per_state_init;  ///< 1-based spatial columns
  std::vector<int> shared_init;                  ///< state-averaged start; empty: padded identity
  bool random_init = false;
  bool include_core_energy = false;
  bool compute_fci = true;
  int fci_roots = 0;  ///< 0 means n_states
  double overlap_report_tol = 1e-8;
  int check_instances = 100;
  std::string output_dir = "out";
};

using nlohmann::json;

inline void from_json_strict(const json& j, RunConfig& c) {
  static const std::set<std::string> known = {
      "fcidump",        "n_active_spin_orbitals", "n_states",          "weights",       "betas",
      "eta",            "inner_steps",            "theta_method",      "theta_budget",  "theta_restarts",
      "outer_tol",      "max_outer",              "orbital_tol",       "max_orbital_cycles",
      "reps",           "flip_overlap_sign",      "per_state_init",    "shared_init",   "random_init",
      "seed",           "include_core_energy",    "compute_fci",       "fci_roots",     "overlap_report_tol",
      "check_instances", "output_dir"};
  if (!j.is_object()) throw ConfigError("config must be a key-value object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  };
  get("fcidump", c.fcidump_path);
  get("n_active_spin_orbitals", c.n_active);
  get("n_states", c.n_states);
  get("weights", c.weights);
  get("betas", c.betas);
  get("eta", c.optimizer.eta);
  get("inner_steps", c.optimizer.inner_steps);
  if (j.contains("theta_method")) {
    std::string m;
    get("theta_method", m);
    c.optimizer.theta_method = parse_theta_method(m);
  }
  get("theta_budget", c.optimizer.theta_budget);
  get("theta_restarts", c.optimizer.theta_restarts);
  get("outer_tol", c.optimizer.outer_tol);
  get("max_outer", c.optimizer.max_outer);
  get("orbital_tol", c.optimizer.orbital_tol);
  get("max_orbital_cycles", c.optimizer.max_orbital_cycles);
  get("reps", c.optimizer.reps);
  get("flip_overlap_sign", c.optimizer.flip_overlap_sign);
  get("per_state_init", c.per_state_init);
  get("shared_init", c.shared_init);
  get("random_init", c.random_init);
  get("seed", c.optimizer.seed);
  get("include_core_energy", c.include_core_energy);
  get("compute_fci", c.compute_fci);
  get("fci_roots", c.fci_roots);
  get("overlap_report_tol", c.overlap_report_tol);
  get("check_instances", c.check_instances);
  get("output_dir", c.output_dir);
}

inline json to_json(const RunConfig& c) {
  return json{{"fcidump", c.fcidump_path},
              {"n_active_spin_orbitals", c.n_active},
              {"n_states", c.n_states},
              {"weights", c.weights},
              {"betas", c.betas},
              {"eta", c.optimizer.eta},
              {"inner_steps", c.optimizer.inner_steps},
              {"theta_method", to_string(c.optimizer.theta_method)},
              {"theta_budget", c.optimizer.theta_budget},
              {"theta_restarts", c.optimizer.theta_restarts},
              {"outer_tol", c.optimizer.outer_tol},
              {"max_outer", c.optimizer.max_outer},
              {"orbital_tol", c.optimizer.orbital_tol},
              {"max_orbital_cycles", c.optimizer.max_orbital_cycles},
              {"reps", c.optimizer.reps},
              {"flip_overlap_sign", c.optimizer.flip_overlap_sign},
              {"per_state_init", c.per_state_init},
              {"shared_init", c.shared_init},
              {"random_init", c.random_init},
              {"seed", c.optimizer.seed},
              {"include_core_energy", c.include_core_energy},
              {"compute_fci", c.compute_fci},
              {"fci_roots", c.fci_roots},
              {"overlap_report_tol", c.overlap_report_tol},
              {"check_instances", c.check_instances}};
}

/// Reads a JSON config; a relative fcidump path resolves against the config's directory.
inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  RunConfig c;
  from_json_strict(j, c);
  if (!c.fcidump_path.empty()) {
    std::filesystem::path p(c.fcidump_path);
    if (p.is_relative()) c.fcidump_path = (std::filesystem::path(path).parent_path() / p).lexically_normal().string();
  }
  return c;
}

/// Checks the invariants that depend on the integrals.
inline void validate(const RunConfig& c, const MolecularIntegrals& ints) {
  c.optimizer.validate();
  const int m = ints.m_spatial;
  const int n = c.n_active == 0 ? 2 * m : c.n_active;
  if (n <= 0 || n % 2 != 0) throw ConfigError("n_active_spin_orbitals must be a positive even number");
  if (n > 2 * m) throw ConfigError("n_active_spin_orbitals exceeds the " + std::to_string(2 * m) + " available");
  if (c.n_states < 1) throw ConfigError("n_states must be at least 1");
  if (!c.weights.empty() && c.weights.size() != static_cast<std::size_t>(c.n_states))
    throw ConfigError("weights must have n_states entries");
  for (double w : c.weights)
    if (!(w > 0)) throw ConfigError("weights must be positive");
  for (double b : c.betas)
    if (!(b > 0)) throw ConfigError("betas must be positive");
  auto check_columns = [&](const std::vector<int>& cols, const std::string& what) {
    if (static_cast<int>(cols.size()) != n / 2)
      throw ConfigError(what + " must list " + std::to_string(n / 2) + " spatial columns");
    std::set<int> seen;
    for (int col : cols) {
      if (col < 1 || col > m) throw ConfigError(what + ": column " + std::to_string(col) + " out of range");
      if (!seen.insert(col).second) throw ConfigError(what + ": repeated column " + std::to_string(col));
    }
  };
  if (c.per_state_init.size() > static_cast<std::size_t>(c.n_states))
    throw ConfigError("per_state_init has more entries than n_states");
  for (std::size_t k = 0; k < c.per_state_init.size(); ++k)
    if (!c.per_state_init[k].empty()) check_columns(c.per_state_init[k], "per_state_init[" + std::to_string(k) + "]");
  if (!c.shared_init.empty()) check_columns(c.shared_init, "shared_init");
  if (c.fci_roots < 0) throw ConfigError("fci_roots must be non-negative");
  if (c.check_instances < 1) throw ConfigError("check_instances must be at least 1");
}

/// Wall-clock sections kept apart from the reproducible part of the record.
class Stopwatch {
 public:
  void start(const std::string& name) {
    name_ = name;
    t0_ = std::chrono::steady_clock::now();
  }
  void stop() {
    timing_[name_] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }
  const json& timing() const noexcept { return timing_; }

 private:
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
  json timing_ = json::object();
};

/// Result of one subcommand: the summary document plus CSV tables by file name.
struct RunResult {
  json summary;
  json timing = json::object();
  std::vector<std::pair<std::string, std::string>> tables;
  int exit_code = kOk;
};

inline std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline std::vector<double> fci_reference(const MolecularIntegrals& ints, int n_roots, Stopwatch& sw) {
  sw.start("fci_seconds");
  const DeterminantBasis basis = build_basis(2 * ints.m_spatial, ints.n_alpha(), ints.n_beta());
  const int k = std::min<int>(n_roots, static_cast<int>(basis.size()));
  const EigenResult r = lowest_eigenpairs(ints, basis, k);
  std::vector<double> e;
  for (int i = 0; i < k; ++i) e.push_back(r.electronic(i));
  sw.stop();
  return e;
}

inline double relative_error(double e, double ref) { return std::abs(e - ref) / std::abs(ref); }

inline std::vector<double> resolved_weights(const RunConfig& c) {
  return c.weights.empty() ? SAWeights::descending(c.n_states).w : c.weights;
}

inline json energy_entry(double electronic, double e_core, bool include_core) {
  return json{{"electronic", electronic},
              {"total", electronic + e_core},
              {"reported", include_core ? electronic + e_core : electronic}};
}

/// iteration, energy, |E - E_FCI|, squared overlaps with each lower state.
inline std::string trace_csv(const StateSolution& s, std::optional<double> fci) {
  std::ostringstream os;
  os << "iteration,energy,abs_error_fci,objective,delta_energy,theta_evaluations,orbital_steps";
  for (int j = 1; j < s.index; ++j) os << ",overlap_sq_" << j;
  os << '\n';
  auto err = [&](double e) { return fci ? format_double(std::abs(e - *fci)) : std::string(); };
  if (!std::isnan(s.initial_energy)) {
    os << 0 << ',' << format_double(s.initial_energy) << ',' << err(s.initial_energy) << ",,,0,0";
    for (int j = 1; j < s.index; ++j) os << ',';
    os << '\n';
  }
  for (const auto& r : s.trace) {
    os << r.iteration << ',' << format_double(r.energy) << ',' << err(r.energy) << ',' << format_double(r.objective)
       << ',' << format_double(r.delta_energy) << ',' << r.theta_evaluations << ',' << r.orbital_steps;
    for (double o : r.overlaps) os << ',' << format_double(o);
    os << '\n';
  }
  return os.str();
}

inline json state_json(const StateSolution& s, double e_core, const RunConfig& c, std::optional<double> fci) {
  json j{{"index", s.index},
         {"energy", energy_entry(s.energy, e_core, c.include_core_energy)},
         {"objective", s.objective},
         {"converged", s.converged},
         {"iterations", s.trace.size()},
         {"final_overlaps_sq", s.final_overlaps},
         {"theta", s.theta},
         {"warnings", s.warnings}};
  std::vector<std::vector<double>> u(static_cast<std::size_t>(s.u.m_spatial()));
  for (int i = 0; i < s.u.m_spatial(); ++i)
    for (int a = 0; a < s.u.n_spatial(); ++a) u[static_cast<std::size_t>(i)].push_back(s.u.block()(i, a));
  j["u"] = u;
  if (fci) {
    j["fci_electronic"] = *fci;
    j["relative_error"] = relative_error(s.energy, *fci);
  }
  return j;
}

inline PartialUnitary initial_u(const RunConfig& c, int m, int n, const std::vector<int>& cols, std::mt19937_64& rng) {
  if (!cols.empty()) return PartialUnitary::select_columns(m, cols);
  if (c.random_init) return PartialUnitary::random(m, n, rng);
  return PartialUnitary::padded_identity(m, n);
}

inline RunResult run_fci(const RunConfig& c, const MolecularIntegrals& ints) {
  RunResult out;
  Stopwatch sw;
  const int roots = c.fci_roots > 0 ? c.fci_roots : c.n_states;
  const std::vector<double> e = fci_reference(ints, roots, sw);
  json states = json::array();
  for (std::size_t i = 0; i < e.size(); ++i)
    states.push_back(json{{"index", i + 1}, {"energy", energy_entry(e[i], ints.e_core, c.include_core_energy)}});
  out.summary = json{{"subcommand", "fci"}, {"e_core", ints.e_core}, {"roots", states}};
  if (static_cast<int>(e.size()) >= c.n_states) {
    const std::vector<double> head(e.begin(), e.begin() + c.n_states);
    out.summary["weighted_sum"] = weighted_sum_report(head, resolved_weights(c));
  }
  std::ostringstream csv;
  csv << "root,energy_electronic,energy_total\n";
  for (std::size_t i = 0; i < e.size(); ++i)
    csv << i + 1 << ',' << format_double(e[i]) << ',' << format_double(e[i] + ints.e_core) << '\n';
  out.tables.emplace_back("fci_roots.csv", csv.str());
  out.timing = sw.timing();
  return out;
}

inline RunResult run_ssvqd(const RunConfig& c, const MolecularIntegrals& ints) {
  RunResult out;
  Stopwatch sw;
  const int n = c.n_active == 0 ? 2 * ints.m_spatial : c.n_active;
  std::vector<double> fci;
  if (c.compute_fci) fci = fci_reference(ints, std::max(c.n_states, c.fci_roots), sw);
  const SolverContext ctx(ints, n, ints.n_alpha(), ints.n_beta());
  const auto solver = make_ansatz_solver(ctx.space, c.optimizer);
  const DeflationConfig deflation{c.betas, 15.0};
  std::mt19937_64 rng(c.optimizer.seed);
  std::vector<StateInit> inits;
  for (int k = 0; k < c.n_states; ++k) {
    const std::vector<int> cols =
        static_cast<std::size_t>(k) < c.per_state_init.size() ? c.per_state_init[static_cast<std::size_t>(k)]
                                                               : std::vector<int>{};
    inits.push_back(StateInit{initial_u(c, ints.m_spatial, n / 2, cols, rng), {}});
  }
  sw.start("ssvqd_seconds");
  const std::vector<StateSolution> states = solve_ssvqd(ctx, c.n_states, inits, *solver, c.optimizer, deflation);
  sw.stop();

  json js = json::array();
  std::vector<double> energies;
  bool converged = true;
  bool overlaps_ok = true;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto ref = k < fci.size() ? std::optional<double>(fci[k]) : std::nullopt;
    js.push_back(state_json(states[k], ints.e_core, c, ref));
    energies.push_back(states[k].energy);
    converged = converged && states[k].converged;
    for (double o : states[k].final_overlaps) overlaps_ok = overlaps_ok && o < c.overlap_report_tol;
    out.tables.emplace_back("trace_state_" + std::to_string(k + 1) + ".csv",
                            trace_csv(states[k], ref));
  }
  const std::vector<double> w = resolved_weights(c);
  out.summary = json{{"subcommand", "ssvqd"},   {"e_core", ints.e_core},
                     {"states", js},            {"weighted_sum", weighted_sum_report(energies, w)},
                     {"weights", w},            {"converged", converged},
                     {"overlaps_below_report_tol", overlaps_ok}};
  if (fci.size() >= energies.size()) {
    const std::vector<double> head(fci.begin(), fci.begin() + static_cast<std::ptrdiff_t>(energies.size()));
    out.summary["fci_weighted_sum"] = weighted_sum_report(head, w);
    out.summary["weighted_sum_error"] = out.summary["weighted_sum"].get<double>() - out.summary["fci_weighted_sum"].get<double>();
  }
  if (!fci.empty()) out.summary["fci_electronic"] = fci;
  out.timing = sw.timing();
  out.exit_code = converged ? kOk : kNotConverged;
  return out;
}

inline RunResult run_savqd(const RunConfig& c, const MolecularIntegrals& ints) {
  RunResult out;
  Stopwatch sw;
  const int n = c.n_active == 0 ? 2 * ints.m_spatial : c.n_active;
  std::vector<double> fci;
  if (c.compute_fci) fci = fci_reference(ints, std::max(c.n_states, c.fci_roots), sw);
  const SolverContext ctx(ints, n, ints.n_alpha(), ints.n_beta());
  const auto solver = make_ansatz_solver(ctx.space, c.optimizer);
  const DeflationConfig deflation{c.betas, 15.0};
  std::mt19937_64 rng(c.optimizer.seed);
  const PartialUnitary u0 = initial_u(c, ints.m_spatial, n / 2, c.shared_init, rng);
  const std::vector<double> w = resolved_weights(c);
  sw.start("savqd_seconds");
  const SavqdResult r = solve_savqd(ctx, c.n_states, u0, SAWeights(w), *solver, c.optimizer, deflation);
  sw.stop();

  json js = json::array();
  bool overlaps_ok = true;
  for (std::size_t k = 0; k < r.states.size(); ++k) {
    const auto ref = k < fci.size() ? std::optional<double>(fci[k]) : std::nullopt;
    js.push_back(state_json(r.states[k], ints.e_core, c, ref));
    for (double o : r.states[k].final_overlaps) overlaps_ok = overlaps_ok && o < c.overlap_report_tol;
    out.tables.emplace_back("trace_state_" + std::to_string(k + 1) + ".csv",
                            trace_csv(r.states[k], ref));
  }
  std::ostringstream csv;
  csv << "iteration,weighted_sum,delta_weighted,orbital_steps";
  for (int k = 1; k <= c.n_states; ++k) csv << ",energy_" << k;
  csv << '\n';
  for (const auto& rec : r.trace) {
    csv << rec.iteration << ',' << format_double(rec.weighted) << ',' << format_double(rec.delta_weighted) << ','
        << rec.orbital_steps;
    for (double e : rec.energies) csv << ',' << format_double(e);
    csv << '\n';
  }
  out.tables.emplace_back("trace_weighted.csv", csv.str());
  out.summary = json{{"subcommand", "savqd"},   {"e_core", ints.e_core},
                     {"states", js},            {"weighted_sum", r.weighted},
                     {"weights", w},            {"converged", r.converged},
                     {"iterations", r.trace.size()},
                     {"overlaps_below_report_tol", overlaps_ok}};
  if (fci.size() >= r.states.size()) {
    const std::vector<double> head(fci.begin(), fci.begin() + static_cast<std::ptrdiff_t>(r.states.size()));
    out.summary["fci_weighted_sum"] = weighted_sum_report(head, w);
    out.summary["weighted_sum_error"] = r.weighted - out.summary["fci_weighted_sum"].get<double>();
  }
  if (!fci.empty()) out.summary["fci_electronic"] = fci;
  out.timing = sw.timing();
  out.exit_code = r.converged ? kOk : kNotConverged;
  return out;
}

inline json report_json(const CheckReport& report) {
  json a = json::array();
  for (const auto& r : report)
    a.push_back(json{{"name", r.name},
                     {"instances", r.instances},
                     {"worst_error", r.worst},
                     {"tolerance", r.tolerance},
                     {"passed", r.passed()}});
  return a;
}

inline RunResult run_check(const std::string& which, std::uint64_t seed, int instances) {
  RunResult out;
  Stopwatch sw;
  sw.start(which + "_seconds");
  CheckReport report;
  if (which == "gradcheck") {
    GradientSuiteOptions opt;
    opt.instances = instances;
    report = gradient_suite(seed, opt);
  } else {
    report = exterior_suite(seed);
  }
  sw.stop();
  out.summary = json{{"subcommand", which}, {"seed", seed}, {"checks", report_json(report)},
                     {"passed", all_passed(report)}};
  out.timing = sw.timing();
  out.exit_code = all_passed(report) ? kOk : kInvariantViolation;
  return out;
}

/// Writes summary.json (with wall times under "timing") and every table.
inline void persist(const RunResult& r, const RunConfig& c, const std::string& output_dir) {
  std::filesystem::create_directories(output_dir);
  json doc = r.summary;
  doc["config"] = to_json(c);
  doc["exit_code"] = r.exit_code;
  doc["timing"] = r.timing;
  std::ofstream(std::filesystem::path(output_dir) / "summary.json") << doc.dump(2) << '\n';
  for (const auto& [name, body] : r.tables) std::ofstream(std::filesystem::path(output_dir) / name) << body;
}

/// Executes one subcommand and persists the record. Errors map to exit codes.
inline int run(const std::string& subcommand, const RunConfig& config, const std::string& output_dir,
               std::ostream& log) {
  try {
    RunResult r;
    if (subcommand == "gradcheck" || subcommand == "overlap-check") {
      r = run_check(subcommand, config.optimizer.seed, config.check_instances);
    } else {
      if (config.fcidump_path.empty()) throw ConfigError("config key 'fcidump' is required for " + subcommand);
      if (!std::filesystem::exists(config.fcidump_path))
        throw ConfigError("fcidump '" + config.fcidump_path + "' does not exist");
      MolecularIntegrals ints;
      try {
        ints = read_fcidump(config.fcidump_path);
      } catch (const Error& e) {
        throw ParseError(e.what());
      }
      validate(config, ints);
      if (subcommand == "fci")
        r = run_fci(config, ints);
      else if (subcommand == "ssvqd")
        r = run_ssvqd(config, ints);
      else if (subcommand == "savqd")
        r = run_savqd(config, ints);
      else
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
    persist(r, config, output_dir);
    return r.exit_code;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const RangeError& e) {
    log << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    log << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const ConvergenceError& e) {
    log << "not converged: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    log << "invariant violation: " << e.what() << '\n';
    return kInvariantViolation;
  }
}

}  // namespace ssvqd::cli

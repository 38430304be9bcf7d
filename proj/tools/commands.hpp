/*
 Copyright 2026 The minjump Authors

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
#ifndef MINJUMP_TOOLS_COMMANDS_HPP
#define MINJUMP_TOOLS_COMMANDS_HPP

/**
 * @file commands.hpp
 * @brief Job configuration files and the verify / synth / simulate / example
 * workflows behind the command-line tool.
 *
 * Every command returns an exit code and writes to caller-supplied streams,
 * so the whole front end is testable in-process.
 */

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "minjump/certcheck.hpp"
#include "minjump/errors.hpp"
#include "minjump/model.hpp"
#include "minjump/numerics.hpp"
#include "minjump/rules.hpp"
#include "minjump/sim.hpp"
#include "minjump/synth.hpp"

namespace minjump::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int { kPass = 0, kFail = 1, kConfig = 2, kNumeric = 3 };

// ---------------------------------------------------------------------------
// Logging

enum class LogLevel { quiet, info, debug };

inline LogLevel log_level_from_env() {
  const char* v = std::getenv("MINJUMP_LOG");
  if (!v) return LogLevel::info;
  const std::string s(v);
  if (s == "quiet") return LogLevel::quiet;
  if (s == "debug") return LogLevel::debug;
  return LogLevel::info;
}

class Log {
 public:
  explicit Log(std::ostream& os, LogLevel level = log_level_from_env()) : os_(os), level_(level) {}
  void info(const std::string& msg) const {
    if (level_ != LogLevel::quiet) os_ << "[minjump] " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level_ == LogLevel::debug) os_ << "[minjump:debug] " << msg << '\n';
  }
  void error(const std::string& msg) const { os_ << "[minjump] error: " << msg << '\n'; }

 private:
  std::ostream& os_;
  LogLevel level_;
};

// ---------------------------------------------------------------------------
// Configuration

struct RunOptions {
  std::size_t grid = 200;
  CheckTolerances tol;
  std::size_t nodes = 6;
  double delta = 1e-6;
  std::uint64_t seed = 1;
  std::size_t steps = 100;
  std::size_t substeps = 1;
  std::optional<Vector> x0;
  std::optional<Vector> u0;
  std::size_t initial_mode = 0;  ///< zero-based after parsing
  DwellPattern dwell;
};

struct JobConfig {
  std::string provenance;
  ModelKind kind = ModelKind::impulsive;
  ImpulsiveSpec impulsive;
  SwitchedSpec switched;
  std::optional<DwellRange> range;
  std::optional<Matrix> Pi;
  std::vector<Matrix> pi_scan;
  std::optional<std::vector<SymMatrix>> P;
  bool P_inverse = false;  ///< listed matrices are P⁻¹
  std::vector<std::optional<Matrix>> gains;  ///< per jump key
  std::vector<bool> design;                  ///< per jump key; free in synthesis
  RunOptions run;

  std::size_t modes() const { return kind == ModelKind::impulsive ? impulsive.modes() : switched.modes(); }
  std::size_t keys() const { return kind == ModelKind::impulsive ? modes() : modes() * modes(); }
};

namespace detail {

inline void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

inline double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

inline Matrix matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a non-empty nested array");
  const Index rows = static_cast<Index>(v.size());
  if (!v.front().is_array()) throw ConfigError(where + " must be an array of rows");
  const Index cols = static_cast<Index>(v.front().size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw ConfigError(where + " is ragged");
    for (Index c = 0; c < cols; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], where);
  }
  return m;
}

inline Vector vector(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + " must be an array");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<Index>(k)) = number(v[k], where);
  return out;
}

inline std::vector<Matrix> matrix_list(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a non-empty list of matrices");
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(matrix(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

inline std::size_t count(const json& v, const std::string& where, std::size_t lo) {
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(lo))
    throw ConfigError(where + " must be an integer >= " + std::to_string(lo));
  return v.get<std::size_t>();
}

inline void parse_system(const json& s, JobConfig& cfg) {
  allow_keys(s, "system", {"type", "A", "B", "J"});
  const std::string type = s.at("type").get<std::string>();
  if (type == "impulsive") {
    cfg.kind = ModelKind::impulsive;
    cfg.impulsive.A = matrix(s.at("A"), "system.A");
    const Index n = cfg.impulsive.A.rows();
    cfg.impulsive.B = s.contains("B") ? matrix(s.at("B"), "system.B") : Matrix(n, 0);
    cfg.impulsive.J = matrix_list(s.at("J"), "system.J");
    try {
      cfg.impulsive.validate();
    } catch (const ModelError& e) {
      throw ConfigError(std::string("system: ") + e.what());
    }
  } else if (type == "switched") {
    cfg.kind = ModelKind::switched;
    cfg.switched.A = matrix_list(s.at("A"), "system.A");
    if (s.contains("B")) {
      cfg.switched.B = matrix_list(s.at("B"), "system.B");
    } else {
      for (const auto& a : cfg.switched.A) cfg.switched.B.emplace_back(a.rows(), 0);
    }
    const json& jt = s.at("J");
    if (!jt.is_array()) throw ConfigError("system.J must be an N×N table of matrices");
    for (std::size_t j = 0; j < jt.size(); ++j)
      cfg.switched.J.push_back(matrix_list(jt[j], "system.J[" + std::to_string(j) + "]"));
    try {
      cfg.switched.validate();
    } catch (const ModelError& e) {
      throw ConfigError(std::string("system: ") + e.what());
    }
  } else {
    throw ConfigError("system.type must be 'impulsive' or 'switched'");
  }
}

inline void parse_gains(const json& g, JobConfig& cfg) {
  allow_keys(g, "gains", {"K", "design"});
  const std::size_t n_modes = cfg.modes();
  cfg.gains.assign(cfg.keys(), std::nullopt);
  cfg.design.assign(cfg.keys(), false);
  if (g.contains("K")) {
    const json& k = g.at("K");
    if (!k.is_array() || k.size() != n_modes) throw ConfigError("gains.K needs one entry per mode");
    for (std::size_t a = 0; a < n_modes; ++a) {
      if (cfg.kind == ModelKind::impulsive) {
        if (!k[a].is_null()) cfg.gains[a] = matrix(k[a], "gains.K[" + std::to_string(a) + "]");
        continue;
      }
      if (!k[a].is_array() || k[a].size() != n_modes) throw ConfigError("gains.K must be an N×N table");
      for (std::size_t b = 0; b < n_modes; ++b)
        if (!k[a][b].is_null())
          cfg.gains[a * n_modes + b] =
              matrix(k[a][b], "gains.K[" + std::to_string(a) + "][" + std::to_string(b) + "]");
    }
  }
  for (std::size_t key = 0; key < cfg.keys(); ++key) cfg.design[key] = !cfg.gains[key].has_value();
  if (g.contains("design")) {
    const json& d = g.at("design");
    if (!d.is_array() || d.size() != n_modes) throw ConfigError("gains.design needs one entry per mode");
    for (std::size_t a = 0; a < n_modes; ++a) {
      if (cfg.kind == ModelKind::impulsive) {
        cfg.design[a] = d[a].get<bool>();
        continue;
      }
      if (!d[a].is_array() || d[a].size() != n_modes) throw ConfigError("gains.design must be an N×N table");
      for (std::size_t b = 0; b < n_modes; ++b) cfg.design[a * n_modes + b] = d[a][b].get<bool>();
    }
  }
}

inline void parse_run(const json& r, JobConfig& cfg) {
  allow_keys(r, "run", {"grid", "tol", "nodes", "delta", "seed", "steps", "substeps", "x0", "u0",
                        "initial_mode", "dwell"});
  RunOptions& o = cfg.run;
  if (r.contains("grid")) o.grid = count(r.at("grid"), "run.grid", 2);
  if (r.contains("tol")) o.tol.strict = number(r.at("tol"), "run.tol");
  if (r.contains("nodes")) o.nodes = count(r.at("nodes"), "run.nodes", 2);
  if (r.contains("delta")) o.delta = number(r.at("delta"), "run.delta");
  if (r.contains("seed")) o.seed = r.at("seed").get<std::uint64_t>();
  if (r.contains("steps")) o.steps = count(r.at("steps"), "run.steps", 0);
  if (r.contains("substeps")) o.substeps = count(r.at("substeps"), "run.substeps", 1);
  if (r.contains("x0")) o.x0 = vector(r.at("x0"), "run.x0");
  if (r.contains("u0")) o.u0 = vector(r.at("u0"), "run.u0");
  if (r.contains("initial_mode")) {
    const std::size_t mode = count(r.at("initial_mode"), "run.initial_mode", 1);
    if (mode > cfg.modes()) throw ConfigError("run.initial_mode exceeds the mode count");
    o.initial_mode = mode - 1;
  }
  if (r.contains("dwell")) {
    const json& d = r.at("dwell");
    allow_keys(d, "run.dwell", {"kind", "period"});
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "periodic") {
      o.dwell.kind = DwellKind::periodic;
      o.dwell.period = number(d.at("period"), "run.dwell.period");
    } else if (kind == "uniform_random") {
      o.dwell.kind = DwellKind::uniform_random;
    } else {
      throw ConfigError("run.dwell.kind must be 'periodic' or 'uniform_random'");
    }
  }
}

}  // namespace detail

inline JobConfig parse_config(const json& root) {
  try {
    detail::allow_keys(root, "config", {"provenance", "system", "dwell", "weights", "rule", "gains", "run"});
    JobConfig cfg;
    if (root.contains("provenance")) cfg.provenance = root.at("provenance").get<std::string>();
    detail::parse_system(root.at("system"), cfg);
    cfg.gains.assign(cfg.keys(), std::nullopt);
    cfg.design.assign(cfg.keys(), true);

    if (root.contains("dwell")) {
      const json& d = root.at("dwell");
      detail::allow_keys(d, "dwell", {"T_min", "T_max"});
      cfg.range.emplace(detail::number(d.at("T_min"), "dwell.T_min"),
                        detail::number(d.at("T_max"), "dwell.T_max"));
    }
    if (root.contains("weights")) {
      const json& w = root.at("weights");
      detail::allow_keys(w, "weights", {"Pi", "scan"});
      if (w.contains("Pi")) cfg.Pi = detail::matrix(w.at("Pi"), "weights.Pi");
      if (w.contains("scan")) cfg.pi_scan = detail::matrix_list(w.at("scan"), "weights.scan");
    }
    if (root.contains("rule")) {
      const json& r = root.at("rule");
      detail::allow_keys(r, "rule", {"P", "representation"});
      std::vector<SymMatrix> ps;
      for (const Matrix& p : detail::matrix_list(r.at("P"), "rule.P")) {
        if (p.rows() != p.cols()) throw ConfigError("rule matrices must be square");
        if (!p.isApprox(p.transpose(), 1e-12)) throw ConfigError("rule matrices must be symmetric");
        ps.push_back(SymMatrix::symmetric_part(p));
      }
      cfg.P = std::move(ps);
      if (r.contains("representation")) {
        const std::string rep = r.at("representation").get<std::string>();
        if (rep == "inverse")
          cfg.P_inverse = true;
        else if (rep != "direct")
          throw ConfigError("rule.representation must be 'direct' or 'inverse'");
      }
    }
    if (root.contains("gains")) detail::parse_gains(root.at("gains"), cfg);
    if (root.contains("run")) detail::parse_run(root.at("run"), cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline JobConfig load_config(const std::string& path) { return parse_config(read_json(path)); }

inline const DwellRange& require_range(const JobConfig& cfg) {
  if (!cfg.range) throw ConfigError("configuration has no dwell block");
  return *cfg.range;
}

/// Lifted model; with @p for_design, gains marked as design entries are left free.
inline AugmentedModel build_model(const JobConfig& cfg, bool for_design = false) {
  const std::size_t n_modes = cfg.modes();
  auto slot = [&](std::size_t key) -> std::optional<Matrix> {
    if (for_design && cfg.design[key]) return std::nullopt;
    return cfg.gains[key];
  };
  try {
    if (cfg.kind == ModelKind::impulsive) {
      std::vector<std::optional<Matrix>> g;
      for (std::size_t i = 0; i < n_modes; ++i) g.push_back(slot(i));
      return augment_impulsive(cfg.impulsive, g);
    }
    std::vector<std::vector<std::optional<Matrix>>> g(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j)
      for (std::size_t i = 0; i < n_modes; ++i) g[j].push_back(slot(j * n_modes + i));
    return augment_switched(cfg.switched, g);
  } catch (const ModelError& e) {
    throw ConfigError(std::string("gains: ") + e.what());
  }
}

/// Certificate from the rule block; CertificateError when P is not usable.
inline MinJumpCertificate build_cert(const JobConfig& cfg) {
  if (!cfg.P) throw ConfigError("configuration has no rule matrices");
  if (!cfg.Pi) throw ConfigError("configuration has no weight matrix");
  std::vector<SymMatrix> ps;
  for (const auto& p : *cfg.P) {
    if (!cfg.P_inverse) {
      ps.push_back(p);
      continue;
    }
    try {
      ps.push_back(inv_spd(p));
    } catch (const NumericError&) {
      throw CertificateError("rule matrix given in inverse form is not positive definite");
    }
  }
  MinJumpCertificate cert{std::move(ps), MetzlerWeights(*cfg.Pi), 0.0};
  cert.validate();
  return cert;
}

// ---------------------------------------------------------------------------
// JSON output

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const VerificationReport& rep) {
  json out;
  out["check"] = rep.check;
  out["pass"] = rep.pass;
  out["worst_margin"] = rep.worst_margin;
  out["worst_mode"] = rep.worst_mode + 1;
  out["worst_point"] = rep.worst_point;
  out["grid"] = {{"points", rep.grid_points}, {"min", rep.grid_min}, {"max", rep.grid_max}};
  out["tolerances"] = {{"strict", rep.tol.strict}, {"nonstrict", rep.tol.nonstrict}};
  json conds = json::array();
  for (const auto& c : rep.conditions) {
    conds.push_back({{"name", c.name},
                     {"strict", c.strict},
                     {"worst", c.worst},
                     {"worst_mode", c.worst_mode + 1},
                     {"worst_point", c.worst_point},
                     {"per_mode", c.per_mode},
                     {"pass", c.pass}});
  }
  out["conditions"] = std::move(conds);
  return out;
}

inline json gains_json(const JobConfig& cfg, const std::vector<Matrix>& gains) {
  const std::size_t n_modes = cfg.modes();
  json out = json::array();
  if (cfg.kind == ModelKind::impulsive) {
    for (const auto& k : gains) out.push_back(to_json(k));
    return out;
  }
  for (std::size_t j = 0; j < n_modes; ++j) {
    json row = json::array();
    for (std::size_t i = 0; i < n_modes; ++i) row.push_back(to_json(gains[j * n_modes + i]));
    out.push_back(std::move(row));
  }
  return out;
}

inline json to_json(const SynthesisResult& r, const JobConfig& cfg) {
  json out;
  out["status"] = to_string(r.status);
  out["solver_status"] = sdp::to_string(r.solver_status);
  out["iterations"] = r.iterations;
  out["eps"] = r.eps;
  out["diagnostics"] = r.diagnostics;
  if (r.status == SynthesisStatus::success || r.status == SynthesisStatus::relaxation_gap) {
    out["Pi"] = to_json(r.cert.Pi.matrix());
    json ps = json::array();
    for (const auto& p : r.cert.P) ps.push_back(to_json(p.matrix()));
    out["P"] = std::move(ps);
    out["K"] = gains_json(cfg, r.gains);
    json pt = json::array();
    for (const auto& p : r.decision.P_tilde) pt.push_back(to_json(p.matrix()));
    out["P_tilde"] = std::move(pt);
    out["clock_nodes"] = r.decision.S_tilde.nodes();
  }
  if (r.report) out["report"] = to_json(*r.report);
  return out;
}

inline void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << body;
}

// ---------------------------------------------------------------------------
// Commands

struct VerifyArgs {
  std::string config;
  std::optional<std::size_t> grid;
  std::optional<double> tol;
  std::string out;  ///< report path; empty prints to stdout
};

struct SynthArgs {
  std::string config;
  std::optional<std::size_t> nodes;
  std::optional<double> delta;
  std::string pi_scan;  ///< JSON file holding a list of candidate Π
  std::string out;
};

struct SimulateArgs {
  std::string config;
  std::string result;  ///< optional synth result supplying P, Π and gains
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> substeps;
  std::string out;      ///< CSV path; empty skips the CSV
  std::string summary;  ///< summary JSON path; empty prints to stdout
  bool zero_gains = false;
};

struct ExampleArgs {
  int id = 1;
  std::string fixtures;
  std::string csv;
};

namespace detail {

/// Maps library exceptions onto the exit-code contract.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  const Log log(err);
  try {
    return body();
  } catch (const DivergenceError& e) {
    log.error(std::string(e.what()) + " (last finite time " + std::to_string(e.last_finite_time()) + ")");
    return kFail;
  } catch (const ConfigError& e) {
    log.error(e.what());
    return kConfig;
  } catch (const CertificateError& e) {
    log.error(e.what());
    return kConfig;
  } catch (const ModelError& e) {
    log.error(e.what());
    return kConfig;
  } catch (const DimensionError& e) {
    log.error(e.what());
    return kConfig;
  } catch (const Error& e) {
    log.error(e.what());
    return kNumeric;
  } catch (const nlohmann::json::exception& e) {
    log.error(e.what());
    return kConfig;
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void emit(const std::string& path, const std::string& body, std::ostream& out) {
  if (path.empty())
    out << body;
  else
    write_text(path, body);
}

inline VerificationReport verify_config(const JobConfig& cfg, std::size_t grid_points, CheckTolerances tol) {
  const DwellRange& range = require_range(cfg);
  const AugmentedModel model = build_model(cfg);
  const MinJumpCertificate cert = build_cert(cfg);
  const ThetaGrid grid = ThetaGrid::uniform(range, grid_points);
  return cfg.kind == ModelKind::impulsive ? check_prop1(model, cert, range, grid, tol)
                                          : check_prop2(model, cert, range, grid, tol);
}

struct SimulationOutcome {
  Trajectory trajectory;
  json summary;
};

inline SimulationOutcome simulate_config(const JobConfig& cfg, const AugmentedModel& model,
                                         const MinJumpCertificate& cert, std::uint64_t seed,
                                         std::size_t steps, std::size_t substeps) {
  const DwellRange& range = require_range(cfg);
  const SamplingSequence seq = gen_sequence(range, cfg.run.dwell, seed, steps);
  const Vector x0 = cfg.run.x0 ? *cfg.run.x0 : Vector::Ones(model.n());
  SimulationOutcome out;
  out.trajectory = model.kind() == ModelKind::impulsive
                       ? simulate_impulsive(model, cert, seq, x0, cfg.run.u0, substeps)
                       : simulate_switched(model, cert, seq, x0, cfg.run.u0, cfg.run.initial_mode, substeps);
  const auto& v = out.trajectory.lyapunov;
  out.summary["steps"] = steps;
  out.summary["seed"] = seed;
  out.summary["final_time"] = seq.times().back();
  out.summary["final_norm"] = out.trajectory.post_jump.back().norm();
  out.summary["V_first"] = v.front();
  out.summary["V_last"] = v.back();
  out.summary["V_decay"] = decay_factor(v);
  out.summary["V_strictly_decreasing"] = strictly_decreasing(v);
  json modes = json::array();
  for (std::size_t m : out.trajectory.modes) modes.push_back(m + 1);
  out.summary["modes"] = std::move(modes);
  return out;
}

inline SynthesisOptions synthesis_options(const JobConfig& cfg) {
  SynthesisOptions o;
  o.clock_nodes = cfg.run.nodes;
  o.delta_pd = cfg.run.delta;
  o.post_verify_grid = cfg.run.grid;
  o.tol = cfg.run.tol;
  return o;
}

inline std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

inline std::string row_text(const Matrix& m, int prec = 4) {
  std::ostringstream os;
  os << "[";
  for (Index r = 0; r < m.rows(); ++r) {
    if (r) os << "; ";
    for (Index c = 0; c < m.cols(); ++c) os << (c ? " " : "") << std::setw(prec + 4) << fmt(m(r, c), prec);
  }
  os << "]";
  return os.str();
}

}  // namespace detail

/// Exit 0 iff the certificate in the configuration passes its check.
inline int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const Log log(err);
    const JobConfig cfg = load_config(args.config);
    CheckTolerances tol = cfg.run.tol;
    if (args.tol) tol.strict = *args.tol;
    const VerificationReport rep = detail::verify_config(cfg, args.grid.value_or(cfg.run.grid), tol);
    log.info(rep.check + ": worst margin " + std::to_string(rep.worst_margin) + (rep.pass ? " (pass)" : " (fail)"));
    detail::emit(args.out, detail::dump(to_json(rep)), out);
    return rep.pass ? kPass : kFail;
  });
}

/// Exit 0 iff synthesis succeeds (including post-verification).
inline int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const Log log(err);
    const JobConfig cfg = load_config(args.config);
    const DwellRange& range = require_range(cfg);
    SynthesisOptions opts = detail::synthesis_options(cfg);
    if (args.nodes) opts.clock_nodes = *args.nodes;
    if (args.delta) opts.delta_pd = *args.delta;

    std::vector<Matrix> candidates = cfg.pi_scan;
    if (!args.pi_scan.empty()) {
      const json scan = read_json(args.pi_scan);
      candidates = detail::matrix_list(scan, "pi-scan");
    }
    if (candidates.empty()) {
      if (!cfg.Pi) throw ConfigError("configuration has no weights (Pi or scan)");
      candidates.push_back(*cfg.Pi);
    }
    const AugmentedModel model = build_model(cfg, true);
    std::size_t chosen = 0;
    const SynthesisResult res = synthesize_scan(model, candidates, range, opts, &chosen);
    log.info(std::string("synthesis ") + to_string(res.status) + ": " + res.diagnostics);
    json body = to_json(res, cfg);
    if (candidates.size() > 1) body["scan_choice"] = chosen + 1;
    detail::emit(args.out, detail::dump(body), out);
    switch (res.status) {
      case SynthesisStatus::success: return kPass;
      case SynthesisStatus::infeasible:
      case SynthesisStatus::relaxation_gap: return kFail;
      case SynthesisStatus::numerical_failure: return kNumeric;
    }
    return kNumeric;
  });
}

/// Reads P, Π and gains from a synth result into @p cfg.
inline void apply_result(JobConfig& cfg, const json& res) {
  if (!res.contains("P") || !res.contains("K") || !res.contains("Pi"))
    throw ConfigError("result file has no certificate (synthesis did not succeed)");
  std::vector<SymMatrix> ps;
  for (const Matrix& p : detail::matrix_list(res.at("P"), "result.P")) ps.push_back(SymMatrix::symmetric_part(p));
  cfg.P = std::move(ps);
  cfg.P_inverse = false;
  cfg.Pi = detail::matrix(res.at("Pi"), "result.Pi");
  json gains;
  gains["K"] = res.at("K");
  const Index m = cfg.kind == ModelKind::impulsive ? cfg.impulsive.m() : cfg.switched.m();
  if (m > 0) detail::parse_gains(gains, cfg);
}

/// Exit 0 when the whole horizon is simulated, 1 on divergence.
inline int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const Log log(err);
    JobConfig cfg = load_config(args.config);
    if (!args.result.empty()) apply_result(cfg, read_json(args.result));
    if (args.zero_gains)
      for (auto& g : cfg.gains)
        if (g) g->setZero();
    const AugmentedModel model = build_model(cfg);
    const MinJumpCertificate cert = build_cert(cfg);
    const auto sim = detail::simulate_config(cfg, model, cert, args.seed.value_or(cfg.run.seed),
                                             args.steps.value_or(cfg.run.steps),
                                             args.substeps.value_or(cfg.run.substeps));
    if (!args.out.empty()) {
      std::ostringstream csv;
      write_csv(csv, sim.trajectory, cert);
      write_text(args.out, csv.str());
    }
    log.info("simulated " + std::to_string(sim.trajectory.jump_times.size()) + " jumps; V decay " +
             std::to_string(sim.summary["V_decay"].get<double>()));
    detail::emit(args.summary, detail::dump(sim.summary), out);
    return kPass;
  });
}

/**
 * @brief Bundled example workflow: verify the published certificate,
 * synthesize, simulate and print a comparison table.
 */
inline int cmd_example(const ExampleArgs& args, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const Log log(err);
    if (args.id < 1 || args.id > 3) throw ConfigError("example id must be 1, 2 or 3");
    const std::string path =
        (std::filesystem::path(args.fixtures) / ("example" + std::to_string(args.id) + ".json")).string();
    const JobConfig cfg = load_config(path);
    const DwellRange& range = require_range(cfg);
    out << "example " << args.id << "\n";
    if (!cfg.provenance.empty()) out << "  source: " << cfg.provenance << "\n";

    const VerificationReport published = detail::verify_config(cfg, cfg.run.grid, cfg.run.tol);
    out << "  published certificate, " << published.check << " worst margin " << published.worst_margin
        << (published.pass ? "  pass" : "  FAIL") << "\n";

    const MinJumpCertificate published_cert = build_cert(cfg);
    const std::size_t n_modes = cfg.modes();
    const bool has_design = cfg.kind == ModelKind::impulsive ? cfg.impulsive.m() > 0 : cfg.switched.m() > 0;

    if (!has_design) {
      // Nothing to co-design: simulate the published rule.
      const AugmentedModel model = build_model(cfg);
      const auto sim = detail::simulate_config(cfg, model, published_cert, cfg.run.seed, cfg.run.steps,
                                               cfg.run.substeps);
      out << "  simulation: " << cfg.run.steps << " steps, V decay " << sim.summary["V_decay"].get<double>()
          << ", strictly decreasing " << (sim.summary["V_strictly_decreasing"].get<bool>() ? "yes" : "no")
          << "\n";
      if (!args.csv.empty()) {
        std::ostringstream csv;
        write_csv(csv, sim.trajectory, published_cert);
        write_text(args.csv, csv.str());
      }
      return published.pass ? kPass : kFail;
    }

    const SynthesisResult res =
        synthesize(build_model(cfg, true), *cfg.Pi, range, detail::synthesis_options(cfg));
    out << "  synthesis: " << to_string(res.status) << ", margin " << res.eps << "\n";
    log.info(res.diagnostics);
    if (!res.success()) return res.status == SynthesisStatus::numerical_failure ? kNumeric : kFail;
    out << "  post-check worst margin " << res.report->worst_margin << "\n";

    out << "  gains (published | synthesized)\n";
    for (std::size_t key = 0; key < cfg.keys(); ++key) {
      if (!cfg.design[key]) continue;
      std::ostringstream label;
      if (cfg.kind == ModelKind::impulsive)
        label << "K" << key + 1;
      else
        label << "K" << key / n_modes + 1 << "," << key % n_modes + 1;
      out << "    " << std::setw(6) << std::left << label.str() << std::right
          << (cfg.gains[key] ? detail::row_text(*cfg.gains[key]) : std::string("-")) << " | "
          << detail::row_text(res.gains[key]) << "\n";
    }
    out << "  rule matrices (published | synthesized)\n";
    for (std::size_t i = 0; i < n_modes; ++i)
      out << "    P" << i + 1 << "  " << detail::row_text(published_cert.P[i].matrix()) << "\n        "
          << detail::row_text(res.cert.P[i].matrix()) << "\n";

    const auto sim = detail::simulate_config(cfg, res.model, res.cert, cfg.run.seed, cfg.run.steps,
                                             cfg.run.substeps);
    out << "  simulation: " << cfg.run.steps << " steps, V decay " << sim.summary["V_decay"].get<double>()
        << ", strictly decreasing " << (sim.summary["V_strictly_decreasing"].get<bool>() ? "yes" : "no")
        << "\n";
    if (!args.csv.empty()) {
      std::ostringstream csv;
      write_csv(csv, sim.trajectory, res.cert);
      write_text(args.csv, csv.str());
      out << "  trajectory written to " << args.csv << "\n";
    }
    return kPass;
  });
}

}  // namespace minjump::cli

#endif  // MINJUMP_TOOLS_COMMANDS_HPP

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
#ifndef MINJUMP_SYNTH_HPP
#define MINJUMP_SYNTH_HPP

/**
 * @file synth.hpp
 * @brief Clock-dependent controller/rule synthesis.
 *
 * The matrix functions S̃_i(τ) are piecewise affine over clock nodes on
 * [0, T_max]. Every condition is then affine in τ (or θ) on each interval,
 * so imposing it at the nodes is exact for the relaxation. Decision
 * variables are P̃_i, U (one block per jump key) and the node values of S̃_i.
 *
 * Besides the conditions themselves the assembly adds
 *   P̃_i ⪰ δI,  S̃_i(τ_k) ⪰ δI     (so that recovery can invert them)
 *   P̃_i ⪯ I,   S̃_i(τ_k) ⪯ I      (fixes the scale of the homogeneous LMIs)
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "minjump/certcheck.hpp"
#include "minjump/errors.hpp"
#include "minjump/model.hpp"
#include "minjump/numerics.hpp"
#include "minjump/rules.hpp"
#include "minjump/sdp.hpp"

namespace minjump {

struct SynthesisOptions {
  std::size_t clock_nodes = 6;        ///< M uniform nodes on [0, T_max]
  double delta_pd = 1e-6;             ///< floor on P̃_i and S̃_i
  bool normalize = true;              ///< impose P̃_i ⪯ I and S̃_i ⪯ I
  std::size_t post_verify_grid = 200;
  CheckTolerances tol;
  sdp::SolverOptions solver;

  void validate() const {
    if (clock_nodes < 2) throw ConfigError("synthesis needs at least two clock nodes");
    if (!(delta_pd >= 0.0) || !std::isfinite(delta_pd)) throw ConfigError("delta must be finite and >= 0");
    if (post_verify_grid < 2) throw ConfigError("post-verification grid needs at least two points");
  }
};

enum class ClockForm { impulsive, switched };

/// Assembled problem plus the handles needed to read the solution back.
struct ClockProblem {
  ClockForm which = ClockForm::impulsive;
  sdp::SdpProblem problem;
  std::vector<double> nodes;
  std::vector<sdp::VarId> P_tilde;
  std::vector<std::vector<sdp::VarId>> S_tilde;  ///< [mode][node]
  std::vector<std::optional<sdp::VarId>> U;       ///< per jump key; empty slot = fixed gain
  MetzlerWeights Pi;
};

/**
 * @brief Uniform nodes on [0, T_max] with T_min added when it is not already
 * one of them (within 1e-12 relative).
 */
inline std::vector<double> clock_layout(const DwellRange& range, std::size_t count) {
  std::vector<double> nodes = uniform_nodes(range.t_max(), count);
  const double snap = 1e-12 * range.t_max();
  bool found = false;
  for (double& t : nodes) {
    if (std::abs(t - range.t_min()) <= snap) {
      t = range.t_min();
      found = true;
    }
  }
  if (!found) {
    nodes.push_back(range.t_min());
    std::sort(nodes.begin(), nodes.end());
  }
  if (nodes.front() != 0.0 || nodes.back() != range.t_max())
    throw ConfigError("clock nodes do not cover [0, T_max]");
  return nodes;
}

namespace detail {

inline MetzlerWeights checked_weights(const Matrix& pi, std::size_t modes) {
  const WeightCheck check = validate_weights(pi);
  if (!check.ok) throw ConfigError("weights rejected: " + check.diagnostics);
  if (static_cast<std::size_t>(pi.rows()) != modes)
    throw ConfigError("weight matrix size differs from the mode count");
  return MetzlerWeights(pi);
}

inline void add_flow_blocks(ClockProblem& cp, const AugmentedModel& model) {
  for (std::size_t i = 0; i < model.modes(); ++i) {
    const Matrix& a = model.drift(i);
    const Matrix at = a.transpose();
    for (std::size_t k = 0; k + 1 < cp.nodes.size(); ++k) {
      const double h = cp.nodes[k + 1] - cp.nodes[k];
      const sdp::AffineExpr s0 = cp.problem.var(cp.S_tilde[i][k]);
      const sdp::AffineExpr s1 = cp.problem.var(cp.S_tilde[i][k + 1]);
      const sdp::AffineExpr slope = (s1 - s0) * (1.0 / h);
      for (const auto* end : {&s0, &s1}) {
        std::ostringstream name;
        name << "flow[" << i << "][" << k << (end == &s0 ? "L" : "R") << "]";
        cp.problem.add_block(name.str(), slope + (*end) * at + a * (*end), false);
      }
    }
  }
}

inline void add_box_blocks(ClockProblem& cp, const SynthesisOptions& opts) {
  auto bound = [&](const std::string& name, sdp::VarId id) {
    const sdp::AffineExpr e = cp.problem.var(id);
    cp.problem.add_lower_bound(name + ".floor", e, opts.delta_pd);
    if (opts.normalize) cp.problem.add_upper_bound(name + ".ceiling", e, 1.0);
  };
  for (std::size_t i = 0; i < cp.P_tilde.size(); ++i) {
    bound("Pt[" + std::to_string(i) + "]", cp.P_tilde[i]);
    for (std::size_t k = 0; k < cp.nodes.size(); ++k)
      bound("St[" + std::to_string(i) + "][" + std::to_string(k) + "]", cp.S_tilde[i][k]);
  }
}

inline void declare_common(ClockProblem& cp, const AugmentedModel& model) {
  const Index d = model.dim();
  for (std::size_t i = 0; i < model.modes(); ++i)
    cp.P_tilde.push_back(cp.problem.add_symmetric("Pt[" + std::to_string(i) + "]", d));
  cp.S_tilde.resize(model.modes());
  for (std::size_t i = 0; i < model.modes(); ++i)
    for (std::size_t k = 0; k < cp.nodes.size(); ++k)
      cp.S_tilde[i].push_back(
          cp.problem.add_symmetric("St[" + std::to_string(i) + "][" + std::to_string(k) + "]", d));
}

/// U for one key: free variable, or K·X for a fixed gain K and the given X.
inline sdp::AffineExpr gain_term(const ClockProblem& cp, const AugmentedModel& model, std::size_t j,
                                 std::size_t i, std::size_t key, const sdp::AffineExpr& x) {
  if (cp.U[key]) return cp.problem.var(*cp.U[key]);
  return model.gain(j, i) * x;
}

}  // namespace detail

/**
 * @brief LMIs of the impulsive clock statement for @p model.
 *
 * Gains already present in @p model are kept fixed (U_i = K_iP̃_i); missing
 * ones become design variables.
 */
inline ClockProblem assemble_thm1c(const AugmentedModel& model, const Matrix& pi,
                                   const DwellRange& range, const SynthesisOptions& opts = {}) {
  if (model.kind() != ModelKind::impulsive) throw ModelError("assemble_thm1c needs an impulsive model");
  opts.validate();
  ClockProblem cp;
  cp.which = ClockForm::impulsive;
  cp.Pi = detail::checked_weights(pi, model.modes());
  cp.nodes = clock_layout(range, opts.clock_nodes);
  const std::size_t count = model.modes();
  const Index d = model.dim();
  const Index m = model.m();

  detail::declare_common(cp, model);
  cp.U.assign(count, std::nullopt);
  for (std::size_t i = 0; i < count; ++i)
    if (m > 0 && !model.gain_slot(i, i)) cp.U[i] = cp.problem.add_matrix("U[" + std::to_string(i) + "]", m, d);

  detail::add_flow_blocks(cp, model);

  for (std::size_t i = 0; i < count; ++i) {
    const sdp::AffineExpr p = cp.problem.var(cp.P_tilde[i]);
    sdp::AffineExpr lower = model.jump_affine(i) * p;
    if (m > 0) lower += model.injection() * detail::gain_term(cp, model, i, i, i, p);
    for (std::size_t k = 0; k < cp.nodes.size(); ++k) {
      if (!range.contains(cp.nodes[k])) continue;
      const sdp::AffineExpr s = cp.problem.var(cp.S_tilde[i][k]);
      cp.problem.add_block("jump[" + std::to_string(i) + "][" + std::to_string(k) + "]",
                           sdp::AffineExpr::blocks({{-p, lower.transpose()}, {lower, -s}}), true);
    }
  }

  for (std::size_t i = 0; i < count; ++i) {
    const Matrix v = impulsive_coupling_stack(cp.Pi, i, d);
    std::vector<std::vector<sdp::AffineExpr>> diag(count, std::vector<sdp::AffineExpr>(count));
    for (std::size_t r = 0; r < count; ++r)
      for (std::size_t c = 0; c < count; ++c)
        diag[r][c] = r == c ? -cp.problem.var(cp.P_tilde[r]) : sdp::AffineExpr(d, d);
    cp.problem.add_block("coupling[" + std::to_string(i) + "]",
                         sdp::AffineExpr::blocks(diag) + v * cp.problem.var(cp.S_tilde[i][0]) * v.transpose(),
                         false);
  }

  detail::add_box_blocks(cp, opts);
  return cp;
}

/// LMIs of the switched clock statement; gains are indexed (new j, old i).
inline ClockProblem assemble_thm2c(const AugmentedModel& model, const Matrix& pi,
                                   const DwellRange& range, const SynthesisOptions& opts = {}) {
  if (model.kind() != ModelKind::switched) throw ModelError("assemble_thm2c needs a switched model");
  opts.validate();
  ClockProblem cp;
  cp.which = ClockForm::switched;
  cp.Pi = detail::checked_weights(pi, model.modes());
  cp.nodes = clock_layout(range, opts.clock_nodes);
  const std::size_t count = model.modes();
  const Index d = model.dim();
  const Index m = model.m();

  detail::declare_common(cp, model);
  cp.U.assign(count * count, std::nullopt);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t i = 0; i < count; ++i)
      if (m > 0 && !model.gain_slot(j, i))
        cp.U[j * count + i] =
            cp.problem.add_matrix("U[" + std::to_string(j) + "][" + std::to_string(i) + "]", m, d);

  detail::add_flow_blocks(cp, model);

  for (std::size_t i = 0; i < count; ++i) {
    const sdp::AffineExpr p = cp.problem.var(cp.P_tilde[i]);
    for (std::size_t k = 0; k < cp.nodes.size(); ++k) {
      if (!range.contains(cp.nodes[k])) continue;
      cp.problem.add_block("jump[" + std::to_string(i) + "][" + std::to_string(k) + "]",
                           p - cp.problem.var(cp.S_tilde[i][k]), true);
    }
  }

  for (std::size_t i = 0; i < count; ++i) {
    const sdp::AffineExpr s0 = cp.problem.var(cp.S_tilde[i][0]);
    std::vector<std::vector<sdp::AffineExpr>> grid(count + 1,
                                                   std::vector<sdp::AffineExpr>(count + 1));
    grid[0][0] = -s0;
    for (std::size_t j = 0; j < count; ++j) {
      sdp::AffineExpr vj = model.jump_affine(j, i) * s0;
      if (m > 0) vj += model.injection() * detail::gain_term(cp, model, j, i, j * count + i, s0);
      vj *= std::sqrt(cp.Pi(j, i));
      grid[j + 1][0] = vj;
      grid[0][j + 1] = vj.transpose();
      for (std::size_t c = 0; c < count; ++c)
        grid[j + 1][c + 1] = j == c ? -cp.problem.var(cp.P_tilde[j]) : sdp::AffineExpr(d, d);
    }
    cp.problem.add_block("coupling[" + std::to_string(i) + "]", sdp::AffineExpr::blocks(grid), false);
  }

  detail::add_box_blocks(cp, opts);
  return cp;
}

enum class SynthesisStatus { success, infeasible, relaxation_gap, numerical_failure };

inline const char* to_string(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::success: return "success";
    case SynthesisStatus::infeasible: return "infeasible";
    case SynthesisStatus::relaxation_gap: return "relaxation_gap";
    case SynthesisStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

struct SynthesisResult {
  SynthesisStatus status = SynthesisStatus::numerical_failure;
  sdp::SolveStatus solver_status = sdp::SolveStatus::numerical_failure;
  MinJumpCertificate cert;
  AugmentedModel model;         ///< input model with every gain installed
  std::vector<Matrix> gains;    ///< per jump key (N or N²)
  ClockDecision decision;
  double eps = 0.0;
  std::optional<VerificationReport> report;  ///< check_prop1 / check_prop2 on the fine grid
  std::string diagnostics;
  int iterations = 0;

  bool success() const { return status == SynthesisStatus::success; }
};

/**
 * @brief P_i = P̃_i⁻¹ and the gains (K_i = U_iP̃_i⁻¹, K_{j,i} = U_{j,i}S̃_i(0)⁻¹).
 *
 * @throws RecoveryError if P̃_i or S̃_i(0) is not safely invertible.
 */
inline SynthesisResult recover(const ClockProblem& cp, const sdp::SdpSolution& sol,
                               const AugmentedModel& model) {
  SynthesisResult out;
  out.solver_status = sol.status;
  out.iterations = sol.iterations;
  out.eps = sol.eps;
  const std::size_t count = model.modes();

  std::vector<SymMatrix> p_tilde;
  std::vector<SymMatrix> P;
  for (std::size_t i = 0; i < count; ++i) {
    p_tilde.push_back(SymMatrix::symmetric_part(sol.value(cp.problem, cp.P_tilde[i])));
    try {
      P.push_back(inv_spd(p_tilde.back()));
    } catch (const NumericError&) {
      throw RecoveryError("P̃_" + std::to_string(i + 1) + " is singular; increase the delta floor");
    }
  }
  std::vector<std::vector<SymMatrix>> s_values(count);
  for (std::size_t i = 0; i < count; ++i)
    for (sdp::VarId id : cp.S_tilde[i])
      s_values[i].push_back(SymMatrix::symmetric_part(sol.value(cp.problem, id)));

  AugmentedModel closed = model;
  std::vector<Matrix> U;
  std::vector<Matrix> gains;
  const auto key_pair = [&](std::size_t key) {
    return cp.which == ClockForm::impulsive ? std::pair<std::size_t, std::size_t>(key, key)
                                          : std::pair<std::size_t, std::size_t>(key / count, key % count);
  };
  for (std::size_t key = 0; key < cp.U.size(); ++key) {
    const auto [j, i] = key_pair(key);
    const SymMatrix& basis = cp.which == ClockForm::impulsive ? p_tilde[i] : s_values[i][0];
    if (model.m() == 0) {
      U.emplace_back(0, model.dim());
      gains.emplace_back(0, model.dim());
      continue;
    }
    if (!cp.U[key]) {
      gains.push_back(model.gain(j, i));
      U.push_back(model.gain(j, i) * basis.matrix());
      continue;
    }
    const Matrix u = sol.value(cp.problem, *cp.U[key]);
    Matrix inv;
    try {
      inv = inv_spd(basis).matrix();
    } catch (const NumericError&) {
      throw RecoveryError("gain recovery matrix is singular; increase the delta floor");
    }
    U.push_back(u);
    gains.push_back(u * inv);
    closed = closed.with_gain(j, i, gains.back());
  }

  out.decision = ClockDecision{p_tilde, U, ClockFunctionFamily(cp.nodes, std::move(s_values)), cp.Pi,
                               std::max(sol.eps, 0.0)};
  out.cert = MinJumpCertificate{std::move(P), cp.Pi, std::max(sol.eps, 0.0)};
  out.model = std::move(closed);
  out.gains = std::move(gains);
  return out;
}

/**
 * @brief Assemble, solve, recover and post-verify on a fine θ grid.
 *
 * The status is `success` only if the recovered certificate passes the
 * matching Lyapunov-Metzler check on `post_verify_grid` points.
 */
inline SynthesisResult synthesize(const AugmentedModel& model, const Matrix& pi,
                                  const DwellRange& range, const SynthesisOptions& opts = {}) {
  const ClockProblem cp = model.kind() == ModelKind::impulsive ? assemble_thm1c(model, pi, range, opts)
                                                               : assemble_thm2c(model, pi, range, opts);
  const sdp::SdpSolution sol = sdp::solve(cp.problem, opts.solver);

  SynthesisResult out;
  out.model = model;
  out.solver_status = sol.status;
  out.iterations = sol.iterations;
  out.eps = sol.eps;
  std::ostringstream diag;
  diag << "solver " << sdp::to_string(sol.status) << " after " << sol.iterations
       << " iterations, margin " << sol.eps << ", " << cp.problem.scalar_count() << " unknowns, "
       << cp.nodes.size() << " clock nodes";

  if (sol.status == sdp::SolveStatus::infeasible ||
      (sol.status == sdp::SolveStatus::optimal && !(sol.eps > 0.0))) {
    out.status = SynthesisStatus::infeasible;
    out.diagnostics = diag.str() + "; the clock conditions have no strictly feasible point";
    return out;
  }
  if (sol.status != sdp::SolveStatus::optimal) {
    out.status = SynthesisStatus::numerical_failure;
    out.diagnostics = diag.str();
    return out;
  }

  out = recover(cp, sol, model);
  const ThetaGrid grid = ThetaGrid::uniform(range, opts.post_verify_grid);
  out.report = model.kind() == ModelKind::impulsive ? check_prop1(out.model, out.cert, range, grid, opts.tol)
                                                    : check_prop2(out.model, out.cert, range, grid, opts.tol);
  diag << "; post-check worst margin " << out.report->worst_margin;
  if (out.report->pass) {
    out.status = SynthesisStatus::success;
  } else {
    out.status = SynthesisStatus::relaxation_gap;
    diag << "; the recovered certificate fails the exact check, try more clock nodes";
  }
  out.diagnostics = diag.str();
  return out;
}

/// Runs synthesize for each candidate Π and keeps the successful result with
/// the largest margin (or the last failure when none succeeds).
inline SynthesisResult synthesize_scan(const AugmentedModel& model, const std::vector<Matrix>& candidates,
                                       const DwellRange& range, const SynthesisOptions& opts = {},
                                       std::size_t* chosen = nullptr) {
  if (candidates.empty()) throw ConfigError("weight scan needs at least one candidate");
  std::optional<SynthesisResult> best;
  std::size_t best_index = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    SynthesisResult r = synthesize(model, candidates[c], range, opts);
    const bool better = !best || (r.success() && (!best->success() || r.eps > best->eps)) ||
                        (!best->success() && !r.success());
    if (better) {
      best = std::move(r);
      best_index = c;
    }
  }
  if (chosen) *chosen = best_index;
  return *best;
}

}  // namespace minjump

#endif  // MINJUMP_SYNTH_HPP

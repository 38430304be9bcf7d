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
#ifndef MINJUMP_CERTCHECK_HPP
#define MINJUMP_CERTCHECK_HPP

/**
 * @file certcheck.hpp
 * @brief Numerical verification of min-jumping stability certificates.
 *
 * Two families of conditions are checked:
 *
 *  - Lyapunov-Metzler conditions with the matrix exponential in θ,
 *    evaluated on a θ grid (check_prop1, check_prop2);
 *  - clock-dependent conditions over piecewise-affine S_i(τ)
 *    (check_thm1b/1c/2b/2c). The differential condition is affine in τ on
 *    each interval, so checking both interval endpoints is exact.
 *
 * Every margin reported is a λ_max of the left-hand side of a condition
 * written as "LHS ≺ 0" or "LHS ⪯ 0".
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "minjump/errors.hpp"
#include "minjump/model.hpp"
#include "minjump/numerics.hpp"
#include "minjump/rules.hpp"

namespace minjump {

/// Thresholds applied to λ_max when deciding pass/fail.
struct CheckTolerances {
  double strict = 1e-7;     ///< "≺ 0" requires λ_max < −strict
  double nonstrict = 1e-9;  ///< "⪯ 0" accepts λ_max ≤ nonstrict
};

/// Sorted θ samples covering [T_min, T_max], endpoints included.
class ThetaGrid {
 public:
  explicit ThetaGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) throw ConfigError("theta grid is empty");
    for (std::size_t k = 1; k < points_.size(); ++k)
      if (!(points_[k] > points_[k - 1])) throw ConfigError("theta grid must be strictly increasing");
    for (double p : points_)
      if (!std::isfinite(p) || p < 0.0) throw ConfigError("theta grid entries must be finite and >= 0");
  }

  /// @p count uniform points; a degenerate range T_min = T_max gives one point.
  static ThetaGrid uniform(const DwellRange& range, std::size_t count = 200) {
    if (range.t_min() == range.t_max()) return ThetaGrid({range.t_min()});
    if (count < 2) throw ConfigError("theta grid needs at least two points");
    std::vector<double> pts(count);
    const double span = range.t_max() - range.t_min();
    for (std::size_t k = 0; k < count; ++k)
      pts[k] = range.t_min() + span * static_cast<double>(k) / static_cast<double>(count - 1);
    pts.back() = range.t_max();
    return ThetaGrid(std::move(pts));
  }

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  bool within(const DwellRange& range) const {
    return points_.front() >= range.t_min() && points_.back() <= range.t_max();
  }

 private:
  std::vector<double> points_;
};

/// Margins of one named condition.
struct ConditionMargins {
  std::string name;
  bool strict = true;
  std::vector<double> per_mode;  ///< worst λ_max for each mode
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t worst_mode = 0;
  double worst_point = 0.0;  ///< τ or θ where the worst value occurred
  bool pass = true;
};

struct VerificationReport {
  std::string check;
  double worst_margin = -std::numeric_limits<double>::infinity();
  std::size_t worst_mode = 0;
  double worst_point = 0.0;
  std::vector<ConditionMargins> conditions;
  std::size_t grid_points = 0;
  double grid_min = 0.0;
  double grid_max = 0.0;
  CheckTolerances tol;
  bool pass = false;

  const ConditionMargins& condition(const std::string& name) const {
    for (const auto& c : conditions)
      if (c.name == name) return c;
    throw ConfigError("report has no condition named " + name);
  }
};

namespace detail {

class ReportBuilder {
 public:
  ReportBuilder(std::string check, std::size_t modes, CheckTolerances tol)
      : modes_(modes) {
    report_.check = std::move(check);
    report_.tol = tol;
  }

  std::size_t add_condition(std::string name, bool strict) {
    ConditionMargins c;
    c.name = std::move(name);
    c.strict = strict;
    c.per_mode.assign(modes_, -std::numeric_limits<double>::infinity());
    report_.conditions.push_back(std::move(c));
    return report_.conditions.size() - 1;
  }

  void record(std::size_t cond, std::size_t mode, double point, double value) {
    auto& c = report_.conditions[cond];
    if (mode < c.per_mode.size()) c.per_mode[mode] = std::max(c.per_mode[mode], value);
    if (value > c.worst || std::isnan(value)) {
      c.worst = value;
      c.worst_mode = mode;
      c.worst_point = point;
    }
  }

  void set_grid(const std::vector<double>& pts) {
    report_.grid_points = pts.size();
    if (!pts.empty()) {
      report_.grid_min = pts.front();
      report_.grid_max = pts.back();
    }
  }

  VerificationReport finish() {
    report_.pass = true;
    for (auto& c : report_.conditions) {
      c.pass = c.strict ? (c.worst < -report_.tol.strict) : (c.worst <= report_.tol.nonstrict);
      report_.pass = report_.pass && c.pass;
      if (c.worst > report_.worst_margin || std::isnan(c.worst)) {
        report_.worst_margin = c.worst;
        report_.worst_mode = c.worst_mode;
        report_.worst_point = c.worst_point;
      }
    }
    return report_;
  }

 private:
  std::size_t modes_;
  VerificationReport report_;
};

inline void require_gains(const AugmentedModel& model) {
  for (std::size_t j = 0; j < model.modes(); ++j)
    for (std::size_t i = 0; i < model.modes(); ++i)
      if (!model.has_gain(j, i)) throw ModelError("model is missing a gain required by the check");
}

inline void check_cert_against(const AugmentedModel& model, const MinJumpCertificate& cert) {
  cert.validate();
  if (cert.modes() != model.modes()) throw CertificateError("certificate mode count differs from model");
  if (cert.dim() != model.dim()) throw CertificateError("certificate dimension differs from model");
}

}  // namespace detail

/**
 * @brief J̄_iᵀ e^{Āᵀθ} (Σ_j π_ji P_j) e^{Āθ} J̄_i − P_i ≺ 0 on the θ grid.
 */
inline VerificationReport check_prop1(const AugmentedModel& model, const MinJumpCertificate& cert,
                                      const DwellRange& range, const ThetaGrid& grid,
                                      CheckTolerances tol = {}) {
  if (model.kind() != ModelKind::impulsive) throw ModelError("check_prop1 needs an impulsive model");
  detail::require_gains(model);
  detail::check_cert_against(model, cert);
  if (!grid.within(range)) throw ConfigError("theta grid leaves the dwell range");

  const std::size_t count = model.modes();
  std::vector<SymMatrix> mixed(count, SymMatrix::zero(model.dim()));
  std::vector<Matrix> jumps;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) mixed[i] += cert.Pi(j, i) * cert.P[j];
    jumps.push_back(model.jump(i));
  }

  detail::ReportBuilder rb("prop1", count, tol);
  const std::size_t cond = rb.add_condition("decrease", true);
  rb.set_grid(grid.points());
  for (double theta : grid.points()) {
    const Matrix flow = expm(model.drift(), theta);
    for (std::size_t i = 0; i < count; ++i) {
      const SymMatrix lhs = mixed[i].congruence(flow * jumps[i]) - cert.P[i];
      rb.record(cond, i, theta, sym_eig_max(lhs));
    }
  }
  return rb.finish();
}

/**
 * @brief e^{Ā_iᵀθ} (Σ_j π_ji J̄_{j,i}ᵀ P_j J̄_{j,i}) e^{Ā_iθ} − P_i ≺ 0 on the θ grid.
 */
inline VerificationReport check_prop2(const AugmentedModel& model, const MinJumpCertificate& cert,
                                      const DwellRange& range, const ThetaGrid& grid,
                                      CheckTolerances tol = {}) {
  if (model.kind() != ModelKind::switched) throw ModelError("check_prop2 needs a switched model");
  detail::require_gains(model);
  detail::check_cert_against(model, cert);
  if (!grid.within(range)) throw ConfigError("theta grid leaves the dwell range");

  const std::size_t count = model.modes();
  std::vector<SymMatrix> mixed(count, SymMatrix::zero(model.dim()));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < count; ++j)
      mixed[i] += cert.Pi(j, i) * cert.P[j].congruence(model.jump(j, i));

  detail::ReportBuilder rb("prop2", count, tol);
  const std::size_t cond = rb.add_condition("decrease", true);
  rb.set_grid(grid.points());
  for (double theta : grid.points()) {
    for (std::size_t i = 0; i < count; ++i) {
      const SymMatrix lhs = mixed[i].congruence(expm(model.drift(i), theta)) - cert.P[i];
      rb.record(cond, i, theta, sym_eig_max(lhs));
    }
  }
  return rb.finish();
}

/**
 * @brief Piecewise-affine matrix functions S_i(τ) on nodes 0 = τ₀ < … < τ_M.
 */
class ClockFunctionFamily {
 public:
  ClockFunctionFamily() = default;

  /// @p values is indexed [mode][node].
  ClockFunctionFamily(std::vector<double> nodes, std::vector<std::vector<SymMatrix>> values)
      : nodes_(std::move(nodes)), values_(std::move(values)) {
    if (nodes_.size() < 2) throw ConfigError("clock function needs at least two nodes");
    if (nodes_.front() != 0.0) throw ConfigError("clock nodes must start at 0");
    for (std::size_t k = 1; k < nodes_.size(); ++k)
      if (!(nodes_[k] > nodes_[k - 1])) throw ConfigError("clock nodes must be strictly increasing");
    if (values_.empty()) throw ConfigError("clock function has no modes");
    const Index d = values_.front().front().dim();
    for (const auto& mode : values_) {
      if (mode.size() != nodes_.size()) throw ConfigError("one value per clock node is required");
      for (const auto& v : mode)
        if (v.dim() != d) throw DimensionError("clock values must share one dimension");
    }
  }

  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t modes() const { return values_.size(); }
  std::size_t intervals() const { return nodes_.size() - 1; }
  Index dim() const { return values_.front().front().dim(); }
  double horizon() const { return nodes_.back(); }

  const SymMatrix& at_node(std::size_t mode, std::size_t k) const { return values_.at(mode).at(k); }

  /// Slope (constant derivative) on interval k = [τ_k, τ_{k+1}].
  SymMatrix slope(std::size_t mode, std::size_t k) const {
    const double h = nodes_.at(k + 1) - nodes_.at(k);
    return (values_.at(mode).at(k + 1) - values_.at(mode).at(k)) * (1.0 / h);
  }

  /// Affine interpolation; τ must lie in [0, horizon].
  SymMatrix eval(std::size_t mode, double tau) const {
    if (!(tau >= 0.0 && tau <= horizon())) throw ConfigError("clock evaluation outside [0, T_max]");
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), tau);
    std::size_t k = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
    if (k == 0) k = 1;
    if (k >= nodes_.size()) k = nodes_.size() - 1;
    --k;
    const double h = nodes_[k + 1] - nodes_[k];
    const double w = (tau - nodes_[k]) / h;
    if (w == 0.0) return values_[mode][k];
    if (w == 1.0) return values_[mode][k + 1];
    return values_[mode][k] * (1.0 - w) + values_[mode][k + 1] * w;
  }

 private:
  std::vector<double> nodes_;
  std::vector<std::vector<SymMatrix>> values_;
};

/**
 * @brief Decision data of the statement-(c) conditions.
 *
 * U holds one m×(n+m) matrix per jump key: N entries for impulsive models,
 * N² entries (index j·N + i) for switched models.
 */
struct ClockDecision {
  std::vector<SymMatrix> P_tilde;
  std::vector<Matrix> U;
  ClockFunctionFamily S_tilde;
  MetzlerWeights Pi;
  double eps = 0.0;

  const Matrix& u(std::size_t i) const { return U.at(i); }
  const Matrix& u(std::size_t j, std::size_t i) const { return U.at(j * P_tilde.size() + i); }
};

namespace detail {

inline void check_clock_covers(const ClockFunctionFamily& s, const DwellRange& range,
                               std::size_t modes, Index dim) {
  if (s.horizon() < range.t_max()) throw ConfigError("clock grid does not cover [0, T_max]");
  if (s.modes() != modes) throw ConfigError("clock family mode count differs from model");
  if (s.dim() != dim) throw DimensionError("clock family dimension differs from model");
}

/// θ points used for θ-dependent clock conditions: the grid plus every
/// clock node inside the range (exact for piecewise-affine S).
inline std::vector<double> theta_points(const ThetaGrid& grid, const ClockFunctionFamily& s,
                                        const DwellRange& range) {
  std::vector<double> pts = grid.points();
  for (double t : s.nodes())
    if (range.contains(t)) pts.push_back(t);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

/// Records λ_max of `lhs(mode, S(τ), Ṡ)` at both ends of every interval.
template <typename Lhs>
void record_flow_condition(ReportBuilder& rb, std::size_t cond, const ClockFunctionFamily& s,
                           Lhs&& lhs) {
  for (std::size_t i = 0; i < s.modes(); ++i) {
    for (std::size_t k = 0; k < s.intervals(); ++k) {
      const SymMatrix slope = s.slope(i, k);
      for (std::size_t end = 0; end < 2; ++end) {
        const SymMatrix value = lhs(i, s.at_node(i, k + end), slope);
        rb.record(cond, i, s.nodes()[k + end], sym_eig_max(value));
      }
    }
  }
}

inline SymMatrix lyapunov_operator(const Matrix& a, const SymMatrix& s) {
  return SymMatrix::symmetric_part(a.transpose() * s.matrix() + s.matrix() * a);
}

inline SymMatrix dual_lyapunov_operator(const Matrix& a, const SymMatrix& s) {
  return SymMatrix::symmetric_part(s.matrix() * a.transpose() + a * s.matrix());
}

inline void check_decision(const ClockDecision& data, const AugmentedModel& model) {
  if (data.P_tilde.size() != model.modes()) throw CertificateError("one P̃_i per mode is required");
  if (data.U.size() != model.jump_count()) throw CertificateError("one U per jump key is required");
  if (data.Pi.size() != model.modes()) throw CertificateError("weight matrix size differs from model");
  for (const auto& p : data.P_tilde) {
    if (p.dim() != model.dim()) throw DimensionError("P̃_i has the wrong dimension");
    if (!is_pd(p, 0.0)) throw CertificateError("P̃_i is not positive definite");
  }
  for (const auto& u : data.U)
    if (u.rows() != model.m() || u.cols() != model.dim()) throw DimensionError("U has the wrong shape");
  for (std::size_t i = 0; i < model.modes(); ++i)
    if (!is_pd(data.S_tilde.at_node(i, 0), 0.0)) throw CertificateError("S̃_i(0) is not positive definite");
}

}  // namespace detail

/**
 * @brief Impulsive clock conditions with S_i(τ) and margin ε:
 *  flow:      −Ṡ_i + ĀᵀS_i + S_iĀ ⪯ 0     on [0, T_max]
 *  jump:      −P_i + J̄_iᵀS_i(θ)J̄_i + εI ⪯ 0  on [T_min, T_max]
 *  coupling:  Σ_j π_ji P_j − S_i(0) ⪯ 0
 */
inline VerificationReport check_thm1b(const AugmentedModel& model, const ClockFunctionFamily& s,
                                      const MinJumpCertificate& cert, double eps,
                                      const DwellRange& range,
                                      const std::optional<ThetaGrid>& grid = std::nullopt,
                                      CheckTolerances tol = {}) {
  if (model.kind() != ModelKind::impulsive) throw ModelError("check_thm1b needs an impulsive model");
  detail::require_gains(model);
  detail::check_cert_against(model, cert);
  detail::check_clock_covers(s, range, model.modes(), model.dim());
  const ThetaGrid theta_grid = grid ? *grid : ThetaGrid::uniform(range);
  const std::size_t count = model.modes();
  const Matrix& a = model.drift();

  detail::ReportBuilder rb("thm1b", count, tol);
  const std::size_t flow = rb.add_condition("flow", false);
  const std::size_t jump = rb.add_condition("jump", false);
  const std::size_t coupling = rb.add_condition("coupling", false);
  const std::size_t margin = rb.add_condition("epsilon", true);

  detail::record_flow_condition(rb, flow, s, [&](std::size_t, const SymMatrix& v, const SymMatrix& d) {
    return detail::lyapunov_operator(a, v) - d;
  });

  const std::vector<double> pts = detail::theta_points(theta_grid, s, range);
  rb.set_grid(pts);
  for (std::size_t i = 0; i < count; ++i) {
    const Matrix jbar = model.jump(i);
    for (double theta : pts) {
      const SymMatrix lhs = s.eval(i, theta).congruence(jbar) - cert.P[i] +
                            SymMatrix::identity(model.dim()) * eps;
      rb.record(jump, i, theta, sym_eig_max(lhs));
    }
    SymMatrix mixed = SymMatrix::zero(model.dim());
    for (std::size_t j = 0; j < count; ++j) mixed += cert.Pi(j, i) * cert.P[j];
    rb.record(coupling, i, 0.0, sym_eig_max(mixed - s.at_node(i, 0)));
    rb.record(margin, i, 0.0, -eps);
  }
  return rb.finish();
}

/**
 * @brief Switched clock conditions:
 *  flow:      −Ṡ_i + Ā_iᵀS_i + S_iĀ_i ⪯ 0
 *  jump:      −P_i + S_i(θ) + εI ⪯ 0
 *  coupling:  Σ_j π_ji J̄_{j,i}ᵀP_jJ̄_{j,i} − S_i(0) ⪯ 0
 */
inline VerificationReport check_thm2b(const AugmentedModel& model, const ClockFunctionFamily& s,
                                      const MinJumpCertificate& cert, double eps,
                                      const DwellRange& range,
                                      const std::optional<ThetaGrid>& grid = std::nullopt,
                                      CheckTolerances tol = {}) {
  if (model.kind() != ModelKind::switched) throw ModelError("check_thm2b needs a switched model");
  detail::require_gains(model);
  detail::check_cert_against(model, cert);
  detail::check_clock_covers(s, range, model.modes(), model.dim());
  const ThetaGrid theta_grid = grid ? *grid : ThetaGrid::uniform(range);
  const std::size_t count = model.modes();

  detail::ReportBuilder rb("thm2b", count, tol);
  const std::size_t flow = rb.add_condition("flow", false);
  const std::size_t jump = rb.add_condition("jump", false);
  const std::size_t coupling = rb.add_condition("coupling", false);
  const std::size_t margin = rb.add_condition("epsilon", true);

  detail::record_flow_condition(rb, flow, s,
                                [&](std::size_t i, const SymMatrix& v, const SymMatrix& d) {
                                  return detail::lyapunov_operator(model.drift(i), v) - d;
                                });

  const std::vector<double> pts = detail::theta_points(theta_grid, s, range);
  rb.set_grid(pts);
  for (std::size_t i = 0; i < count; ++i) {
    for (double theta : pts) {
      const SymMatrix lhs =
          s.eval(i, theta) - cert.P[i] + SymMatrix::identity(model.dim()) * eps;
      rb.record(jump, i, theta, sym_eig_max(lhs));
    }
    SymMatrix mixed = SymMatrix::zero(model.dim());
    for (std::size_t j = 0; j < count; ++j)
      mixed += cert.Pi(j, i) * cert.P[j].congruence(model.jump(j, i));
    rb.record(coupling, i, 0.0, sym_eig_max(mixed - s.at_node(i, 0)));
    rb.record(margin, i, 0.0, -eps);
  }
  return rb.finish();
}

/// Coupling matrix V_i = col_j(√π_ji · I) of the impulsive statement (c).
inline Matrix impulsive_coupling_stack(const MetzlerWeights& pi, std::size_t i, Index dim) {
  const std::size_t count = pi.size();
  Matrix v = Matrix::Zero(static_cast<Index>(count) * dim, dim);
  for (std::size_t j = 0; j < count; ++j)
    v.block(static_cast<Index>(j) * dim, 0, dim, dim) =
        std::sqrt(pi(j, i)) * Matrix::Identity(dim, dim);
  return v;
}

/**
 * @brief Impulsive statement (c):
 *  flow:      Ṡ̃_i + S̃_iĀᵀ + ĀS̃_i ⪯ 0
 *  jump:      [−P̃_i ⋆; J̄⁰_iP̃_i + J̄¹U_i  −S̃_i(θ)] ≺ 0
 *  coupling:  −diag_j(P̃_j) + V_i S̃_i(0) V_iᵀ ⪯ 0
 */
inline VerificationReport check_thm1c(const AugmentedModel& model, const ClockDecision& data,
                                      const DwellRange& range,
                                      const std::optional<ThetaGrid>& grid = std::nullopt,
                                      CheckTolerances tol = {}) {
  if (model.kind() != ModelKind::impulsive) throw ModelError("check_thm1c needs an impulsive model");
  detail::check_decision(data, model);
  const ClockFunctionFamily& s = data.S_tilde;
  detail::check_clock_covers(s, range, model.modes(), model.dim());
  const ThetaGrid theta_grid = grid ? *grid : ThetaGrid::uniform(range);
  const std::size_t count = model.modes();
  const Index d = model.dim();
  const Matrix& a = model.drift();

  detail::ReportBuilder rb("thm1c", count, tol);
  const std::size_t flow = rb.add_condition("flow", false);
  const std::size_t jump = rb.add_condition("jump", true);
  const std::size_t coupling = rb.add_condition("coupling", false);

  detail::record_flow_condition(rb, flow, s, [&](std::size_t, const SymMatrix& v, const SymMatrix& dv) {
    return detail::dual_lyapunov_operator(a, v) + dv;
  });

  const std::vector<double> pts = detail::theta_points(theta_grid, s, range);
  rb.set_grid(pts);
  std::vector<Matrix> diag_blocks;
  for (const auto& p : data.P_tilde) diag_blocks.push_back(p.matrix());
  const Matrix diag_p = block_diagonal(diag_blocks);

  for (std::size_t i = 0; i < count; ++i) {
    const Matrix lower = model.jump_affine(i) * data.P_tilde[i].matrix() +
                         model.injection() * data.u(i);
    for (double theta : pts) {
      Matrix block = Matrix::Zero(2 * d, 2 * d);
      block.topLeftCorner(d, d) = -data.P_tilde[i].matrix();
      block.bottomLeftCorner(d, d) = lower;
      block.topRightCorner(d, d) = lower.transpose();
      block.bottomRightCorner(d, d) = -s.eval(i, theta).matrix();
      rb.record(jump, i, theta, sym_eig_max(SymMatrix::symmetric_part(block)));
    }
    const Matrix v = impulsive_coupling_stack(data.Pi, i, d);
    const Matrix lhs = -diag_p + v * s.at_node(i, 0).matrix() * v.transpose();
    rb.record(coupling, i, 0.0, sym_eig_max(SymMatrix::symmetric_part(lhs)));
  }
  return rb.finish();
}

/// V_i = col_j √π_ji (J̄⁰_{j,i}S̃_i(0) + J̄¹U_{j,i}) of the switched statement (c).
inline Matrix switched_coupling_stack(const AugmentedModel& model, const ClockDecision& data,
                                      std::size_t i) {
  const std::size_t count = model.modes();
  const Index d = model.dim();
  const Matrix& s0 = data.S_tilde.at_node(i, 0).matrix();
  Matrix v = Matrix::Zero(static_cast<Index>(count) * d, d);
  for (std::size_t j = 0; j < count; ++j)
    v.block(static_cast<Index>(j) * d, 0, d, d) =
        std::sqrt(data.Pi(j, i)) *
        (model.jump_affine(j, i) * s0 + model.injection() * data.u(j, i));
  return v;
}

/**
 * @brief Switched statement (c):
 *  flow:      Ṡ̃_i + S̃_iĀ_iᵀ + Ā_iS̃_i ⪯ 0
 *  jump:      P̃_i − S̃_i(θ) + εI ⪯ 0
 *  coupling:  [−S̃_i(0) V_iᵀ; V_i −diag_j(P̃_j)] ⪯ 0
 */
inline VerificationReport check_thm2c(const AugmentedModel& model, const ClockDecision& data,
                                      const DwellRange& range,
                                      const std::optional<ThetaGrid>& grid = std::nullopt,
                                      CheckTolerances tol = {}) {
  if (model.kind() != ModelKind::switched) throw ModelError("check_thm2c needs a switched model");
  detail::check_decision(data, model);
  const ClockFunctionFamily& s = data.S_tilde;
  detail::check_clock_covers(s, range, model.modes(), model.dim());
  const ThetaGrid theta_grid = grid ? *grid : ThetaGrid::uniform(range);
  const std::size_t count = model.modes();
  const Index d = model.dim();
  const Index nd = static_cast<Index>(count) * d;

  detail::ReportBuilder rb("thm2c", count, tol);
  const std::size_t flow = rb.add_condition("flow", false);
  const std::size_t jump = rb.add_condition("jump", false);
  const std::size_t coupling = rb.add_condition("coupling", false);
  const std::size_t margin = rb.add_condition("epsilon", true);

  detail::record_flow_condition(rb, flow, s,
                                [&](std::size_t i, const SymMatrix& v, const SymMatrix& dv) {
                                  return detail::dual_lyapunov_operator(model.drift(i), v) + dv;
                                });

  const std::vector<double> pts = detail::theta_points(theta_grid, s, range);
  rb.set_grid(pts);
  std::vector<Matrix> diag_blocks;
  for (const auto& p : data.P_tilde) diag_blocks.push_back(p.matrix());
  const Matrix diag_p = block_diagonal(diag_blocks);

  for (std::size_t i = 0; i < count; ++i) {
    for (double theta : pts) {
      const SymMatrix lhs = data.P_tilde[i] - s.eval(i, theta) + SymMatrix::identity(d) * data.eps;
      rb.record(jump, i, theta, sym_eig_max(lhs));
    }
    const Matrix v = switched_coupling_stack(model, data, i);
    Matrix block = Matrix::Zero(d + nd, d + nd);
    block.topLeftCorner(d, d) = -s.at_node(i, 0).matrix();
    block.topRightCorner(d, nd) = v.transpose();
    block.bottomLeftCorner(nd, d) = v;
    block.bottomRightCorner(nd, nd) = -diag_p;
    rb.record(coupling, i, 0.0, sym_eig_max(SymMatrix::symmetric_part(block)));
    rb.record(margin, i, 0.0, -data.eps);
  }
  return rb.finish();
}

/**
 * @brief Samples S*_i(τ) = e^{2βτ} e^{Āᵀτ} W_i e^{Āτ} at @p nodes.
 *
 * W_i = Σ_j π_ji P_j for impulsive models and Σ_j π_ji J̄_{j,i}ᵀP_jJ̄_{j,i}
 * for switched ones (flow Ā_i). With β = 0 this is exactly the function
 * that turns a Lyapunov-Metzler certificate into a clock certificate.
 * A small β > 0 adds −2βS to the flow condition, which absorbs the error of
 * affine interpolation between nodes.
 */
inline ClockFunctionFamily build_S_star(const MinJumpCertificate& cert, const AugmentedModel& model,
                                        const std::vector<double>& nodes, double growth = 0.0) {
  detail::require_gains(model);
  detail::check_cert_against(model, cert);
  const std::size_t count = model.modes();
  std::vector<std::vector<SymMatrix>> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    SymMatrix mixed = SymMatrix::zero(model.dim());
    for (std::size_t j = 0; j < count; ++j) {
      if (model.kind() == ModelKind::impulsive)
        mixed += cert.Pi(j, i) * cert.P[j];
      else
        mixed += cert.Pi(j, i) * cert.P[j].congruence(model.jump(j, i));
    }
    const Matrix& a = model.drift(i);
    for (double tau : nodes) {
      SymMatrix v = mixed.congruence(expm(a, tau));
      if (growth != 0.0) v *= std::exp(2.0 * growth * tau);
      values[i].push_back(std::move(v));
    }
  }
  return ClockFunctionFamily(nodes, std::move(values));
}

/// Uniform clock nodes on [0, horizon].
inline std::vector<double> uniform_nodes(double horizon, std::size_t count) {
  if (count < 2) throw ConfigError("need at least two clock nodes");
  std::vector<double> nodes(count);
  for (std::size_t k = 0; k < count; ++k)
    nodes[k] = horizon * static_cast<double>(k) / static_cast<double>(count - 1);
  nodes.front() = 0.0;
  nodes.back() = horizon;
  return nodes;
}

/**
 * @brief Smallest growth β (to a relative 1e-3) such that the piecewise-affine
 * S* from build_S_star satisfies the flow condition at @p nodes.
 *
 * Returns 0 when no inflation is needed.
 */
inline double calibrate_clock_growth(const MinJumpCertificate& cert, const AugmentedModel& model,
                                     const std::vector<double>& nodes, double tol = 1e-9) {
  auto flow_ok = [&](double beta) {
    const ClockFunctionFamily s = build_S_star(cert, model, nodes, beta);
    for (std::size_t i = 0; i < s.modes(); ++i) {
      const Matrix& a = model.drift(i);
      for (std::size_t k = 0; k < s.intervals(); ++k) {
        const SymMatrix slope = s.slope(i, k);
        for (std::size_t end = 0; end < 2; ++end) {
          const SymMatrix lhs = detail::lyapunov_operator(a, s.at_node(i, k + end)) - slope;
          if (sym_eig_max(lhs) > tol) return false;
        }
      }
    }
    return true;
  };
  if (flow_ok(0.0)) return 0.0;
  double hi = 1e-6;
  int guard = 0;
  while (!flow_ok(hi)) {
    hi *= 2.0;
    if (++guard > 80) throw NumericError("clock growth calibration did not converge");
  }
  double lo = hi / 2.0;
  if (guard == 0) lo = 0.0;
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    (flow_ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace minjump

#endif  // MINJUMP_CERTCHECK_HPP

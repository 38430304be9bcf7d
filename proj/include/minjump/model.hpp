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
#ifndef MINJUMP_MODEL_HPP
#define MINJUMP_MODEL_HPP

/**
 * @file model.hpp
 * @brief Impulsive / switched-impulsive plants and their augmented lifts.
 *
 * A sampled-data loop with held input u is rewritten over χ = (x, u):
 *
 *   χ̇ = Ā_σ χ,   Ā_i = [A_i B_i; 0 0]
 *   χ(t_k⁺) = J̄ χ(t_k),   J̄ = J̄⁰ + J̄¹ K,   J̄⁰ = [J 0; 0 0],   J̄¹ = [0; I_m]
 *
 * Mode indices are zero-based in the C++ API. For switched systems jump data
 * is indexed (j, i) = (new mode, old mode).
 */

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "minjump/errors.hpp"
#include "minjump/numerics.hpp"

namespace minjump {

/// Plant with a single flow and N candidate jump maps.
struct ImpulsiveSpec {
  Matrix A;
  Matrix B;  ///< n×m; m = 0 means there is no controller to design
  std::vector<Matrix> J;

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  std::size_t modes() const { return J.size(); }

  void validate() const {
    if (A.rows() != A.cols()) throw ModelError("A must be square");
    if (B.rows() != A.rows()) throw ModelError("B must have as many rows as A");
    if (J.empty()) throw ModelError("at least one jump map is required");
    for (const auto& j : J)
      if (j.rows() != n() || j.cols() != n()) throw ModelError("jump maps must be n×n");
    if (!all_finite(A) || !all_finite(B)) throw ModelError("non-finite plant data");
  }
};

/// Plant whose flow switches with the mode; jumps depend on (new, old) mode.
struct SwitchedSpec {
  std::vector<Matrix> A;
  std::vector<Matrix> B;
  std::vector<std::vector<Matrix>> J;  ///< J[j][i]

  std::size_t modes() const { return A.size(); }
  Index n() const { return A.empty() ? 0 : A.front().rows(); }
  Index m() const { return B.empty() ? 0 : B.front().cols(); }

  void validate() const {
    const std::size_t count = A.size();
    if (count == 0) throw ModelError("switched system needs at least one mode");
    if (B.size() != count) throw ModelError("one input matrix per mode is required");
    if (J.size() != count) throw ModelError("jump table must be N×N");
    for (std::size_t i = 0; i < count; ++i) {
      if (A[i].rows() != n() || A[i].cols() != n()) throw ModelError("inconsistent A_i dimensions");
      if (B[i].rows() != n() || B[i].cols() != m()) throw ModelError("inconsistent B_i dimensions");
      if (J[i].size() != count) throw ModelError("jump table must be N×N");
      for (const auto& jm : J[i])
        if (jm.rows() != n() || jm.cols() != n()) throw ModelError("jump maps must be n×n");
    }
  }
};

/// Admissible dwell times T_k ∈ [t_min, t_max].
class DwellRange {
 public:
  DwellRange(double t_min, double t_max) : t_min_(t_min), t_max_(t_max) {
    if (!(t_min > 0.0) || !(t_min <= t_max) || !std::isfinite(t_max))
      throw ConfigError("dwell range must satisfy 0 < T_min <= T_max < inf");
  }

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  bool contains(double t) const { return t >= t_min_ && t <= t_max_; }

 private:
  double t_min_;
  double t_max_;
};

struct WeightCheck {
  bool ok = true;
  std::string diagnostics;
};

/// Entries ≥ −1e-14 and every column summing to 1 within 1e-12.
inline WeightCheck validate_weights(const Matrix& pi) {
  WeightCheck out;
  std::ostringstream msg;
  if (pi.rows() != pi.cols() || pi.rows() == 0) {
    out.ok = false;
    msg << "weight matrix must be square and non-empty";
    out.diagnostics = msg.str();
    return out;
  }
  for (Index i = 0; i < pi.cols(); ++i) {
    double sum = 0.0;
    for (Index j = 0; j < pi.rows(); ++j) {
      if (!std::isfinite(pi(j, i)) || pi(j, i) < -1e-14) {
        out.ok = false;
        msg << "entry (" << j + 1 << "," << i + 1 << ") = " << pi(j, i) << " is negative; ";
      }
      sum += pi(j, i);
    }
    if (!(std::abs(sum - 1.0) <= 1e-12)) {
      out.ok = false;
      msg << "column " << i + 1 << " sums to " << sum << "; ";
    }
  }
  out.diagnostics = msg.str();
  return out;
}

/**
 * @brief Column-stochastic nonnegative N×N matrix; (j, i) weighs P_j for mode i.
 */
class MetzlerWeights {
 public:
  MetzlerWeights() = default;

  explicit MetzlerWeights(Matrix pi) : pi_(std::move(pi)) {
    const WeightCheck check = validate_weights(pi_);
    if (!check.ok) throw CertificateError("invalid Metzler weights: " + check.diagnostics);
  }

  static MetzlerWeights identity(std::size_t n) {
    return MetzlerWeights(Matrix::Identity(static_cast<Index>(n), static_cast<Index>(n)));
  }

  std::size_t size() const { return static_cast<std::size_t>(pi_.rows()); }
  double operator()(std::size_t j, std::size_t i) const {
    return pi_(static_cast<Index>(j), static_cast<Index>(i));
  }
  const Matrix& matrix() const { return pi_; }

 private:
  Matrix pi_;
};

enum class ModelKind { impulsive, switched };

/**
 * @brief The lifted system over χ = (x, u).
 *
 * Jump data is stored per key: for impulsive models the key is the selected
 * mode i; for switched models it is (j, i). A gain may be absent, in which
 * case it is a design variable for the synthesizer.
 */
class AugmentedModel {
 public:
  ModelKind kind() const { return kind_; }
  Index n() const { return n_; }
  Index m() const { return m_; }
  Index dim() const { return n_ + m_; }
  std::size_t modes() const { return modes_; }

  /// Ā (impulsive) or Ā_i (switched).
  const Matrix& drift(std::size_t i = 0) const {
    return kind_ == ModelKind::impulsive ? drifts_.front() : drifts_.at(i);
  }

  const Matrix& injection() const { return injection_; }

  /// J̄⁰_i for impulsive models.
  const Matrix& jump_affine(std::size_t i) const { return jumps0_.at(key(i, i)); }
  /// J̄⁰_{j,i} for switched models (impulsive models ignore the old mode).
  const Matrix& jump_affine(std::size_t j, std::size_t i) const { return jumps0_.at(key(j, i)); }

  bool has_gain(std::size_t j, std::size_t i) const {
    return m_ == 0 || gains_.at(key(j, i)).has_value();
  }
  bool has_gain(std::size_t i) const { return has_gain(i, i); }

  const std::optional<Matrix>& gain_slot(std::size_t j, std::size_t i) const {
    return gains_.at(key(j, i));
  }

  /// K_{j,i} (m×(n+m)); zero-row matrix when m = 0.
  Matrix gain(std::size_t j, std::size_t i) const {
    if (m_ == 0) return Matrix(0, dim());
    const auto& g = gains_.at(key(j, i));
    if (!g) throw ModelError("gain for mode pair is not set");
    return *g;
  }
  Matrix gain(std::size_t i) const { return gain(i, i); }

  /// J̄ = J̄⁰ + J̄¹K for the key.
  Matrix jump(std::size_t j, std::size_t i) const {
    const Matrix& base = jumps0_.at(key(j, i));
    if (m_ == 0) return base;
    return base + injection_ * gain(j, i);
  }
  Matrix jump(std::size_t i) const { return jump(i, i); }

  /// Copy with the given gain installed.
  AugmentedModel with_gain(std::size_t j, std::size_t i, const Matrix& k) const {
    check_gain_shape(k);
    AugmentedModel out = *this;
    out.gains_.at(key(j, i)) = k;
    return out;
  }
  AugmentedModel with_gain(std::size_t i, const Matrix& k) const { return with_gain(i, i, k); }

  /// Number of jump keys: N (impulsive) or N² (switched).
  std::size_t jump_count() const { return jumps0_.size(); }

 private:
  friend AugmentedModel augment_impulsive(const ImpulsiveSpec&,
                                          const std::vector<std::optional<Matrix>>&);
  friend AugmentedModel augment_switched(const SwitchedSpec&,
                                         const std::vector<std::vector<std::optional<Matrix>>>&);

  std::size_t key(std::size_t j, std::size_t i) const {
    if (j >= modes_ || i >= modes_) throw ModelError("mode index out of range");
    return kind_ == ModelKind::impulsive ? j : j * modes_ + i;
  }

  void check_gain_shape(const Matrix& k) const {
    if (k.rows() != m_ || k.cols() != dim())
      throw ModelError("gain must be m×(n+m)");
    if (!all_finite(k)) throw ModelError("non-finite gain");
  }

  ModelKind kind_ = ModelKind::impulsive;
  Index n_ = 0;
  Index m_ = 0;
  std::size_t modes_ = 0;
  std::vector<Matrix> drifts_;
  std::vector<Matrix> jumps0_;
  Matrix injection_;
  std::vector<std::optional<Matrix>> gains_;
};

namespace detail {

inline Matrix lift_drift(const Matrix& a, const Matrix& b) {
  const Index n = a.rows();
  const Index m = b.cols();
  Matrix out = Matrix::Zero(n + m, n + m);
  out.topLeftCorner(n, n) = a;
  out.topRightCorner(n, m) = b;
  return out;
}

inline Matrix lift_jump(const Matrix& j, Index m) {
  const Index n = j.rows();
  Matrix out = Matrix::Zero(n + m, n + m);
  out.topLeftCorner(n, n) = j;
  return out;
}

inline Matrix injection_matrix(Index n, Index m) {
  Matrix out = Matrix::Zero(n + m, m);
  out.bottomRows(m).setIdentity();
  return out;
}

}  // namespace detail

/**
 * @brief Lift an impulsive plant. @p gains, when non-empty, holds one
 * optional K_i per mode; missing entries stay free for synthesis.
 */
inline AugmentedModel augment_impulsive(const ImpulsiveSpec& spec,
                                        const std::vector<std::optional<Matrix>>& gains = {}) {
  spec.validate();
  if (!gains.empty() && gains.size() != spec.modes())
    throw ModelError("gain list must have one entry per mode");
  AugmentedModel out;
  out.kind_ = ModelKind::impulsive;
  out.n_ = spec.n();
  out.m_ = spec.m();
  out.modes_ = spec.modes();
  out.drifts_ = {detail::lift_drift(spec.A, spec.B)};
  for (const auto& j : spec.J) out.jumps0_.push_back(detail::lift_jump(j, spec.m()));
  out.injection_ = detail::injection_matrix(spec.n(), spec.m());
  out.gains_.assign(spec.modes(), std::nullopt);
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (!gains[i]) continue;
    out.check_gain_shape(*gains[i]);
    out.gains_[i] = gains[i];
  }
  return out;
}

/// Lift a switched plant; @p gains is indexed gains[j][i] when given.
inline AugmentedModel augment_switched(
    const SwitchedSpec& spec, const std::vector<std::vector<std::optional<Matrix>>>& gains = {}) {
  spec.validate();
  const std::size_t count = spec.modes();
  if (!gains.empty() && gains.size() != count) throw ModelError("gain table must be N×N");
  AugmentedModel out;
  out.kind_ = ModelKind::switched;
  out.n_ = spec.n();
  out.m_ = spec.m();
  out.modes_ = count;
  for (std::size_t i = 0; i < count; ++i)
    out.drifts_.push_back(detail::lift_drift(spec.A[i], spec.B[i]));
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t i = 0; i < count; ++i)
      out.jumps0_.push_back(detail::lift_jump(spec.J[j][i], spec.m()));
  out.injection_ = detail::injection_matrix(spec.n(), spec.m());
  out.gains_.assign(count * count, std::nullopt);
  for (std::size_t j = 0; j < gains.size(); ++j) {
    if (gains[j].size() != count) throw ModelError("gain table must be N×N");
    for (std::size_t i = 0; i < count; ++i) {
      if (!gains[j][i]) continue;
      out.check_gain_shape(*gains[j][i]);
      out.gains_[j * count + i] = gains[j][i];
    }
  }
  return out;
}

}  // namespace minjump

#endif  // MINJUMP_MODEL_HPP

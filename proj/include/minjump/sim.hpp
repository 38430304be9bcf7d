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
#ifndef MINJUMP_SIM_HPP
#define MINJUMP_SIM_HPP

/**
 * @file sim.hpp
 * @brief Closed-loop simulation under min-jumping rules.
 *
 * Flows are evaluated by matrix exponential only, so dense samples are
 * closed-form values rather than integrator output. A jump fires at t₀ = 0
 * and at every later sampling instant. Records keep both the pre-jump
 * limit χ(t_k) and the post-jump state χ(t_k⁺).
 */

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "minjump/errors.hpp"
#include "minjump/model.hpp"
#include "minjump/numerics.hpp"
#include "minjump/rules.hpp"

namespace minjump {

/// Sampling instants 0 = t₀ < t₁ < … < t_K.
class SamplingSequence {
 public:
  SamplingSequence() = default;

  explicit SamplingSequence(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty() || times_.front() != 0.0) throw ConfigError("sampling sequence must start at 0");
    for (std::size_t k = 1; k < times_.size(); ++k)
      if (!(times_[k] > times_[k - 1])) throw ConfigError("sampling times must increase");
  }

  const std::vector<double>& times() const { return times_; }
  std::size_t dwell_count() const { return times_.size() - 1; }
  double dwell(std::size_t k) const { return times_.at(k + 1) - times_.at(k); }

  bool admissible(const DwellRange& range, double slack = 1e-12) const {
    for (std::size_t k = 0; k < dwell_count(); ++k) {
      const double t = dwell(k);
      if (t < range.t_min() - slack || t > range.t_max() + slack) return false;
    }
    return true;
  }

 private:
  std::vector<double> times_{0.0};
};

enum class DwellKind { periodic, uniform_random };

struct DwellPattern {
  DwellKind kind = DwellKind::uniform_random;
  double period = 0.0;  ///< used by periodic
};

/// @p count dwells; deterministic in @p seed for the random kind.
inline SamplingSequence gen_sequence(const DwellRange& range, const DwellPattern& pattern,
                                     std::uint64_t seed, std::size_t count) {
  std::vector<double> times{0.0};
  times.reserve(count + 1);
  if (pattern.kind == DwellKind::periodic) {
    if (!range.contains(pattern.period)) throw ConfigError("periodic dwell lies outside the dwell range");
    for (std::size_t k = 1; k <= count; ++k) times.push_back(static_cast<double>(k) * pattern.period);
    return SamplingSequence(std::move(times));
  }
  // Explicit 53-bit mapping so sequences do not depend on the standard
  // library's distribution implementation.
  std::mt19937_64 gen(seed);
  const double span = range.t_max() - range.t_min();
  double t = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    t += range.t_min() + unit * span;
    times.push_back(t);
  }
  return SamplingSequence(std::move(times));
}

struct TrajectorySample {
  double t = 0.0;
  Vector chi;
  std::size_t mode = 0;  ///< mode active at (or selected at) this row
  bool post = false;     ///< true for the post-jump row of a jump instant
};

struct Trajectory {
  Index n = 0;
  Index m = 0;
  std::vector<double> jump_times;
  std::vector<std::size_t> modes;   ///< σ(t_k⁺)
  std::vector<Vector> pre_jump;     ///< χ(t_k)
  std::vector<Vector> post_jump;    ///< χ(t_k⁺)
  std::vector<double> lyapunov;     ///< V(k)
  std::vector<TrajectorySample> samples;
};

namespace detail {

constexpr double kDivergenceNorm = 1e12;

inline void check_growth(const Vector& chi, double t, double last_ok) {
  if (!chi.allFinite() || chi.norm() > kDivergenceNorm)
    throw DivergenceError("state norm exceeded 1e12 at t = " + std::to_string(t), last_ok);
}

inline Vector initial_state(const AugmentedModel& model, const Vector& x0, const std::optional<Vector>& u0) {
  if (x0.size() != model.n()) throw DimensionError("x0 has the wrong dimension");
  Vector chi = Vector::Zero(model.dim());
  chi.head(model.n()) = x0;
  if (u0) {
    if (u0->size() != model.m()) throw DimensionError("u0 has the wrong dimension");
    chi.tail(model.m()) = *u0;
  }
  if (!chi.allFinite()) throw NumericError("non-finite initial state");
  return chi;
}

/// Shared loop; `select(chi, current)` returns the next mode and `value`
/// gives V(k) from (pre, post, mode).
template <typename Select, typename Value>
Trajectory run(const AugmentedModel& model, const SamplingSequence& seq, Vector chi,
               std::size_t mode, std::size_t substeps, Select&& select, Value&& value) {
  if (substeps < 1) throw ConfigError("substeps must be at least 1");
  Trajectory tr;
  tr.n = model.n();
  tr.m = model.m();
  const auto& times = seq.times();
  double last_ok = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double tk = times[k];
    const std::size_t next = select(chi, mode);
    const Vector post = model.jump(next, mode) * chi;
    check_growth(post, tk, last_ok);
    tr.jump_times.push_back(tk);
    tr.modes.push_back(next);
    tr.pre_jump.push_back(chi);
    tr.post_jump.push_back(post);
    tr.lyapunov.push_back(value(chi, post, next));
    tr.samples.push_back({tk, chi, mode, false});
    tr.samples.push_back({tk, post, next, true});
    last_ok = tk;
    mode = next;
    if (k + 1 == times.size()) break;

    const double h = times[k + 1] - tk;
    const Matrix& a = model.drift(mode);
    for (std::size_t q = 1; q < substeps; ++q) {
      const double s = h * static_cast<double>(q) / static_cast<double>(substeps);
      const Vector mid = expm(a, s) * post;
      check_growth(mid, tk + s, last_ok);
      tr.samples.push_back({tk + s, mid, mode, false});
      last_ok = tk + s;
    }
    chi = expm(a, h) * post;
    check_growth(chi, times[k + 1], last_ok);
  }
  return tr;
}

}  // namespace detail

/**
 * @brief Impulsive closed loop: σ = argmin_i χ(t_k)ᵀP_iχ(t_k), χ(t_k⁺) = J̄_σχ(t_k).
 *
 * V(k) is the rule value min_i χ(t_k)ᵀP_iχ(t_k) at the sampled state.
 *
 * @throws DivergenceError when ‖χ‖ exceeds 1e12.
 */
inline Trajectory simulate_impulsive(const AugmentedModel& model, const MinJumpCertificate& cert,
                                     const SamplingSequence& seq, const Vector& x0,
                                     const std::optional<Vector>& u0 = std::nullopt,
                                     std::size_t substeps = 1) {
  if (model.kind() != ModelKind::impulsive) throw ModelError("simulate_impulsive needs an impulsive model");
  if (cert.modes() != model.modes() || cert.dim() != model.dim())
    throw DimensionError("certificate does not match the model");
  for (std::size_t i = 0; i < model.modes(); ++i)
    if (!model.has_gain(i)) throw ModelError("every mode needs a gain to simulate");
  const Vector chi = detail::initial_state(model, x0, u0);
  return detail::run(
      model, seq, chi, 0, substeps,
      [&](const Vector& c, std::size_t) { return select_impulsive(c, cert); },
      [&](const Vector& pre, const Vector&, std::size_t j) { return cert.P[j].quadratic(pre); });
}

/**
 * @brief Switched closed loop: from mode i, j = argmin_j (J̄_{j,i}χ)ᵀP_j(J̄_{j,i}χ),
 * then flow with Ā_j until the next sample.
 *
 * V(k) = χ(t_k⁺)ᵀP_σχ(t_k⁺) for the selected mode σ.
 */
inline Trajectory simulate_switched(const AugmentedModel& model, const MinJumpCertificate& cert,
                                    const SamplingSequence& seq, const Vector& x0,
                                    const std::optional<Vector>& u0 = std::nullopt,
                                    std::size_t initial_mode = 0, std::size_t substeps = 1) {
  if (model.kind() != ModelKind::switched) throw ModelError("simulate_switched needs a switched model");
  if (cert.modes() != model.modes() || cert.dim() != model.dim())
    throw DimensionError("certificate does not match the model");
  if (initial_mode >= model.modes()) throw ConfigError("initial mode out of range");
  for (std::size_t j = 0; j < model.modes(); ++j)
    for (std::size_t i = 0; i < model.modes(); ++i)
      if (!model.has_gain(j, i)) throw ModelError("every mode pair needs a gain to simulate");
  const Vector chi = detail::initial_state(model, x0, u0);
  return detail::run(
      model, seq, chi, initial_mode, substeps,
      [&](const Vector& c, std::size_t i) { return select_switched(c, i, cert, model); },
      [&](const Vector&, const Vector& post, std::size_t j) { return cert.P[j].quadratic(post); });
}

/// V(k) as recorded during simulation.
inline std::vector<double> lyapunov_trace(const Trajectory& tr) { return tr.lyapunov; }

/// V(0)/V(K); +∞ if the final value is zero while the first is not.
inline double decay_factor(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  if (v.back() == 0.0) return v.front() == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return v.front() / v.back();
}

/// True if V(k+1) < V(k) wherever V(k) is above @p floor.
inline bool strictly_decreasing(const std::vector<double>& v, double floor = 1e-24) {
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    if (v[k] <= floor) break;
    if (!(v[k + 1] < v[k])) return false;
  }
  return true;
}

/**
 * @brief CSV with columns t, x1..xn, u1..um, sigma, V, post.
 *
 * sigma is one-based. Each jump contributes a pre row (post = 0) and a post
 * row (post = 1); both carry V(k). Interior rows carry χᵀP_σχ of the active
 * mode.
 */
inline void write_csv(std::ostream& os, const Trajectory& tr, const MinJumpCertificate& cert) {
  os << "t";
  for (Index i = 0; i < tr.n; ++i) os << ",x" << i + 1;
  for (Index i = 0; i < tr.m; ++i) os << ",u" << i + 1;
  os << ",sigma,V,post\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::size_t jump = 0;
  for (std::size_t r = 0; r < tr.samples.size(); ++r) {
    const auto& s = tr.samples[r];
    const bool at_jump = jump < tr.jump_times.size() && s.t == tr.jump_times[jump];
    double v;
    if (at_jump)
      v = tr.lyapunov[jump];
    else
      v = cert.P[s.mode].quadratic(s.chi);
    os << num(s.t);
    for (Index i = 0; i < s.chi.size(); ++i) os << ',' << num(s.chi(i));
    os << ',' << (at_jump && s.post ? tr.modes[jump] : s.mode) + 1 << ',' << num(v) << ','
       << (s.post ? 1 : 0) << '\n';
    if (at_jump && s.post) ++jump;
  }
}

}  // namespace minjump

#endif  // MINJUMP_SIM_HPP

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
#ifndef MINJUMP_RULES_HPP
#define MINJUMP_RULES_HPP

#include <cstddef>
#include <vector>

#include "minjump/errors.hpp"
#include "minjump/model.hpp"
#include "minjump/numerics.hpp"

namespace minjump {

/// Rule matrices {P_i}, weights Π and the margin they were certified with.
struct MinJumpCertificate {
  std::vector<SymMatrix> P;
  MetzlerWeights Pi;
  double eps = 0.0;

  std::size_t modes() const { return P.size(); }
  Index dim() const { return P.empty() ? 0 : P.front().dim(); }

  void validate() const {
    if (P.empty()) throw CertificateError("certificate has no rule matrices");
    if (Pi.size() != P.size()) throw CertificateError("weight matrix size must match mode count");
    for (const auto& p : P) {
      if (p.dim() != dim()) throw CertificateError("rule matrices must share one dimension");
      if (!is_pd(p, 0.0)) throw CertificateError("rule matrix is not positive definite");
    }
    if (eps < 0.0) throw CertificateError("certificate margin must be nonnegative");
  }

  /// Same certificate with every P_i multiplied by @p alpha.
  MinJumpCertificate scaled(double alpha) const {
    MinJumpCertificate out = *this;
    for (auto& p : out.P) p *= alpha;
    return out;
  }
};

namespace detail {

inline void check_state(const Vector& chi, Index dim) {
  if (chi.size() != dim) throw DimensionError("state dimension does not match certificate");
  if (!chi.allFinite()) throw NumericError("non-finite state passed to jump rule");
}

/// First index of the minimum; exact comparison so ties go to the lowest index.
inline std::size_t argmin_first(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] < values[best]) best = k;
  return best;
}

}  // namespace detail

/// argmin_i χᵀP_iχ.
inline std::size_t select_impulsive(const Vector& chi, const MinJumpCertificate& cert) {
  detail::check_state(chi, cert.dim());
  std::vector<double> values;
  values.reserve(cert.modes());
  for (const auto& p : cert.P) values.push_back(p.quadratic(chi));
  return detail::argmin_first(values);
}

/// argmin_j χᵀ J̄_{j,i}ᵀ P_j J̄_{j,i} χ for current mode i.
inline std::size_t select_switched(const Vector& chi, std::size_t current_mode,
                                   const MinJumpCertificate& cert, const AugmentedModel& model) {
  detail::check_state(chi, cert.dim());
  if (current_mode >= cert.modes()) throw ModelError("current mode out of range");
  if (model.modes() != cert.modes()) throw ModelError("model and certificate mode counts differ");
  std::vector<double> values;
  values.reserve(cert.modes());
  for (std::size_t j = 0; j < cert.modes(); ++j) {
    const Vector next = model.jump(j, current_mode) * chi;
    values.push_back(cert.P[j].quadratic(next));
  }
  return detail::argmin_first(values);
}

/// min_j χᵀP_jχ.
inline double min_quadratic(const Vector& chi, const MinJumpCertificate& cert) {
  detail::check_state(chi, cert.dim());
  double best = cert.P.front().quadratic(chi);
  for (std::size_t j = 1; j < cert.modes(); ++j) best = std::min(best, cert.P[j].quadratic(chi));
  return best;
}

}  // namespace minjump

#endif  // MINJUMP_RULES_HPP

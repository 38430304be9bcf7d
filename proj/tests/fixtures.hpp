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
#ifndef MINJUMP_TESTS_FIXTURES_HPP
#define MINJUMP_TESTS_FIXTURES_HPP

// Published example data shared by the test binaries.

#include <optional>
#include <random>
#include <vector>

#include "minjump/model.hpp"
#include "minjump/rules.hpp"
#include "oracles.hpp"

namespace fixtures {

using minjump::Matrix;

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

inline Matrix pi2(double diag) { return mat({{diag, 1.0 - diag}, {1.0 - diag, diag}}); }

// Example 1: sampled-data loop with two jump maps.
inline minjump::ImpulsiveSpec ex1_spec() {
  return {mat({{3, 0}, {1, 1}}), mat({{0}, {1}}), {Matrix::Identity(2, 2), mat({{0.7, 0}, {0, 1.1}})}};
}
inline Matrix ex1_k1() { return mat({{-0.9622, -7.7351, -0.0260}}); }
inline Matrix ex1_k2() { return mat({{0, 0, 1}}); }
inline std::vector<minjump::SymMatrix> ex1_P() {
  return {minjump::SymMatrix::symmetric_part(
              mat({{0.1184, 0.0184, 0.0023}, {0.0184, 0.5032, 0.0183}, {0.0023, 0.0183, 0.0027}})),
          minjump::SymMatrix::symmetric_part(
              mat({{0.0866, 0.0877, 0.0108}, {0.0877, 1.3107, 0.1124}, {0.0108, 0.1124, 0.0142}}))};
}
inline minjump::AugmentedModel ex1_model() {
  return minjump::augment_impulsive(ex1_spec(), {ex1_k1(), ex1_k2()});
}
inline minjump::AugmentedModel ex1_design_model() {
  return minjump::augment_impulsive(ex1_spec(), {std::nullopt, ex1_k2()});
}

// Example 2: no controller.
inline minjump::ImpulsiveSpec ex2_spec() {
  return {mat({{2, 3}, {1, 1}}), Matrix(2, 0), {mat({{1, 0}, {0, 0.8}}), mat({{0.7, 0}, {0, 1}})}};
}
inline minjump::MinJumpCertificate ex2_cert() {
  return {{minjump::SymMatrix::symmetric_part(mat({{25.5386, 6.3780}, {6.3780, 6.6746}})),
           minjump::SymMatrix::symmetric_part(mat({{2.8886, 2.8549}, {2.8549, 20.6927}}))},
          minjump::MetzlerWeights(pi2(0.9)),
          0.0};
}

// Example 3: two actuators, one updated per sample.
inline minjump::SwitchedSpec ex3_spec() {
  const Matrix a = mat({{3, 0}, {1, 1}});
  const Matrix id = Matrix::Identity(2, 2);
  return {{a, a}, {mat({{6, 0}, {0, 0}}), mat({{0, 0}, {0, 4}})}, {{id, id}, {id, id}}};
}
/// Printed 1×4 gain of (new j, old i), zero-based.
inline Matrix ex3_printed_gain(std::size_t j, std::size_t i) {
  static const double k[2][2][4] = {{{-3.4332, -0.0457, -0.0061, -0.0003}, {-3.4160, -0.0516, -0.0001, -0.0033}},
                                    {{-0.4073, -2.1272, 0.0076, -0.0004}, {-0.4323, -2.1198, 0.0014, 0.0043}}};
  Matrix out(1, 4);
  for (int c = 0; c < 4; ++c) out(0, c) = k[j][i][c];
  return out;
}
/// Full 2×4 gain: actuator j takes the printed row, the other one holds.
inline Matrix ex3_gain(std::size_t j, std::size_t i) {
  Matrix k = Matrix::Zero(2, 4);
  k.row(static_cast<Eigen::Index>(j)) = ex3_printed_gain(j, i);
  const std::size_t other = 1 - j;
  k(static_cast<Eigen::Index>(other), static_cast<Eigen::Index>(2 + other)) = 1.0;
  return k;
}
inline minjump::AugmentedModel ex3_model() {
  return minjump::augment_switched(ex3_spec(), {{ex3_gain(0, 0), ex3_gain(0, 1)}, {ex3_gain(1, 0), ex3_gain(1, 1)}});
}
inline std::vector<Matrix> ex3_printed_P() {
  return {10.0 * mat({{0.63, -0.06, -2.14, -0.11}, {-0.06, 3.51, 0.03, -7.64}, {-2.14, 0.03, 7.45, 0.59},
                      {-0.11, -7.64, 0.59, 203.99}}),
          10.0 * mat({{0.43, -0.05, -1.53, -0.08}, {-0.05, 4.03, 0.05, -8.53}, {-1.53, 0.05, 191.30, 0.61},
                      {-0.08, -8.53, 0.61, 23.52}})};
}
/// The printed matrices read as P_i⁻¹.
inline minjump::MinJumpCertificate ex3_cert() {
  std::vector<minjump::SymMatrix> ps;
  for (const auto& p : ex3_printed_P()) ps.push_back(minjump::inv_spd(minjump::SymMatrix::symmetric_part(p)));
  return {ps, minjump::MetzlerWeights(pi2(0.1)), 0.0};
}

}  // namespace fixtures

#endif  // MINJUMP_TESTS_FIXTURES_HPP

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
#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "minjump/sim.hpp"
#include "oracles.hpp"
#include "random_certs.hpp"

using namespace minjump;
using fixtures::mat;

namespace {

const DwellRange kRange(0.01, 0.05);

MinJumpCertificate ex1_cert() { return {fixtures::ex1_P(), MetzlerWeights(fixtures::pi2(0.1)), 0.0}; }

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

}  // namespace

TEST(Sequence, Periodic) {
  const auto seq = gen_sequence(kRange, {DwellKind::periodic, 0.02}, 0, 4);
  ASSERT_EQ(seq.times().size(), 5u);
  EXPECT_DOUBLE_EQ(seq.times()[3], 0.06);
  EXPECT_TRUE(seq.admissible(kRange));
  EXPECT_THROW(gen_sequence(kRange, {DwellKind::periodic, 0.2}, 0, 4), ConfigError);
  EXPECT_THROW(SamplingSequence({0.0, 0.1, 0.1}), ConfigError);
  EXPECT_THROW(SamplingSequence({0.1, 0.2}), ConfigError);
}

TEST(Sequence, RandomDwellsStayInRangeAndRepeat) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto seq = gen_sequence(kRange, {}, seed, 500);
    EXPECT_TRUE(seq.admissible(kRange, 0.0));
    EXPECT_EQ(seq.times(), gen_sequence(kRange, {}, seed, 500).times());
  }
  EXPECT_NE(gen_sequence(kRange, {}, 1, 10).times(), gen_sequence(kRange, {}, 2, 10).times());
}

TEST(Impulsive, ZeroStateStaysZero) {
  const auto seq = gen_sequence(kRange, {}, 3, 50);
  const auto tr = simulate_impulsive(fixtures::ex1_model(), ex1_cert(), seq, Vector::Zero(2), Vector::Zero(1));
  for (const auto& s : tr.samples) EXPECT_EQ(s.chi.norm(), 0.0);
  for (std::size_t m : tr.modes) EXPECT_EQ(m, 0u);
}

TEST(Impulsive, DenseSamplesMatchExponential) {
  const auto model = fixtures::ex1_model();
  const auto seq = gen_sequence(kRange, {}, 4, 10);
  const auto tr = simulate_impulsive(model, ex1_cert(), seq, vec({1, -1}), vec({0.5}), 4);
  const auto& t = seq.times();
  std::size_t row = 0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    row += 2;  // pre and post rows at t_k
    const double h = t[k + 1] - t[k];
    for (int q = 1; q < 4; ++q, ++row) {
      const Vector expected = oracle::series_expm(model.drift(), h * q / 4.0) * tr.post_jump[k];
      EXPECT_LT((tr.samples[row].chi - expected).norm(), 1e-12 * (1.0 + expected.norm()));
      EXPECT_NEAR(tr.samples[row].t, t[k] + h * q / 4.0, 1e-15);
    }
  }
  EXPECT_EQ(row + 2, tr.samples.size());
}

TEST(Impulsive, SubstepsDoNotChangeJumpStates) {
  const auto seq = gen_sequence(kRange, {}, 5, 40);
  const auto a = simulate_impulsive(fixtures::ex1_model(), ex1_cert(), seq, vec({1, 1}), vec({0}), 1);
  const auto b = simulate_impulsive(fixtures::ex1_model(), ex1_cert(), seq, vec({1, 1}), vec({0}), 8);
  EXPECT_EQ(a.modes, b.modes);
  for (std::size_t k = 0; k < a.pre_jump.size(); ++k) EXPECT_EQ(a.pre_jump[k], b.pre_jump[k]);
  EXPECT_EQ(b.samples.size(), 2 * seq.times().size() + 7 * seq.dwell_count());
}

TEST(Impulsive, JumpsFollowRule) {
  const auto model = fixtures::ex1_model();
  const auto cert = ex1_cert();
  const auto tr = simulate_impulsive(model, cert, gen_sequence(kRange, {}, 6, 60), vec({1, 1}), vec({0}));
  ASSERT_EQ(tr.jump_times.size(), 61u);
  for (std::size_t k = 0; k < tr.modes.size(); ++k) {
    std::vector<double> v;
    for (const auto& p : cert.P) v.push_back(p.quadratic(tr.pre_jump[k]));
    EXPECT_EQ(tr.modes[k], oracle::brute_argmin(v));
    EXPECT_EQ(tr.post_jump[k], Vector(model.jump(tr.modes[k]) * tr.pre_jump[k]));
    EXPECT_EQ(tr.lyapunov[k], v[tr.modes[k]]);
  }
}

TEST(Impulsive, LyapunovScalesQuadratically) {
  const auto seq = gen_sequence(kRange, {}, 7, 30);
  const auto a = simulate_impulsive(fixtures::ex1_model(), ex1_cert(), seq, vec({1, 2}), vec({0.1}));
  const auto b = simulate_impulsive(fixtures::ex1_model(), ex1_cert(), seq, vec({3, 6}), vec({0.3}));
  EXPECT_EQ(a.modes, b.modes);
  for (std::size_t k = 0; k < a.lyapunov.size(); ++k)
    EXPECT_NEAR(b.lyapunov[k], 9.0 * a.lyapunov[k], 1e-12 * b.lyapunov[k]);
}

TEST(Impulsive, DecreasesUnderPublishedCertificates) {
  const auto model1 = fixtures::ex1_model();
  const auto model2 = augment_impulsive(fixtures::ex2_spec());
  const DwellRange range2(0.02, 0.02);
  std::mt19937_64 gen(31);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto tr1 = simulate_impulsive(model1, ex1_cert(), gen_sequence(kRange, {}, seed, 200),
                                        Vector::Ones(2), vec({0}));
    EXPECT_TRUE(strictly_decreasing(tr1.lyapunov)) << "seed " << seed;
    EXPECT_GT(decay_factor(tr1.lyapunov), 1.0);
    const auto tr2 = simulate_impulsive(model2, fixtures::ex2_cert(),
                                        gen_sequence(range2, {DwellKind::periodic, 0.02}, seed, 200),
                                        oracle::random_matrix(gen, 2, 1).col(0));
    EXPECT_TRUE(strictly_decreasing(tr2.lyapunov)) << "seed " << seed;
  }
}

TEST(Impulsive, DecreasesUnderRandomCertificates) {
  std::mt19937_64 gen(2026);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = fixtures::random_prop1_case(gen);
    const Vector x0 = oracle::random_matrix(gen, c.model.n(), 1).col(0);
    const auto tr = simulate_impulsive(c.model, c.cert, gen_sequence(c.range, {}, gen(), 100), x0);
    EXPECT_TRUE(strictly_decreasing(tr.lyapunov)) << "trial " << trial;
  }
}

TEST(Impulsive, DivergenceReported) {
  const auto model = augment_impulsive(ImpulsiveSpec{mat({{50}}), Matrix(1, 0), {mat({{1}})}});
  const MinJumpCertificate cert{{SymMatrix::identity(1)}, MetzlerWeights::identity(1), 0.0};
  try {
    simulate_impulsive(model, cert, gen_sequence(kRange, {DwellKind::periodic, 0.05}, 0, 100), vec({1}));
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.last_finite_time(), 0.0);
  }
}

TEST(Impulsive, InputChecks) {
  const auto seq = gen_sequence(kRange, {}, 0, 5);
  EXPECT_THROW(simulate_impulsive(fixtures::ex1_model(), ex1_cert(), seq, vec({1, 1, 1})), DimensionError);
  EXPECT_THROW(simulate_impulsive(fixtures::ex1_design_model(), ex1_cert(), seq, vec({1, 1})), ModelError);
  EXPECT_THROW(simulate_impulsive(fixtures::ex1_model(), ex1_cert(), seq, vec({1, 1}), std::nullopt, 0),
               ConfigError);
  EXPECT_THROW(simulate_switched(fixtures::ex1_model(), ex1_cert(), seq, vec({1, 1})), ModelError);
}

TEST(Switched, SingleModeMatchesImpulsive) {
  const Matrix a = mat({{-1, 2}, {0, -0.5}});
  const Matrix b = mat({{0}, {1}});
  const Matrix j = mat({{0.9, 0}, {0.1, 0.8}});
  const Matrix k = mat({{-0.3, 0.2, 0.5}});
  const auto imp = augment_impulsive(ImpulsiveSpec{a, b, {j}}, {k});
  const auto sw = augment_switched(SwitchedSpec{{a}, {b}, {{j}}}, {{k}});
  const MinJumpCertificate cert{{SymMatrix::identity(3)}, MetzlerWeights::identity(1), 0.0};
  const auto seq = gen_sequence(kRange, {}, 8, 50);
  const auto t1 = simulate_impulsive(imp, cert, seq, vec({1, -2}), vec({0.5}), 3);
  const auto t2 = simulate_switched(sw, cert, seq, vec({1, -2}), vec({0.5}), 0, 3);
  EXPECT_EQ(t1.modes, t2.modes);
  ASSERT_EQ(t1.samples.size(), t2.samples.size());
  for (std::size_t r = 0; r < t1.samples.size(); ++r) EXPECT_EQ(t1.samples[r].chi, t2.samples[r].chi);
}

TEST(Switched, JumpsFollowRuleAndDecrease) {
  const auto model = fixtures::ex3_model();
  const auto cert = fixtures::ex3_cert();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto tr = simulate_switched(model, cert, gen_sequence(kRange, {}, seed, 150), Vector::Ones(2),
                                      Vector::Zero(2), 1);
    std::size_t current = 1;
    for (std::size_t k = 0; k < tr.modes.size(); ++k) {
      std::vector<double> v;
      for (std::size_t j = 0; j < 2; ++j) v.push_back(cert.P[j].quadratic(model.jump(j, current) * tr.pre_jump[k]));
      EXPECT_EQ(tr.modes[k], oracle::brute_argmin(v));
      current = tr.modes[k];
    }
    EXPECT_TRUE(strictly_decreasing(tr.lyapunov)) << "seed " << seed;
  }
  EXPECT_THROW(simulate_switched(model, cert, gen_sequence(kRange, {}, 0, 3), Vector::Ones(2), std::nullopt, 2),
               ConfigError);
}

TEST(Csv, HeaderAndRows) {
  const auto seq = gen_sequence(kRange, {DwellKind::periodic, 0.02}, 0, 2);
  const auto tr = simulate_impulsive(fixtures::ex1_model(), ex1_cert(), seq, vec({1, 1}), vec({0}), 2);
  std::ostringstream os;
  write_csv(os, tr, ex1_cert());
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,x1,x2,u1,sigma,V,post");
  std::vector<std::string> rows;
  while (std::getline(is, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), tr.samples.size());
  EXPECT_EQ(rows[0].substr(0, 6), "0,1,1,");
  EXPECT_EQ(rows[0].back(), '0');
  EXPECT_EQ(rows[1].back(), '1');
  // Full precision round trip of the first post-jump input.
  std::istringstream row(rows[1]);
  std::string cell;
  for (int c = 0; c < 4; ++c) std::getline(row, cell, ',');
  EXPECT_EQ(std::stod(cell), tr.post_jump[0](2));
}

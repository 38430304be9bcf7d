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
#include "minjump/sdp.hpp"
#include "oracles.hpp"

using namespace minjump;
using fixtures::mat;

namespace {

/// Lyapunov feasibility: AᵀP + PA + εI ⪯ 0, P ⪰ I.
sdp::SdpProblem lyapunov_problem(const Matrix& a, sdp::VarId* p_out = nullptr) {
  sdp::SdpProblem prob;
  const sdp::VarId p = prob.add_symmetric("P", a.rows());
  const sdp::AffineExpr pe = prob.var(p);
  prob.add_block("lyap", a.transpose() * pe + pe * a, true);
  prob.add_lower_bound("floor", pe, 1.0);
  if (p_out) *p_out = p;
  return prob;
}

}  // namespace

TEST(AffineExpr, EvaluateAndCompose) {
  sdp::SdpProblem prob;
  const sdp::VarId s = prob.add_symmetric("S", 2);
  const sdp::VarId r = prob.add_matrix("R", 1, 2);
  EXPECT_EQ(prob.scalar_count(), 5u);
  Vector y(5);
  y << 1, 2, 3, 4, 5;
  const Matrix sv = prob.value(s, y);
  EXPECT_EQ(sv, mat({{1, 2}, {2, 3}}));
  EXPECT_EQ(prob.value(r, y), mat({{4, 5}}));
  const sdp::AffineExpr stacked =
      sdp::AffineExpr::blocks({{prob.var(s), prob.var(r).transpose()}, {prob.var(r), sdp::AffineExpr::constant(mat({{7}}))}});
  EXPECT_EQ(stacked.evaluate(y), mat({{1, 2, 4}, {2, 3, 5}, {4, 5, 7}}));
  EXPECT_THROW(prob.var(s) + prob.var(r), DimensionError);
}

TEST(Solve, ScalarFeasibleAndInfeasible) {
  const auto stable = sdp::solve(lyapunov_problem(mat({{-1}})));
  ASSERT_EQ(stable.status, sdp::SolveStatus::optimal);
  // ε = 2p with p at the box bound.
  EXPECT_NEAR(stable.eps, 2e4, 1e-2);
  const auto unstable = sdp::solve(lyapunov_problem(mat({{1}})));
  EXPECT_EQ(unstable.status, sdp::SolveStatus::infeasible);
  EXPECT_NEAR(unstable.eps, -2.0, 1e-5);
}

TEST(Solve, TwoByTwoResidualsMatchClosedForm) {
  sdp::VarId p;
  sdp::SdpProblem prob = lyapunov_problem(mat({{0, 1}, {-1, -1}}), &p);
  prob.add_upper_bound("cap", prob.var(p), 10.0);
  const auto sol = sdp::solve(prob);
  ASSERT_EQ(sol.status, sdp::SolveStatus::optimal);
  EXPECT_GT(sol.eps, 0.0);
  const auto res = sdp::residuals(prob, sol);
  ASSERT_EQ(res.size(), 3u);
  for (std::size_t k = 0; k < res.size(); ++k) {
    const Matrix f = prob.blocks()[k].lhs.evaluate(sol.x);
    EXPECT_NEAR(res[k], oracle::eig2(f).second, 1e-12);
  }
  EXPECT_NEAR(sol.eps, -res[0], 1e-12);
  EXPECT_LE(res[1], 1e-8);
  EXPECT_LE(res[2], 1e-8);
}

TEST(Solve, ConstantBlockResidual) {
  sdp::SdpProblem prob;
  prob.add_symmetric("unused", 1);
  prob.add_block("constant", sdp::AffineExpr::constant(-Matrix::Identity(2, 2)), true);
  const auto sol = sdp::solve(prob);
  ASSERT_EQ(sol.status, sdp::SolveStatus::optimal);
  EXPECT_NEAR(sol.eps, 1.0, 1e-7);
  EXPECT_NEAR(sdp::residuals(prob, sol)[0], -1.0, 1e-12);
}

TEST(Solve, MarginScalesWithStrictBlock) {
  const Matrix a = mat({{-1, 2}, {0, -3}});
  sdp::SdpProblem base;
  sdp::SdpProblem scaled;
  for (auto* prob : {&base, &scaled}) {
    const sdp::VarId p = prob->add_symmetric("P", 2);
    const sdp::AffineExpr pe = prob->var(p);
    const double factor = prob == &base ? 1.0 : 3.0;
    prob->add_block("lyap", (a.transpose() * pe + pe * a) * factor, true);
    prob->add_lower_bound("floor", pe, 1.0);
    prob->add_upper_bound("cap", pe, 5.0);
  }
  const auto s1 = sdp::solve(base);
  const auto s3 = sdp::solve(scaled);
  ASSERT_EQ(s1.status, sdp::SolveStatus::optimal);
  ASSERT_EQ(s3.status, sdp::SolveStatus::optimal);
  EXPECT_NEAR(s3.eps, 3.0 * s1.eps, 1e-5 * s3.eps);
}

TEST(Solve, Deterministic) {
  const sdp::SdpProblem prob = lyapunov_problem(mat({{-1, 4}, {0, -2}}));
  const auto a = sdp::solve(prob);
  const auto b = sdp::solve(prob);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.eps, b.eps);
  EXPECT_EQ(a.x, b.x);
}

TEST(Solve, CapacityAndEmptyProblem) {
  sdp::SolverOptions opts;
  opts.max_unknowns = 3;
  EXPECT_THROW(sdp::solve(lyapunov_problem(mat({{-1, 0}, {0, -1}})), opts), CapacityError);
  EXPECT_NO_THROW(sdp::solve(lyapunov_problem(mat({{-1}})), opts));
  sdp::SdpProblem empty;
  empty.add_symmetric("x", 1);
  EXPECT_THROW(sdp::solve(empty), ConfigError);
}

TEST(Problem, DumpListsBlocks) {
  const sdp::SdpProblem prob = lyapunov_problem(mat({{-1}}));
  std::ostringstream os;
  prob.dump(os);
  EXPECT_NE(os.str().find("\"lyap\""), std::string::npos);
  EXPECT_NE(os.str().find("\"floor\""), std::string::npos);
}

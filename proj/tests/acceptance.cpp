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
// Acceptance run: one PASS/FAIL line per criterion, details on "info" lines.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "commands.hpp"
#include "fixtures.hpp"
#include "minjump/certcheck.hpp"
#include "minjump/numerics.hpp"
#include "minjump/rules.hpp"
#include "minjump/sdp.hpp"
#include "minjump/sim.hpp"
#include "minjump/synth.hpp"
#include "oracles.hpp"
#include "random_certs.hpp"

using namespace minjump;
using fixtures::mat;

namespace {

const DwellRange kRange(0.01, 0.05);
constexpr double kRoundingBand = 1e-3;

void info(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void info(const char* fmt, ...) {
  std::printf("  info: ");
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector ones_x0() { return Vector::Ones(2); }

double simulated_decay(const SynthesisResult& r, std::uint64_t seed, std::size_t initial_mode = 0) {
  const SamplingSequence seq = gen_sequence(kRange, {}, seed, 100);
  const Vector u0 = Vector::Zero(r.model.m());
  const Trajectory tr = r.model.kind() == ModelKind::impulsive
                            ? simulate_impulsive(r.model, r.cert, seq, ones_x0(), u0)
                            : simulate_switched(r.model, r.cert, seq, ones_x0(), u0, initial_mode);
  return decay_factor(tr.lyapunov);
}

bool criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const DwellRange range(0.02, 0.02);
  const auto rep =
      check_prop1(augment_impulsive(fixtures::ex2_spec()), fixtures::ex2_cert(), range, ThetaGrid::uniform(range));
  const double dt = seconds_since(t0);
  info("worst margin %.6e (mode %zu), runtime %.4f s", rep.worst_margin, rep.worst_mode + 1, dt);
  return rep.worst_margin < 0.0 && rep.worst_margin < kRoundingBand && dt < 1.0;
}

bool criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const Matrix stated = fixtures::pi2(0.9);
  const SynthesisResult r = synthesize(fixtures::ex1_design_model(), stated, kRange);
  bool ok = r.success() && r.eps > 0.0;
  info("stated weights (off-diagonal 0.1): %s, margin %.6e", to_string(r.status), r.eps);
  if (ok) {
    const auto rep = check_prop1(r.model, r.cert, kRange, ThetaGrid::uniform(kRange, 200));
    const double decay = simulated_decay(r, 1);
    info("post-check %.6e, V decay %.3e", rep.worst_margin, decay);
    ok = rep.worst_margin < -1e-7 && decay >= 1e3;
  }
  const double dt = seconds_since(t0);
  info("runtime %.3f s", dt);
  ok = ok && dt < 60.0;

  const MinJumpCertificate published_stated{fixtures::ex1_P(), MetzlerWeights(stated), 0.0};
  const auto pub = check_prop1(fixtures::ex1_model(), published_stated, kRange, ThetaGrid::uniform(kRange));
  info("published K, P under stated weights: worst margin %.6e (%s band)", pub.worst_margin,
       pub.worst_margin < kRoundingBand ? "within" : "outside");

  const Matrix swapped = fixtures::pi2(0.1);
  const MinJumpCertificate published_swapped{fixtures::ex1_P(), MetzlerWeights(swapped), 0.0};
  const auto pub2 = check_prop1(fixtures::ex1_model(), published_swapped, kRange, ThetaGrid::uniform(kRange));
  info("published K, P under diagonal 0.1: worst margin %.6e", pub2.worst_margin);
  const SynthesisResult alt = synthesize(fixtures::ex1_design_model(), swapped, kRange);
  if (alt.success()) {
    info("synthesis under diagonal 0.1: %s, margin %.6e, K = [%.4f %.4f %.4f], post-check %.6e, V decay %.3e",
         to_string(alt.status), alt.eps, alt.gains[0](0, 0), alt.gains[0](0, 1), alt.gains[0](0, 2),
         alt.report->worst_margin, simulated_decay(alt, 1));
  } else {
    info("synthesis under diagonal 0.1: %s", to_string(alt.status));
  }
  return ok;
}

bool criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::vector<std::optional<Matrix>>> free(2, std::vector<std::optional<Matrix>>(2));
  SynthesisOptions opts;
  opts.clock_nodes = 11;
  const SynthesisResult r = synthesize(augment_switched(fixtures::ex3_spec(), free), fixtures::pi2(0.1), kRange, opts);
  bool ok = r.success();
  info("synthesis with %zu clock nodes: %s, margin %.6e", opts.clock_nodes, to_string(r.status), r.eps);
  if (ok) {
    const auto rep = check_prop2(r.model, r.cert, kRange, ThetaGrid::uniform(kRange, 200));
    const double decay = simulated_decay(r, 1, 1);
    info("post-check %.6e, V decay %.3e", rep.worst_margin, decay);
    ok = rep.pass && decay >= 1e3;
  }
  const double dt = seconds_since(t0);
  info("runtime %.3f s", dt);
  ok = ok && dt < 120.0;
  const auto pub = check_prop2(fixtures::ex3_model(), fixtures::ex3_cert(), kRange, ThetaGrid::uniform(kRange));
  info("published K, P: worst margin %.6e", pub.worst_margin);
  return ok && pub.worst_margin < kRoundingBand;
}

bool criterion4() {
  std::mt19937_64 gen(2026);
  CheckTolerances tol;
  tol.nonstrict = 1e-6;
  std::size_t passed = 0, plain_passed = 0;
  double worst_flow = -1e300, worst_plain_flow = -1e300, max_beta = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = fixtures::random_prop1_case(gen);
    const auto nodes = uniform_nodes(c.range.t_max(), 64);
    const double eps = -c.margin / 2.0;
    const double beta = calibrate_clock_growth(c.cert, c.model, nodes);
    max_beta = std::max(max_beta, beta);
    const auto rep = check_thm1b(c.model, build_S_star(c.cert, c.model, nodes, beta), c.cert, eps, c.range,
                                 std::nullopt, tol);
    const auto plain = check_thm1b(c.model, build_S_star(c.cert, c.model, nodes), c.cert, eps, c.range,
                                   std::nullopt, tol);
    passed += rep.pass;
    plain_passed += plain.pass;
    worst_flow = std::max(worst_flow, rep.condition("flow").worst);
    worst_plain_flow = std::max(worst_plain_flow, plain.condition("flow").worst);
  }
  info("%zu/20 pass with calibrated growth (max %.3e), worst flow %.3e", passed, max_beta, worst_flow);
  info("%zu/20 pass without growth, worst flow %.3e", plain_passed, worst_plain_flow);
  return passed == 20;
}

struct MonotoneCase {
  std::string name;
  AugmentedModel model;
  MinJumpCertificate cert;
  DwellRange range;
  DwellPattern pattern;
};

bool criterion5() {
  std::vector<MonotoneCase> cases;
  const std::string dir = MINJUMP_FIXTURE_DIR;
  for (const char* name : {"example1.json", "example2.json", "example3.json", "stable_flipped.json"}) {
    const cli::JobConfig cfg = cli::load_config((std::filesystem::path(dir) / name).string());
    const AugmentedModel model = cli::build_model(cfg);
    const MinJumpCertificate cert = cli::build_cert(cfg);
    const DwellRange range = *cfg.range;
    const auto rep = cli::detail::verify_config(cfg, 200, {});
    if (!rep.pass) {
      info("%s: certificate does not pass, skipped", name);
      continue;
    }
    cases.push_back({name, model, cert, range, cfg.run.dwell});
  }
  std::mt19937_64 gen(2026);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = fixtures::random_prop1_case(gen);
    cases.push_back({"random " + std::to_string(trial), c.model, c.cert, c.range, {}});
  }
  std::size_t runs = 0, bad = 0;
  std::mt19937_64 init(7);
  for (const auto& c : cases) {
    std::size_t case_bad = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const SamplingSequence seq = gen_sequence(c.range, c.pattern, seed, 100);
      const Vector x0 = oracle::random_matrix(init, c.model.n(), 1).col(0);
      const Vector u0 = oracle::random_matrix(init, c.model.m(), 1).col(0);
      const Trajectory tr = c.model.kind() == ModelKind::impulsive
                                ? simulate_impulsive(c.model, c.cert, seq, x0, u0)
                                : simulate_switched(c.model, c.cert, seq, x0, u0, seed % c.model.modes());
      ++runs;
      if (!strictly_decreasing(tr.lyapunov)) ++case_bad;
    }
    if (case_bad) info("%s: %zu/100 runs not strictly decreasing", c.name.c_str(), case_bad);
    bad += case_bad;
  }
  info("%zu certificates, %zu runs, %zu with an increase", cases.size(), runs, bad);
  return bad == 0;
}

bool criterion6() {
  std::mt19937_64 gen(2026);
  std::uniform_int_distribution<int> dim_pick(1, 4), mode_pick(1, 4);
  std::uniform_real_distribution<double> log_scale(-6.0, 6.0);
  std::size_t changed_imp = 0, changed_sw = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index d = dim_pick(gen);
    const std::size_t n = static_cast<std::size_t>(mode_pick(gen));
    MinJumpCertificate cert{{}, MetzlerWeights::identity(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) cert.P.push_back(SymMatrix::symmetric_part(oracle::random_spd(gen, d)));
    MinJumpCertificate scaled = cert;
    const double alpha = std::pow(10.0, log_scale(gen));
    for (auto& p : scaled.P) p *= alpha;
    const Vector chi = oracle::random_matrix(gen, d, 1).col(0);
    if (select_impulsive(chi, cert) != select_impulsive(chi, scaled)) ++changed_imp;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const Index nx = dim_pick(gen);
    const std::size_t n = static_cast<std::size_t>(mode_pick(gen));
    SwitchedSpec spec;
    std::vector<std::vector<std::optional<Matrix>>> gains(n, std::vector<std::optional<Matrix>>(n));
    for (std::size_t j = 0; j < n; ++j) {
      spec.A.push_back(oracle::random_matrix(gen, nx, nx));
      spec.B.push_back(oracle::random_matrix(gen, nx, 1));
    }
    spec.J.assign(n, std::vector<Matrix>(n));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        spec.J[j][i] = oracle::random_matrix(gen, nx, nx);
        gains[j][i] = oracle::random_matrix(gen, 1, nx + 1);
      }
    const AugmentedModel model = augment_switched(spec, gains);
    MinJumpCertificate cert{{}, MetzlerWeights::identity(n), 0.0};
    for (std::size_t i = 0; i < n; ++i)
      cert.P.push_back(SymMatrix::symmetric_part(oracle::random_spd(gen, nx + 1)));
    MinJumpCertificate scaled = cert;
    const double alpha = std::pow(10.0, log_scale(gen));
    for (auto& p : scaled.P) p *= alpha;
    const Vector chi = oracle::random_matrix(gen, nx + 1, 1).col(0);
    const std::size_t current = static_cast<std::size_t>(gen() % n);
    if (select_switched(chi, current, cert, model) != select_switched(chi, current, scaled, model)) ++changed_sw;
  }
  info("impulsive: %zu/1000 changed, switched: %zu/1000 changed", changed_imp, changed_sw);
  return changed_imp == 0 && changed_sw == 0;
}

bool criterion7() {
  std::mt19937_64 gen(2026);
  double expm_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Matrix m = oracle::random_matrix(gen, 4, 4);
    m *= 5.0 * std::uniform_real_distribution<double>(0.0, 1.0)(gen) / spectral_norm(m);
    const Matrix ref = oracle::series_expm(m, 1.0);
    expm_err = std::max(expm_err, (expm(m) - ref).norm() / std::max(1.0, ref.norm()));
  }
  double eig_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix s = oracle::random_symmetric(gen, 1 + trial % 6);
    eig_err = std::max(eig_err, std::abs(sym_eig_max(SymMatrix::symmetric_part(s)) - oracle::power_lambda_max(s)));
  }
  info("expm relative error %.3e, eigenvalue error %.3e", expm_err, eig_err);

  auto lyap = [](const Matrix& a) {
    sdp::SdpProblem prob;
    const sdp::VarId p = prob.add_symmetric("P", a.rows());
    const sdp::AffineExpr pe = prob.var(p);
    prob.add_block("lyap", a.transpose() * pe + pe * a, true);
    prob.add_lower_bound("floor", pe, 1.0);
    return prob;
  };
  const auto feasible = sdp::solve(lyap(mat({{-1}})));
  const auto infeasible = sdp::solve(lyap(mat({{1}})));
  const bool pair_ok = feasible.status == sdp::SolveStatus::optimal && feasible.eps > 0.0 &&
                       infeasible.status == sdp::SolveStatus::infeasible;
  const sdp::SdpProblem two = lyap(mat({{0, 1}, {-1, -1}}));
  const auto sol = sdp::solve(two);
  double res_err = 0.0;
  const auto res = sdp::residuals(two, sol);
  for (std::size_t k = 0; k < res.size(); ++k)
    res_err = std::max(res_err, std::abs(res[k] - oracle::eig2(two.blocks()[k].lhs.evaluate(sol.x)).second));
  info("scalar pair: %s / %s; 2x2 residual error %.3e", sdp::to_string(feasible.status),
       sdp::to_string(infeasible.status), res_err);
  return expm_err <= 1e-12 && eig_err <= 1e-8 && pair_ok && sol.status == sdp::SolveStatus::optimal &&
         res_err <= 1e-10;
}

bool criterion8() {
  const cli::JobConfig cfg =
      cli::load_config((std::filesystem::path(MINJUMP_FIXTURE_DIR) / "unstabilizable.json").string());
  const SynthesisResult r = synthesize(cli::build_model(cfg, true), *cfg.Pi, *cfg.range, cli::detail::synthesis_options(cfg));
  info("status %s, margin %.6e", to_string(r.status), r.eps);
  return !r.success();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<bool()>>> criteria{
      {"1 example 2 certificate", criterion1}, {"2 example 1 end-to-end", criterion2},
      {"3 example 3 end-to-end", criterion3},  {"4 clock certificate equivalence", criterion4},
      {"5 Lyapunov monotonicity", criterion5}, {"6 rule scale invariance", criterion6},
      {"7 numerics oracles", criterion7},      {"8 negative control", criterion8}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    bool ok = false;
    try {
      ok = run();
    } catch (const std::exception& e) {
      info("exception: %s", e.what());
    }
    std::printf("%s criterion %s\n", ok ? "PASS" : "FAIL", name);
    std::fflush(stdout);
    failed += !ok;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

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

// minjump verify|synth|simulate|example [args] [flags]

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

#ifndef MINJUMP_FIXTURE_DIR
#define MINJUMP_FIXTURE_DIR "fixtures"
#endif

int main(int argc, char** argv) {
  namespace mc = minjump::cli;
  CLI::App app{"Min-jumping rule and sampled-data gain co-design"};
  app.require_subcommand(1);

  mc::VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Check a rule certificate against its dwell range");
  v->add_option("config", verify.config, "Job configuration (JSON)")->required();
  v->add_option("--grid", verify.grid, "Number of theta grid points");
  v->add_option("--tol", verify.tol, "Strict margin tolerance");
  v->add_option("--out", verify.out, "Report path (default: stdout)");

  mc::SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Design gains and rule matrices");
  s->add_option("config", synth.config, "Job configuration (JSON)")->required();
  s->add_option("--nodes", synth.nodes, "Clock nodes on [0, T_max]");
  s->add_option("--delta", synth.delta, "Positive-definiteness floor");
  s->add_option("--pi-scan", synth.pi_scan, "JSON list of candidate weight matrices");
  s->add_option("--out", synth.out, "Result path (default: stdout)");

  mc::SimulateArgs sim;
  auto* r = app.add_subcommand("simulate", "Simulate the closed loop");
  r->add_option("config", sim.config, "Job configuration (JSON)")->required();
  r->add_option("--result", sim.result, "Synthesis result supplying P, Pi and gains");
  r->add_option("--seed", sim.seed, "Dwell sequence seed");
  r->add_option("--steps", sim.steps, "Number of dwell intervals");
  r->add_option("--substeps", sim.substeps, "Dense samples per interval");
  r->add_option("--out", sim.out, "Trajectory CSV path");
  r->add_option("--summary", sim.summary, "Summary JSON path (default: stdout)");
  r->add_flag("--zero-gains", sim.zero_gains, "Replace every configured gain by zero");

  mc::ExampleArgs example;
  example.fixtures = MINJUMP_FIXTURE_DIR;
  auto* e = app.add_subcommand("example", "Run a bundled example workflow");
  e->add_option("id", example.id, "Example number")->required()->check(CLI::Range(1, 3));
  e->add_option("--fixtures", example.fixtures, "Fixture directory");
  e->add_option("--csv", example.csv, "Trajectory CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : mc::kConfig;
  }

  if (*v) return mc::cmd_verify(verify, std::cout, std::cerr);
  if (*s) return mc::cmd_synth(synth, std::cout, std::cerr);
  if (*r) return mc::cmd_simulate(sim, std::cout, std::cerr);
  return mc::cmd_example(example, std::cout, std::cerr);
}

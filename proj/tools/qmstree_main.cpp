// Copyright 2026 The qmstree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <string>

#include <CLI11.hpp>

#include "qmstree/io.hpp"

// Batch front door. Every flag can also come from the environment with the
// QMSTREE_ prefix (flags win): QMSTREE_MODEL, QMSTREE_OBSERVABLE,
// QMSTREE_TOL, QMSTREE_NMAX, QMSTREE_OUT, QMSTREE_DENSE_BUDGET.

namespace {

void add_common_options(CLI::App* cmd, qmstree::io::RunConfig& config, bool observable) {
  cmd->add_option("--model", config.model_path, "Model spec file (JSON)")
      ->envname("QMSTREE_MODEL");
  if (observable) {
    cmd->add_option("--observable", config.observable_path, "Observable spec file (JSON)")
        ->envname("QMSTREE_OBSERVABLE");
  }
  cmd->add_option("--tol", config.tol, "Pass tolerance (default 1e-9)")->envname("QMSTREE_TOL");
  cmd->add_option("--nmax", config.n_max, "Depth horizon (default 6)")->envname("QMSTREE_NMAX");
  cmd->add_option("--out", config.out_path, "Report file (default: stdout)")
      ->envname("QMSTREE_OUT");
  cmd->add_option("--dense-budget", config.dense_budget,
                  "Densifiable site budget override (default 7)")
      ->envname("QMSTREE_DENSE_BUDGET");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume evaluation and verification of tree Markov states"};
  app.require_subcommand(1);

  qmstree::io::RunConfig config;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Evaluate an observable against a model's state");
  add_common_options(evaluate, config, true);
  CLI::App* verify = app.add_subcommand("verify", "Run the verification suite on a model");
  add_common_options(verify, config, false);
  CLI::App* fixpoint =
      app.add_subcommand("fixpoint", "Solve the boundary fixed-point equation of a model");
  add_common_options(fixpoint, config, false);
  CLI::App* sweep = app.add_subcommand("sweep", "Solve the fixed point across a (beta, J) grid");
  add_common_options(sweep, config, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qmstree::io::kExitConfig;
  }

  if (evaluate->parsed()) config.command = "evaluate";
  if (verify->parsed()) config.command = "verify";
  if (fixpoint->parsed()) config.command = "fixpoint";
  if (sweep->parsed()) config.command = "sweep";
  return qmstree::io::run(config);
}

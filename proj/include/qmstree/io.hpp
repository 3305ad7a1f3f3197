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

#pragma once

#include <string>
#include <vector>

#include "qmstree/engine.hpp"
#include "qmstree/ising.hpp"

// JSON front door: model and observable specs in, deterministic report
// documents out. Parsing is strict; unknown fields are rejected by name.

namespace qmstree::io {

/** Exit codes of run(), per the batch contract. */
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitVerification = 4;
inline constexpr int kExitSolver = 5;

/**
 * A parsed model spec. "ising_competing" fills `ising` and the sweep
 * grids; "custom" fills the root fork amplitude and weight (raw selects
 * the unvalidated kernel constructor).
 */
struct ParsedModel {
  std::string type;
  ising::ModelSpec ising;
  /** Sweep grids; default to the single (beta, J) point. */
  std::vector<double> beta_grid;
  std::vector<double> j_grid;
  RegionOperator amplitude;
  RegionOperator weight;
  bool raw = false;
};

/** One batch invocation. */
struct RunConfig {
  std::string command;  // evaluate | verify | fixpoint | sweep
  std::string model_path;
  std::string observable_path;
  double tol = kDefaultTol;
  int n_max = kDefaultNMax;
  /** Report destination; empty writes to stdout. */
  std::string out_path;
  /** Caps both dense-matrix and basis-sweep site budgets when positive. */
  int dense_budget = 0;
};

/** Strict parse of a model spec document. Throws SpecError naming the field. */
ParsedModel parse_model_spec(const std::string& text);

/** Strict parse of an operator document. Throws SpecError naming the field. */
RegionOperator parse_operator(const std::string& text);

/** The operator document for `a`; parse_operator inverts it exactly. */
std::string operator_to_json(const RegionOperator& a);

/**
 * An observable document: {"operator": ..., "volume": optional int}.
 * volume stays -1 when absent.
 */
struct ParsedObservable {
  RegionOperator op;
  int volume = -1;
};

ParsedObservable parse_observable(const std::string& text);

/** The handle a parsed model describes. */
QmsHandle build_handle(const ParsedModel& m, int n_max);

/**
 * Executes the configured command and writes the report document. Reports
 * are deterministic: identical inputs produce byte-identical documents
 * (run metadata lives in the header, never in the body). Returns the exit
 * code; errors are reported on stderr.
 */
int run(const RunConfig& config);

}  // namespace qmstree::io

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

#include "qmstree/engine.hpp"

// The Ising model with competing interactions on the binary tree: coupling
// operators, fork amplitude, closed-form boundary weight, fixed-point
// solver for general amplitudes, and the explicit product form of the
// state.

namespace qmstree::ising {

struct ModelSpec {
  double beta = 0.0;  // inverse temperature
  double J = 0.0;     // competing (sibling) coupling strength
  int k = 2;          // tree order; the fork amplitude requires 2
  int depth = 3;      // default verification horizon
};

/** Throws SpecError unless beta >= 0, J >= 0, k >= 1, depth >= 0. */
void validate(const ModelSpec& m);

/**
 * The two pair couplings on the canonical fork at the root: `edge` couples
 * the root to its first successor, `sibling` couples the two successors.
 * Each is exp of beta/2 (resp. J*beta/2) times (id*id + sigma*sigma).
 */
struct CouplingPair {
  RegionOperator edge;
  RegionOperator sibling;
};

CouplingPair build_couplings(const ModelSpec& m);

/**
 * The fork amplitude A = gamma*id + delta*(sigma sigma id) +
 * delta*(sigma id sigma) + eta*(id sigma sigma) on the canonical root
 * fork, built as the product edge(1) * edge(2) * sibling and cross-checked
 * against the closed-form coefficients.
 */
struct ForkAmplitude {
  RegionOperator op;
  double gamma = 0.0;
  double delta = 0.0;
  double eta = 0.0;
};

ForkAmplitude build_amplitude(const ModelSpec& m);

/** The scalar boundary weight 4 / (e^{2Jb}(e^{4b}+1) + 2e^{2b}). */
double closed_form_alpha(const ModelSpec& m);

struct FixedPointSolution {
  RegionOperator h;  // positive single-site operator at the fork's kept vertex
  double residual = 0.0;
  int iterations = 0;
};

/**
 * Solves Tr_{x]}(A*(id (x) h ... h)A) = h for a self-adjoint fork
 * amplitude by normalized iteration with scale recovery (the map is
 * quadratic in h). Throws SolverFailure on non-convergence or a
 * non-positive iterate.
 */
FixedPointSolution solve_fixed_point(const RegionOperator& amplitude,
                                     int max_iterations = kSolverMaxIterations,
                                     double tol = kSolverTol);

/**
 * The homogeneous state handle of the model: every vertex carries the
 * kernel built from the fork amplitude with weight alpha*id, the root
 * carries the trace state. The fixed-point solver is cross-checked
 * against the closed-form alpha before the handle is built.
 */
QmsHandle build_qms(const ModelSpec& m, int n_max = kDefaultNMax);

/**
 * The explicit product form of the state: alpha^m * tr(K a K*) with K the
 * level-ordered product of all fork amplitudes strictly above the
 * observable's deepest level and m the number of those interior vertices;
 * tr is the normalized trace. Kept independent of the contraction engine
 * as a cross-check route. The diagonal amplitude makes every term with an
 * off-diagonal letter vanish exactly; the term count grows as 4^m, gated
 * by budget.max_product_terms.
 */
cplx evaluate_explicit_ising(const ModelSpec& m, const RegionOperator& a,
                             const DenseBudget& budget = {});

}  // namespace qmstree::ising

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
#include <utility>
#include <vector>

#include "qmstree/engine.hpp"

// Numerical certificates for the structural properties of tree Markov
// states: vertex and level Markov conditions, the local potential and its
// commutation relations, translation invariance, and subtree restriction.

namespace qmstree {

struct VerificationReport {
  std::string property;
  bool pass = false;
  double residual = 0.0;
  double tolerance = kDefaultTol;
  /** Basis string, vertex, or block family where the worst residual occurred. */
  std::string witness;
  /** Evaluation volumes examined. */
  std::vector<int> volumes;
  /** Residual norm used: "coefficient_sup" or "coefficient_l1". */
  std::string norm;
  std::string notes;
};

/**
 * Vertex Markov condition at x: max over the Pauli basis of the algebra on
 * P(x) u {x} u S(x) of |phi(E_x(a)) - phi(a)|, both sides evaluated at the
 * same volume (default level(x)+1). Uses the dense marginal pairing when
 * the region fits the matrix budget, else the coefficient pairing.
 */
VerificationReport check_localized_markov(const QmsHandle& h, const VertexWord& x, int volume = -1,
                                          double tol = kDefaultTol,
                                          const DenseBudget& budget = {});

/**
 * Level Markov condition at n: max over the Pauli basis of Lambda_{[0,n+1]}
 * of |phi(E_n(a)) - phi(a)| with E_n the product of all level-n vertex
 * maps. Also runs the per-vertex checks at level n and records whether the
 * two verdicts agree (they are equivalent statements).
 */
VerificationReport check_level_markov(const QmsHandle& h, int n, double tol = kDefaultTol,
                                      const DenseBudget& budget = {});

/**
 * The local potential of the state at volume n: total = -log of the
 * marginal density on Lambda_{[0,n]}, decomposed into a head block at
 * level 0 (-log of the initial state, zero for the trace state), one
 * interaction block per level pair (j, j+1) summing
 * -log(alpha_x) - 2 log(A_x) over the level-j forks, and a zero tail
 * block at level n. Levels play the role of the decomposition's W-sets;
 * the normalized trace convention absorbs the additive constants into the
 * interaction blocks. Blocks are plain data and may be edited before
 * check_commutation (fault-injection tests do).
 */
struct PotentialDecomposition {
  int volume = 0;
  Region region;  // Lambda_{[0,n]}
  RegionOperator total;
  RegionOperator head_block;
  std::vector<RegionOperator> interaction_blocks;  // one per level pair (j, j+1)
  RegionOperator tail_block;
  /** Coefficient-sup distance between total and the sum of the blocks. */
  double reconstruction_residual = 0.0;
  /** Commutator family name -> coefficient l1 residual, as extracted. */
  std::vector<std::pair<std::string, double>> commutator_residuals;
  std::string notes;
};

/**
 * Extracts the potential at volume n. Requires every interior kernel to
 * have a diagonal amplitude and a positive scalar weight; throws SpecError
 * otherwise, and when a marginal eigenvalue makes the log undefined
 * (non-faithful state), names the eigenvalue.
 */
PotentialDecomposition extract_potential(const QmsHandle& h, int n, const DenseBudget& budget = {});

/**
 * The four commutation residual families of the decomposition: head block
 * vs first interaction block, last interaction block vs tail block, head
 * vs tail, and every adjacent interaction pair. Coefficient l1 norm.
 */
VerificationReport check_commutation(const PotentialDecomposition& d, double tol = 1e-12);

struct TranslationInvarianceReport {
  /** (i) state invariance under the k root shifts on Lambda_{[0,1]}. */
  VerificationReport state_shift;
  /** (ii) subtree restrictions reproduce the state on shifted observables. */
  VerificationReport subtree_restriction;
  /** (iii) every kernel at depth <= 2 is a copy of the root kernel. */
  VerificationReport kernel_copies;
  /** False when the three criteria's verdicts differ (they are equivalent). */
  bool verdicts_agree = true;
  bool pass = false;
};

/**
 * The three equivalent translation-invariance criteria, each reported
 * separately, plus their agreement flag. Requires an unrestricted handle.
 */
TranslationInvarianceReport check_translation_invariance(const QmsHandle& h,
                                                         double tol = kDefaultTol);

/**
 * Markov condition of the restriction of h to a finite connected subtree:
 * for every subtree vertex at relative depth <= 2 whose full fork stays
 * inside the subtree, checks phi' o E'_x = phi' over the basis of the
 * restricted path-plus-fork algebra.
 */
VerificationReport check_sub_qms(const QmsHandle& h, const Region& subtree,
                                 double tol = kDefaultTol);

/** Same check for the restriction to the unbounded future of a vertex. */
VerificationReport check_sub_qms(const QmsHandle& h, const VertexWord& future_root,
                                 double tol = kDefaultTol);

}  // namespace qmstree

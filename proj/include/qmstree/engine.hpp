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

#include <map>
#include <optional>
#include <string>

#include "qmstree/transition.hpp"

// Finite-volume evaluation of tree Markov states: the nested level-by-level
// contraction, the certificate-gated localized fast path, marginals, and
// subtree restriction.

namespace qmstree {

/** Default depth horizon for the Pauli contraction path. */
inline constexpr int kDefaultNMax = 6;

/** One finite-volume evaluation result. */
struct FiniteVolumeValue {
  RegionOperator observable;
  cplx value;
  /** Deepest kernel level applied, relative to the handle's root. */
  int volume = 0;
  /** Contraction route taken: "nested" or "localized". */
  std::string path;
  /** True when the localized path was refused (no certificate) and the
      evaluation fell back to the nested contraction. */
  bool fallback = false;
};

/**
 * A state handle: initial state at the root plus one transition
 * expectation per vertex (a homogeneous default with optional per-vertex
 * overrides), evaluated at finite volume. Optionally restricted to a
 * finite connected subtree domain. Immutable; evaluation is pure and safe
 * to run concurrently.
 *
 * The initial state is stored in normalized-trace convention: a
 * single-site operator rho0 with identity coefficient 1, pairing as
 * phi0(a) = normalized_trace(rho0 * a).
 */
class QmsHandle {
 public:
  QmsHandle(VertexWord root, RegionOperator initial_state, TransitionExpectation default_kernel,
            int n_max = kDefaultNMax,
            std::map<VertexWord, TransitionExpectation> kernel_overrides = {},
            std::optional<Region> domain = std::nullopt);

  const VertexWord& root() const { return root_; }
  /** Successor count k of every fork. */
  int branching() const { return default_kernel_.branching(); }
  int n_max() const { return n_max_; }
  const RegionOperator& initial_state() const { return initial_state_; }
  const TransitionExpectation& default_kernel() const { return default_kernel_; }
  const std::map<VertexWord, TransitionExpectation>& kernel_overrides() const {
    return kernel_overrides_;
  }
  /** Finite vertex set of a restricted handle; empty for the full tree. */
  const std::optional<Region>& domain() const { return domain_; }

  /** True when every kernel in the family is identity preserving. */
  bool certified() const { return certified_; }

  /** The kernel acting at x (override if present, else relabeled default). */
  TransitionExpectation kernel_at(const VertexWord& x) const;

  /** Vertices at the given level relative to the root (domain-restricted). */
  std::vector<VertexWord> level_vertices(int level) const;

  /**
   * Level-by-level nested contraction at the given volume (default: the
   * support depth of `a`). Exact for any kernel family; cost grows with
   * the full tree to that depth.
   */
  FiniteVolumeValue evaluate_nested(const RegionOperator& a, int volume = -1) const;

  /**
   * Closure contraction touching only the support of `a` and its
   * ancestors; linear in depth. Requires every kernel identity preserving
   * (off-support forks collapse only then); without the certificate it
   * falls back to the nested path and sets the fallback flag.
   */
  FiniteVolumeValue evaluate_localized(const RegionOperator& a) const;

  /** The localized path when certified, else the nested fallback. */
  FiniteVolumeValue evaluate(const RegionOperator& a) const;

  /** Marginal of the state at one site, in normalized-trace convention. */
  RegionOperator site_marginal(const VertexWord& x) const;

  /**
   * Marginal of the state on a region: coefficients of every Pauli basis
   * string, swept with one reusable contraction plan. Gated by
   * budget.max_matrix_sites (the result is destined for densification).
   */
  RegionOperator marginal_operator(const Region& region, const DenseBudget& budget = {}) const;

  /**
   * The sub-state handle on a connected finite subtree: root at the
   * subtree's root, initial state = the marginal there, same kernel
   * family, domain recorded. Boundary forks keep their full successor
   * sets; missing successors pad with identity.
   */
  QmsHandle restrict_to_subtree(const Region& subtree) const;

  /** The sub-state handle on the full future (unbounded subtree) of x. */
  QmsHandle restrict_to_future(const VertexWord& x) const;

 private:
  bool in_domain(const VertexWord& v) const;
  /** True when v sits below the root with branch digits <= branching(). */
  bool in_tree(const VertexWord& v) const;

  VertexWord root_;
  RegionOperator initial_state_;
  TransitionExpectation default_kernel_;
  int n_max_;
  std::map<VertexWord, TransitionExpectation> kernel_overrides_;
  std::optional<Region> domain_;
  bool certified_;
};

}  // namespace qmstree

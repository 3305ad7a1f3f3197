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

#include <array>
#include <memory>
#include <vector>

#include "qmstree/pauli.hpp"

// Transition expectations in amplitude-sandwich form and the
// quasi-conditional expectations they lift to.

namespace qmstree {

/**
 * The map a -> Tr_{x]}(w^{1/2} K* a K w^{1/2}) from the fork algebra on
 * {x} u S(x) into the single-site algebra at x. K is the amplitude on the
 * fork, w the weight at x; Tr_{x]} is the normalized partial trace onto x.
 *
 * The action is precomputed as a transfer table: row `code` holds the four
 * target-letter coefficients of the image of the fork basis string with
 * base-4 digits `code` (source position 0, the vertex x itself, is the most
 * significant digit). Instances are immutable and safe to share across
 * threads; relabeled copies share the table.
 */
class TransitionExpectation {
 public:
  /**
   * Validated constructor: requires w Hermitian positive semidefinite and
   * the map identity preserving within tol; a violation throws SpecError
   * carrying the offending eigenvalue or residual.
   */
  static TransitionExpectation from_amplitude(const RegionOperator& amplitude,
                                              const RegionOperator& weight,
                                              double tol = kDefaultTol);

  /**
   * Unvalidated constructor for experiments: w may be any Hermitian
   * operator and identity preservation is measured, not enforced. When w
   * has a negative eigenvalue the sandwich has no principal square root
   * and the action is the symmetrized product (w*T(a) + T(a)*w)/2 with
   * T(a) = Tr_{x]}(K* a K); for positive w it is the usual sandwich.
   */
  static TransitionExpectation raw(const RegionOperator& amplitude, const RegionOperator& weight);

  const VertexWord& target() const { return target_; }
  /** {x} u S(x) in canonical order; position 0 is x. */
  const Region& source() const { return source_; }
  /** Successor count k of the fork. */
  int branching() const { return static_cast<int>(source_.size()) - 1; }
  const RegionOperator& amplitude() const { return amplitude_; }
  const RegionOperator& weight() const { return weight_; }

  /** Max coefficient deviation of E(id) from id. */
  double identity_residual() const { return identity_residual_; }
  /** True when identity preservation holds within the construction tolerance. */
  bool identity_certified() const { return certified_; }

  /** Target-letter coefficients of the image of fork basis string `code`. */
  const std::array<cplx, 4>& target_coefficients(std::size_t code) const {
    return (*table_)[code];
  }

  /** Base-4 table code of a string supported inside the source region. */
  std::size_t pack_code(const PauliString& s) const;

  /** Applies the map; `a` must be supported inside the source region. */
  RegionOperator apply(const RegionOperator& a) const;

  /** Copy acting at another vertex with the same branching; shares the table. */
  TransitionExpectation relabeled(const VertexWord& new_target) const;

  struct CpReport {
    bool is_cp;
    double min_eigenvalue;
  };

  /** Complete positivity via the dense Choi operator (PSD within 1e-9). */
  CpReport check_cp(const DenseBudget& budget = {}) const;

 private:
  TransitionExpectation() = default;

  static TransitionExpectation build(const RegionOperator& amplitude, const RegionOperator& weight,
                                     bool symmetrized, double certify_tol);

  VertexWord target_;
  Region source_;
  RegionOperator amplitude_;
  RegionOperator weight_;
  bool symmetrized_ = false;
  double identity_residual_ = 0.0;
  bool certified_ = false;
  std::shared_ptr<const std::vector<std::array<cplx, 4>>> table_;
};

/**
 * A transition expectation lifted over a pass-through region P disjoint
 * from its fork: identity on the P factors, the kernel on the fork. This
 * is the quasi-conditional expectation for the triplet
 * A_P c A_{P u {x}} c A_{P u {x} u S(x)}.
 */
class QuasiConditionalExpectation {
 public:
  QuasiConditionalExpectation(TransitionExpectation kernel, Region pass);

  const TransitionExpectation& kernel() const { return kernel_; }
  /** The triplet's C-region P. */
  const Region& pass_region() const { return pass_; }
  /** The triplet's B-region P u {x}. */
  const Region& range_region() const { return range_; }
  /** The triplet's A-region P u {x} u S(x). */
  const Region& domain_region() const { return domain_; }

  /**
   * Applies the map. Factors on the fork go through the kernel, factors on
   * P pass through unchanged; `a` must be supported inside the A-region.
   */
  RegionOperator apply(const RegionOperator& a) const;

 private:
  TransitionExpectation kernel_;
  Region pass_;
  Region range_;
  Region domain_;
};

/** Lifts `kernel` over the pass-through region P (must avoid the fork). */
QuasiConditionalExpectation lift(const TransitionExpectation& kernel, const Region& pass);

/**
 * The tensor product of the transition expectations of one level: maps the
 * union of the forks onto the union of the targets, acting factorwise.
 */
class LevelMap {
 public:
  /** Kernels must have pairwise disjoint forks; they are sorted by target. */
  explicit LevelMap(std::vector<TransitionExpectation> kernels);

  const std::vector<TransitionExpectation>& kernels() const { return kernels_; }
  /** Union of the fork regions. */
  const Region& source() const { return source_; }
  /** Union of the target vertices. */
  const Region& targets() const { return targets_; }

  /**
   * Applies the product map; `a` must be supported inside source(). The
   * factorwise expansion aborts with BudgetExceeded when one input term
   * would expand past budget.max_product_terms.
   */
  RegionOperator apply(const RegionOperator& a, const DenseBudget& budget = {}) const;

 private:
  std::vector<TransitionExpectation> kernels_;
  Region source_;
  Region targets_;
};

}  // namespace qmstree

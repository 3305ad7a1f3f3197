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

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qmstree/common.hpp"
#include "qmstree/tree.hpp"

namespace qmstree {

/** Single-site Pauli letters. The value doubles as the table index. */
enum class Letter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char letter_char(Letter l);
Letter letter_parse(char c);

struct LetterProduct {
  Letter letter;
  cplx phase;  // one of 1, i, -1, -i
};

/** Product of two Pauli letters: a*b = phase * letter. */
LetterProduct letter_product(Letter a, Letter b);

/**
 * A finite product of single-site Pauli letters with unit coefficient.
 * Stored as the sorted list of non-identity factors; two strings are equal
 * iff these lists coincide, so the default comparisons are canonical.
 */
class PauliString {
 public:
  PauliString() = default;  // the identity string
  explicit PauliString(std::vector<std::pair<VertexWord, Letter>> factors);

  static PauliString single(const VertexWord& v, Letter l);

  const std::vector<std::pair<VertexWord, Letter>>& factors() const { return factors_; }
  Letter at(const VertexWord& v) const;
  Region support() const;
  bool is_identity() const { return factors_.empty(); }
  /** True when every letter is Z (the commuting diagonal subalgebra). */
  bool diagonal() const;
  std::string str() const;

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.factors_ == b.factors_;
  }
  friend std::strong_ordering operator<=>(const PauliString& a, const PauliString& b) {
    return a.factors_ <=> b.factors_;
  }

 private:
  std::vector<std::pair<VertexWord, Letter>> factors_;
};

struct StringProduct {
  PauliString string;
  cplx phase;
};

/** Sitewise product a*b with the accumulated phase. */
StringProduct string_product(const PauliString& a, const PauliString& b);

/** Relabel every site v to by.v (the algebra shift into the subtree at `by`). */
PauliString shift_string(const VertexWord& by, const PauliString& s);

/**
 * A finite linear combination of Pauli strings attached to a region.
 * Invariants: every string's support lies in the region; coefficients are
 * nonzero (zero terms are pruned). Term order is canonical, so iteration
 * and serialization are deterministic. Instances are immutable after
 * construction and safe for concurrent reads.
 */
class RegionOperator {
 public:
  RegionOperator() = default;  // the zero operator on the empty region
  RegionOperator(Region region, std::map<PauliString, cplx> terms);

  static RegionOperator zero(Region region);
  static RegionOperator identity(Region region);
  static RegionOperator single(Region region, const PauliString& s, cplx coeff);

  const Region& region() const { return region_; }
  const std::map<PauliString, cplx>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  cplx coefficient(const PauliString& s) const;
  bool diagonal() const;
  std::string str() const;

 private:
  Region region_;
  std::map<PauliString, cplx> terms_;
};

/** a*b on the union region. */
RegionOperator multiply(const RegionOperator& a, const RegionOperator& b);

/** a+b on the union region. */
RegionOperator add(const RegionOperator& a, const RegionOperator& b);

RegionOperator subtract(const RegionOperator& a, const RegionOperator& b);
RegionOperator scale(cplx c, const RegionOperator& a);
RegionOperator adjoint(const RegionOperator& a);

/**
 * The normalized trace (Tr(id) = 1): the coefficient of the identity
 * string.
 */
cplx normalized_trace(const RegionOperator& a);

/**
 * Normalized partial trace onto `keep` (a subset of the region): terms
 * carrying a non-identity letter on a traced site vanish; the rest pass
 * through unchanged.
 */
RegionOperator partial_trace(const RegionOperator& a, const Region& keep);

/** Identity-pad a onto the larger region `into`. */
RegionOperator embed(const RegionOperator& a, const Region& into);

/** Relabel sites v -> by.v and re-root the region (the algebra shift). */
RegionOperator shift_operator(const VertexWord& by, const RegionOperator& a);

/**
 * Rewrites `a` onto an equally sized region `to` by position: the vertex
 * at position p of a.region() maps to the vertex at position p of `to`.
 */
RegionOperator remap_operator(const RegionOperator& a, const Region& to);

/** max over strings of |coeff_a - coeff_b| (coefficient sup distance). */
double coeff_distance(const RegionOperator& a, const RegionOperator& b);

bool approx_equal(const RegionOperator& a, const RegionOperator& b, double tol);

}  // namespace qmstree

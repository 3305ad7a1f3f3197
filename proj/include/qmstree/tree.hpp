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

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace qmstree {

/**
 * A vertex of the rooted order-k tree, addressed by its branch word: the
 * root is the empty word, and (x, j) is the j-th direct successor of x
 * (1-based). Text form: "o" for the root, "1.2.1" otherwise.
 *
 * Canonical vertex order is level-major, then lexicographic on branch
 * indices. All Region and operator orderings derive from it.
 */
class VertexWord {
 public:
  VertexWord() = default;
  explicit VertexWord(std::vector<std::uint32_t> branches);

  static VertexWord root() { return VertexWord(); }
  static VertexWord parse(const std::string& text);
  std::string str() const;

  int level() const { return static_cast<int>(branches_.size()); }
  bool is_root() const { return branches_.empty(); }
  const std::vector<std::uint32_t>& branches() const { return branches_; }

  VertexWord parent() const;
  VertexWord child(std::uint32_t j) const;
  /** Concatenation x.y: the copy of y inside the subtree rooted at x. */
  VertexWord concat(const VertexWord& suffix) const;
  bool is_prefix_of(const VertexWord& other) const;

  friend bool operator==(const VertexWord& a, const VertexWord& b) {
    return a.branches_ == b.branches_;
  }
  friend std::strong_ordering operator<=>(const VertexWord& a, const VertexWord& b) {
    if (auto c = a.branches_.size() <=> b.branches_.size(); c != 0) return c;
    return a.branches_ <=> b.branches_;
  }

 private:
  std::vector<std::uint32_t> branches_;
};

/**
 * A finite set of vertices in canonical order with no duplicates.
 * Construction sorts and deduplicates.
 */
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<VertexWord> vertices);

  const std::vector<VertexWord>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  bool contains(const VertexWord& v) const;
  bool subset_of(const Region& other) const;
  /** Position of v in canonical order; -1 if absent. */
  int index_of(const VertexWord& v) const;
  /** Maximum level over the region's vertices (-1 for the empty region). */
  int depth() const;

  static Region join(const Region& a, const Region& b);

  friend bool operator==(const Region& a, const Region& b) {
    return a.vertices_ == b.vertices_;
  }

 private:
  std::vector<VertexWord> vertices_;
};

/** The ordered direct successors ((x,1), ..., (x,k)) of x. */
std::vector<VertexWord> direct_successors(const VertexWord& x, int k);

/** The strict past of x: the path from the root to x's parent, root first. */
std::vector<VertexWord> predecessors(const VertexWord& x);

/** The n-th level of the order-k tree (k^n vertices). */
Region level_set(int n, int k);

/** Levels n0..n1 inclusive. */
Region level_range(int n0, int n1, int k);

/** Levels rooted below `base`: base itself at j=0, then its j-th descendants. */
Region subtree_level_set(const VertexWord& base, int j, int k);
Region subtree_level_range(const VertexWord& base, int j0, int j1, int k);

/** The tree shift: the copy of x inside the subtree rooted at `by`. */
VertexWord shift_vertex(const VertexWord& by, const VertexWord& x);

/**
 * The root of a finite connected subtree: its unique minimal-level vertex.
 * Throws std::invalid_argument if the set is empty, has more than one
 * minimal-level vertex, or some non-root member's parent is missing
 * (i.e. the set is not a connected subtree).
 */
VertexWord subtree_root(const Region& vertices);

}  // namespace qmstree

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

#include "qmstree/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace qmstree {

VertexWord::VertexWord(std::vector<std::uint32_t> branches) : branches_(std::move(branches)) {
  for (auto b : branches_) {
    if (b < 1) throw std::invalid_argument("branch indices are 1-based");
  }
}

VertexWord VertexWord::parse(const std::string& text) {
  if (text == "o") return VertexWord();
  if (text.empty()) throw std::invalid_argument("empty vertex text");
  std::vector<std::uint32_t> branches;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t dot = text.find('.', pos);
    std::string part = text.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("bad vertex text: '" + text + "'");
    }
    unsigned long v = std::stoul(part);
    if (v < 1) throw std::invalid_argument("branch indices are 1-based: '" + text + "'");
    branches.push_back(static_cast<std::uint32_t>(v));
    if (dot == std::string::npos) break;
    pos = dot + 1;
    if (pos == text.size()) throw std::invalid_argument("trailing dot in vertex text: '" + text + "'");
  }
  return VertexWord(std::move(branches));
}

std::string VertexWord::str() const {
  if (branches_.empty()) return "o";
  std::string out;
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(branches_[i]);
  }
  return out;
}

VertexWord VertexWord::parent() const {
  if (is_root()) throw std::invalid_argument("the root has no parent");
  auto b = branches_;
  b.pop_back();
  return VertexWord(std::move(b));
}

VertexWord VertexWord::child(std::uint32_t j) const {
  if (j < 1) throw std::invalid_argument("branch indices are 1-based");
  auto b = branches_;
  b.push_back(j);
  return VertexWord(std::move(b));
}

VertexWord VertexWord::concat(const VertexWord& suffix) const {
  auto b = branches_;
  b.insert(b.end(), suffix.branches_.begin(), suffix.branches_.end());
  return VertexWord(std::move(b));
}

bool VertexWord::is_prefix_of(const VertexWord& other) const {
  if (branches_.size() > other.branches_.size()) return false;
  return std::equal(branches_.begin(), branches_.end(), other.branches_.begin());
}

Region::Region(std::vector<VertexWord> vertices) : vertices_(std::move(vertices)) {
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
}

bool Region::contains(const VertexWord& v) const {
  return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

int Region::index_of(const VertexWord& v) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end() || !(*it == v)) return -1;
  return static_cast<int>(it - vertices_.begin());
}

bool Region::subset_of(const Region& other) const {
  return std::includes(other.vertices_.begin(), other.vertices_.end(), vertices_.begin(),
                       vertices_.end());
}

int Region::depth() const {
  // canonical order is level-major, so the last vertex is deepest
  return vertices_.empty() ? -1 : vertices_.back().level();
}

Region Region::join(const Region& a, const Region& b) {
  std::vector<VertexWord> out;
  out.reserve(a.size() + b.size());
  std::merge(a.vertices_.begin(), a.vertices_.end(), b.vertices_.begin(), b.vertices_.end(),
             std::back_inserter(out));
  return Region(std::move(out));
}

std::vector<VertexWord> direct_successors(const VertexWord& x, int k) {
  if (k < 1) throw std::invalid_argument("tree order k must be >= 1");
  std::vector<VertexWord> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) out.push_back(x.child(static_cast<std::uint32_t>(j)));
  return out;
}

std::vector<VertexWord> predecessors(const VertexWord& x) {
  std::vector<VertexWord> out;
  out.reserve(static_cast<std::size_t>(x.level()));
  std::vector<std::uint32_t> prefix;
  for (int i = 0; i < x.level(); ++i) {
    out.push_back(VertexWord(prefix));
    prefix.push_back(x.branches()[static_cast<std::size_t>(i)]);
  }
  return out;
}

Region subtree_level_set(const VertexWord& base, int j, int k) {
  if (j < 0) throw std::invalid_argument("level must be >= 0");
  std::vector<VertexWord> cur{base};
  for (int d = 0; d < j; ++d) {
    std::vector<VertexWord> next;
    next.reserve(cur.size() * static_cast<std::size_t>(k));
    for (const auto& v : cur) {
      for (auto& c : direct_successors(v, k)) next.push_back(std::move(c));
    }
    cur = std::move(next);
  }
  return Region(std::move(cur));
}

Region subtree_level_range(const VertexWord& base, int j0, int j1, int k) {
  if (j0 < 0 || j1 < j0) throw std::invalid_argument("bad level range");
  Region out;
  for (int j = j0; j <= j1; ++j) out = Region::join(out, subtree_level_set(base, j, k));
  return out;
}

Region level_set(int n, int k) { return subtree_level_set(VertexWord::root(), n, k); }

Region level_range(int n0, int n1, int k) {
  return subtree_level_range(VertexWord::root(), n0, n1, k);
}

VertexWord shift_vertex(const VertexWord& by, const VertexWord& x) { return by.concat(x); }

VertexWord subtree_root(const Region& vertices) {
  if (vertices.empty()) throw std::invalid_argument("empty vertex set has no root");
  // canonical order is level-major: front is a minimal-level vertex
  const VertexWord& root = vertices.vertices().front();
  int min_level = root.level();
  for (const auto& v : vertices.vertices()) {
    if (v.level() == min_level && !(v == root)) {
      throw std::invalid_argument("not a connected subtree: two minimal-level vertices '" +
                                  root.str() + "' and '" + v.str() + "'");
    }
    if (v.level() > min_level && !vertices.contains(v.parent())) {
      throw std::invalid_argument("not a connected subtree: parent of '" + v.str() +
                                  "' is missing");
    }
    if (!(v == root) && !root.is_prefix_of(v)) {
      throw std::invalid_argument("not a connected subtree: '" + v.str() +
                                  "' is outside the subtree of '" + root.str() + "'");
    }
  }
  return root;
}

}  // namespace qmstree

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

#include "qmstree/engine.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "qmstree/dense.hpp"

namespace qmstree {

namespace {

struct PlanNode {
  VertexWord vertex;
  TransitionExpectation kernel;
  std::vector<std::pair<int, int>> children;  // (node index, digit slot 1..k)
};

// A reusable contraction over a fixed vertex set: nodes sorted deepest
// first, so every child is contracted before its parent; the root is last.
struct Plan {
  std::vector<PlanNode> nodes;
  std::array<cplx, 4> initial;  // initial-state coefficients at the root

  cplx contract(const PauliString& s) const {
    std::vector<std::array<cplx, 4>> values(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const PlanNode& node = nodes[i];
      const int k = node.kernel.branching();
      const std::size_t base = static_cast<std::size_t>(s.at(node.vertex)) << (2 * k);
      std::array<cplx, 4> out{};
      const auto expand = [&](const auto& self, std::size_t ci, std::size_t code, cplx w) -> void {
        if (ci == node.children.size()) {
          const std::array<cplx, 4>& row = node.kernel.target_coefficients(code);
          for (int m = 0; m < 4; ++m) out[static_cast<std::size_t>(m)] += w * row[static_cast<std::size_t>(m)];
          return;
        }
        const auto [child_index, slot] = node.children[ci];
        for (int l = 0; l < 4; ++l) {
          const cplx wl = values[static_cast<std::size_t>(child_index)][static_cast<std::size_t>(l)];
          if (wl == cplx(0, 0)) continue;
          self(self, ci + 1, code | (static_cast<std::size_t>(l) << (2 * (k - slot))), w * wl);
        }
      };
      expand(expand, 0, base, cplx(1, 0));
      values[i] = out;
    }
    const std::array<cplx, 4>& at_root = values.back();
    cplx result(0, 0);
    for (int l = 0; l < 4; ++l) {
      result += initial[static_cast<std::size_t>(l)] * at_root[static_cast<std::size_t>(l)];
    }
    return result;
  }

  cplx contract_all(const RegionOperator& a) const {
    cplx acc(0, 0);
    for (const auto& [s, c] : a.terms()) acc += c * contract(s);
    return acc;
  }
};

bool digits_within(const VertexWord& v, int from_level, std::uint32_t k) {
  for (std::size_t i = static_cast<std::size_t>(from_level); i < v.branches().size(); ++i) {
    if (v.branches()[i] > k) return false;
  }
  return true;
}

Plan make_plan(const QmsHandle& h, const std::set<VertexWord>& vertex_set) {
  Plan plan;
  std::vector<VertexWord> order(vertex_set.begin(), vertex_set.end());
  std::sort(order.begin(), order.end(), [](const VertexWord& a, const VertexWord& b) {
    if (a.level() != b.level()) return a.level() > b.level();
    return a < b;
  });
  std::map<VertexWord, int> index;
  plan.nodes.reserve(order.size());
  for (const VertexWord& v : order) {
    index.emplace(v, static_cast<int>(plan.nodes.size()));
    plan.nodes.push_back(PlanNode{v, h.kernel_at(v), {}});
  }
  for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
    const VertexWord& v = plan.nodes[i].vertex;
    if (v == h.root()) continue;
    const auto parent_it = index.find(v.parent());
    if (parent_it == index.end()) {
      throw std::logic_error("contraction plan is missing the parent of " + v.str());
    }
    const int slot = static_cast<int>(v.branches().back());
    plan.nodes[static_cast<std::size_t>(parent_it->second)].children.emplace_back(
        static_cast<int>(i), slot);
  }
  plan.initial[0] = h.initial_state().coefficient(PauliString());
  for (int l = 1; l < 4; ++l) {
    plan.initial[static_cast<std::size_t>(l)] =
        h.initial_state().coefficient(PauliString::single(h.root(), static_cast<Letter>(l)));
  }
  return plan;
}

}  // namespace

QmsHandle::QmsHandle(VertexWord root, RegionOperator initial_state,
                     TransitionExpectation default_kernel, int n_max,
                     std::map<VertexWord, TransitionExpectation> kernel_overrides,
                     std::optional<Region> domain)
    : root_(std::move(root)),
      initial_state_(std::move(initial_state)),
      default_kernel_(std::move(default_kernel)),
      n_max_(n_max),
      kernel_overrides_(std::move(kernel_overrides)),
      domain_(std::move(domain)) {
  if (n_max_ < 0) throw SpecError("depth horizon must be nonnegative");
  if (!digits_within(root_, 0, static_cast<std::uint32_t>(branching()))) {
    throw SpecError("root vertex " + root_.str() + " lies outside an order-" +
                    std::to_string(branching()) + " tree");
  }
  if (initial_state_.region() != Region({root_})) {
    throw SpecError("initial state must live on the root site");
  }
  if (coeff_distance(initial_state_, adjoint(initial_state_)) > kDefaultTol) {
    throw SpecError("initial state is not Hermitian");
  }
  if (std::abs(initial_state_.coefficient(PauliString()) - cplx(1, 0)) > kDefaultTol) {
    throw SpecError("initial state does not have normalized trace 1");
  }
  const double rho_min = min_eigenvalue(to_dense(initial_state_));
  if (rho_min < -kDefaultTol) {
    std::ostringstream msg;
    msg << "initial state is not positive semidefinite: eigenvalue " << rho_min;
    throw SpecError(msg.str());
  }
  if (domain_) {
    if (subtree_root(*domain_) != root_) {
      throw SpecError("domain must be a connected subtree rooted at the handle's root");
    }
  }
  certified_ = default_kernel_.identity_certified();
  for (const auto& [x, kernel] : kernel_overrides_) {
    if (!root_.is_prefix_of(x) ||
        !digits_within(x, root_.level(), static_cast<std::uint32_t>(branching()))) {
      throw SpecError("kernel override at " + x.str() + " lies outside the root's subtree");
    }
    if (!in_domain(x)) {
      throw SpecError("kernel override at " + x.str() + " lies outside the domain");
    }
    if (kernel.target() != x) {
      throw SpecError("kernel override at " + x.str() + " targets " + kernel.target().str());
    }
    if (kernel.branching() != default_kernel_.branching()) {
      throw SpecError("kernel override at " + x.str() + " has a different branching");
    }
    certified_ = certified_ && kernel.identity_certified();
  }
}

bool QmsHandle::in_domain(const VertexWord& v) const {
  return !domain_ || domain_->contains(v);
}

bool QmsHandle::in_tree(const VertexWord& v) const {
  return root_.is_prefix_of(v) &&
         digits_within(v, root_.level(), static_cast<std::uint32_t>(branching())) &&
         in_domain(v);
}

TransitionExpectation QmsHandle::kernel_at(const VertexWord& x) const {
  if (!root_.is_prefix_of(x) ||
      !digits_within(x, root_.level(), static_cast<std::uint32_t>(branching()))) {
    throw std::invalid_argument("vertex " + x.str() + " lies outside the root's subtree");
  }
  if (const auto it = kernel_overrides_.find(x); it != kernel_overrides_.end()) {
    return it->second;
  }
  if (x == default_kernel_.target()) return default_kernel_;
  return default_kernel_.relabeled(x);
}

std::vector<VertexWord> QmsHandle::level_vertices(int level) const {
  const Region full = subtree_level_set(root_, level, branching());
  if (!domain_) return full.vertices();
  std::vector<VertexWord> kept;
  for (const auto& v : full.vertices()) {
    if (domain_->contains(v)) kept.push_back(v);
  }
  return kept;
}

namespace {

int relative_depth(const Region& support, const VertexWord& root) {
  if (support.size() == 0) return 0;
  return support.depth() - root.level();
}

}  // namespace

FiniteVolumeValue QmsHandle::evaluate_nested(const RegionOperator& a, int volume) const {
  for (const auto& v : a.region().vertices()) {
    if (!in_tree(v)) {
      throw SpecError("observable site " + v.str() + " lies outside the handle's tree");
    }
  }
  const int depth = relative_depth(a.region(), root_);
  if (volume < 0) volume = depth;
  if (volume < depth) {
    throw SpecError("volume is smaller than the observable's depth");
  }
  if (volume > n_max_) {
    std::ostringstream msg;
    msg << "volume " << volume << " exceeds the depth horizon " << n_max_;
    throw SpecError(msg.str());
  }
  std::set<VertexWord> vertex_set;
  for (int l = 0; l <= volume; ++l) {
    for (auto& v : level_vertices(l)) vertex_set.insert(std::move(v));
  }
  const Plan plan = make_plan(*this, vertex_set);
  return {a, plan.contract_all(a), volume, "nested", false};
}

FiniteVolumeValue QmsHandle::evaluate_localized(const RegionOperator& a) const {
  if (!certified_) {
    FiniteVolumeValue r = evaluate_nested(a);
    r.fallback = true;
    return r;
  }
  for (const auto& v : a.region().vertices()) {
    if (!in_tree(v)) {
      throw SpecError("observable site " + v.str() + " lies outside the handle's tree");
    }
  }
  const int depth = relative_depth(a.region(), root_);
  if (depth > n_max_) {
    std::ostringstream msg;
    msg << "observable depth " << depth << " exceeds the depth horizon " << n_max_;
    throw SpecError(msg.str());
  }
  std::set<VertexWord> closure;
  closure.insert(root_);
  for (const auto& v : a.region().vertices()) {
    VertexWord walk = v;
    while (walk != root_) {
      closure.insert(walk);
      walk = walk.parent();
    }
  }
  const Plan plan = make_plan(*this, closure);
  return {a, plan.contract_all(a), depth, "localized", false};
}

FiniteVolumeValue QmsHandle::evaluate(const RegionOperator& a) const {
  return evaluate_localized(a);
}

RegionOperator QmsHandle::site_marginal(const VertexWord& x) const {
  std::map<PauliString, cplx> terms;
  terms.emplace(PauliString(),
                evaluate(RegionOperator::identity(Region({x}))).value);
  for (int l = 1; l < 4; ++l) {
    const PauliString s = PauliString::single(x, static_cast<Letter>(l));
    terms.emplace(s, evaluate(RegionOperator(Region({x}), {{s, cplx(1, 0)}})).value);
  }
  return RegionOperator(Region({x}), std::move(terms));
}

RegionOperator QmsHandle::marginal_operator(const Region& region, const DenseBudget& budget) const {
  for (const auto& v : region.vertices()) {
    if (!in_tree(v)) {
      throw SpecError("marginal site " + v.str() + " lies outside the handle's tree");
    }
  }
  const int nsites = static_cast<int>(region.size());
  if (nsites > budget.max_matrix_sites) {
    std::ostringstream msg;
    msg << "marginal on " << nsites << " sites exceeds the budget of " << budget.max_matrix_sites;
    throw BudgetExceeded(msg.str());
  }
  std::set<VertexWord> vertex_set;
  if (certified_) {
    vertex_set.insert(root_);
    for (const auto& v : region.vertices()) {
      VertexWord walk = v;
      while (walk != root_) {
        vertex_set.insert(walk);
        walk = walk.parent();
      }
    }
  } else {
    const int depth = relative_depth(region, root_);
    for (int l = 0; l <= depth; ++l) {
      for (auto& v : level_vertices(l)) vertex_set.insert(std::move(v));
    }
  }
  const Plan plan = make_plan(*this, vertex_set);

  const std::int64_t nstrings = std::int64_t{1} << (2 * nsites);
  const auto string_at = [&](std::int64_t code) {
    std::vector<std::pair<VertexWord, Letter>> factors;
    for (int p = 0; p < nsites; ++p) {
      const auto letter =
          static_cast<Letter>((code >> (2 * (nsites - 1 - p))) & 3);
      if (letter != Letter::I) {
        factors.emplace_back(region.vertices()[static_cast<std::size_t>(p)], letter);
      }
    }
    return PauliString(std::move(factors));
  };
  std::vector<cplx> coeffs;
  kernels::collect_scan(
      nstrings, [&](std::int64_t code) { return plan.contract(string_at(code)); }, coeffs);
  std::map<PauliString, cplx> terms;
  for (std::int64_t code = 0; code < nstrings; ++code) {
    const cplx c = coeffs[static_cast<std::size_t>(code)];
    if (c != cplx(0, 0)) terms.emplace(string_at(code), c);
  }
  return RegionOperator(region, std::move(terms));
}

QmsHandle QmsHandle::restrict_to_subtree(const Region& subtree) const {
  const VertexWord new_root = subtree_root(subtree);
  for (const auto& v : subtree.vertices()) {
    if (!in_tree(v)) {
      throw SpecError("subtree site " + v.str() + " lies outside the handle's tree");
    }
  }
  std::map<VertexWord, TransitionExpectation> kept;
  for (const auto& [x, kernel] : kernel_overrides_) {
    if (subtree.contains(x)) kept.emplace(x, kernel);
  }
  return QmsHandle(new_root, site_marginal(new_root), default_kernel_, n_max_, std::move(kept),
                   subtree);
}

QmsHandle QmsHandle::restrict_to_future(const VertexWord& x) const {
  if (!in_tree(x)) {
    throw SpecError("vertex " + x.str() + " lies outside the handle's tree");
  }
  std::map<VertexWord, TransitionExpectation> kept;
  for (const auto& [v, kernel] : kernel_overrides_) {
    if (x.is_prefix_of(v)) kept.emplace(v, kernel);
  }
  std::optional<Region> new_domain;
  if (domain_) {
    std::vector<VertexWord> vs;
    for (const auto& v : domain_->vertices()) {
      if (x.is_prefix_of(v)) vs.push_back(v);
    }
    new_domain = Region(std::move(vs));
  }
  return QmsHandle(x, site_marginal(x), default_kernel_, n_max_, std::move(kept),
                   std::move(new_domain));
}

}  // namespace qmstree

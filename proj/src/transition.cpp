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

#include "qmstree/transition.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "qmstree/dense.hpp"

namespace qmstree {

namespace {

// The fork must be a vertex plus exactly its direct successors.
VertexWord fork_target(const Region& source) {
  const VertexWord x = subtree_root(source);
  const int k = static_cast<int>(source.size()) - 1;
  if (k < 1) throw std::invalid_argument("amplitude region has no successor sites");
  for (int j = 1; j <= k; ++j) {
    if (!source.contains(x.child(static_cast<std::uint32_t>(j)))) {
      std::ostringstream msg;
      msg << "amplitude region on " << x.str() << " is missing successor " << j;
      throw std::invalid_argument(msg.str());
    }
  }
  return x;
}

PauliString code_string(std::size_t code, const Region& source) {
  const std::size_t n = source.size();
  std::vector<std::pair<VertexWord, Letter>> factors;
  for (std::size_t p = 0; p < n; ++p) {
    const auto letter = static_cast<Letter>((code >> (2 * (n - 1 - p))) & 3);
    if (letter != Letter::I) factors.emplace_back(source.vertices()[p], letter);
  }
  return PauliString(std::move(factors));
}

std::array<cplx, 4> target_row(const RegionOperator& on_target, const VertexWord& target) {
  std::array<cplx, 4> row;
  row[0] = on_target.coefficient(PauliString());
  for (int l = 1; l < 4; ++l) {
    row[static_cast<std::size_t>(l)] =
        on_target.coefficient(PauliString::single(target, static_cast<Letter>(l)));
  }
  return row;
}

}  // namespace

TransitionExpectation TransitionExpectation::build(const RegionOperator& amplitude,
                                                   const RegionOperator& weight, bool symmetrized,
                                                   double certify_tol) {
  TransitionExpectation e;
  e.source_ = amplitude.region();
  e.target_ = fork_target(e.source_);
  e.amplitude_ = amplitude;
  e.weight_ = weight;
  e.symmetrized_ = symmetrized;
  if (weight.region() != Region({e.target_})) {
    throw std::invalid_argument("weight must live on the fork's kept vertex");
  }

  const Region target_region({e.target_});
  const RegionOperator kdag = adjoint(amplitude);
  RegionOperator half = RegionOperator::identity(target_region);
  if (!symmetrized) {
    half = dense_to_operator(psd_sqrt(to_dense(weight)), target_region);
  }

  const std::size_t nrows = std::size_t{1} << (2 * e.source_.size());
  std::vector<std::array<cplx, 4>> table(nrows);
  for (std::size_t code = 0; code < nrows; ++code) {
    const RegionOperator probe(e.source_, {{code_string(code, e.source_), cplx(1, 0)}});
    const RegionOperator traced =
        partial_trace(multiply(multiply(kdag, probe), amplitude), target_region);
    const RegionOperator image =
        symmetrized
            ? scale(cplx(0.5, 0), add(multiply(weight, traced), multiply(traced, weight)))
            : multiply(multiply(half, traced), half);
    table[code] = target_row(image, e.target_);
  }

  const std::array<cplx, 4>& at_id = table[0];
  e.identity_residual_ = std::max(std::max(std::abs(at_id[0] - cplx(1, 0)), std::abs(at_id[1])),
                                  std::max(std::abs(at_id[2]), std::abs(at_id[3])));
  e.certified_ = e.identity_residual_ <= certify_tol;
  e.table_ = std::make_shared<const std::vector<std::array<cplx, 4>>>(std::move(table));
  return e;
}

TransitionExpectation TransitionExpectation::from_amplitude(const RegionOperator& amplitude,
                                                            const RegionOperator& weight,
                                                            double tol) {
  if (coeff_distance(weight, adjoint(weight)) > tol) {
    throw SpecError("weight is not Hermitian");
  }
  const double weight_min = min_eigenvalue(to_dense(weight));
  if (weight_min < -tol) {
    std::ostringstream msg;
    msg << "weight is not positive semidefinite: eigenvalue " << weight_min;
    throw SpecError(msg.str());
  }
  TransitionExpectation e = build(amplitude, weight, /*symmetrized=*/false, tol);
  if (!e.identity_certified()) {
    std::ostringstream msg;
    msg << "transition expectation is not identity preserving: residual " << e.identity_residual()
        << " exceeds " << tol;
    throw SpecError(msg.str());
  }
  return e;
}

TransitionExpectation TransitionExpectation::raw(const RegionOperator& amplitude,
                                                 const RegionOperator& weight) {
  if (coeff_distance(weight, adjoint(weight)) > kDefaultTol) {
    throw SpecError("weight is not Hermitian");
  }
  const bool symmetrized = min_eigenvalue(to_dense(weight)) < -kDefaultTol;
  return build(amplitude, weight, symmetrized, kDefaultTol);
}

std::size_t TransitionExpectation::pack_code(const PauliString& s) const {
  const std::size_t n = source_.size();
  std::size_t code = 0;
  for (const auto& [vertex, letter] : s.factors()) {
    const int pos = source_.index_of(vertex);
    if (pos < 0) throw std::invalid_argument("string leaves the fork region");
    code |= static_cast<std::size_t>(letter) << (2 * (n - 1 - static_cast<std::size_t>(pos)));
  }
  return code;
}

RegionOperator TransitionExpectation::apply(const RegionOperator& a) const {
  if (!a.region().subset_of(source_)) {
    throw std::invalid_argument("operator leaves the fork region");
  }
  std::array<cplx, 4> acc{};
  for (const auto& [s, c] : a.terms()) {
    const std::array<cplx, 4>& row = target_coefficients(pack_code(s));
    for (int l = 0; l < 4; ++l) acc[static_cast<std::size_t>(l)] += c * row[static_cast<std::size_t>(l)];
  }
  const Region target_region({target_});
  std::map<PauliString, cplx> out;
  out.emplace(PauliString(), acc[0]);
  for (int l = 1; l < 4; ++l) {
    out.emplace(PauliString::single(target_, static_cast<Letter>(l)),
                acc[static_cast<std::size_t>(l)]);
  }
  return RegionOperator(target_region, std::move(out));
}

TransitionExpectation TransitionExpectation::relabeled(const VertexWord& new_target) const {
  std::vector<VertexWord> vs;
  vs.push_back(new_target);
  for (int j = 1; j <= branching(); ++j) vs.push_back(new_target.child(static_cast<std::uint32_t>(j)));
  const Region new_source(std::move(vs));
  TransitionExpectation e;
  e.target_ = new_target;
  e.source_ = new_source;
  e.amplitude_ = remap_operator(amplitude_, new_source);
  e.weight_ = remap_operator(weight_, Region({new_target}));
  e.symmetrized_ = symmetrized_;
  e.identity_residual_ = identity_residual_;
  e.certified_ = certified_;
  e.table_ = table_;
  return e;
}

TransitionExpectation::CpReport TransitionExpectation::check_cp(const DenseBudget& budget) const {
  const int fork_sites = static_cast<int>(source_.size());
  if (fork_sites + 1 > budget.max_matrix_sites) {
    std::ostringstream msg;
    msg << "Choi operator on " << (fork_sites + 1) << " sites exceeds the budget of "
        << budget.max_matrix_sites;
    throw BudgetExceeded(msg.str());
  }
  const DenseMatrix kd = to_dense(amplitude_, budget);
  const DenseMatrix wd = to_dense(weight_, budget);
  const DenseMatrix ws = symmetrized_ ? DenseMatrix() : psd_sqrt(wd);
  const std::int64_t dim = std::int64_t{1} << fork_sites;
  const std::vector<int> keep{0};
  DenseMatrix choi = DenseMatrix::Zero(2 * dim, 2 * dim);
  DenseMatrix traced;
  for (std::int64_t i = 0; i < dim; ++i) {
    for (std::int64_t j = 0; j < dim; ++j) {
      const DenseMatrix m = kd.adjoint().col(i) * kd.row(j);
      kernels::partial_trace(m, fork_sites, keep, traced);
      const DenseMatrix image =
          symmetrized_ ? DenseMatrix(0.5 * (wd * traced + traced * wd)) : DenseMatrix(ws * traced * ws);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) choi(a * dim + i, b * dim + j) = image(a, b);
      }
    }
  }
  const double min_eig = min_eigenvalue(choi);
  return {min_eig >= -kDefaultTol, min_eig};
}

QuasiConditionalExpectation::QuasiConditionalExpectation(TransitionExpectation kernel, Region pass)
    : kernel_(std::move(kernel)), pass_(std::move(pass)) {
  for (const auto& v : kernel_.source().vertices()) {
    if (pass_.contains(v)) {
      throw std::invalid_argument("lift region overlaps the fork at " + v.str());
    }
  }
  range_ = Region::join(pass_, Region({kernel_.target()}));
  domain_ = Region::join(pass_, kernel_.source());
}

RegionOperator QuasiConditionalExpectation::apply(const RegionOperator& a) const {
  if (!a.region().subset_of(domain_)) {
    throw std::invalid_argument("operator leaves the quasi-conditional expectation's domain");
  }
  const Region& fork = kernel_.source();
  const std::size_t nfork = fork.size();
  std::map<PauliString, cplx> out;
  for (const auto& [s, c] : a.terms()) {
    std::size_t code = 0;
    std::vector<std::pair<VertexWord, Letter>> pass_factors;
    for (const auto& [vertex, letter] : s.factors()) {
      const int pos = fork.index_of(vertex);
      if (pos >= 0) {
        code |= static_cast<std::size_t>(letter) << (2 * (nfork - 1 - static_cast<std::size_t>(pos)));
      } else {
        pass_factors.emplace_back(vertex, letter);
      }
    }
    const std::array<cplx, 4>& row = kernel_.target_coefficients(code);
    for (int l = 0; l < 4; ++l) {
      const cplx v = c * row[static_cast<std::size_t>(l)];
      if (v == cplx(0, 0)) continue;
      std::vector<std::pair<VertexWord, Letter>> factors = pass_factors;
      if (l != 0) factors.emplace_back(kernel_.target(), static_cast<Letter>(l));
      out[PauliString(std::move(factors))] += v;
    }
  }
  return RegionOperator(range_, std::move(out));
}

QuasiConditionalExpectation lift(const TransitionExpectation& kernel, const Region& pass) {
  return QuasiConditionalExpectation(kernel, pass);
}

LevelMap::LevelMap(std::vector<TransitionExpectation> kernels) : kernels_(std::move(kernels)) {
  if (kernels_.empty()) throw std::invalid_argument("level map needs at least one kernel");
  std::sort(kernels_.begin(), kernels_.end(),
            [](const TransitionExpectation& a, const TransitionExpectation& b) {
              return a.target() < b.target();
            });
  std::vector<VertexWord> targets;
  std::size_t fork_total = 0;
  Region source;
  for (const TransitionExpectation& e : kernels_) {
    targets.push_back(e.target());
    fork_total += e.source().size();
    source = Region::join(source, e.source());
  }
  if (source.size() != fork_total) {
    throw std::invalid_argument("level map kernels have overlapping forks");
  }
  source_ = std::move(source);
  targets_ = Region(std::move(targets));
  if (targets_.size() != kernels_.size()) {
    throw std::invalid_argument("level map kernels have duplicate targets");
  }
}

RegionOperator LevelMap::apply(const RegionOperator& a, const DenseBudget& budget) const {
  if (!a.region().subset_of(source_)) {
    throw std::invalid_argument("operator leaves the level map's source region");
  }
  const std::size_t nk = kernels_.size();
  std::map<PauliString, cplx> out;
  std::vector<std::size_t> codes(nk);
  for (const auto& [s, c] : a.terms()) {
    std::fill(codes.begin(), codes.end(), 0);
    for (const auto& [vertex, letter] : s.factors()) {
      for (std::size_t i = 0; i < nk; ++i) {
        const Region& fork = kernels_[i].source();
        const int pos = fork.index_of(vertex);
        if (pos >= 0) {
          codes[i] |= static_cast<std::size_t>(letter)
                      << (2 * (fork.size() - 1 - static_cast<std::size_t>(pos)));
          break;
        }
      }
    }
    std::size_t expansion = 1;
    for (std::size_t i = 0; i < nk; ++i) {
      std::size_t nonzero = 0;
      for (const cplx& v : kernels_[i].target_coefficients(codes[i])) {
        if (v != cplx(0, 0)) ++nonzero;
      }
      expansion *= std::max<std::size_t>(nonzero, 1);
      if (expansion > budget.max_product_terms) {
        std::ostringstream msg;
        msg << "level map expansion exceeds " << budget.max_product_terms << " terms";
        throw BudgetExceeded(msg.str());
      }
    }
    std::vector<std::pair<VertexWord, Letter>> factors;
    const cplx coeff = c;
    const auto expand = [&](const auto& self, std::size_t i, cplx acc) -> void {
      if (i == nk) {
        out[PauliString(factors)] += acc;
        return;
      }
      const std::array<cplx, 4>& row = kernels_[i].target_coefficients(codes[i]);
      for (int l = 0; l < 4; ++l) {
        const cplx v = row[static_cast<std::size_t>(l)];
        if (v == cplx(0, 0)) continue;
        if (l != 0) factors.emplace_back(kernels_[i].target(), static_cast<Letter>(l));
        self(self, i + 1, acc * v);
        if (l != 0) factors.pop_back();
      }
    };
    expand(expand, 0, coeff);
  }
  return RegionOperator(targets_, std::move(out));
}

}  // namespace qmstree

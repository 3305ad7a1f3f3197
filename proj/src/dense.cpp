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

#include "qmstree/dense.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>
#include <stdexcept>

namespace qmstree {

kernels::PackedTerm pack_term(const PauliString& s, cplx coeff, const Region& region) {
  kernels::PackedTerm term;
  term.coeff = coeff;
  term.letters.assign(region.size(), 0);
  for (const auto& [vertex, letter] : s.factors()) {
    const int pos = region.index_of(vertex);
    if (pos < 0) throw std::invalid_argument("pack_term: string leaves the region");
    term.letters[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(letter);
  }
  return term;
}

DenseMatrix to_dense(const RegionOperator& op, const DenseBudget& budget) {
  const int nsites = static_cast<int>(op.region().size());
  if (nsites > budget.max_matrix_sites) {
    std::ostringstream msg;
    msg << "dense matrix on " << nsites << " sites exceeds the budget of "
        << budget.max_matrix_sites;
    throw BudgetExceeded(msg.str());
  }
  std::vector<kernels::PackedTerm> terms;
  terms.reserve(op.terms().size());
  for (const auto& [s, c] : op.terms()) terms.push_back(pack_term(s, c, op.region()));
  const std::int64_t dim = std::int64_t{1} << nsites;
  DenseMatrix out = DenseMatrix::Zero(dim, dim);
  kernels::terms_to_dense(terms, nsites, out);
  return out;
}

RegionOperator dense_to_operator(const DenseMatrix& mat, const Region& region, double prune) {
  const int nsites = static_cast<int>(region.size());
  const std::int64_t nstrings = std::int64_t{1} << (2 * nsites);
  std::map<PauliString, cplx> terms;
  kernels::PackedTerm probe;
  probe.coeff = cplx(1, 0);
  probe.letters.assign(static_cast<std::size_t>(nsites), 0);
  for (std::int64_t code = 0; code < nstrings; ++code) {
    std::int64_t rest = code;
    for (int p = nsites - 1; p >= 0; --p) {
      probe.letters[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(rest & 3);
      rest >>= 2;
    }
    const cplx c = kernels::pauli_expectation(mat, probe, nsites);
    if (std::abs(c) <= prune) continue;
    std::vector<std::pair<VertexWord, Letter>> factors;
    for (int p = 0; p < nsites; ++p) {
      if (probe.letters[static_cast<std::size_t>(p)] != 0) {
        factors.emplace_back(region.vertices()[static_cast<std::size_t>(p)],
                             static_cast<Letter>(probe.letters[static_cast<std::size_t>(p)]));
      }
    }
    terms.emplace(PauliString(factors), c);
  }
  return RegionOperator(region, std::move(terms));
}

double min_eigenvalue(const DenseMatrix& mat) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(mat, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DenseMatrix psd_sqrt(const DenseMatrix& mat, double tol) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(mat);
  Eigen::VectorXd eigs = solver.eigenvalues();
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (eigs[i] < -tol) {
      std::ostringstream msg;
      msg << "matrix is not positive semidefinite: eigenvalue " << eigs[i];
      throw SpecError(msg.str());
    }
    eigs[i] = eigs[i] > 0.0 ? std::sqrt(eigs[i]) : 0.0;
  }
  return solver.eigenvectors() * eigs.asDiagonal() * solver.eigenvectors().adjoint();
}

DenseMatrix hermitian_log(const DenseMatrix& mat, const std::string& what, double tol) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(mat);
  Eigen::VectorXd eigs = solver.eigenvalues();
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (eigs[i] <= tol) {
      std::ostringstream msg;
      msg << what << " is not faithful: eigenvalue " << eigs[i];
      throw SpecError(msg.str());
    }
    eigs[i] = std::log(eigs[i]);
  }
  return solver.eigenvectors() * eigs.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace qmstree

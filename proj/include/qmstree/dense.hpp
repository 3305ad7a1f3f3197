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

#include "qmstree/kernels.hpp"
#include "qmstree/pauli.hpp"

// Conversions between sparse region operators and dense matrices, plus the
// Hermitian matrix functions the library needs. Dense matrices index sites
// in the region's canonical vertex order; position 0 is the most
// significant bit.

namespace qmstree {

using DenseMatrix = kernels::DenseMatrix;

/** Packs one term of `s` against the site order of `region`. */
kernels::PackedTerm pack_term(const PauliString& s, cplx coeff, const Region& region);

/** Dense form of `op`; throws BudgetExceeded past budget.max_matrix_sites. */
DenseMatrix to_dense(const RegionOperator& op, const DenseBudget& budget = {});

/**
 * Pauli decomposition of a dense matrix on `region`. Coefficients with
 * |c| <= prune are dropped.
 */
RegionOperator dense_to_operator(const DenseMatrix& mat, const Region& region,
                                 double prune = 0.0);

/** Smallest eigenvalue of a Hermitian matrix. */
double min_eigenvalue(const DenseMatrix& mat);

/**
 * Principal square root of a positive semidefinite Hermitian matrix.
 * Eigenvalues in [-tol, 0) clamp to zero; below -tol throws SpecError
 * naming the offending eigenvalue.
 */
DenseMatrix psd_sqrt(const DenseMatrix& mat, double tol = kDefaultTol);

/**
 * Logarithm of a positive definite Hermitian matrix. An eigenvalue at or
 * below tol fails the faithfulness requirement: throws SpecError naming
 * `what` and the eigenvalue.
 */
DenseMatrix hermitian_log(const DenseMatrix& mat, const std::string& what,
                          double tol = kDefaultTol);

}  // namespace qmstree

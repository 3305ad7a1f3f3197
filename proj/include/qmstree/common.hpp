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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmstree {

using cplx = std::complex<double>;

/** Default tolerance for verification checks. */
inline constexpr double kDefaultTol = 1e-9;

/** Hard iteration cap for the fixed-point solver. */
inline constexpr int kSolverMaxIterations = 500;

/** Convergence tolerance for the fixed-point solver residual. */
inline constexpr double kSolverTol = 1e-10;

/**
 * Caps on densification. Sites are qubit (dimension-2) factors, so a dense
 * matrix over n sites has 4^n entries; the defaults keep matrices at or
 * below 128x128.
 */
struct DenseBudget {
  int max_matrix_sites = 7;
  int max_vector_sites = 12;
  std::size_t max_product_terms = std::size_t{1} << 20;
};

/** Thrown when an operation would exceed the configured dense budget. */
struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/** Thrown when the fixed-point solver fails to converge or hits a bad iterate. */
struct SolverFailure : std::runtime_error {
  explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

/** Thrown on malformed input files, flags, or model/observable specs. */
struct SpecError : std::runtime_error {
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qmstree

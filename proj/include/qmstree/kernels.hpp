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

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "qmstree/common.hpp"

// Data-parallel numeric cores. Every kernel has a serial reference
// implementation and an OpenMP variant computing bitwise-identical results
// (parallel loops write independent output slots or reduce with max, never
// reassociate sums), plus a size-based dispatcher. The benchmark tool
// compares the two variants.

namespace qmstree::kernels {

using DenseMatrix = Eigen::MatrixXcd;

/**
 * One Pauli-string term packed against a fixed site order: letters[p] is
 * the letter code (I=0,X=1,Y=2,Z=3) at site position p; position 0 is the
 * most significant bit of the dense index.
 */
struct PackedTerm {
  cplx coeff;
  std::vector<std::uint8_t> letters;
};

/** out (2^nsites square, preallocated and zeroed) += sum of packed terms. */
void terms_to_dense_serial(const std::vector<PackedTerm>& terms, int nsites, DenseMatrix& out);
void terms_to_dense_parallel(const std::vector<PackedTerm>& terms, int nsites, DenseMatrix& out);
void terms_to_dense(const std::vector<PackedTerm>& terms, int nsites, DenseMatrix& out);

/** Normalized expectation tr(rho * P) / 2^nsites of one packed string. */
cplx pauli_expectation_serial(const DenseMatrix& rho, const PackedTerm& term, int nsites);
cplx pauli_expectation_parallel(const DenseMatrix& rho, const PackedTerm& term, int nsites);
cplx pauli_expectation(const DenseMatrix& rho, const PackedTerm& term, int nsites);

/**
 * Normalized partial trace of a 2^nsites square matrix onto the site
 * positions `keep` (ascending): divides by 2^(#traced).
 */
void partial_trace_serial(const DenseMatrix& in, int nsites, const std::vector<int>& keep,
                          DenseMatrix& out);
void partial_trace_parallel(const DenseMatrix& in, int nsites, const std::vector<int>& keep,
                            DenseMatrix& out);
void partial_trace(const DenseMatrix& in, int nsites, const std::vector<int>& keep,
                   DenseMatrix& out);

/** max over i in [0,n) of f(i); f must be safe to call concurrently. */
double max_scan_serial(std::int64_t n, const std::function<double(std::int64_t)>& f);
double max_scan_parallel(std::int64_t n, const std::function<double(std::int64_t)>& f);
double max_scan(std::int64_t n, const std::function<double(std::int64_t)>& f);

/** out[i] = f(i) for i in [0,n); f must be safe to call concurrently. */
void collect_scan_serial(std::int64_t n, const std::function<cplx(std::int64_t)>& f,
                         std::vector<cplx>& out);
void collect_scan_parallel(std::int64_t n, const std::function<cplx(std::int64_t)>& f,
                           std::vector<cplx>& out);
void collect_scan(std::int64_t n, const std::function<cplx(std::int64_t)>& f,
                  std::vector<cplx>& out);

}  // namespace qmstree::kernels

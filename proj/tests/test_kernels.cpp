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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qmstree/kernels.hpp>
#include <random>

#include "oracle.hpp"

using qmstree::cplx;
using qmstree::kernels::DenseMatrix;
using qmstree::kernels::PackedTerm;

namespace {

const char kLetters[] = "IXYZ";

std::vector<PackedTerm> random_terms(int nsites, int nterms, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> letter(0, 3);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<PackedTerm> terms;
  terms.reserve(static_cast<std::size_t>(nterms));
  for (int t = 0; t < nterms; ++t) {
    PackedTerm term;
    term.coeff = cplx(coeff(rng), coeff(rng));
    for (int p = 0; p < nsites; ++p) {
      term.letters.push_back(static_cast<std::uint8_t>(letter(rng)));
    }
    terms.push_back(std::move(term));
  }
  return terms;
}

DenseMatrix random_dense(int nsites, std::mt19937_64& rng) {
  const long dim = 1L << nsites;
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  DenseMatrix m(dim, dim);
  for (long i = 0; i < dim; ++i) {
    for (long j = 0; j < dim; ++j) m(i, j) = cplx(coeff(rng), coeff(rng));
  }
  return m;
}

bool bitwise_equal(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (long i = 0; i < a.rows(); ++i) {
    for (long j = 0; j < a.cols(); ++j) {
      if (a(i, j) != b(i, j)) return false;
    }
  }
  return true;
}

std::string letters_of(const PackedTerm& term) {
  std::string out;
  for (const std::uint8_t l : term.letters) out += kLetters[l];
  return out;
}

}  // namespace

TEST_CASE("terms_to_dense matches the oracle kron route") {
  std::mt19937_64 rng(21);
  const int nsites = 4;
  const auto terms = random_terms(nsites, 9, rng);
  DenseMatrix out = DenseMatrix::Zero(16, 16);
  qmstree::kernels::terms_to_dense_serial(terms, nsites, out);
  oracle::Mat expected = oracle::Mat::Zero(16, 16);
  for (const auto& t : terms) expected += t.coeff * oracle::string_dense(letters_of(t));
  CHECK((out - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("terms_to_dense parallel is bitwise identical to serial") {
  std::mt19937_64 rng(22);
  for (const int nsites : {1, 3, 6, 9}) {
    const auto terms = random_terms(nsites, 40, rng);
    const long dim = 1L << nsites;
    DenseMatrix a = DenseMatrix::Zero(dim, dim);
    DenseMatrix b = DenseMatrix::Zero(dim, dim);
    DenseMatrix c = DenseMatrix::Zero(dim, dim);
    qmstree::kernels::terms_to_dense_serial(terms, nsites, a);
    qmstree::kernels::terms_to_dense_parallel(terms, nsites, b);
    qmstree::kernels::terms_to_dense(terms, nsites, c);
    CHECK(bitwise_equal(a, b));
    CHECK(bitwise_equal(a, c));
  }
}

TEST_CASE("pauli_expectation matches the oracle and its parallel twin") {
  std::mt19937_64 rng(23);
  for (const int nsites : {2, 5, 8}) {
    const DenseMatrix rho = random_dense(nsites, rng);
    const auto terms = random_terms(nsites, 6, rng);
    for (const auto& term : terms) {
      const cplx serial = qmstree::kernels::pauli_expectation_serial(rho, term, nsites);
      const cplx parallel = qmstree::kernels::pauli_expectation_parallel(rho, term, nsites);
      const cplx dispatched = qmstree::kernels::pauli_expectation(rho, term, nsites);
      CHECK(serial == parallel);
      CHECK(serial == dispatched);
      const cplx expected =
          term.coeff * oracle::ntrace(rho * oracle::string_dense(letters_of(term)));
      CHECK(std::abs(serial - expected) < 1e-12);
    }
  }
}

TEST_CASE("partial_trace matches the oracle and its parallel twin") {
  std::mt19937_64 rng(24);
  const int nsites = 6;
  const std::vector<int> keep{0, 2, 5};
  const DenseMatrix in = random_dense(nsites, rng);
  DenseMatrix serial, parallel, dispatched;
  qmstree::kernels::partial_trace_serial(in, nsites, keep, serial);
  qmstree::kernels::partial_trace_parallel(in, nsites, keep, parallel);
  qmstree::kernels::partial_trace(in, nsites, keep, dispatched);
  CHECK(bitwise_equal(serial, parallel));
  CHECK(bitwise_equal(serial, dispatched));
  CHECK((serial - oracle::ptrace_keep(in, nsites, keep)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial_trace onto everything and onto one site") {
  std::mt19937_64 rng(25);
  const DenseMatrix in = random_dense(3, rng);
  DenseMatrix all, one;
  qmstree::kernels::partial_trace_serial(in, 3, {0, 1, 2}, all);
  CHECK(bitwise_equal(all, in));
  qmstree::kernels::partial_trace_serial(in, 3, {1}, one);
  CHECK((one - oracle::ptrace_keep(in, 3, {1})).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("max_scan agrees between serial and parallel") {
  const auto f = [](std::int64_t i) {
    return std::sin(static_cast<double>(i) * 0.7) * std::cos(static_cast<double>(i) * 0.3);
  };
  for (const std::int64_t n : {1, 7, 1000, 100000}) {
    const double serial = qmstree::kernels::max_scan_serial(n, f);
    const double parallel = qmstree::kernels::max_scan_parallel(n, f);
    const double dispatched = qmstree::kernels::max_scan(n, f);
    CHECK(serial == parallel);
    CHECK(serial == dispatched);
  }
  CHECK(qmstree::kernels::max_scan_serial(0, f) == 0.0);
}

TEST_CASE("collect_scan fills independent slots identically") {
  const auto f = [](std::int64_t i) {
    return cplx(std::sin(static_cast<double>(i)), std::cos(static_cast<double>(i) * 0.5));
  };
  for (const std::int64_t n : {1, 64, 50000}) {
    std::vector<cplx> serial, parallel, dispatched;
    qmstree::kernels::collect_scan_serial(n, f, serial);
    qmstree::kernels::collect_scan_parallel(n, f, parallel);
    qmstree::kernels::collect_scan(n, f, dispatched);
    REQUIRE(serial.size() == static_cast<std::size_t>(n));
    CHECK(serial == parallel);
    CHECK(serial == dispatched);
  }
}

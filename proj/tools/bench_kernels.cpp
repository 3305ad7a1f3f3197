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

#include <chrono>
#include <cstdio>
#include <random>

#include "qmstree/engine.hpp"
#include "qmstree/ising.hpp"
#include "qmstree/kernels.hpp"

// Serial vs OpenMP timings of the data-parallel cores on representative
// shapes, plus a bitwise agreement check per pair.

namespace {

using qmstree::cplx;
using qmstree::kernels::DenseMatrix;
using qmstree::kernels::PackedTerm;

double seconds(const std::function<void()>& body, int repeats) {
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) body();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count() / repeats;
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-28s serial %10.6fs   parallel %10.6fs   speedup %5.2fx   %s\n", name, serial,
              parallel, parallel > 0 ? serial / parallel : 0.0,
              identical ? "bitwise-identical" : "MISMATCH");
}

std::vector<PackedTerm> random_terms(int nsites, int count, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> letter(0, 3);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<PackedTerm> terms(static_cast<std::size_t>(count));
  for (auto& term : terms) {
    term.coeff = cplx(coeff(rng), coeff(rng));
    term.letters.resize(static_cast<std::size_t>(nsites));
    for (auto& l : term.letters) l = static_cast<std::uint8_t>(letter(rng));
  }
  return terms;
}

}  // namespace

int main() {
  std::mt19937_64 rng(20260819);

  {
    const int nsites = 12;
    const std::vector<PackedTerm> terms = random_terms(nsites, 64, rng);
    const auto dim = std::int64_t{1} << nsites;
    DenseMatrix a = DenseMatrix::Zero(dim, dim);
    DenseMatrix b = DenseMatrix::Zero(dim, dim);
    const double ts = seconds([&] { a.setZero(); qmstree::kernels::terms_to_dense_serial(terms, nsites, a); }, 3);
    const double tp = seconds([&] { b.setZero(); qmstree::kernels::terms_to_dense_parallel(terms, nsites, b); }, 3);
    report("terms_to_dense (12 sites)", ts, tp, a == b);

    PackedTerm probe = terms.front();
    cplx es{}, ep{};
    const double xs = seconds([&] { es = qmstree::kernels::pauli_expectation_serial(a, probe, nsites); }, 5);
    const double xp = seconds([&] { ep = qmstree::kernels::pauli_expectation_parallel(a, probe, nsites); }, 5);
    report("pauli_expectation (12 sites)", xs, xp, es == ep);

    const std::vector<int> keep{0, 1, 2, 3, 4, 5};
    DenseMatrix outs, outp;
    const double ps = seconds([&] { qmstree::kernels::partial_trace_serial(a, nsites, keep, outs); }, 3);
    const double pp = seconds([&] { qmstree::kernels::partial_trace_parallel(a, nsites, keep, outp); }, 3);
    report("partial_trace (12 -> 6)", ps, pp, outs == outp);
  }

  {
    // Marginal-style basis sweep: every Pauli coefficient of the Ising
    // state on the 7-site volume-2 region.
    qmstree::ising::ModelSpec spec;
    spec.beta = 1.0;
    spec.J = 1.0;
    const qmstree::QmsHandle h = qmstree::ising::build_qms(spec);
    const auto sweep = [&](auto&& scan) {
      qmstree::Region full;
      for (int l = 0; l <= 2; ++l) {
        full = qmstree::Region::join(full, qmstree::Region(h.level_vertices(l)));
      }
      const int nsites = static_cast<int>(full.size());
      const std::int64_t nstrings = std::int64_t{1} << (2 * nsites);
      std::vector<cplx> coeffs;
      scan(
          nstrings,
          [&](std::int64_t code) {
            std::vector<std::pair<qmstree::VertexWord, qmstree::Letter>> factors;
            for (int p = 0; p < nsites; ++p) {
              const auto letter =
                  static_cast<qmstree::Letter>((code >> (2 * (nsites - 1 - p))) & 3);
              if (letter != qmstree::Letter::I) {
                factors.emplace_back(full.vertices()[static_cast<std::size_t>(p)], letter);
              }
            }
            const qmstree::PauliString s(std::move(factors));
            return h.evaluate(qmstree::RegionOperator::single(full, s, cplx(1, 0))).value;
          },
          coeffs);
      return coeffs;
    };
    std::vector<cplx> cs, cp;
    const double ss = seconds([&] { cs = sweep(qmstree::kernels::collect_scan_serial); }, 1);
    const double sp = seconds([&] { cp = sweep(qmstree::kernels::collect_scan_parallel); }, 1);
    report("basis sweep (4^7 strings)", ss, sp, cs == cp);
  }

  return 0;
}

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

#include "qmstree/kernels.hpp"

#include <cstdlib>

namespace qmstree::kernels {

namespace {

// Per-site factor of a Pauli matrix entry at (row bit r, col bit r^flip):
// kFactor[letter][r]. X and Y flip the bit, I and Z keep it.
const cplx kFactor[4][2] = {
    {cplx(1, 0), cplx(1, 0)},
    {cplx(1, 0), cplx(1, 0)},
    {cplx(0, -1), cplx(0, 1)},
    {cplx(1, 0), cplx(-1, 0)},
};

inline std::int64_t flip_mask(const PackedTerm& term, int nsites) {
  std::int64_t mask = 0;
  for (int p = 0; p < nsites; ++p) {
    const std::uint8_t l = term.letters[p];
    if (l == 1 || l == 2) mask |= std::int64_t{1} << (nsites - 1 - p);
  }
  return mask;
}

// Product over sites of the row-indexed entry factors for one dense row.
inline cplx row_factor(const PackedTerm& term, int nsites, std::int64_t row) {
  cplx v(1, 0);
  for (int p = 0; p < nsites; ++p) {
    const int bit = static_cast<int>((row >> (nsites - 1 - p)) & 1);
    v *= kFactor[term.letters[p]][bit];
  }
  return v;
}

inline void fill_row(const std::vector<PackedTerm>& terms, const std::vector<std::int64_t>& masks,
                     int nsites, std::int64_t row, DenseMatrix& out) {
  for (std::size_t t = 0; t < terms.size(); ++t) {
    out(row, row ^ masks[t]) += terms[t].coeff * row_factor(terms[t], nsites, row);
  }
}

}  // namespace

void terms_to_dense_serial(const std::vector<PackedTerm>& terms, int nsites, DenseMatrix& out) {
  const std::int64_t dim = std::int64_t{1} << nsites;
  std::vector<std::int64_t> masks(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) masks[t] = flip_mask(terms[t], nsites);
  for (std::int64_t row = 0; row < dim; ++row) fill_row(terms, masks, nsites, row, out);
}

void terms_to_dense_parallel(const std::vector<PackedTerm>& terms, int nsites, DenseMatrix& out) {
  const std::int64_t dim = std::int64_t{1} << nsites;
  std::vector<std::int64_t> masks(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) masks[t] = flip_mask(terms[t], nsites);
#pragma omp parallel for schedule(static)
  for (std::int64_t row = 0; row < dim; ++row) fill_row(terms, masks, nsites, row, out);
}

void terms_to_dense(const std::vector<PackedTerm>& terms, int nsites, DenseMatrix& out) {
  if (nsites >= 9 && terms.size() >= 4) {
    terms_to_dense_parallel(terms, nsites, out);
  } else {
    terms_to_dense_serial(terms, nsites, out);
  }
}

namespace {

// tr(rho * P) has one contribution per dense row: rho(r, r^F) * v(r^F).
// Both variants store them in a slot-per-row buffer and sum in row order,
// so the result is bitwise independent of the thread count.
cplx sum_rows(const std::vector<cplx>& vals) {
  cplx acc(0, 0);
  for (const cplx& v : vals) acc += v;
  return acc;
}

}  // namespace

cplx pauli_expectation_serial(const DenseMatrix& rho, const PackedTerm& term, int nsites) {
  const std::int64_t dim = std::int64_t{1} << nsites;
  const std::int64_t mask = flip_mask(term, nsites);
  std::vector<cplx> vals(static_cast<std::size_t>(dim));
  for (std::int64_t row = 0; row < dim; ++row) {
    vals[static_cast<std::size_t>(row)] =
        rho(row, row ^ mask) * row_factor(term, nsites, row ^ mask);
  }
  return term.coeff * sum_rows(vals) / static_cast<double>(dim);
}

cplx pauli_expectation_parallel(const DenseMatrix& rho, const PackedTerm& term, int nsites) {
  const std::int64_t dim = std::int64_t{1} << nsites;
  const std::int64_t mask = flip_mask(term, nsites);
  std::vector<cplx> vals(static_cast<std::size_t>(dim));
#pragma omp parallel for schedule(static)
  for (std::int64_t row = 0; row < dim; ++row) {
    vals[static_cast<std::size_t>(row)] =
        rho(row, row ^ mask) * row_factor(term, nsites, row ^ mask);
  }
  return term.coeff * sum_rows(vals) / static_cast<double>(dim);
}

cplx pauli_expectation(const DenseMatrix& rho, const PackedTerm& term, int nsites) {
  return nsites >= 11 ? pauli_expectation_parallel(rho, term, nsites)
                      : pauli_expectation_serial(rho, term, nsites);
}

namespace {

struct TraceLayout {
  std::vector<std::int64_t> kept;    // kept-subindex -> full-index bits
  std::vector<std::int64_t> traced;  // traced-subindex -> full-index bits
};

TraceLayout trace_layout(int nsites, const std::vector<int>& keep) {
  std::vector<int> traced_pos;
  std::vector<bool> is_kept(static_cast<std::size_t>(nsites), false);
  for (int p : keep) is_kept[static_cast<std::size_t>(p)] = true;
  for (int p = 0; p < nsites; ++p) {
    if (!is_kept[static_cast<std::size_t>(p)]) traced_pos.push_back(p);
  }
  const auto expand = [nsites](const std::vector<int>& pos) {
    const int m = static_cast<int>(pos.size());
    std::vector<std::int64_t> table(std::size_t{1} << m, 0);
    for (std::int64_t sub = 0; sub < (std::int64_t{1} << m); ++sub) {
      std::int64_t full = 0;
      for (int j = 0; j < m; ++j) {
        if ((sub >> (m - 1 - j)) & 1) full |= std::int64_t{1} << (nsites - 1 - pos[j]);
      }
      table[static_cast<std::size_t>(sub)] = full;
    }
    return table;
  };
  return {expand(keep), expand(traced_pos)};
}

inline void trace_slot(const DenseMatrix& in, const TraceLayout& lay, double norm, std::int64_t a,
                       std::int64_t b, DenseMatrix& out) {
  const std::int64_t ra = lay.kept[static_cast<std::size_t>(a)];
  const std::int64_t rb = lay.kept[static_cast<std::size_t>(b)];
  cplx acc(0, 0);
  for (std::int64_t off : lay.traced) acc += in(ra | off, rb | off);
  out(a, b) = acc * norm;
}

}  // namespace

void partial_trace_serial(const DenseMatrix& in, int nsites, const std::vector<int>& keep,
                          DenseMatrix& out) {
  const TraceLayout lay = trace_layout(nsites, keep);
  const std::int64_t kdim = std::int64_t{1} << keep.size();
  const double norm = 1.0 / static_cast<double>(lay.traced.size());
  out.resize(kdim, kdim);
  for (std::int64_t a = 0; a < kdim; ++a) {
    for (std::int64_t b = 0; b < kdim; ++b) trace_slot(in, lay, norm, a, b, out);
  }
}

void partial_trace_parallel(const DenseMatrix& in, int nsites, const std::vector<int>& keep,
                            DenseMatrix& out) {
  const TraceLayout lay = trace_layout(nsites, keep);
  const std::int64_t kdim = std::int64_t{1} << keep.size();
  const double norm = 1.0 / static_cast<double>(lay.traced.size());
  out.resize(kdim, kdim);
#pragma omp parallel for schedule(static) collapse(2)
  for (std::int64_t a = 0; a < kdim; ++a) {
    for (std::int64_t b = 0; b < kdim; ++b) trace_slot(in, lay, norm, a, b, out);
  }
}

void partial_trace(const DenseMatrix& in, int nsites, const std::vector<int>& keep,
                   DenseMatrix& out) {
  if (nsites >= 10 && keep.size() >= 4) {
    partial_trace_parallel(in, nsites, keep, out);
  } else {
    partial_trace_serial(in, nsites, keep, out);
  }
}

double max_scan_serial(std::int64_t n, const std::function<double(std::int64_t)>& f) {
  double best = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double v = f(i);
    if (v > best) best = v;
  }
  return best;
}

double max_scan_parallel(std::int64_t n, const std::function<double(std::int64_t)>& f) {
  double best = 0.0;
#pragma omp parallel for schedule(dynamic, 4) reduction(max : best)
  for (std::int64_t i = 0; i < n; ++i) {
    const double v = f(i);
    if (v > best) best = v;
  }
  return best;
}

double max_scan(std::int64_t n, const std::function<double(std::int64_t)>& f) {
  return n >= 64 ? max_scan_parallel(n, f) : max_scan_serial(n, f);
}

void collect_scan_serial(std::int64_t n, const std::function<cplx(std::int64_t)>& f,
                         std::vector<cplx>& out) {
  out.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f(i);
}

void collect_scan_parallel(std::int64_t n, const std::function<cplx(std::int64_t)>& f,
                           std::vector<cplx>& out) {
  out.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f(i);
}

void collect_scan(std::int64_t n, const std::function<cplx(std::int64_t)>& f,
                  std::vector<cplx>& out) {
  if (n >= 64) {
    collect_scan_parallel(n, f, out);
  } else {
    collect_scan_serial(n, f, out);
  }
}

}  // namespace qmstree::kernels

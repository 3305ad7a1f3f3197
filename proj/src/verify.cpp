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

#include "qmstree/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>

#include "qmstree/dense.hpp"
#include "qmstree/kernels.hpp"

namespace qmstree {

namespace {

// Basis string with base-4 code `code` on `region`; position 0 is the most
// significant digit, matching the transfer-table convention.
PauliString basis_string(const Region& region, std::int64_t code) {
  const int nsites = static_cast<int>(region.size());
  std::vector<std::pair<VertexWord, Letter>> factors;
  for (int p = 0; p < nsites; ++p) {
    const auto letter = static_cast<Letter>((code >> (2 * (nsites - 1 - p))) & 3);
    if (letter != Letter::I) {
      factors.emplace_back(region.vertices()[static_cast<std::size_t>(p)], letter);
    }
  }
  return PauliString(std::move(factors));
}

std::string string_repr(const Region& region, const PauliString& s) {
  std::string out;
  for (const auto& v : region.vertices()) out += letter_char(s.at(v));
  out += " on ";
  bool first = true;
  for (const auto& v : region.vertices()) {
    if (!first) out += ',';
    out += v.str();
    first = false;
  }
  return out;
}

// Strict predecessors of x down to `stop` (exclusive of x, inclusive of
// `stop`), as a region. Empty when x == stop.
Region path_to_parent(const VertexWord& stop, const VertexWord& x) {
  std::vector<VertexWord> vs;
  VertexWord walk = x;
  while (walk != stop) {
    walk = walk.parent();
    vs.push_back(walk);
  }
  return Region(std::move(vs));
}

// Max |phi(E_x(a)) - phi(a)| over the Pauli basis of pass u fork, both
// sides contracted at the same volume. `pass` need not reach the handle's
// root; a shorter pass region tests the restricted triplet.
struct MarkovSweep {
  double residual = 0.0;
  std::string witness;
};

MarkovSweep markov_sweep(const QmsHandle& h, const TransitionExpectation& kernel,
                         const Region& pass, int volume) {
  const QuasiConditionalExpectation e = lift(kernel, pass);
  const Region& basis_region = e.domain_region();
  const int nsites = static_cast<int>(basis_region.size());
  MarkovSweep sweep;
  sweep.witness = string_repr(basis_region, PauliString());
  const std::int64_t nstrings = std::int64_t{1} << (2 * nsites);
  std::vector<cplx> residuals;
  kernels::collect_scan(
      nstrings,
      [&](std::int64_t code) {
        const PauliString s = basis_string(basis_region, code);
        const RegionOperator a = RegionOperator::single(basis_region, s, cplx(1, 0));
        const cplx lhs = h.evaluate_nested(e.apply(a), volume).value;
        const cplx rhs = h.evaluate_nested(a, volume).value;
        return cplx(std::abs(lhs - rhs), 0);
      },
      residuals);
  for (std::int64_t code = 0; code < nstrings; ++code) {
    const double r = residuals[static_cast<std::size_t>(code)].real();
    if (r > sweep.residual) {
      sweep.residual = r;
      sweep.witness = string_repr(basis_region, basis_string(basis_region, code));
    }
  }
  return sweep;
}

double coeff_l1(const RegionOperator& a) {
  double s = 0.0;
  for (const auto& [str, c] : a.terms()) s += std::abs(c);
  return s;
}

double commutator_l1(const RegionOperator& a, const RegionOperator& b) {
  return coeff_l1(subtract(multiply(a, b), multiply(b, a)));
}

// The four commutator families of a decomposition, in a fixed order.
std::vector<std::pair<std::string, double>> commutator_families(const PotentialDecomposition& d) {
  std::vector<std::pair<std::string, double>> out;
  const auto& blocks = d.interaction_blocks;
  double first = 0.0;
  double last = 0.0;
  if (!blocks.empty()) {
    first = commutator_l1(d.head_block, blocks.front());
    last = commutator_l1(blocks.back(), d.tail_block);
  }
  out.emplace_back("head_vs_first_interaction", first);
  out.emplace_back("last_interaction_vs_tail", last);
  out.emplace_back("head_vs_tail", commutator_l1(d.head_block, d.tail_block));
  double adjacent = 0.0;
  for (std::size_t j = 0; j + 1 < blocks.size(); ++j) {
    adjacent = std::max(adjacent, commutator_l1(blocks[j], blocks[j + 1]));
  }
  out.emplace_back("adjacent_interactions", adjacent);
  return out;
}

}  // namespace

VerificationReport check_localized_markov(const QmsHandle& h, const VertexWord& x, int volume,
                                          double tol, const DenseBudget& budget) {
  const TransitionExpectation kernel = h.kernel_at(x);
  const int level = x.level() - h.root().level();
  if (volume < 0) volume = level + 1;
  if (volume <= level) {
    throw SpecError("volume must exceed the level of the checked vertex");
  }
  const Region pass = path_to_parent(h.root(), x);
  const int nsites = static_cast<int>(pass.size() + kernel.source().size());
  if (nsites > budget.max_vector_sites) {
    std::ostringstream msg;
    msg << "vertex condition basis on " << nsites << " sites exceeds the budget of "
        << budget.max_vector_sites;
    throw BudgetExceeded(msg.str());
  }

  const MarkovSweep sweep = markov_sweep(h, kernel, pass, volume);
  VerificationReport r;
  r.property = "localized_markov";
  r.tolerance = tol;
  r.residual = sweep.residual;
  r.pass = sweep.residual < tol;
  r.witness = sweep.witness;
  r.volumes = {volume};
  r.norm = "coefficient_sup";
  std::ostringstream notes;
  notes << "vertex " << x.str() << "; both sides contracted at volume " << volume;
  r.notes = notes.str();
  return r;
}

VerificationReport check_level_markov(const QmsHandle& h, int n, double tol,
                                      const DenseBudget& budget) {
  if (n < 0) throw SpecError("level must be nonnegative");
  std::vector<VertexWord> level_n = h.level_vertices(n);
  if (level_n.empty()) {
    throw SpecError("level " + std::to_string(n) + " has no vertices inside the domain");
  }
  Region basis_region;
  for (int l = 0; l <= n + 1; ++l) {
    basis_region = Region::join(basis_region, Region(h.level_vertices(l)));
  }
  const int nsites = static_cast<int>(basis_region.size());
  if (nsites > budget.max_matrix_sites) {
    std::ostringstream msg;
    msg << "level condition basis on " << nsites << " sites exceeds the budget of "
        << budget.max_matrix_sites;
    throw BudgetExceeded(msg.str());
  }

  // Every state value comes from one marginal sweep; for an uncertified
  // handle its plan spans the full tree to depth n+1, so both sides of the
  // condition are paired against the volume-(n+1) state.
  const RegionOperator marginal = h.marginal_operator(basis_region, budget);

  // The level map as a product of single-vertex lifts; the pass regions
  // shrink by one successor set per step.
  std::vector<QuasiConditionalExpectation> lifts;
  Region current = basis_region;
  for (const VertexWord& x : level_n) {
    const TransitionExpectation kernel = h.kernel_at(x);
    std::vector<VertexWord> pass_vs;
    for (const auto& v : current.vertices()) {
      if (kernel.source().index_of(v) < 0) pass_vs.push_back(v);
    }
    lifts.emplace_back(lift(kernel, Region(std::move(pass_vs))));
    current = lifts.back().range_region();
  }

  double worst = 0.0;
  std::string witness = string_repr(basis_region, PauliString());
  const std::int64_t nstrings = std::int64_t{1} << (2 * nsites);
  std::vector<cplx> residuals;
  kernels::collect_scan(
      nstrings,
      [&](std::int64_t code) {
        const PauliString s = basis_string(basis_region, code);
        RegionOperator image = RegionOperator::single(basis_region, s, cplx(1, 0));
        for (const auto& e : lifts) image = e.apply(image);
        cplx lhs(0, 0);
        for (const auto& [t, c] : image.terms()) lhs += c * marginal.coefficient(t);
        return cplx(std::abs(lhs - marginal.coefficient(s)), 0);
      },
      residuals);
  for (std::int64_t code = 0; code < nstrings; ++code) {
    const double r = residuals[static_cast<std::size_t>(code)].real();
    if (r > worst) {
      worst = r;
      witness = string_repr(basis_region, basis_string(basis_region, code));
    }
  }

  VerificationReport r;
  r.property = "level_markov";
  r.tolerance = tol;
  r.residual = worst;
  r.pass = worst < tol;
  r.witness = witness;
  r.volumes = {n + 1};
  r.norm = "coefficient_sup";

  // The level condition and the per-vertex conditions at the same level
  // are equivalent statements; record both verdicts.
  double vertex_worst = 0.0;
  std::string vertex_at = level_n.front().str();
  bool vertex_pass = true;
  for (const VertexWord& x : level_n) {
    const VerificationReport vr = check_localized_markov(h, x, n + 1, tol, budget);
    vertex_pass = vertex_pass && vr.pass;
    if (vr.residual > vertex_worst) {
      vertex_worst = vr.residual;
      vertex_at = x.str();
    }
  }
  std::ostringstream notes;
  notes << "per-vertex worst residual " << vertex_worst << " at " << vertex_at
        << "; level and per-vertex verdicts "
        << (r.pass == vertex_pass ? "agree" : "disagree");
  r.notes = notes.str();
  return r;
}

PotentialDecomposition extract_potential(const QmsHandle& h, int n, const DenseBudget& budget) {
  if (n < 0) throw SpecError("volume must be nonnegative");
  Region region;
  for (int l = 0; l <= n; ++l) {
    region = Region::join(region, Region(h.level_vertices(l)));
  }
  const int nsites = static_cast<int>(region.size());
  if (nsites > budget.max_matrix_sites) {
    std::ostringstream msg;
    msg << "potential on " << nsites << " sites exceeds the budget of "
        << budget.max_matrix_sites;
    throw BudgetExceeded(msg.str());
  }
  constexpr double kPrune = 1e-13;

  PotentialDecomposition d;
  d.volume = n;
  d.region = region;

  for (const auto& [s, c] : h.initial_state().terms()) {
    if (!s.diagonal()) {
      throw SpecError("the potential requires a diagonal initial state");
    }
  }
  d.head_block = dense_to_operator(
      DenseMatrix(-hermitian_log(to_dense(h.initial_state(), budget), "initial state")),
      h.initial_state().region(), kPrune);

  d.interaction_blocks.reserve(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    RegionOperator block;
    for (const VertexWord& x : h.level_vertices(l)) {
      const TransitionExpectation kernel = h.kernel_at(x);
      if (!kernel.amplitude().diagonal()) {
        throw SpecError("the potential requires a diagonal amplitude at " + x.str());
      }
      const RegionOperator& w = kernel.weight();
      const cplx alpha = w.coefficient(PauliString());
      if (w.term_count() != 1 || std::abs(alpha.imag()) > kPrune || alpha.real() <= 0.0) {
        throw SpecError("the potential requires a positive scalar weight at " + x.str());
      }
      const RegionOperator log_a =
          dense_to_operator(hermitian_log(to_dense(kernel.amplitude(), budget), "fork amplitude"),
                            kernel.source(), kPrune);
      block = add(block, add(scale(-std::log(alpha.real()),
                                   RegionOperator::identity(kernel.source())),
                             scale(-2.0, log_a)));
    }
    d.interaction_blocks.push_back(std::move(block));
  }
  d.tail_block = RegionOperator::zero(Region(h.level_vertices(n)));

  const RegionOperator marginal = h.marginal_operator(region, budget);
  d.total = dense_to_operator(
      DenseMatrix(-hermitian_log(to_dense(marginal, budget), "finite-volume marginal")), region,
      kPrune);

  RegionOperator sum = add(d.head_block, d.tail_block);
  for (const auto& block : d.interaction_blocks) sum = add(sum, block);
  d.reconstruction_residual = coeff_distance(d.total, sum);
  d.commutator_residuals = commutator_families(d);
  d.notes =
      "levels are the decomposition's layer sets; interaction block j couples levels j and j+1; "
      "normalized trace convention, additive constants carried per fork inside the interaction "
      "blocks, head block = -log of the initial state";
  return d;
}

VerificationReport check_commutation(const PotentialDecomposition& d, double tol) {
  VerificationReport r;
  r.property = "potential_commutation";
  r.tolerance = tol;
  r.volumes = {d.volume};
  r.norm = "coefficient_l1";
  r.witness = "none";
  std::ostringstream notes;
  bool first = true;
  for (const auto& [name, value] : commutator_families(d)) {
    if (!first) notes << "; ";
    notes << name << "=" << value;
    first = false;
    if (value >= r.residual) {
      if (value > r.residual || r.witness == "none") r.witness = name;
      r.residual = value;
    }
  }
  r.pass = r.residual < tol;
  r.notes = notes.str();
  return r;
}

namespace {

VerificationReport translation_criterion_report(const std::string& property, double tol) {
  VerificationReport r;
  r.property = property;
  r.tolerance = tol;
  r.norm = "coefficient_sup";
  return r;
}

// x mapped into the subtree at `target`: target.(x minus root).
VertexWord reroot(const VertexWord& root, const VertexWord& target, const VertexWord& x) {
  VertexWord out = target;
  const auto& branches = x.branches();
  for (std::size_t i = static_cast<std::size_t>(root.level()); i < branches.size(); ++i) {
    out = out.child(branches[i]);
  }
  return out;
}

PauliString reroot_string(const VertexWord& root, const VertexWord& target, const PauliString& s) {
  std::vector<std::pair<VertexWord, Letter>> factors;
  factors.reserve(s.factors().size());
  for (const auto& [v, l] : s.factors()) factors.emplace_back(reroot(root, target, v), l);
  return PauliString(std::move(factors));
}

}  // namespace

TranslationInvarianceReport check_translation_invariance(const QmsHandle& h, double tol) {
  if (h.domain()) {
    throw SpecError("translation invariance requires an unrestricted handle");
  }
  if (h.n_max() < 2) {
    throw SpecError("translation invariance requires a depth horizon of at least 2");
  }
  const int k = h.branching();
  const VertexWord& root = h.root();
  Region base = Region({root});
  for (int j = 1; j <= k; ++j) {
    base = Region::join(base, Region({root.child(static_cast<std::uint32_t>(j))}));
  }
  const int nsites = static_cast<int>(base.size());
  const std::int64_t nstrings = std::int64_t{1} << (2 * nsites);

  TranslationInvarianceReport rep;

  rep.state_shift = translation_criterion_report("translation_state_shift", tol);
  rep.state_shift.volumes = {1, 2};
  rep.state_shift.witness = "shift 1: " + string_repr(base, PauliString());
  for (int j = 1; j <= k; ++j) {
    const VertexWord target = root.child(static_cast<std::uint32_t>(j));
    for (std::int64_t code = 0; code < nstrings; ++code) {
      const PauliString s = basis_string(base, code);
      const cplx value = h.evaluate(RegionOperator::single(base, s, cplx(1, 0))).value;
      const PauliString shifted = reroot_string(root, target, s);
      std::vector<VertexWord> vs;
      vs.reserve(static_cast<std::size_t>(nsites));
      for (const auto& v : base.vertices()) vs.push_back(reroot(root, target, v));
      const Region shifted_region(std::move(vs));
      const cplx shifted_value =
          h.evaluate(RegionOperator::single(shifted_region, shifted, cplx(1, 0))).value;
      const double r = std::abs(shifted_value - value);
      if (r > rep.state_shift.residual) {
        rep.state_shift.residual = r;
        rep.state_shift.witness = "shift " + std::to_string(j) + ": " + string_repr(base, s);
      }
    }
  }
  rep.state_shift.pass = rep.state_shift.residual < tol;
  rep.state_shift.notes = "root shifts compared on the depth-1 basis";

  rep.subtree_restriction = translation_criterion_report("translation_subtree", tol);
  rep.subtree_restriction.volumes = {1};
  rep.subtree_restriction.witness = root.str();
  for (int level = 1; level <= 2; ++level) {
    for (const VertexWord& x : h.level_vertices(level)) {
      const QmsHandle hx = h.restrict_to_future(x);
      std::vector<VertexWord> vs;
      vs.reserve(static_cast<std::size_t>(nsites));
      for (const auto& v : base.vertices()) vs.push_back(reroot(root, x, v));
      const Region shifted_region(std::move(vs));
      for (std::int64_t code = 0; code < nstrings; ++code) {
        const PauliString s = basis_string(base, code);
        const cplx value = h.evaluate(RegionOperator::single(base, s, cplx(1, 0))).value;
        const cplx sub_value =
            hx.evaluate(RegionOperator::single(shifted_region, reroot_string(root, x, s),
                                               cplx(1, 0)))
                .value;
        const double r = std::abs(sub_value - value);
        if (r > rep.subtree_restriction.residual) {
          rep.subtree_restriction.residual = r;
          rep.subtree_restriction.witness = x.str() + ": " + string_repr(base, s);
        }
      }
    }
  }
  rep.subtree_restriction.pass = rep.subtree_restriction.residual < tol;
  rep.subtree_restriction.notes = "future restrictions at levels 1 and 2";

  rep.kernel_copies = translation_criterion_report("translation_kernel_copies", tol);
  rep.kernel_copies.witness = root.str();
  const TransitionExpectation root_kernel = h.kernel_at(root);
  const std::size_t ncodes = std::size_t{1} << (2 * (k + 1));
  for (int level = 1; level <= 2; ++level) {
    for (const VertexWord& x : h.level_vertices(level)) {
      const TransitionExpectation kernel = h.kernel_at(x);
      for (std::size_t code = 0; code < ncodes; ++code) {
        const auto& row = kernel.target_coefficients(code);
        const auto& base_row = root_kernel.target_coefficients(code);
        for (std::size_t l = 0; l < 4; ++l) {
          const double r = std::abs(row[l] - base_row[l]);
          if (r > rep.kernel_copies.residual) {
            rep.kernel_copies.residual = r;
            rep.kernel_copies.witness =
                x.str() + ": " + string_repr(kernel.source(), basis_string(kernel.source(),
                                                                           static_cast<std::int64_t>(code)));
          }
        }
      }
    }
  }
  rep.kernel_copies.pass = rep.kernel_copies.residual < tol;
  rep.kernel_copies.notes = "transfer tables compared entrywise against the root kernel";

  rep.verdicts_agree = rep.state_shift.pass == rep.subtree_restriction.pass &&
                       rep.subtree_restriction.pass == rep.kernel_copies.pass;
  rep.pass = rep.state_shift.pass && rep.subtree_restriction.pass && rep.kernel_copies.pass;
  return rep;
}

namespace {

// Shared sub-state Markov sweep: vertices of the subtree at depth <= 2
// below its root o', each with the truncated pass region P'(x) (the path
// from o' to the parent) and the full successor basis. State values come
// from the parent handle; the restriction agrees with it on the subtree
// algebra and extends by it on boundary successors.
VerificationReport sub_qms_report(const QmsHandle& h, const VertexWord& sub_root,
                                  const std::vector<VertexWord>& vertices, double tol,
                                  const std::string& notes) {
  VerificationReport r;
  r.property = "sub_qms";
  r.tolerance = tol;
  r.norm = "coefficient_sup";
  r.witness = sub_root.str();
  std::set<int> volumes;
  for (const VertexWord& x : vertices) {
    const int volume = x.level() - h.root().level() + 1;
    volumes.insert(volume);
    const MarkovSweep sweep = markov_sweep(h, h.kernel_at(x), path_to_parent(sub_root, x), volume);
    if (sweep.residual >= r.residual) {
      if (sweep.residual > r.residual || r.witness == sub_root.str()) {
        r.witness = x.str() + ": " + sweep.witness;
      }
      r.residual = sweep.residual;
    }
  }
  r.volumes.assign(volumes.begin(), volumes.end());
  r.pass = r.residual < tol;
  std::ostringstream full_notes;
  full_notes << notes << "; checked " << vertices.size()
             << " vertices at depth <= 2 below " << sub_root.str()
             << "; state values from the parent handle";
  r.notes = full_notes.str();
  return r;
}

}  // namespace

VerificationReport check_sub_qms(const QmsHandle& h, const Region& subtree, double tol) {
  const VertexWord sub_root = subtree_root(subtree);
  for (const auto& v : subtree.vertices()) {
    if (!h.root().is_prefix_of(v)) {
      throw SpecError("subtree site " + v.str() + " lies outside the handle's tree");
    }
  }
  std::vector<VertexWord> vertices;
  for (const auto& v : subtree.vertices()) {
    if (v.level() - sub_root.level() <= 2) vertices.push_back(v);
  }
  return sub_qms_report(h, sub_root, vertices, tol,
                        "subtree of " + std::to_string(subtree.size()) + " vertices");
}

VerificationReport check_sub_qms(const QmsHandle& h, const VertexWord& future_root, double tol) {
  if (!h.root().is_prefix_of(future_root)) {
    throw SpecError("vertex " + future_root.str() + " lies outside the handle's tree");
  }
  std::vector<VertexWord> vertices;
  for (int l = 0; l <= 2; ++l) {
    const Region level = subtree_level_set(future_root, l, h.branching());
    for (const auto& v : level.vertices()) vertices.push_back(v);
  }
  return sub_qms_report(h, future_root, vertices, tol, "unbounded future");
}

}  // namespace qmstree

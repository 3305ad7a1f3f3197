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

#include "qmstree/ising.hpp"

#include <cmath>
#include <sstream>

#include "qmstree/dense.hpp"

namespace qmstree::ising {

namespace {

constexpr double kCoeffTol = 1e-12;

RegionOperator pair_coupling(const VertexWord& u, const VertexWord& v, double c0, double c3) {
  const Region r({u, v});
  std::map<PauliString, cplx> terms;
  terms.emplace(PauliString(), cplx(c0, 0));
  terms.emplace(PauliString({{u, Letter::Z}, {v, Letter::Z}}), cplx(c3, 0));
  return RegionOperator(r, std::move(terms));
}

RegionOperator scalar_on(const VertexWord& v, double value) {
  return RegionOperator(Region({v}), {{PauliString(), cplx(value, 0)}});
}

}  // namespace

void validate(const ModelSpec& m) {
  if (m.beta < 0.0) throw SpecError("beta must be nonnegative");
  if (m.J < 0.0) throw SpecError("J must be nonnegative");
  if (m.k < 1) throw SpecError("tree order must be at least 1");
  if (m.depth < 0) throw SpecError("depth must be nonnegative");
}

CouplingPair build_couplings(const ModelSpec& m) {
  validate(m);
  const VertexWord o;
  const double k0 = (std::exp(m.beta) + 1.0) / 2.0;
  const double k3 = (std::exp(m.beta) - 1.0) / 2.0;
  const double r0 = (std::exp(m.J * m.beta) + 1.0) / 2.0;
  const double r3 = (std::exp(m.J * m.beta) - 1.0) / 2.0;
  return {pair_coupling(o, o.child(1), k0, k3), pair_coupling(o.child(1), o.child(2), r0, r3)};
}

ForkAmplitude build_amplitude(const ModelSpec& m) {
  validate(m);
  if (m.k != 2) throw SpecError("the fork amplitude is defined for binary forks only");
  const VertexWord o;
  const VertexWord c1 = o.child(1);
  const VertexWord c2 = o.child(2);
  const double k0 = (std::exp(m.beta) + 1.0) / 2.0;
  const double k3 = (std::exp(m.beta) - 1.0) / 2.0;
  const double r0 = (std::exp(m.J * m.beta) + 1.0) / 2.0;
  const double r3 = (std::exp(m.J * m.beta) - 1.0) / 2.0;

  ForkAmplitude a;
  a.op = multiply(multiply(pair_coupling(o, c1, k0, k3), pair_coupling(o, c2, k0, k3)),
                  pair_coupling(c1, c2, r0, r3));
  a.gamma = std::real(a.op.coefficient(PauliString()));
  a.delta = std::real(a.op.coefficient(PauliString({{o, Letter::Z}, {c1, Letter::Z}})));
  a.eta = std::real(a.op.coefficient(PauliString({{c1, Letter::Z}, {c2, Letter::Z}})));

  const double gamma_closed = k0 * k0 * r0 + k3 * k3 * r3;
  const double delta_closed = k0 * k3 * (r0 + r3);
  const double eta_closed = k0 * k0 * r3 + k3 * k3 * r0;
  const double delta_other =
      std::real(a.op.coefficient(PauliString({{o, Letter::Z}, {c2, Letter::Z}})));
  if (std::abs(a.gamma - gamma_closed) > kCoeffTol || std::abs(a.delta - delta_closed) > kCoeffTol ||
      std::abs(a.eta - eta_closed) > kCoeffTol || std::abs(a.delta - delta_other) > kCoeffTol) {
    throw SpecError("fork amplitude coefficients disagree with their closed forms");
  }
  return a;
}

double closed_form_alpha(const ModelSpec& m) {
  validate(m);
  const double e2jb = std::exp(2.0 * m.J * m.beta);
  const double e4b = std::exp(4.0 * m.beta);
  const double e2b = std::exp(2.0 * m.beta);
  return 4.0 / (e2jb * (e4b + 1.0) + 2.0 * e2b);
}

namespace {

double coeff_norm(const RegionOperator& a) {
  double sum = 0.0;
  for (const auto& [s, c] : a.terms()) sum += std::norm(c);
  return std::sqrt(sum);
}

}  // namespace

FixedPointSolution solve_fixed_point(const RegionOperator& amplitude, int max_iterations,
                                     double tol) {
  if (coeff_distance(amplitude, adjoint(amplitude)) > kDefaultTol) {
    throw SpecError("fixed-point amplitude is not self-adjoint");
  }
  const VertexWord x = subtree_root(amplitude.region());
  const Region target({x});
  std::vector<VertexWord> successors;
  for (const auto& v : amplitude.region().vertices()) {
    if (v != x) successors.push_back(v);
  }
  const RegionOperator adag = adjoint(amplitude);

  const auto iterate = [&](const RegionOperator& h) {
    RegionOperator boundary = RegionOperator::identity(target);
    for (const auto& s : successors) {
      boundary = multiply(boundary, remap_operator(h, Region({s})));
    }
    return partial_trace(multiply(adag, multiply(boundary, amplitude)), target);
  };

  RegionOperator direction = RegionOperator::identity(target);
  double residual = 0.0;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    const RegionOperator image = iterate(direction);
    const double lambda = coeff_norm(image);
    if (!std::isfinite(lambda)) {
      std::ostringstream msg;
      msg << "fixed-point iterate is not finite at iteration " << iter;
      throw SolverFailure(msg.str());
    }
    if (lambda <= tol) {
      throw SolverFailure("fixed-point map collapsed to zero");
    }
    direction = scale(cplx(1.0 / lambda, 0), image);
    const double direction_min = min_eigenvalue(to_dense(direction));
    if (direction_min < -kDefaultTol) {
      std::ostringstream msg;
      msg << "fixed-point iterate is not positive: eigenvalue " << direction_min;
      throw SolverFailure(msg.str());
    }
    // The map is quadratic, so the eigendirection rescales to the fixed
    // point: F(d/lambda) = F(d)/lambda^2 = d/lambda at convergence.
    const RegionOperator h = scale(cplx(1.0 / lambda, 0), direction);
    residual = coeff_distance(iterate(h), h);
    if (!std::isfinite(residual)) {
      std::ostringstream msg;
      msg << "fixed-point iterate is not finite at iteration " << iter;
      throw SolverFailure(msg.str());
    }
    if (residual < tol) {
      return {h, residual, iter};
    }
  }
  std::ostringstream msg;
  msg << "fixed-point solver did not converge in " << max_iterations
      << " iterations: last residual " << residual;
  throw SolverFailure(msg.str());
}

QmsHandle build_qms(const ModelSpec& m, int n_max) {
  const ForkAmplitude a = build_amplitude(m);
  const double alpha = closed_form_alpha(m);
  const VertexWord o;
  const RegionOperator weight = scalar_on(o, alpha);

  const FixedPointSolution sol = solve_fixed_point(a.op);
  if (coeff_distance(sol.h, weight) > kDefaultTol) {
    std::ostringstream msg;
    msg << "fixed-point solution disagrees with the closed-form weight by "
        << coeff_distance(sol.h, weight);
    throw SpecError(msg.str());
  }

  TransitionExpectation kernel = TransitionExpectation::from_amplitude(a.op, weight);
  return QmsHandle(o, RegionOperator::identity(Region({o})), std::move(kernel), n_max);
}

cplx evaluate_explicit_ising(const ModelSpec& m, const RegionOperator& a,
                             const DenseBudget& budget) {
  validate(m);
  if (m.k != 2) throw SpecError("the explicit product form is defined for binary forks only");
  const ForkAmplitude fork = build_amplitude(m);
  const double alpha = closed_form_alpha(m);
  const VertexWord o;
  const int n = a.region().size() == 0 ? 0 : a.region().depth();

  std::size_t interior = 0;
  for (int j = 0; j < n; ++j) interior += std::size_t{1} << j;
  if (2 * interior >= 63 ||
      (std::size_t{1} << (2 * interior)) > budget.max_product_terms) {
    std::ostringstream msg;
    msg << "explicit product over " << interior << " forks exceeds the term budget";
    throw BudgetExceeded(msg.str());
  }

  RegionOperator product = RegionOperator::identity(Region({o}));
  for (int j = 0; j < n; ++j) {
    const Region level = subtree_level_set(o, j, 2);
    for (const auto& x : level.vertices()) {
      product = multiply(product, shift_operator(x, fork.op));
    }
  }

  cplx total(0, 0);
  for (const auto& [s, c] : a.terms()) {
    if (!s.diagonal()) continue;  // off-diagonal letters survive conjugation and trace to zero
    cplx acc(0, 0);
    for (const auto& [t, ct] : product.terms()) {
      const StringProduct tu = string_product(t, s);
      acc += ct * std::conj(product.coefficient(tu.string));
    }
    total += c * acc;
  }
  return std::pow(alpha, static_cast<double>(interior)) * total;
}

}  // namespace qmstree::ising

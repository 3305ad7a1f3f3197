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

#include "qmstree/pauli.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <stdexcept>

namespace qmstree {

namespace {

// result letter of a*b, indexed [a][b]
constexpr std::uint8_t kProdLetter[4][4] = {
    {0, 1, 2, 3},
    {1, 0, 3, 2},
    {2, 3, 0, 1},
    {3, 2, 1, 0},
};

// power of i in a*b, indexed [a][b]: X*Y = iZ, Y*Z = iX, Z*X = iY, reversed -> -i
constexpr std::uint8_t kProdPhase[4][4] = {
    {0, 0, 0, 0},
    {0, 0, 1, 3},
    {0, 3, 0, 1},
    {0, 1, 3, 0},
};

constexpr cplx kPhases[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};

}  // namespace

char letter_char(Letter l) {
  switch (l) {
    case Letter::I: return 'I';
    case Letter::X: return 'X';
    case Letter::Y: return 'Y';
    case Letter::Z: return 'Z';
  }
  throw std::invalid_argument("bad letter");
}

Letter letter_parse(char c) {
  switch (c) {
    case 'I': return Letter::I;
    case 'X': return Letter::X;
    case 'Y': return Letter::Y;
    case 'Z': return Letter::Z;
    default: throw std::invalid_argument(std::string("bad Pauli letter: '") + c + "'");
  }
}

LetterProduct letter_product(Letter a, Letter b) {
  auto ia = static_cast<std::uint8_t>(a);
  auto ib = static_cast<std::uint8_t>(b);
  return {static_cast<Letter>(kProdLetter[ia][ib]), kPhases[kProdPhase[ia][ib]]};
}

PauliString::PauliString(std::vector<std::pair<VertexWord, Letter>> factors)
    : factors_(std::move(factors)) {
  std::erase_if(factors_, [](const auto& p) { return p.second == Letter::I; });
  std::sort(factors_.begin(), factors_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < factors_.size(); ++i) {
    if (factors_[i - 1].first == factors_[i].first) {
      throw std::invalid_argument("duplicate vertex in Pauli string: " + factors_[i].first.str());
    }
  }
}

PauliString PauliString::single(const VertexWord& v, Letter l) {
  if (l == Letter::I) return PauliString();
  return PauliString({{v, l}});
}

Letter PauliString::at(const VertexWord& v) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), v,
                             [](const auto& p, const VertexWord& x) { return p.first < x; });
  if (it != factors_.end() && it->first == v) return it->second;
  return Letter::I;
}

Region PauliString::support() const {
  std::vector<VertexWord> vs;
  vs.reserve(factors_.size());
  for (const auto& [v, l] : factors_) vs.push_back(v);
  return Region(std::move(vs));
}

bool PauliString::diagonal() const {
  return std::all_of(factors_.begin(), factors_.end(),
                     [](const auto& p) { return p.second == Letter::Z; });
}

std::string PauliString::str() const {
  if (factors_.empty()) return "id";
  std::string out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) out += ' ';
    out += letter_char(factors_[i].second);
    out += '(';
    out += factors_[i].first.str();
    out += ')';
  }
  return out;
}

StringProduct string_product(const PauliString& a, const PauliString& b) {
  std::vector<std::pair<VertexWord, Letter>> out;
  out.reserve(a.factors().size() + b.factors().size());
  cplx phase(1, 0);
  auto ia = a.factors().begin(), ea = a.factors().end();
  auto ib = b.factors().begin(), eb = b.factors().end();
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && ia->first < ib->first)) {
      out.push_back(*ia++);
    } else if (ia == ea || ib->first < ia->first) {
      out.push_back(*ib++);
    } else {
      LetterProduct p = letter_product(ia->second, ib->second);
      phase *= p.phase;
      if (p.letter != Letter::I) out.emplace_back(ia->first, p.letter);
      ++ia;
      ++ib;
    }
  }
  return {PauliString(std::move(out)), phase};
}

PauliString shift_string(const VertexWord& by, const PauliString& s) {
  std::vector<std::pair<VertexWord, Letter>> out;
  out.reserve(s.factors().size());
  for (const auto& [v, l] : s.factors()) out.emplace_back(by.concat(v), l);
  return PauliString(std::move(out));
}

RegionOperator::RegionOperator(Region region, std::map<PauliString, cplx> terms)
    : region_(std::move(region)), terms_(std::move(terms)) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == cplx(0, 0)) {
      it = terms_.erase(it);
      continue;
    }
    if (!it->first.support().subset_of(region_)) {
      throw std::invalid_argument("term '" + it->first.str() + "' is not supported in the region");
    }
    ++it;
  }
}

RegionOperator RegionOperator::zero(Region region) { return RegionOperator(std::move(region), {}); }

RegionOperator RegionOperator::identity(Region region) {
  return RegionOperator(std::move(region), {{PauliString(), cplx(1, 0)}});
}

RegionOperator RegionOperator::single(Region region, const PauliString& s, cplx coeff) {
  return RegionOperator(std::move(region), {{s, coeff}});
}

cplx RegionOperator::coefficient(const PauliString& s) const {
  auto it = terms_.find(s);
  return it == terms_.end() ? cplx(0, 0) : it->second;
}

bool RegionOperator::diagonal() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.first.diagonal(); });
}

std::string RegionOperator::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [s, c] : terms_) {
    if (!first) out << " + ";
    first = false;
    out << "(" << c.real();
    if (c.imag() != 0.0) out << (c.imag() < 0 ? "" : "+") << c.imag() << "i";
    out << ")*" << s.str();
  }
  return out.str();
}

RegionOperator multiply(const RegionOperator& a, const RegionOperator& b) {
  std::map<PauliString, cplx> out;
  for (const auto& [sa, ca] : a.terms()) {
    for (const auto& [sb, cb] : b.terms()) {
      StringProduct p = string_product(sa, sb);
      cplx c = ca * cb * p.phase;
      auto [it, inserted] = out.emplace(std::move(p.string), c);
      if (!inserted) {
        it->second += c;
        if (it->second == cplx(0, 0)) out.erase(it);
      }
    }
  }
  return RegionOperator(Region::join(a.region(), b.region()), std::move(out));
}

RegionOperator add(const RegionOperator& a, const RegionOperator& b) {
  std::map<PauliString, cplx> out = a.terms();
  for (const auto& [s, c] : b.terms()) {
    auto [it, inserted] = out.emplace(s, c);
    if (!inserted) {
      it->second += c;
      if (it->second == cplx(0, 0)) out.erase(it);
    }
  }
  return RegionOperator(Region::join(a.region(), b.region()), std::move(out));
}

RegionOperator subtract(const RegionOperator& a, const RegionOperator& b) {
  return add(a, scale(cplx(-1, 0), b));
}

RegionOperator scale(cplx c, const RegionOperator& a) {
  if (c == cplx(0, 0)) return RegionOperator::zero(a.region());
  std::map<PauliString, cplx> out = a.terms();
  for (auto& [s, v] : out) v *= c;
  return RegionOperator(a.region(), std::move(out));
}

RegionOperator adjoint(const RegionOperator& a) {
  std::map<PauliString, cplx> out = a.terms();
  for (auto& [s, v] : out) v = std::conj(v);
  return RegionOperator(a.region(), std::move(out));
}

cplx normalized_trace(const RegionOperator& a) { return a.coefficient(PauliString()); }

RegionOperator partial_trace(const RegionOperator& a, const Region& keep) {
  if (!keep.subset_of(a.region())) {
    throw std::invalid_argument("partial_trace: keep set is not inside the region");
  }
  std::map<PauliString, cplx> out;
  for (const auto& [s, c] : a.terms()) {
    if (s.support().subset_of(keep)) out.emplace(s, c);
  }
  return RegionOperator(keep, std::move(out));
}

RegionOperator embed(const RegionOperator& a, const Region& into) {
  if (!a.region().subset_of(into)) {
    throw std::invalid_argument("embed: region is not inside the target region");
  }
  return RegionOperator(into, a.terms());
}

RegionOperator shift_operator(const VertexWord& by, const RegionOperator& a) {
  std::vector<VertexWord> vs;
  vs.reserve(a.region().size());
  for (const auto& v : a.region().vertices()) vs.push_back(by.concat(v));
  std::map<PauliString, cplx> out;
  for (const auto& [s, c] : a.terms()) out.emplace(shift_string(by, s), c);
  return RegionOperator(Region(std::move(vs)), std::move(out));
}

RegionOperator remap_operator(const RegionOperator& a, const Region& to) {
  if (a.region().size() != to.size()) {
    throw std::invalid_argument("remap_operator: regions differ in size");
  }
  std::map<PauliString, cplx> out;
  for (const auto& [s, c] : a.terms()) {
    std::vector<std::pair<VertexWord, Letter>> factors;
    factors.reserve(s.factors().size());
    for (const auto& [vertex, letter] : s.factors()) {
      const int pos = a.region().index_of(vertex);
      factors.emplace_back(to.vertices()[static_cast<std::size_t>(pos)], letter);
    }
    out.emplace(PauliString(std::move(factors)), c);
  }
  return RegionOperator(to, std::move(out));
}

double coeff_distance(const RegionOperator& a, const RegionOperator& b) {
  double worst = 0.0;
  for (const auto& [s, c] : a.terms()) worst = std::max(worst, std::abs(c - b.coefficient(s)));
  for (const auto& [s, c] : b.terms()) worst = std::max(worst, std::abs(c - a.coefficient(s)));
  return worst;
}

bool approx_equal(const RegionOperator& a, const RegionOperator& b, double tol) {
  return coeff_distance(a, b) <= tol;
}

}  // namespace qmstree

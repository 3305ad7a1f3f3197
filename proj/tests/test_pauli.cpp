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

#include <qmstree/pauli.hpp>
#include <random>

#include "oracle.hpp"

using qmstree::cplx;
using qmstree::Letter;
using qmstree::PauliString;
using qmstree::Region;
using qmstree::RegionOperator;
using qmstree::VertexWord;

namespace {

const char kLetters[] = "IXYZ";

// Dense form of `a` against the canonical site order of its region,
// built with the oracle's kron route only.
oracle::Mat oracle_dense(const RegionOperator& a) {
  const auto& vs = a.region().vertices();
  const long dim = 1L << vs.size();
  oracle::Mat out = oracle::Mat::Zero(dim, dim);
  for (const auto& [s, c] : a.terms()) {
    std::string letters;
    for (const auto& v : vs) letters += qmstree::letter_char(s.at(v));
    out += c * oracle::string_dense(letters);
  }
  return out;
}

RegionOperator random_operator(const Region& region, std::mt19937_64& rng, int nterms) {
  std::uniform_int_distribution<int> letter(0, 3);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::map<PauliString, cplx> terms;
  for (int t = 0; t < nterms; ++t) {
    std::vector<std::pair<VertexWord, Letter>> factors;
    for (const auto& v : region.vertices()) {
      const int l = letter(rng);
      if (l != 0) factors.emplace_back(v, static_cast<Letter>(l));
    }
    terms[PauliString(std::move(factors))] += cplx(coeff(rng), coeff(rng));
  }
  return RegionOperator(region, std::move(terms));
}

Region three_sites() {
  return Region({VertexWord::root(), VertexWord::parse("1"), VertexWord::parse("2.1")});
}

}  // namespace

TEST_CASE("letter product table matches dense multiplication") {
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const auto p = qmstree::letter_product(static_cast<Letter>(a), static_cast<Letter>(b));
      const oracle::Mat lhs = oracle::letter_mat(kLetters[a]) * oracle::letter_mat(kLetters[b]);
      const oracle::Mat rhs =
          p.phase * oracle::letter_mat(qmstree::letter_char(p.letter));
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("letter parsing") {
  CHECK(qmstree::letter_parse('X') == Letter::X);
  CHECK(qmstree::letter_char(Letter::Z) == 'Z');
  CHECK_THROWS_AS(qmstree::letter_parse('Q'), std::invalid_argument);
}

TEST_CASE("pauli strings canonicalize") {
  const VertexWord o = VertexWord::root();
  const VertexWord v1 = VertexWord::parse("1");
  const PauliString s({{v1, Letter::X}, {o, Letter::Z}, {VertexWord::parse("2"), Letter::I}});
  REQUIRE(s.factors().size() == 2);  // identity factors are stripped
  CHECK(s.factors()[0].first == o);  // sorted by vertex
  CHECK(s.at(o) == Letter::Z);
  CHECK(s.at(VertexWord::parse("7")) == Letter::I);
  CHECK_FALSE(s.diagonal());
  CHECK(PauliString({{o, Letter::Z}, {v1, Letter::Z}}).diagonal());
  CHECK(PauliString().is_identity());
  CHECK_THROWS_AS(PauliString({{o, Letter::X}, {o, Letter::Z}}), std::invalid_argument);

  const auto single = PauliString::single(v1, Letter::Y);
  CHECK(single.support().vertices() == std::vector<VertexWord>{v1});
}

TEST_CASE("string products carry the right phases") {
  std::mt19937_64 rng(11);
  const Region region = three_sites();
  for (int trial = 0; trial < 50; ++trial) {
    const RegionOperator a = random_operator(region, rng, 1);
    const RegionOperator b = random_operator(region, rng, 1);
    if (a.term_count() == 0 || b.term_count() == 0) continue;
    const PauliString sa = a.terms().begin()->first;
    const PauliString sb = b.terms().begin()->first;
    const auto p = qmstree::string_product(sa, sb);
    const oracle::Mat lhs = oracle_dense(RegionOperator::single(region, sa, cplx(1, 0))) *
                            oracle_dense(RegionOperator::single(region, sb, cplx(1, 0)));
    const oracle::Mat rhs = oracle_dense(RegionOperator::single(region, p.string, p.phase));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("region operators enforce their invariants") {
  const Region region({VertexWord::root(), VertexWord::parse("1")});
  // Zero coefficients are pruned.
  const RegionOperator a(region, {{PauliString(), cplx(0, 0)},
                                  {PauliString::single(VertexWord::root(), Letter::Z), cplx(2, 0)}});
  CHECK(a.term_count() == 1);
  CHECK(a.coefficient(PauliString()) == cplx(0, 0));
  // Terms must stay inside the region.
  CHECK_THROWS_AS(
      RegionOperator(region, {{PauliString::single(VertexWord::parse("3"), Letter::X), cplx(1, 0)}}),
      std::invalid_argument);
  CHECK(RegionOperator::identity(region).coefficient(PauliString()) == cplx(1, 0));
  CHECK(RegionOperator::zero(region).term_count() == 0);
  CHECK(a.diagonal());
}

TEST_CASE("algebra operations agree with the dense oracle") {
  std::mt19937_64 rng(12);
  const Region region = three_sites();
  for (int trial = 0; trial < 20; ++trial) {
    const RegionOperator a = random_operator(region, rng, 6);
    const RegionOperator b = random_operator(region, rng, 6);
    const oracle::Mat da = oracle_dense(a);
    const oracle::Mat db = oracle_dense(b);
    CHECK((oracle_dense(qmstree::multiply(a, b)) - da * db).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((oracle_dense(qmstree::add(a, b)) - (da + db)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((oracle_dense(qmstree::subtract(a, b)) - (da - db)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((oracle_dense(qmstree::scale(cplx(0, 2), a)) - cplx(0, 2) * da).cwiseAbs().maxCoeff() <
          1e-13);
    CHECK((oracle_dense(qmstree::adjoint(a)) - da.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::abs(qmstree::normalized_trace(a) - oracle::ntrace(da)) < 1e-13);
  }
}

TEST_CASE("multiplication joins regions") {
  const VertexWord o = VertexWord::root();
  const VertexWord v1 = VertexWord::parse("1");
  const RegionOperator a = RegionOperator::single(
      Region({o}), PauliString::single(o, Letter::Z), cplx(1, 0));
  const RegionOperator b = RegionOperator::single(
      Region({v1}), PauliString::single(v1, Letter::Z), cplx(1, 0));
  const RegionOperator ab = qmstree::multiply(a, b);
  CHECK(ab.region().size() == 2);
  CHECK(ab.coefficient(PauliString({{o, Letter::Z}, {v1, Letter::Z}})) == cplx(1, 0));
}

TEST_CASE("partial trace agrees with the dense oracle") {
  std::mt19937_64 rng(13);
  const Region region = three_sites();
  const Region keep({VertexWord::root(), VertexWord::parse("2.1")});
  for (int trial = 0; trial < 20; ++trial) {
    const RegionOperator a = random_operator(region, rng, 8);
    const RegionOperator traced = qmstree::partial_trace(a, keep);
    CHECK(traced.region() == keep);
    const oracle::Mat expected = oracle::ptrace_keep(oracle_dense(a), 3, {0, 2});
    CHECK((oracle_dense(traced) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(qmstree::partial_trace(random_operator(region, rng, 2),
                                         Region({VertexWord::parse("9")})),
                  std::invalid_argument);
}

TEST_CASE("embed pads with identity") {
  const Region small({VertexWord::root()});
  const Region big = three_sites();
  const RegionOperator a =
      RegionOperator::single(small, PauliString::single(VertexWord::root(), Letter::X), cplx(3, 0));
  const RegionOperator padded = qmstree::embed(a, big);
  CHECK(padded.region() == big);
  CHECK((oracle_dense(padded) - 3.0 * oracle::string_dense("XII")).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(qmstree::embed(padded, small), std::invalid_argument);
}

TEST_CASE("shift and remap relabel sites") {
  const VertexWord o = VertexWord::root();
  const VertexWord v2 = VertexWord::parse("2");
  const RegionOperator a = RegionOperator(
      Region({o, VertexWord::parse("1")}),
      {{PauliString({{o, Letter::Z}, {VertexWord::parse("1"), Letter::X}}), cplx(1, 1)}});

  const RegionOperator shifted = qmstree::shift_operator(v2, a);
  CHECK(shifted.region() ==
        Region({v2, VertexWord::parse("2.1")}));
  CHECK(shifted.coefficient(PauliString(
            {{v2, Letter::Z}, {VertexWord::parse("2.1"), Letter::X}})) == cplx(1, 1));

  const Region to({VertexWord::parse("3"), VertexWord::parse("3.1")});
  const RegionOperator remapped = qmstree::remap_operator(a, to);
  CHECK(remapped.coefficient(PauliString(
            {{VertexWord::parse("3"), Letter::Z}, {VertexWord::parse("3.1"), Letter::X}})) ==
        cplx(1, 1));
  CHECK_THROWS_AS(qmstree::remap_operator(a, Region({o})), std::invalid_argument);
}

TEST_CASE("coefficient distance and approximate equality") {
  const Region region({VertexWord::root()});
  const RegionOperator a = RegionOperator::identity(region);
  const RegionOperator b = qmstree::add(
      a, RegionOperator::single(region, PauliString::single(VertexWord::root(), Letter::Z),
                                cplx(1e-12, 0)));
  CHECK(qmstree::coeff_distance(a, b) == doctest::Approx(1e-12));
  CHECK(qmstree::approx_equal(a, b, 1e-9));
  CHECK_FALSE(qmstree::approx_equal(a, qmstree::scale(cplx(2, 0), a), 1e-9));
}

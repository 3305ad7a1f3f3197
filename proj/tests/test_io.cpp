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

#include <qmstree/io.hpp>
#include <qmstree/verify.hpp>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>

using nlohmann::json;
using qmstree::cplx;
using qmstree::Letter;
using qmstree::PauliString;
using qmstree::QmsHandle;
using qmstree::Region;
using qmstree::RegionOperator;
using qmstree::VertexWord;
namespace io = qmstree::io;
namespace ising = qmstree::ising;

namespace {

std::filesystem::path scratch_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / "qmstree_io_test";
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_scratch(const std::string& name, const std::string& text) {
  const auto path = scratch_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const char* kIsingModel =
    R"({"type": "ising_competing", "beta": 0.6931471805599453, "J": 0.0, "k": 2, "depth": 3})";

std::string custom_model(double weight_factor, bool raw) {
  const ising::ModelSpec spec{std::log(2.0), 0.0, 2, 3};
  const RegionOperator amp = ising::build_amplitude(spec).op;
  const double alpha = ising::closed_form_alpha(spec);
  const RegionOperator weight = RegionOperator::single(
      Region({VertexWord::root()}), PauliString(), cplx(weight_factor * alpha, 0));
  json doc{{"type", "custom"},
           {"amplitude", json::parse(io::operator_to_json(amp))},
           {"weight", json::parse(io::operator_to_json(weight))}};
  if (raw) doc["raw"] = true;
  return doc.dump();
}

std::string zz_observable(int volume = -1) {
  json doc{{"operator",
            json{{"region", json::array({"o", "1"})},
                 {"terms", json::array({json{{"coefficient", json::array({1.0, 0.0})},
                                             {"letters", json{{"o", "Z"}, {"1", "Z"}}}}})}}}};
  if (volume >= 0) doc["volume"] = volume;
  return doc.dump();
}

RegionOperator random_operator(std::mt19937_64& rng) {
  const Region region({VertexWord::root(), VertexWord::parse("1"), VertexWord::parse("1.2")});
  std::uniform_int_distribution<int> letter(0, 3);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::map<PauliString, cplx> terms;
  for (int t = 0; t < 5; ++t) {
    std::vector<std::pair<VertexWord, Letter>> factors;
    for (const auto& v : region.vertices()) {
      const int l = letter(rng);
      if (l != 0) factors.emplace_back(v, static_cast<Letter>(l));
    }
    terms[PauliString(std::move(factors))] += cplx(coeff(rng), coeff(rng));
  }
  return RegionOperator(region, std::move(terms));
}

}  // namespace

TEST_CASE("operator documents round-trip exactly") {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    const RegionOperator a = random_operator(rng);
    const std::string text = io::operator_to_json(a);
    const RegionOperator back = io::parse_operator(text);
    CHECK(back.region() == a.region());
    CHECK(qmstree::coeff_distance(a, back) == 0.0);
    // Serialization is canonical: a second round trip is byte-identical.
    CHECK(io::operator_to_json(back) == text);
  }
}

TEST_CASE("operator parsing rejects malformed documents by name") {
  CHECK_THROWS_WITH_AS(io::parse_operator("not json"), doctest::Contains("malformed operator"),
                       qmstree::SpecError);
  CHECK_THROWS_WITH_AS(io::parse_operator(R"({"terms": []})"),
                       doctest::Contains(R"(missing field "region")"), qmstree::SpecError);
  CHECK_THROWS_WITH_AS(io::parse_operator(R"({"region": [], "terms": []})"),
                       doctest::Contains("nonempty array"), qmstree::SpecError);
  CHECK_THROWS_WITH_AS(io::parse_operator(R"({"region": ["o"], "terms": [], "extra": 1})"),
                       doctest::Contains(R"(unknown field "extra")"), qmstree::SpecError);
  CHECK_THROWS_WITH_AS(
      io::parse_operator(
          R"({"region": ["o"], "terms": [{"coefficient": [1, 0], "letters": {"o": "Q"}}]})"),
      doctest::Contains(R"(must be one of "I","X","Y","Z")"), qmstree::SpecError);
  CHECK_THROWS_WITH_AS(
      io::parse_operator(
          R"({"region": ["o"], "terms": [{"coefficient": [1, 0], "letters": {"1": "Z"}}]})"),
      doctest::Contains("outside the declared region"), qmstree::SpecError);
  CHECK_THROWS_WITH_AS(
      io::parse_operator(R"({"region": ["o"], "terms": [{"coefficient": 1, "letters": {}}]})"),
      doctest::Contains("[real, imaginary] pair"), qmstree::SpecError);
  CHECK_THROWS_WITH_AS(io::parse_operator(R"({"region": ["bad..x"], "terms": []})"),
                       doctest::Contains("bad vertex"), qmstree::SpecError);

  // Duplicate terms accumulate instead of erroring.
  const RegionOperator dup = io::parse_operator(
      R"({"region": ["o"], "terms": [
        {"coefficient": [1, 0], "letters": {"o": "Z"}},
        {"coefficient": [2, 0], "letters": {"o": "Z"}}]})");
  CHECK(std::abs(dup.coefficient(PauliString::single(VertexWord::root(), Letter::Z)) -
                 cplx(3, 0)) < 1e-15);
}

TEST_CASE("model specs parse strictly") {
  const io::ParsedModel m = io::parse_model_spec(kIsingModel);
  CHECK(m.type == "ising_competing");
  CHECK(m.ising.beta == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(m.beta_grid == std::vector<double>{m.ising.beta});
  CHECK(m.j_grid == std::vector<double>{0.0});

  const io::ParsedModel grid = io::parse_model_spec(
      R"({"type": "ising_competing", "beta": 1.0, "J": 0.5, "k": 2, "depth": 3,
          "beta_grid": [0.0, 1.0], "J_grid": [0.5, 1.5, 2.5]})");
  CHECK(grid.beta_grid == std::vector<double>{0.0, 1.0});
  CHECK(grid.j_grid == std::vector<double>{0.5, 1.5, 2.5});

  CHECK_THROWS_WITH_AS(io::parse_model_spec("[]"), doctest::Contains("must be an object"),
                       qmstree::SpecError);
  CHECK_THROWS_WITH_AS(io::parse_model_spec(R"({"beta": 1.0})"),
                       doctest::Contains(R"(missing field "type")"), qmstree::SpecError);
  CHECK_THROWS_WITH_AS(io::parse_model_spec(R"({"type": 3})"),
                       doctest::Contains(R"(field "type" in model spec must be a string)"),
                       qmstree::SpecError);
  CHECK_THROWS_WITH_AS(io::parse_model_spec(R"({"type": "other"})"),
                       doctest::Contains(R"("ising_competing" or "custom")"), qmstree::SpecError);
  CHECK_THROWS_WITH_AS(
      io::parse_model_spec(
          R"({"type": "ising_competing", "beta": 1.0, "J": 0.0, "k": 2, "depth": 3, "kk": 1})"),
      doctest::Contains(R"(unknown field "kk" in model spec)"), qmstree::SpecError);
  CHECK_THROWS_WITH_AS(
      io::parse_model_spec(R"({"type": "ising_competing", "J": 0.0, "k": 2, "depth": 3})"),
      doctest::Contains(R"(missing field "beta")"), qmstree::SpecError);
  CHECK_THROWS_WITH_AS(
      io::parse_model_spec(
          R"({"type": "ising_competing", "beta": 1.0, "J": 0.0, "k": 2, "depth": 3,
              "beta_grid": [-1.0]})"),
      doctest::Contains(R"("beta_grid" in model spec must be nonnegative)"), qmstree::SpecError);
  CHECK_THROWS_WITH_AS(
      io::parse_model_spec(
          R"({"type": "ising_competing", "beta": 1.0, "J": 0.0, "k": 2, "depth": 3,
              "beta_grid": []})"),
      doctest::Contains("nonempty array of numbers"), qmstree::SpecError);

  const io::ParsedModel custom = io::parse_model_spec(custom_model(1.0, false));
  CHECK(custom.type == "custom");
  CHECK_FALSE(custom.raw);
  CHECK(custom.amplitude.region().size() == 3);
  const io::ParsedModel raw = io::parse_model_spec(custom_model(1.1, true));
  CHECK(raw.raw);
}

TEST_CASE("observable specs carry an optional volume") {
  const io::ParsedObservable plain = io::parse_observable(zz_observable());
  CHECK(plain.volume == -1);
  CHECK(plain.op.terms().size() == 1);
  const io::ParsedObservable deep = io::parse_observable(zz_observable(3));
  CHECK(deep.volume == 3);
  CHECK_THROWS_WITH_AS(io::parse_observable(R"({"volume": 1})"),
                       doctest::Contains(R"(missing field "operator")"), qmstree::SpecError);
  CHECK_THROWS_WITH_AS(
      io::parse_observable(R"({"operator": {"region": ["o"], "terms": []}, "volume": 1.5})"),
      doctest::Contains(R"("volume" in observable spec must be an integer)"), qmstree::SpecError);
}

TEST_CASE("handles are built from parsed models") {
  const QmsHandle ising_handle = io::build_handle(io::parse_model_spec(kIsingModel), 4);
  CHECK(ising_handle.certified());
  CHECK(ising_handle.n_max() == 4);

  const QmsHandle validated = io::build_handle(io::parse_model_spec(custom_model(1.0, false)), 4);
  CHECK(validated.certified());

  const QmsHandle raw = io::build_handle(io::parse_model_spec(custom_model(1.1, true)), 4);
  CHECK_FALSE(raw.certified());

  // A weight breaking identity preservation is rejected unless raw.
  CHECK_THROWS_WITH_AS(io::build_handle(io::parse_model_spec(custom_model(1.1, false)), 4),
                       doctest::Contains("not identity preserving"), qmstree::SpecError);
}

TEST_CASE("evaluate writes a deterministic report") {
  io::RunConfig config;
  config.command = "evaluate";
  config.model_path = write_scratch("model.json", kIsingModel);
  config.observable_path = write_scratch("obs.json", zz_observable(2));
  config.out_path = (scratch_dir() / "report.json").string();
  CHECK(io::run(config) == io::kExitOk);

  const std::string first = slurp(config.out_path);
  const json doc = json::parse(first);
  CHECK(doc["header"]["tool"] == "qmstree");
  CHECK(doc["header"]["format_version"] == 1);
  CHECK(doc["body"]["command"] == "evaluate");
  const json& results = doc["body"]["results"];
  REQUIRE(results.size() == 2);
  CHECK(std::abs(results[0]["value"][0].get<double>() - 0.6) < 1e-12);
  CHECK(results[0]["value"][1].get<double>() == 0.0);
  CHECK(results[0]["path"] == "localized");
  CHECK(results[0]["fallback"] == false);
  CHECK(results[0]["volume"] == 1);
  CHECK(results[1]["path"] == "nested");
  CHECK(results[1]["volume"] == 2);
  CHECK(std::abs(results[1]["value"][0].get<double>() - 0.6) < 1e-12);

  // Byte-identical on a second run.
  CHECK(io::run(config) == io::kExitOk);
  CHECK(slurp(config.out_path) == first);
}

TEST_CASE("verify reports every certificate") {
  io::RunConfig config;
  config.command = "verify";
  config.model_path = write_scratch("model.json", kIsingModel);
  config.out_path = (scratch_dir() / "verify.json").string();
  CHECK(io::run(config) == io::kExitOk);

  const json doc = json::parse(slurp(config.out_path));
  CHECK(doc["body"]["all_pass"] == true);
  const json& reports = doc["body"]["reports"];
  std::vector<std::string> properties;
  for (const auto& r : reports) {
    properties.push_back(r["property"].get<std::string>());
    CHECK(r["pass"] == true);
  }
  const std::vector<std::string> expected = {
      "localized_markov", "localized_markov", "localized_markov",
      "level_markov",     "level_markov",     "potential_commutation",
      "translation_state_shift", "translation_subtree", "translation_kernel_copies",
      "sub_qms"};
  CHECK(properties == expected);
}

TEST_CASE("verification failures exit with the verification code") {
  io::RunConfig config;
  config.command = "verify";
  config.model_path = write_scratch("perturbed.json", custom_model(1.1, true));
  config.out_path = (scratch_dir() / "verify_fail.json").string();
  CHECK(io::run(config) == io::kExitVerification);
  const json doc = json::parse(slurp(config.out_path));
  CHECK(doc["body"]["all_pass"] == false);
}

TEST_CASE("budget aborts exit with the budget code") {
  io::RunConfig config;
  config.command = "verify";
  config.model_path = write_scratch("model.json", kIsingModel);
  config.out_path = (scratch_dir() / "budget.json").string();
  config.dense_budget = 3;
  CHECK(io::run(config) == io::kExitBudget);
}

TEST_CASE("fixpoint exits by solution quality") {
  io::RunConfig config;
  config.command = "fixpoint";
  config.model_path = write_scratch("model.json", kIsingModel);
  config.out_path = (scratch_dir() / "fixpoint.json").string();
  CHECK(io::run(config) == io::kExitOk);
  const json doc = json::parse(slurp(config.out_path));
  CHECK(std::abs(doc["body"]["alpha_solver"].get<double>() - 0.16) < 1e-12);
  CHECK(std::abs(doc["body"]["alpha_closed_form"].get<double>() - 0.16) < 1e-12);
  CHECK(doc["body"]["all_pass"] == true);

  // The solver and closed form agree to double precision but not exactly
  // at this point, so an unreachable tolerance flags a failure.
  io::RunConfig strict = config;
  strict.model_path = write_scratch(
      "strict.json",
      R"({"type": "ising_competing", "beta": 0.7, "J": 1.0, "k": 2, "depth": 3})");
  strict.tol = 1e-19;
  CHECK(io::run(strict) == io::kExitVerification);

  // A vanishing amplitude is a solver failure.
  json zero{{"type", "custom"},
            {"amplitude",
             json{{"region", json::array({"o", "1", "2"})}, {"terms", json::array()}}},
            {"weight", json::parse(io::operator_to_json(RegionOperator::identity(
                           Region({VertexWord::root()}))))},
            {"raw", true}};
  io::RunConfig failing = config;
  failing.model_path = write_scratch("zero.json", zero.dump());
  CHECK(io::run(failing) == io::kExitSolver);
}

TEST_CASE("sweep exits by grid outcome") {
  io::RunConfig config;
  config.command = "sweep";
  config.out_path = (scratch_dir() / "sweep.json").string();
  config.model_path = write_scratch(
      "sweep.json",
      R"({"type": "ising_competing", "beta": 1.0, "J": 0.0, "k": 2, "depth": 3,
          "beta_grid": [0.0, 0.5, 1.0], "J_grid": [0.0, 1.0]})");
  CHECK(io::run(config) == io::kExitOk);
  const json doc = json::parse(slurp(config.out_path));
  CHECK(doc["body"]["points"].size() == 6);
  for (const auto& p : doc["body"]["points"]) {
    CHECK(p["pass"] == true);
    CHECK(std::abs(p["alpha_solver"].get<double>() - p["alpha_closed_form"].get<double>()) <
          1e-11);
  }

  io::RunConfig strict = config;
  strict.model_path = write_scratch(
      "sweep_strict.json",
      R"({"type": "ising_competing", "beta": 0.7, "J": 1.0, "k": 2, "depth": 3})");
  strict.tol = 1e-19;
  CHECK(io::run(strict) == io::kExitVerification);

  io::RunConfig overflow = config;
  overflow.model_path = write_scratch(
      "sweep_overflow.json",
      R"({"type": "ising_competing", "beta": 1.0, "J": 0.0, "k": 2, "depth": 3,
          "beta_grid": [300.0]})");
  CHECK(io::run(overflow) == io::kExitSolver);
  const json odoc = json::parse(slurp(config.out_path));
  CHECK(odoc["body"]["points"][0]["error"].get<std::string>().find("not finite") !=
        std::string::npos);

  io::RunConfig wrong = config;
  wrong.model_path = write_scratch("custom.json", custom_model(1.0, false));
  CHECK(io::run(wrong) == io::kExitConfig);
}

TEST_CASE("configuration errors exit with the config code") {
  io::RunConfig config;
  config.command = "evaluate";
  config.model_path = write_scratch("model.json", kIsingModel);
  config.observable_path = write_scratch("obs.json", zz_observable());
  config.out_path = (scratch_dir() / "cfg.json").string();

  io::RunConfig bad = config;
  bad.command = "explain";
  CHECK(io::run(bad) == io::kExitConfig);

  bad = config;
  bad.tol = 0.0;
  CHECK(io::run(bad) == io::kExitConfig);

  bad = config;
  bad.n_max = 0;
  CHECK(io::run(bad) == io::kExitConfig);

  bad = config;
  bad.model_path.clear();
  CHECK(io::run(bad) == io::kExitConfig);

  bad = config;
  bad.model_path = (scratch_dir() / "missing.json").string();
  CHECK(io::run(bad) == io::kExitConfig);

  bad = config;
  bad.model_path = write_scratch("broken.json", "{not json");
  CHECK(io::run(bad) == io::kExitConfig);

  bad = config;
  bad.observable_path.clear();
  CHECK(io::run(bad) == io::kExitConfig);

  // The observable must fit the depth horizon.
  bad = config;
  bad.n_max = 6;
  bad.observable_path = write_scratch("deep_obs.json", zz_observable(9));
  CHECK(io::run(bad) == io::kExitConfig);
}

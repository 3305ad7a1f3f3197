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

#include "qmstree/io.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qmstree/verify.hpp"

namespace qmstree::io {

namespace {

using nlohmann::json;

void require_known_fields(const json& obj, const std::string& what,
                          std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* key) { return it.key() == key; });
    if (!known) {
      throw SpecError("unknown field \"" + it.key() + "\" in " + what);
    }
  }
}

const json& require_field(const json& obj, const std::string& what, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw SpecError(what + " is missing field \"" + key + "\"");
  }
  return *it;
}

double number_field(const json& obj, const std::string& what, const char* key) {
  const json& v = require_field(obj, what, key);
  if (!v.is_number()) {
    throw SpecError("field \"" + std::string(key) + "\" in " + what + " must be a number");
  }
  return v.get<double>();
}

int int_field(const json& obj, const std::string& what, const char* key) {
  const json& v = require_field(obj, what, key);
  if (!v.is_number_integer()) {
    throw SpecError("field \"" + std::string(key) + "\" in " + what + " must be an integer");
  }
  return v.get<int>();
}

std::vector<double> grid_field(const json& obj, const std::string& what, const char* key,
                               double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return {fallback};
  if (!it->is_array() || it->empty()) {
    throw SpecError("field \"" + std::string(key) + "\" in " + what +
                    " must be a nonempty array of numbers");
  }
  std::vector<double> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) {
      throw SpecError("field \"" + std::string(key) + "\" in " + what +
                      " must be a nonempty array of numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

VertexWord parse_vertex(const json& v, const std::string& what) {
  if (!v.is_string()) {
    throw SpecError("vertex entries in " + what + " must be strings");
  }
  try {
    return VertexWord::parse(v.get<std::string>());
  } catch (const std::exception& e) {
    throw SpecError("bad vertex \"" + v.get<std::string>() + "\" in " + what + ": " + e.what());
  }
}

RegionOperator parse_operator_json(const json& obj, const std::string& what) {
  if (!obj.is_object()) {
    throw SpecError(what + " must be an object");
  }
  require_known_fields(obj, what, {"region", "terms"});
  const json& region_json = require_field(obj, what, "region");
  if (!region_json.is_array() || region_json.empty()) {
    throw SpecError("field \"region\" in " + what + " must be a nonempty array");
  }
  std::vector<VertexWord> vertices;
  vertices.reserve(region_json.size());
  for (const auto& v : region_json) vertices.push_back(parse_vertex(v, what));
  Region region(std::move(vertices));

  const json& terms_json = require_field(obj, what, "terms");
  if (!terms_json.is_array()) {
    throw SpecError("field \"terms\" in " + what + " must be an array");
  }
  std::map<PauliString, cplx> terms;
  for (const auto& term : terms_json) {
    if (!term.is_object()) {
      throw SpecError("term entries in " + what + " must be objects");
    }
    require_known_fields(term, what + " term", {"coefficient", "letters"});
    const json& coeff_json = require_field(term, what + " term", "coefficient");
    if (!coeff_json.is_array() || coeff_json.size() != 2 || !coeff_json[0].is_number() ||
        !coeff_json[1].is_number()) {
      throw SpecError("field \"coefficient\" in " + what +
                      " term must be a [real, imaginary] pair");
    }
    const cplx coeff(coeff_json[0].get<double>(), coeff_json[1].get<double>());
    const json& letters_json = require_field(term, what + " term", "letters");
    if (!letters_json.is_object()) {
      throw SpecError("field \"letters\" in " + what + " term must be an object");
    }
    std::vector<std::pair<VertexWord, Letter>> factors;
    for (auto it = letters_json.begin(); it != letters_json.end(); ++it) {
      const VertexWord v = parse_vertex(json(it.key()), what + " term");
      if (region.index_of(v) < 0) {
        throw SpecError("term letter at \"" + it.key() + "\" lies outside the declared region in " +
                        what);
      }
      if (!it->is_string() || it->get<std::string>().size() != 1) {
        throw SpecError("letters in " + what + " term must be one of \"I\",\"X\",\"Y\",\"Z\"");
      }
      const char c = it->get<std::string>()[0];
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
        throw SpecError("letters in " + what + " term must be one of \"I\",\"X\",\"Y\",\"Z\"");
      }
      factors.emplace_back(v, letter_parse(c));
    }
    PauliString s(std::move(factors));
    auto [slot, inserted] = terms.emplace(std::move(s), coeff);
    if (!inserted) slot->second += coeff;
  }
  return RegionOperator(std::move(region), std::move(terms));
}

json operator_json(const RegionOperator& a) {
  json region = json::array();
  for (const auto& v : a.region().vertices()) region.push_back(v.str());
  json terms = json::array();
  for (const auto& [s, c] : a.terms()) {
    json letters = json::object();
    for (const auto& [v, l] : s.factors()) {
      letters[v.str()] = std::string(1, letter_char(l));
    }
    terms.push_back(json{{"coefficient", json::array({c.real(), c.imag()})},
                         {"letters", letters}});
  }
  return json{{"region", region}, {"terms", terms}};
}

json model_json(const ParsedModel& m) {
  if (m.type == "ising_competing") {
    return json{{"type", m.type},
                {"beta", m.ising.beta},
                {"J", m.ising.J},
                {"k", m.ising.k},
                {"depth", m.ising.depth}};
  }
  return json{{"type", m.type},
              {"raw", m.raw},
              {"amplitude", operator_json(m.amplitude)},
              {"weight", operator_json(m.weight)}};
}

json report_json(const VerificationReport& r) {
  return json{{"property", r.property}, {"pass", r.pass},       {"residual", r.residual},
              {"tolerance", r.tolerance}, {"witness", r.witness}, {"volumes", r.volumes},
              {"norm", r.norm},           {"notes", r.notes}};
}

json value_json(const FiniteVolumeValue& v) {
  return json{{"value", json::array({v.value.real(), v.value.imag()})},
              {"volume", v.volume},
              {"path", v.path},
              {"fallback", v.fallback}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SpecError("cannot read file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_document(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError("malformed " + what + ": " + e.what());
  }
}

DenseBudget budget_for(const RunConfig& config) {
  DenseBudget budget;
  if (config.dense_budget > 0) {
    budget.max_matrix_sites = config.dense_budget;
    budget.max_vector_sites = config.dense_budget;
  }
  return budget;
}

json run_evaluate(const QmsHandle& h, const ParsedObservable& observable) {
  json records = json::array();
  records.push_back(value_json(h.evaluate(observable.op)));
  if (observable.volume >= 0) {
    records.push_back(value_json(h.evaluate_nested(observable.op, observable.volume)));
  }
  return json{{"observable", operator_json(observable.op)}, {"results", records}};
}

json run_verify(const QmsHandle& h, const ParsedModel& model, double tol,
                const DenseBudget& budget, bool& all_pass) {
  json reports = json::array();
  json skipped = json::array();
  all_pass = true;
  const auto record = [&](const VerificationReport& r) {
    reports.push_back(report_json(r));
    all_pass = all_pass && r.pass;
  };

  for (int level = 0; level <= 1; ++level) {
    for (const VertexWord& x : h.level_vertices(level)) {
      record(check_localized_markov(h, x, -1, tol, budget));
    }
  }
  for (int n = 0; n <= 1; ++n) {
    int basis_sites = 0;
    for (int l = 0; l <= n + 1; ++l) {
      basis_sites += static_cast<int>(h.level_vertices(l).size());
    }
    if (basis_sites > budget.max_matrix_sites) {
      skipped.push_back(json{{"property", "level_markov"},
                             {"reason", "basis on " + std::to_string(basis_sites) +
                                            " sites exceeds the matrix budget"}});
      continue;
    }
    record(check_level_markov(h, n, tol, budget));
  }

  try {
    const PotentialDecomposition d = extract_potential(h, std::min(2, h.n_max()), budget);
    record(check_commutation(d));
  } catch (const SpecError& e) {
    skipped.push_back(json{{"property", "potential_commutation"}, {"reason", e.what()}});
  } catch (const BudgetExceeded& e) {
    skipped.push_back(json{{"property", "potential_commutation"}, {"reason", e.what()}});
  }

  // Badly scaled weights break the restriction step these checks rely on;
  // the markov reports above already carry the failure, so record and move on.
  try {
    const TranslationInvarianceReport t = check_translation_invariance(h, tol);
    record(t.state_shift);
    record(t.subtree_restriction);
    record(t.kernel_copies);
    all_pass = all_pass && t.verdicts_agree;
  } catch (const SpecError& e) {
    skipped.push_back(json{{"property", "translation"}, {"reason", e.what()}});
  }

  try {
    record(check_sub_qms(h, h.root().child(1), tol));
  } catch (const SpecError& e) {
    skipped.push_back(json{{"property", "sub_qms"}, {"reason", e.what()}});
  }

  json body{{"model", model_json(model)}, {"reports", reports}, {"all_pass", all_pass}};
  if (!skipped.empty()) body["skipped"] = skipped;
  return body;
}

struct FixpointOutcome {
  json body;
  bool pass = true;
};

FixpointOutcome run_fixpoint(const ParsedModel& model, double tol) {
  const RegionOperator amplitude = model.type == "ising_competing"
                                       ? ising::build_amplitude(model.ising).op
                                       : model.amplitude;
  const ising::FixedPointSolution solution = ising::solve_fixed_point(amplitude);
  FixpointOutcome outcome;
  outcome.body = json{{"model", model_json(model)},
                      {"solution", operator_json(solution.h)},
                      {"residual", solution.residual},
                      {"iterations", solution.iterations}};
  if (model.type == "ising_competing") {
    const double alpha_solver = solution.h.coefficient(PauliString()).real();
    const double alpha_closed_form = ising::closed_form_alpha(model.ising);
    const double difference = std::abs(alpha_solver - alpha_closed_form);
    outcome.body["alpha_solver"] = alpha_solver;
    outcome.body["alpha_closed_form"] = alpha_closed_form;
    outcome.body["alpha_difference"] = difference;
    outcome.pass = difference < tol;
  }
  outcome.body["all_pass"] = outcome.pass;
  return outcome;
}

struct SweepPoint {
  json record;
  bool pass = false;
  bool solver_failed = false;
};

json run_sweep(const ParsedModel& model, double tol, bool& all_pass, bool& any_solver_failure) {
  if (model.type != "ising_competing") {
    throw SpecError("sweep requires an ising_competing model");
  }
  std::vector<std::pair<double, double>> points;
  for (const double beta : model.beta_grid) {
    for (const double j : model.j_grid) points.emplace_back(beta, j);
  }
  std::vector<SweepPoint> results(points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(points.size()); ++i) {
    ising::ModelSpec spec = model.ising;
    spec.beta = points[static_cast<std::size_t>(i)].first;
    spec.J = points[static_cast<std::size_t>(i)].second;
    SweepPoint& slot = results[static_cast<std::size_t>(i)];
    json record{{"beta", spec.beta}, {"J", spec.J}};
    try {
      const ising::ForkAmplitude amplitude = ising::build_amplitude(spec);
      const double alpha_closed_form = ising::closed_form_alpha(spec);
      record["gamma"] = amplitude.gamma;
      record["delta"] = amplitude.delta;
      record["eta"] = amplitude.eta;
      record["alpha_closed_form"] = alpha_closed_form;
      const ising::FixedPointSolution solution = ising::solve_fixed_point(amplitude.op);
      const double alpha_solver = solution.h.coefficient(PauliString()).real();
      record["alpha_solver"] = alpha_solver;
      record["iterations"] = solution.iterations;
      record["solver_residual"] = solution.residual;
      slot.pass = std::abs(alpha_solver - alpha_closed_form) < tol;
    } catch (const SolverFailure& e) {
      record["error"] = e.what();
      slot.solver_failed = true;
    } catch (const std::exception& e) {
      record["error"] = e.what();
    }
    record["pass"] = slot.pass;
    slot.record = std::move(record);
  }
  json body{{"model", model_json(model)}};
  json records = json::array();
  all_pass = true;
  any_solver_failure = false;
  for (const SweepPoint& p : results) {
    records.push_back(p.record);
    all_pass = all_pass && p.pass;
    any_solver_failure = any_solver_failure || p.solver_failed;
  }
  body["points"] = records;
  body["all_pass"] = all_pass;
  return body;
}

void write_report(const RunConfig& config, const json& body) {
  const json document{{"header", json{{"tool", "qmstree"}, {"format_version", 1}}},
                      {"body", body}};
  const std::string text = document.dump(2) + "\n";
  if (config.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(config.out_path, std::ios::binary);
  if (!out) {
    throw SpecError("cannot write file: " + config.out_path);
  }
  out << text;
}

}  // namespace

ParsedModel parse_model_spec(const std::string& text) {
  const json doc = parse_document(text, "model spec");
  if (!doc.is_object()) {
    throw SpecError("model spec must be an object");
  }
  const json& type_json = require_field(doc, "model spec", "type");
  if (!type_json.is_string()) {
    throw SpecError("field \"type\" in model spec must be a string");
  }
  ParsedModel m;
  m.type = type_json.get<std::string>();
  if (m.type == "ising_competing") {
    require_known_fields(doc, "model spec",
                         {"type", "beta", "J", "k", "depth", "beta_grid", "J_grid"});
    m.ising.beta = number_field(doc, "model spec", "beta");
    m.ising.J = number_field(doc, "model spec", "J");
    m.ising.k = int_field(doc, "model spec", "k");
    m.ising.depth = int_field(doc, "model spec", "depth");
    ising::validate(m.ising);
    m.beta_grid = grid_field(doc, "model spec", "beta_grid", m.ising.beta);
    m.j_grid = grid_field(doc, "model spec", "J_grid", m.ising.J);
    for (const double beta : m.beta_grid) {
      if (beta < 0) throw SpecError("field \"beta_grid\" in model spec must be nonnegative");
    }
    for (const double j : m.j_grid) {
      if (j < 0) throw SpecError("field \"J_grid\" in model spec must be nonnegative");
    }
    return m;
  }
  if (m.type == "custom") {
    require_known_fields(doc, "model spec", {"type", "amplitude", "weight", "raw"});
    m.amplitude = parse_operator_json(require_field(doc, "model spec", "amplitude"),
                                      "model spec amplitude");
    m.weight = parse_operator_json(require_field(doc, "model spec", "weight"),
                                   "model spec weight");
    if (const auto it = doc.find("raw"); it != doc.end()) {
      if (!it->is_boolean()) {
        throw SpecError("field \"raw\" in model spec must be a boolean");
      }
      m.raw = it->get<bool>();
    }
    return m;
  }
  throw SpecError("field \"type\" in model spec must be \"ising_competing\" or \"custom\"");
}

RegionOperator parse_operator(const std::string& text) {
  return parse_operator_json(parse_document(text, "operator"), "operator");
}

std::string operator_to_json(const RegionOperator& a) { return operator_json(a).dump(2) + "\n"; }

ParsedObservable parse_observable(const std::string& text) {
  const json doc = parse_document(text, "observable spec");
  if (!doc.is_object()) {
    throw SpecError("observable spec must be an object");
  }
  require_known_fields(doc, "observable spec", {"operator", "volume"});
  ParsedObservable out;
  out.op = parse_operator_json(require_field(doc, "observable spec", "operator"),
                               "observable spec operator");
  if (const auto it = doc.find("volume"); it != doc.end()) {
    if (!it->is_number_integer()) {
      throw SpecError("field \"volume\" in observable spec must be an integer");
    }
    out.volume = it->get<int>();
  }
  return out;
}

QmsHandle build_handle(const ParsedModel& m, int n_max) {
  if (m.type == "ising_competing") {
    return ising::build_qms(m.ising, n_max);
  }
  const TransitionExpectation kernel =
      m.raw ? TransitionExpectation::raw(m.amplitude, m.weight)
            : TransitionExpectation::from_amplitude(m.amplitude, m.weight);
  const Region root_region({kernel.target()});
  return QmsHandle(kernel.target(), RegionOperator::identity(root_region), kernel, n_max);
}

int run(const RunConfig& config) {
  try {
    if (config.command != "evaluate" && config.command != "verify" &&
        config.command != "fixpoint" && config.command != "sweep") {
      throw SpecError("unknown command: " + config.command);
    }
    if (!(config.tol > 0)) {
      throw SpecError("tolerance must be positive");
    }
    if (config.n_max < 1) {
      throw SpecError("n_max must be at least 1");
    }
    if (config.model_path.empty()) {
      throw SpecError("a model spec path is required");
    }
    const ParsedModel model = parse_model_spec(read_file(config.model_path));
    const DenseBudget budget = budget_for(config);

    json body{{"command", config.command},
              {"tolerance", config.tol},
              {"n_max", config.n_max}};
    int exit_code = kExitOk;
    if (config.command == "evaluate") {
      if (config.observable_path.empty()) {
        throw SpecError("evaluate requires an observable spec path");
      }
      const ParsedObservable observable = parse_observable(read_file(config.observable_path));
      const QmsHandle h = build_handle(model, config.n_max);
      json evaluated = run_evaluate(h, observable);
      body["model"] = model_json(model);
      body.update(evaluated);
    } else if (config.command == "verify") {
      const QmsHandle h = build_handle(model, config.n_max);
      bool all_pass = false;
      body.update(run_verify(h, model, config.tol, budget, all_pass));
      if (!all_pass) exit_code = kExitVerification;
    } else if (config.command == "fixpoint") {
      const FixpointOutcome outcome = run_fixpoint(model, config.tol);
      body.update(outcome.body);
      if (!outcome.pass) exit_code = kExitVerification;
    } else {
      bool all_pass = false;
      bool any_solver_failure = false;
      body.update(run_sweep(model, config.tol, all_pass, any_solver_failure));
      if (any_solver_failure) {
        exit_code = kExitSolver;
      } else if (!all_pass) {
        exit_code = kExitVerification;
      }
    }
    write_report(config, body);
    return exit_code;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const SolverFailure& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const SpecError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace qmstree::io

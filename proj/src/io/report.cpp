#include "branchlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "branchlab/csv.hpp"
#include "branchlab/errors.hpp"

namespace branchlab::io {

Format parse_format(const std::string& text) {
  if (text == "json") return Format::Json;
  if (text == "csv") return Format::Csv;
  if (text == "table") return Format::Table;
  throw ValidationError("unknown format '" + text + "' (json, csv, table)");
}

namespace {

std::string scalar_text(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) return csv::number(v.get<double>());
  return dump_json(v, -1);
}

void write_json(std::ostream& out, const Json& v, int indent, int depth) {
  const bool pretty = indent >= 0;
  const auto newline = [&](int d) {
    if (pretty) out << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  if (v.is_object()) {
    if (v.empty()) {
      out << "{}";
      return;
    }
    out << '{';
    bool first = true;
    for (const auto& [key, item] : v.items()) {
      if (!first) out << ',';
      first = false;
      newline(depth + 1);
      out << Json(key).dump() << (pretty ? ": " : ":");
      write_json(out, item, indent, depth + 1);
    }
    newline(depth);
    out << '}';
  } else if (v.is_array()) {
    if (v.empty()) {
      out << "[]";
      return;
    }
    out << '[';
    bool first = true;
    for (const auto& item : v) {
      if (!first) out << ',';
      first = false;
      newline(depth + 1);
      write_json(out, item, indent, depth + 1);
    }
    newline(depth);
    out << ']';
  } else if (v.is_number_float()) {
    const double x = v.get<double>();
    out << (std::isfinite(x) ? csv::number(x) : "null");
  } else {
    out << v.dump();
  }
}

}  // namespace

std::string dump_json(const Json& doc, int indent) {
  std::ostringstream out;
  write_json(out, doc, indent, 0);
  return out.str();
}

std::string emit(const Report& report, Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::Json:
      out << dump_json(report.document) << '\n';
      break;
    case Format::Csv: {
      csv::write_row(out, report.table.header);
      for (const auto& row : report.table.rows) {
        std::vector<std::string> fields;
        for (const auto& cell : row) fields.push_back(scalar_text(cell));
        csv::write_row(out, fields);
      }
      break;
    }
    case Format::Table: {
      std::vector<std::vector<std::string>> text{report.table.header};
      for (const auto& row : report.table.rows) {
        std::vector<std::string> fields;
        for (const auto& cell : row) fields.push_back(scalar_text(cell));
        text.push_back(std::move(fields));
      }
      std::vector<std::size_t> width(report.table.header.size(), 0);
      for (const auto& row : text) {
        for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
          width[i] = std::max(width[i], row[i].size());
        }
      }
      for (const auto& row : text) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i) line += "  ";
          line += row[i];
          if (i + 1 < row.size() && i < width.size()) line += std::string(width[i] - row[i].size(), ' ');
        }
        out << line << '\n';
      }
      break;
    }
  }
  return out.str();
}

Report stage_report(const dw::StageReport& report) {
  Report r;
  auto& doc = r.document;
  doc["stage"] = dw::to_string(report.stage);
  doc["pass"] = report.pass();
  doc["verdict"] = dw::to_string(report.verdict);
  doc["residual"] = report.residual;
  doc["tolerance"] = report.tolerance;
  doc["details"] = report.details;

  std::vector<std::string> metrics;
  Json cases = Json::array();
  for (const auto& c : report.cases) {
    Json entry;
    entry["label"] = c.label;
    for (const auto& [name, value] : c.metrics) {
      entry[name] = value;
      if (std::find(metrics.begin(), metrics.end(), name) == metrics.end()) {
        metrics.push_back(name);
      }
    }
    cases.push_back(std::move(entry));
  }
  doc["cases"] = std::move(cases);

  r.table.header = {"label"};
  r.table.header.insert(r.table.header.end(), metrics.begin(), metrics.end());
  for (const auto& entry : doc["cases"]) {
    std::vector<Json> row{entry["label"]};
    for (const auto& name : metrics) row.push_back(entry.contains(name) ? entry[name] : Json());
    r.table.rows.push_back(std::move(row));
  }
  return r;
}

namespace {

using decision::Act;
using decision::Setup;

void reject_unknown(const Json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ValidationError(where + ": unknown field '" + key + "'");
    }
  }
}

Act act_from_json(const Json& doc, const Setup* setup, const std::string& where) {
  if (!doc.is_object()) throw ValidationError(where + ": an act is an object {state: consequence}");
  std::map<std::string, std::string> assignment;
  for (const auto& [state, consequence] : doc.items()) {
    if (!consequence.is_string()) {
      throw ValidationError(where + "." + state + ": consequence must be a string");
    }
    assignment[state] = consequence.get<std::string>();
  }
  Act act(std::move(assignment));
  if (setup) {
    if (!act.is_total_on(*setup)) {
      throw ValidationError(where + ": act " + act.to_string() +
                            " does not map every state to a known consequence");
    }
  }
  return act;
}

Json act_to_json(const Act& act) {
  Json out = Json::object();
  for (const auto& [state, consequence] : act.assignment()) out[state] = consequence;
  return out;
}

Setup setup_from_json(const Json& doc) {
  if (!doc.is_object()) throw ValidationError("setup: expected an object");
  reject_unknown(doc, {"kind", "states", "consequences"}, "setup");
  Setup setup;
  if (doc.contains("kind")) {
    const auto kind = doc["kind"].is_string() ? doc["kind"].get<std::string>() : "";
    if (kind == "chance") {
      setup.kind = decision::SetupKind::Chance;
    } else if (kind == "fission") {
      setup.kind = decision::SetupKind::Fission;
    } else {
      throw ValidationError("setup.kind: expected \"chance\" or \"fission\"");
    }
  }
  for (const char* name : {"states", "consequences"}) {
    if (!doc.contains(name) || !doc[name].is_array()) {
      throw ValidationError(std::string("setup.") + name + ": expected a list of strings");
    }
    auto& target = std::string(name) == "states" ? setup.states : setup.consequences;
    for (const auto& item : doc[name]) {
      if (!item.is_string()) {
        throw ValidationError(std::string("setup.") + name + ": expected a list of strings");
      }
      target.push_back(item.get<std::string>());
    }
  }
  decision::validate_setup(setup);
  return setup;
}

std::vector<std::vector<Act>> tiers_from_json(const Json& doc, const Setup* setup) {
  if (!doc.is_array()) throw ValidationError("tiers: expected a list of tiers");
  std::vector<std::vector<Act>> tiers;
  for (std::size_t t = 0; t < doc.size(); ++t) {
    if (!doc[t].is_array()) throw ValidationError("tiers[" + std::to_string(t) + "]: expected a list");
    std::vector<Act> tier;
    for (std::size_t i = 0; i < doc[t].size(); ++i) {
      tier.push_back(act_from_json(
          doc[t][i], setup, "tiers[" + std::to_string(t) + "][" + std::to_string(i) + "]"));
    }
    tiers.push_back(std::move(tier));
  }
  return tiers;
}

// States and consequences in order of first appearance.
Setup infer_setup(const std::vector<std::vector<Act>>& tiers) {
  Setup setup;
  std::set<std::string> states, consequences;
  for (const auto& tier : tiers) {
    for (const auto& act : tier) {
      for (const auto& [s, c] : act.assignment()) {
        if (states.insert(s).second) setup.states.push_back(s);
        if (consequences.insert(c).second) setup.consequences.push_back(c);
      }
    }
  }
  decision::validate_setup(setup);
  return setup;
}

}  // namespace

decision::PreferenceRelation preferences_from_json(const Json& doc) {
  if (doc.is_array()) {
    const auto tiers = tiers_from_json(doc, nullptr);
    auto setup = infer_setup(tiers);
    for (std::size_t t = 0; t < tiers.size(); ++t) {
      for (const auto& act : tiers[t]) {
        if (!act.is_total_on(setup)) {
          throw ValidationError("tiers[" + std::to_string(t) + "]: act " + act.to_string() +
                                " does not cover every state");
        }
      }
    }
    return decision::PreferenceRelation::from_tiers(std::move(setup), tiers);
  }
  if (!doc.is_object()) throw ValidationError("preferences: expected a list of tiers or an object");
  reject_unknown(doc, {"setup", "tiers", "acts", "judgments"}, "preferences");
  if (!doc.contains("setup")) throw ValidationError("preferences: missing field 'setup'");
  auto setup = setup_from_json(doc["setup"]);
  if (doc.contains("tiers")) {
    if (doc.contains("acts") || doc.contains("judgments")) {
      throw ValidationError("preferences: give either 'tiers' or 'acts' with 'judgments'");
    }
    const auto tiers = tiers_from_json(doc["tiers"], &setup);
    return decision::PreferenceRelation::from_tiers(std::move(setup), tiers);
  }
  if (!doc.contains("acts") || !doc["acts"].is_array()) {
    throw ValidationError("preferences: missing field 'tiers' or 'acts'");
  }
  std::vector<Act> acts;
  for (std::size_t i = 0; i < doc["acts"].size(); ++i) {
    acts.push_back(act_from_json(doc["acts"][i], &setup, "acts[" + std::to_string(i) + "]"));
  }
  std::vector<decision::Judgment> judgments;
  if (doc.contains("judgments")) {
    const auto& list = doc["judgments"];
    if (!list.is_array()) throw ValidationError("judgments: expected a list");
    for (std::size_t j = 0; j < list.size(); ++j) {
      const std::string where = "judgments[" + std::to_string(j) + "]";
      const auto& item = list[j];
      if (!item.is_object()) throw ValidationError(where + ": expected an object");
      reject_unknown(item, {"better", "worse", "strict"}, where);
      decision::Judgment judgment;
      for (const char* name : {"better", "worse"}) {
        if (!item.contains(name) || !item[name].is_number_unsigned() ||
            item[name].get<std::size_t>() >= acts.size()) {
          throw ValidationError(where + "." + name + ": expected an index into acts");
        }
      }
      judgment.better = item["better"].get<std::size_t>();
      judgment.worse = item["worse"].get<std::size_t>();
      if (item.contains("strict")) {
        if (!item["strict"].is_boolean()) throw ValidationError(where + ".strict: expected a boolean");
        judgment.strict = item["strict"].get<bool>();
      }
      judgments.push_back(judgment);
    }
  }
  return decision::PreferenceRelation::from_judgments(std::move(setup), std::move(acts), judgments);
}

Json preferences_to_json(const decision::PreferenceRelation& prefs) {
  Json doc;
  const auto& setup = prefs.setup();
  doc["setup"]["kind"] = setup.kind == decision::SetupKind::Chance ? "chance" : "fission";
  doc["setup"]["states"] = setup.states;
  doc["setup"]["consequences"] = setup.consequences;
  Json tiers = Json::array();
  for (const auto& tier : prefs.tiers()) {
    std::vector<Act> acts;
    for (auto i : tier) acts.push_back(prefs.acts()[i]);
    std::sort(acts.begin(), acts.end());
    Json out = Json::array();
    for (const auto& act : acts) out.push_back(act_to_json(act));
    tiers.push_back(std::move(out));
  }
  doc["tiers"] = std::move(tiers);
  return doc;
}

Report extraction_report(const decision::PreferenceRelation& prefs,
                         const decision::Extraction& extraction) {
  Report r;
  auto& doc = r.document;
  const bool found = extraction.status == decision::ExtractionStatus::Found;
  const bool reproduced =
      found && decision::reproduces(prefs, *extraction.representation);
  doc["status"] = found ? "found"
                        : extraction.status == decision::ExtractionStatus::Rejected ? "rejected"
                                                                                    : "infeasible";
  doc["pass"] = reproduced;
  doc["margin"] = extraction.margin;
  doc["diagnostic"] = extraction.diagnostic;
  r.table.header = {"kind", "name", "value"};
  if (extraction.witness) {
    doc["witness"] = {act_to_json(extraction.witness->first),
                      act_to_json(extraction.witness->second)};
    r.table.rows.push_back({"witness", "better", extraction.witness->first.to_string()});
    r.table.rows.push_back({"witness", "worse", extraction.witness->second.to_string()});
  }
  if (found) {
    doc["probability"] = Json::object();
    for (const auto& [s, p] : extraction.representation->probability) {
      doc["probability"][s] = p;
      r.table.rows.push_back({"probability", s, p});
    }
    doc["utility"] = Json::object();
    for (const auto& [c, u] : extraction.representation->utility) {
      doc["utility"][c] = u;
      r.table.rows.push_back({"utility", c, u});
    }
  }
  const auto axioms = decision::check_axioms(prefs);
  Json violations = Json::array();
  for (const auto& v : axioms.violations) {
    const char* kind = v.kind == decision::AxiomKind::Completeness   ? "completeness"
                       : v.kind == decision::AxiomKind::Transitivity ? "transitivity"
                                                                      : "dominance";
    violations.push_back({{"axiom", kind}, {"message", v.message}});
    r.table.rows.push_back({"violation", kind, v.message});
  }
  doc["violations"] = std::move(violations);
  Json constraints = Json::array();
  for (const auto& c : extraction.constraints) {
    Json entry;
    entry["better"] = c.better;
    entry["worse"] = c.worse;
    entry["strict"] = c.strict;
    entry["coefficients"] = Json::object();
    for (const auto& [s, k] : c.coefficients) entry["coefficients"][s] = k;
    constraints.push_back(std::move(entry));
  }
  doc["constraints"] = std::move(constraints);
  doc["preferences"] = preferences_to_json(prefs);
  return r;
}

Report book_report(const std::optional<confirm::Book>& book) {
  Report r;
  auto& doc = r.document;
  r.table.header = {"case", "net"};
  doc["book"] = static_cast<bool>(book);
  if (!book) {
    doc["construction"] = "no book: the announced posterior equals p(T|A)";
  }
  static const char* names[] = {"not A", "A and T", "A and not T"};
  if (book) {
    doc["p"] = book->p;
    doc["q"] = book->q;
    doc["p_evidence"] = book->a;
    doc["stake"] = book->stake;
    doc["guaranteed_loss"] = book->guaranteed_loss();
    doc["construction"] = book->construction;
    Json bets = Json::array();
    for (const auto& bet : book->bets) {
      bets.push_back({{"description", bet.description},
                      {"placement", bet.placement == confirm::Placement::BeforeEvidence
                                        ? "before evidence"
                                        : "after evidence"},
                      {"direction", bet.direction == confirm::Direction::Buy ? "buy" : "sell"},
                      {"quotient", bet.quotient},
                      {"stake", bet.stake}});
    }
    doc["bets"] = std::move(bets);
  }
  Json cases = Json::object();
  for (std::size_t i = 0; i < confirm::kTruthCases.size(); ++i) {
    const double net = book ? book->net(confirm::kTruthCases[i]) : 0.0;
    cases[names[i]] = net;
    r.table.rows.push_back({names[i], net});
  }
  doc["net"] = std::move(cases);
  return r;
}

void theories_from_json(const Json& doc, confirm::ExperimentSpec& spec) {
  if (!doc.is_object()) throw ValidationError("theories: expected an object");
  reject_unknown(doc, {"true_theory", "theories"}, "theories");
  if (!doc.contains("true_theory") || !doc["true_theory"].is_string()) {
    throw ValidationError("theories: missing field 'true_theory'");
  }
  if (!doc.contains("theories") || !doc["theories"].is_array()) {
    throw ValidationError("theories: missing field 'theories'");
  }
  spec.true_theory = doc["true_theory"].get<std::string>();
  spec.theories.clear();
  for (std::size_t i = 0; i < doc["theories"].size(); ++i) {
    const auto& item = doc["theories"][i];
    const std::string where = "theories[" + std::to_string(i) + "]";
    if (!item.is_object()) throw ValidationError(where + ": expected an object");
    reject_unknown(item, {"name", "prior", "likelihoods"}, where);
    confirm::TheoryModel theory;
    if (!item.contains("name") || !item["name"].is_string()) {
      throw ValidationError(where + ": missing field 'name'");
    }
    theory.name = item["name"].get<std::string>();
    if (!item.contains("prior") || !item["prior"].is_number()) {
      throw ValidationError(where + ": missing field 'prior'");
    }
    theory.prior = item["prior"].get<double>();
    if (!item.contains("likelihoods")) throw ValidationError(where + ": missing field 'likelihoods'");
    const auto& lik = item["likelihoods"];
    if (lik.is_string() && lik.get<std::string>() == "born") {
      theory.born = true;
    } else if (lik.is_object()) {
      for (const auto& [key, value] : lik.items()) {
        if (!value.is_number()) {
          throw ValidationError(where + ".likelihoods." + key + ": expected a number");
        }
        double x = 0.0;
        try {
          std::size_t used = 0;
          x = std::stod(key, &used);
          if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
          throw ValidationError(where + ".likelihoods: key '" + key + "' is not an eigenvalue");
        }
        theory.table[x] = value.get<double>();
      }
    } else {
      throw ValidationError(where + ".likelihoods: expected \"born\" or an object");
    }
    spec.theories.push_back(std::move(theory));
  }
  if (std::none_of(spec.theories.begin(), spec.theories.end(),
                   [&](const auto& t) { return t.name == spec.true_theory; })) {
    throw ValidationError("theories.true_theory: '" + spec.true_theory +
                          "' is not among the listed theories");
  }
}

Report confirmation_report(const confirm::ExperimentSpec& spec,
                           const confirm::ExperimentResult& result) {
  Report r;
  auto& doc = r.document;
  doc["strategy"] = strategy::to_string(spec.strategy);
  doc["true_theory"] = spec.true_theory;
  doc["depth"] = spec.depth;
  doc["threshold"] = spec.threshold;
  doc["mass_above_threshold"] = result.final().mass_above_threshold;
  doc["mean_true_credence"] = result.final().mean_true_credence;
  doc["frozen_mass"] = result.final().frozen_mass;
  if (result.sampled_mass_above_threshold) {
    doc["trials"] = spec.trials;
    doc["sampled_mass_above_threshold"] = *result.sampled_mass_above_threshold;
  }
  Json iterations = Json::array();
  for (const auto& it : result.iterations) {
    iterations.push_back({{"iteration", it.iteration},
                          {"classes", it.classes.size()},
                          {"mean_true_credence", it.mean_true_credence},
                          {"mass_above_threshold", it.mass_above_threshold},
                          {"frozen_mass", it.frozen_mass}});
  }
  doc["iterations"] = std::move(iterations);

  r.table.header = {"iteration", "outcome_class", "caring_mass"};
  for (const auto& theory : spec.theories) r.table.header.push_back("credence_" + theory.name);
  for (const auto& it : result.iterations) {
    for (const auto& c : it.classes) {
      std::vector<Json> row{it.iteration, c.label, c.caring_mass};
      for (double x : c.credences) row.push_back(x);
      r.table.rows.push_back(std::move(row));
    }
  }
  return r;
}

}  // namespace branchlab::io

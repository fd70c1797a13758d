#include <cmath>
#include <fstream>
#include <sstream>

#include "branchlab/errors.hpp"
#include "branchlab/io.hpp"

namespace branchlab::io {

namespace {

const Json& field(const Json& obj, const char* name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw ValidationError(where + ": missing field '" + name + "'");
  }
  return obj.at(name);
}

double number_field(const Json& obj, const char* name, const std::string& where) {
  const auto& v = field(obj, name, where);
  if (!v.is_number()) throw ValidationError(where + "." + name + ": expected a number");
  return v.get<double>();
}

double parse_eigenvalue(const std::string& key, const std::string& where) {
  try {
    std::size_t used = 0;
    double x = std::stod(key, &used);
    if (used == key.size()) return x;
  } catch (const std::exception&) {
  }
  throw ValidationError(where + ": key '" + key + "' is not a number");
}

quantum::Rational parse_ratio(const std::string& text, const std::string& where) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return quantum::Rational(std::stoll(text));
    return quantum::Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw ValidationError(where + ".exact: expected \"m/n\", got '" + text + "'");
  }
}

}  // namespace

std::string eigenvalue_key(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

Json game_to_json(const quantum::QuantumGame& game) {
  Json doc;
  Json state = Json::array();
  const auto& s = game.state();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& a = s.amplitudes()[i];
    Json entry;
    entry["label"] = s.labels()[i];
    entry["re"] = a.re();
    entry["im"] = a.im();
    if (a.exact_norm2()) {
      entry["exact"] = std::to_string(a.exact_norm2()->numerator()) + "/" +
                       std::to_string(a.exact_norm2()->denominator());
    }
    state.push_back(std::move(entry));
  }
  doc["state"] = std::move(state);
  Json eigen = Json::object();
  for (const auto& [label, x] : game.observable().eigenvalues()) eigen[label] = x;
  doc["observable"] = {{"name", game.observable().name()}, {"eigenvalues", std::move(eigen)}};
  Json payoff = Json::object();
  for (const auto& [x, c] : game.payoff().table()) {
    payoff[eigenvalue_key(x)] = {{"consequence", c.name}, {"utility", c.utility}};
  }
  doc["payoff"] = std::move(payoff);
  return doc;
}

quantum::QuantumGame game_from_json(const Json& doc) {
  if (!doc.is_object()) throw ValidationError("game: expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "state" && key != "observable" && key != "payoff") {
      throw ValidationError("game: unknown field '" + key + "'");
    }
  }

  const auto& state = field(doc, "state", "game");
  if (!state.is_array()) throw ValidationError("game.state: expected an array");
  std::vector<std::string> labels;
  std::vector<quantum::Amplitude> amplitudes;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const std::string where = "game.state[" + std::to_string(i) + "]";
    const auto& entry = state[i];
    const auto& label = field(entry, "label", where);
    if (!label.is_string()) throw ValidationError(where + ".label: expected a string");
    labels.push_back(label.get<std::string>());
    const double re = number_field(entry, "re", where);
    const double im = entry.contains("im") ? number_field(entry, "im", where) : 0.0;
    if (entry.contains("exact")) {
      if (im != 0.0) throw ValidationError(where + ": exact amplitudes must be real");
      const auto r = parse_ratio(entry.at("exact").get<std::string>(), where);
      amplitudes.push_back(quantum::Amplitude::sqrt_ratio(r.numerator(), r.denominator(), re < 0));
    } else {
      amplitudes.push_back(quantum::Amplitude::from_complex(re, im));
    }
  }

  const auto& obs = field(doc, "observable", "game");
  const auto& name = field(obs, "name", "game.observable");
  const auto& eigen = field(obs, "eigenvalues", "game.observable");
  if (!eigen.is_object()) throw ValidationError("game.observable.eigenvalues: expected an object");
  std::map<std::string, double> eigenvalues;
  for (const auto& [label, value] : eigen.items()) {
    if (!value.is_number()) {
      throw ValidationError("game.observable.eigenvalues." + label + ": expected a number");
    }
    eigenvalues[label] = value.get<double>();
  }

  const auto& pay = field(doc, "payoff", "game");
  if (!pay.is_object()) throw ValidationError("game.payoff: expected an object");
  std::map<double, quantum::Consequence> table;
  for (const auto& [key, value] : pay.items()) {
    const std::string where = "game.payoff." + key;
    const auto& consequence = field(value, "consequence", where);
    if (!consequence.is_string()) throw ValidationError(where + ".consequence: expected a string");
    table[parse_eigenvalue(key, where)] = {consequence.get<std::string>(),
                                           number_field(value, "utility", where)};
  }

  quantum::QuantumGame game(quantum::PureState(std::move(labels), std::move(amplitudes)),
                           quantum::Observable(name.get<std::string>(), std::move(eigenvalues)),
                           quantum::PayoffFunction(std::move(table)));
  quantum::require_valid(game);
  return game;
}

std::vector<quantum::QuantumGame> games_from_json(const Json& doc) {
  std::vector<quantum::QuantumGame> games;
  if (doc.is_array()) {
    for (const auto& g : doc) games.push_back(game_from_json(g));
  } else {
    games.push_back(game_from_json(doc));
  }
  return games;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace branchlab::io

#include "branchlab/quantum.hpp"

#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include "branchlab/errors.hpp"

namespace branchlab::quantum {

namespace {

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::string format_eigenvalue(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

Amplitude Amplitude::from_complex(double re, double im) {
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw ValidationError("amplitude must be finite");
  }
  Amplitude a;
  a.value_ = {re, im};
  return a;
}

Amplitude Amplitude::sqrt_ratio(std::int64_t num, std::int64_t den, bool negative) {
  if (den <= 0 || num < 0) {
    throw ValidationError("sqrt_ratio needs num >= 0 and den > 0");
  }
  Amplitude a;
  Rational r(num, den);
  const double magnitude = std::sqrt(to_double(r));
  a.value_ = {negative ? -magnitude : magnitude, 0.0};
  a.exact_norm2_ = r;
  return a;
}

double Amplitude::norm2() const {
  if (exact_norm2_) return to_double(*exact_norm2_);
  return std::norm(value_);
}

Amplitude Amplitude::divided_by_sqrt(std::int64_t k) const {
  if (k <= 0) throw ValidationError("divided_by_sqrt needs k > 0");
  Amplitude a;
  a.value_ = value_ / std::sqrt(static_cast<double>(k));
  if (exact_norm2_) a.exact_norm2_ = *exact_norm2_ / k;
  return a;
}

PureState::PureState(std::vector<std::string> labels, std::vector<Amplitude> amplitudes)
    : labels_(std::move(labels)), amplitudes_(std::move(amplitudes)) {
  if (labels_.size() != amplitudes_.size()) {
    throw ValidationError("state has " + std::to_string(labels_.size()) + " labels but " +
                          std::to_string(amplitudes_.size()) + " amplitudes");
  }
  std::set<std::string> seen;
  for (const auto& label : labels_) {
    if (!seen.insert(label).second) throw ValidationError("duplicate basis label '" + label + "'");
  }
}

std::optional<Rational> PureState::exact_norm2() const {
  Rational total(0);
  for (const auto& a : amplitudes_) {
    if (!a.exact_norm2()) return std::nullopt;
    total += *a.exact_norm2();
  }
  return total;
}

double PureState::norm2() const {
  if (auto exact = exact_norm2()) return to_double(*exact);
  double total = 0.0;
  for (const auto& a : amplitudes_) total += a.norm2();
  return total;
}

bool PureState::is_normalized(double tolerance) const {
  if (auto exact = exact_norm2()) return *exact == Rational(1);
  return std::abs(norm2() - 1.0) <= tolerance;
}

Observable::Observable(std::string name, std::map<std::string, double> eigenvalues)
    : name_(std::move(name)), eigenvalues_(std::move(eigenvalues)) {
  for (const auto& [label, value] : eigenvalues_) {
    if (!std::isfinite(value)) throw ValidationError("eigenvalue of '" + label + "' is not finite");
  }
}

double Observable::eigenvalue(const std::string& label) const {
  auto it = eigenvalues_.find(label);
  if (it == eigenvalues_.end()) {
    throw ValidationError("observable " + name_ + " has no eigenvalue for '" + label + "'");
  }
  return it->second;
}

PayoffFunction::PayoffFunction(std::map<double, Consequence> table) : table_(std::move(table)) {}

const Consequence& PayoffFunction::at(double eigenvalue) const {
  auto it = table_.find(eigenvalue);
  if (it == table_.end()) {
    throw ValidationError("payoff undefined for eigenvalue " + format_eigenvalue(eigenvalue));
  }
  return it->second;
}

QuantumGame::QuantumGame(PureState state, Observable observable, PayoffFunction payoff)
    : state_(std::move(state)), observable_(std::move(observable)), payoff_(std::move(payoff)) {}

MeasurementRealization MeasurementRealization::direct(std::string description) {
  return {Direct{}, std::move(description)};
}

MeasurementRealization MeasurementRealization::ancilla(int n, int N, std::string description) {
  if (n < 1 || N <= n) {
    throw ValidationError("ancilla realization needs 1 <= n < N, got n=" + std::to_string(n) +
                          ", N=" + std::to_string(N));
  }
  if (description.empty()) {
    description = "ancilla coupling, " + std::to_string(n) + " of " + std::to_string(N) +
                  " ancilla outcomes report x1";
  }
  return {AncillaCoupled{n, N}, std::move(description)};
}

MeasurementRealization MeasurementRealization::parse(const std::string& text) {
  if (text == "direct") return direct();
  static const std::regex pattern(R"(ancilla:n=(\d+),N=(\d+))");
  std::smatch match;
  if (std::regex_match(text, match, pattern)) {
    return ancilla(std::stoi(match[1]), std::stoi(match[2]));
  }
  throw ValidationError("unknown realization '" + text + "' (expected direct or ancilla:n=<n>,N=<N>)");
}

std::string MeasurementRealization::to_string() const {
  if (const auto* a = std::get_if<AncillaCoupled>(&kind_)) {
    return "ancilla:n=" + std::to_string(a->n) + ",N=" + std::to_string(a->N);
  }
  return "direct";
}

ValidationReport validate_game(const QuantumGame& game) {
  ValidationReport report;
  const auto& state = game.state();
  if (!state.is_normalized()) {
    std::ostringstream os;
    os.precision(17);
    os << "state norm^2 is " << state.norm2() << ", expected 1";
    report.violations.push_back({ViolationKind::Normalization, os.str()});
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& label = state.labels()[i];
    if (!game.observable().has(label)) {
      report.violations.push_back(
          {ViolationKind::MissingEigenvalue, "no eigenvalue for basis label '" + label + "'"});
      continue;
    }
    if (state.amplitudes()[i].norm2() == 0.0) continue;
    const double x = game.observable().eigenvalue(label);
    if (!game.payoff().covers(x)) {
      report.violations.push_back({ViolationKind::PayoffTotality,
                                   "payoff missing eigenvalue " + format_eigenvalue(x) +
                                       " (label '" + label + "')"});
    }
  }
  return report;
}

void require_valid(const QuantumGame& game) {
  auto report = validate_game(game);
  if (!report.ok()) throw ValidationError(report.violations.front().message);
}

std::map<double, double> born_weights(const QuantumGame& game) {
  require_valid(game);
  if (auto exact = born_weights_exact(game)) {
    std::map<double, double> weights;
    for (const auto& [x, w] : *exact) weights[x] = to_double(w);
    return weights;
  }
  std::map<double, double> weights;
  const auto& state = game.state();
  for (std::size_t i = 0; i < state.size(); ++i) {
    weights[game.observable().eigenvalue(state.labels()[i])] += state.amplitudes()[i].norm2();
  }
  return weights;
}

std::optional<std::map<double, Rational>> born_weights_exact(const QuantumGame& game) {
  const auto& state = game.state();
  std::map<double, Rational> weights;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& exact = state.amplitudes()[i].exact_norm2();
    if (!exact) return std::nullopt;
    weights[game.observable().eigenvalue(state.labels()[i])] += *exact;
  }
  return weights;
}

AncillaCoupling couple_ancilla(const QuantumGame& game, int n, int N) {
  const auto& state = game.state();
  if (state.size() != 2) {
    throw UnsupportedShapeError("ancilla coupling needs a two-component state, got " +
                                std::to_string(state.size()));
  }
  if (n < 1 || N <= n) {
    throw ValidationError("ancilla coupling needs 1 <= n < N");
  }
  require_valid(game);

  const double x1 = game.observable().eigenvalue(state.labels()[0]);
  const double x2 = game.observable().eigenvalue(state.labels()[1]);
  const Amplitude first = state.amplitudes()[0].divided_by_sqrt(n);
  const Amplitude second = state.amplitudes()[1].divided_by_sqrt(N - n);

  AncillaCoupling out;
  std::vector<std::string> labels;
  std::vector<Amplitude> amplitudes;
  std::map<std::string, double> y_eigenvalues;
  for (int j = 1; j <= N; ++j) {
    const bool reports_first = j <= n;
    const std::string y = "y" + std::to_string(j);
    const std::string joint = state.labels()[reports_first ? 0 : 1] + "," + y;
    labels.push_back(joint);
    amplitudes.push_back(reports_first ? first : second);
    y_eigenvalues[joint] = j;
    out.grouping[y] = reports_first ? x1 : x2;
    out.y_labels.push_back(y);
  }
  out.joint_state = PureState(std::move(labels), std::move(amplitudes));
  out.ancilla_observable = Observable("Y", std::move(y_eigenvalues));
  return out;
}

QuantumGame ancilla_game(const QuantumGame& game, const AncillaCoupling& coupling) {
  std::map<double, Consequence> table;
  for (std::size_t j = 0; j < coupling.y_labels.size(); ++j) {
    table[static_cast<double>(j + 1)] = game.payoff().at(coupling.grouping.at(coupling.y_labels[j]));
  }
  return QuantumGame(coupling.joint_state, coupling.ancilla_observable,
                     PayoffFunction(std::move(table)));
}

QuantumGame relabel_game(const QuantumGame& game,
                         const std::map<std::string, std::string>& label_map,
                         const std::map<double, double>& eigenvalue_map) {
  auto rename = [&](const std::string& label) {
    auto it = label_map.find(label);
    return it == label_map.end() ? label : it->second;
  };
  auto remap = [&](double x) {
    auto it = eigenvalue_map.find(x);
    return it == eigenvalue_map.end() ? x : it->second;
  };

  std::vector<std::string> labels;
  for (const auto& label : game.state().labels()) labels.push_back(rename(label));
  std::map<std::string, double> eigenvalues;
  for (const auto& [label, x] : game.observable().eigenvalues()) eigenvalues[rename(label)] = remap(x);
  std::map<double, Consequence> table;
  for (const auto& [x, c] : game.payoff().table()) table[remap(x)] = c;

  return QuantumGame(PureState(std::move(labels), game.state().amplitudes()),
                     Observable(game.observable().name(), std::move(eigenvalues)),
                     PayoffFunction(std::move(table)));
}

QuantumGame two_outcome_game(std::int64_t m, std::int64_t n, double u1, double u2) {
  if (m < 0 || n <= 0 || m > n) throw ValidationError("two_outcome_game needs 0 <= m <= n, n > 0");
  PureState state({"x1", "x2"}, {Amplitude::sqrt_ratio(m, n), Amplitude::sqrt_ratio(n - m, n)});
  Observable observable("X", {{"x1", 1.0}, {"x2", 2.0}});
  PayoffFunction payoff({{1.0, {"c1", u1}}, {2.0, {"c2", u2}}});
  return QuantumGame(std::move(state), std::move(observable), std::move(payoff));
}

QuantumGame equal_superposition_game(const std::vector<double>& utilities) {
  const auto n = static_cast<std::int64_t>(utilities.size());
  if (n < 1) throw ValidationError("equal superposition needs at least one component");
  std::vector<std::string> labels;
  std::vector<Amplitude> amplitudes;
  std::map<std::string, double> eigenvalues;
  std::map<double, Consequence> table;
  for (std::int64_t i = 1; i <= n; ++i) {
    const auto label = "x" + std::to_string(i);
    labels.push_back(label);
    amplitudes.push_back(Amplitude::sqrt_ratio(1, n));
    eigenvalues[label] = static_cast<double>(i);
    table[static_cast<double>(i)] = {"c" + std::to_string(i), utilities[i - 1]};
  }
  return QuantumGame(PureState(std::move(labels), std::move(amplitudes)),
                     Observable("X", std::move(eigenvalues)), PayoffFunction(std::move(table)));
}

}  // namespace branchlab::quantum

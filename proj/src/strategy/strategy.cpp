#include "branchlab/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include "branchlab/errors.hpp"
#include "branchlab/io.hpp"

namespace branchlab::strategy {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Unnormalized caring masses; callers divide by the total.
CaringMeasure raw_masses(const Strategy& strategy, const branching::BranchTree& tree) {
  CaringMeasure m;
  const auto& leaves = tree.leaves();
  std::visit(
      overloaded{
          [&](const Born&) {
            for (std::size_t l = 0; l < leaves.size(); ++l) {
              m.entries.push_back({l, std::nullopt, leaves[l].outcome, leaves[l].weight});
            }
          },
          [&](const Egalitarian& e) {
            for (std::size_t l = 0; l < leaves.size(); ++l) {
              for (std::size_t c = 0; c < leaves[l].cell_amplitudes.size(); ++c) {
                if (leaves[l].cell_weight(c) > e.tau) {
                  m.entries.push_back({l, c, leaves[l].outcome, 1.0});
                }
              }
            }
            if (m.entries.empty()) {
              throw UndefinedError("egalitarian caring measure: no cell above tau");
            }
          },
          [&](const SquaredWeightRenormalized&) {
            for (std::size_t l = 0; l < leaves.size(); ++l) {
              const double w = leaves[l].weight;
              m.entries.push_back({l, std::nullopt, leaves[l].outcome, w * w});
            }
          },
          [&](const EigenvalueWeighted&) {
            for (std::size_t l = 0; l < leaves.size(); ++l) {
              m.entries.push_back(
                  {l, std::nullopt, leaves[l].outcome, std::abs(leaves[l].outcome)});
            }
          },
          [&](const TablePreference&) {
            throw ValidationError("table preference has no caring measure");
          },
      },
      strategy);
  if (!(m.total() > 0.0)) {
    throw UndefinedError("caring measure of strategy " + to_string(strategy) +
                         " has zero total mass");
  }
  return m;
}

}  // namespace

Strategy parse_strategy(const std::string& text) {
  if (text == "born") return Born{};
  if (text == "squared") return SquaredWeightRenormalized{};
  if (text == "eigenvalue") return EigenvalueWeighted{};
  if (text == "egalitarian") return Egalitarian{};
  static const std::regex egalitarian(R"(egalitarian:tau=([0-9.eE+-]+))");
  std::smatch match;
  if (std::regex_match(text, match, egalitarian)) {
    double tau = 0.0;
    try {
      tau = std::stod(match[1]);
    } catch (const std::exception&) {
      throw ValidationError("bad tau in strategy '" + text + "'");
    }
    if (!(tau > 0.0)) throw ValidationError("egalitarian tau must be positive");
    return Egalitarian{tau};
  }
  throw ValidationError("unknown strategy '" + text +
                        "' (expected born, egalitarian[:tau=T], squared, eigenvalue)");
}

std::string to_string(const Strategy& strategy) {
  return std::visit(overloaded{
                        [](const Born&) -> std::string { return "born"; },
                        [](const Egalitarian& e) -> std::string {
                          char buffer[64];
                          std::snprintf(buffer, sizeof buffer, "egalitarian:tau=%g", e.tau);
                          return buffer;
                        },
                        [](const SquaredWeightRenormalized&) -> std::string { return "squared"; },
                        [](const EigenvalueWeighted&) -> std::string { return "eigenvalue"; },
                        [](const TablePreference&) -> std::string { return "table"; },
                    },
                    strategy);
}

double CaringMeasure::total() const {
  double t = 0.0;
  for (const auto& e : entries) t += e.weight;
  return t;
}

std::map<double, double> CaringMeasure::by_outcome() const {
  std::map<double, double> out;
  for (const auto& e : entries) out[e.outcome] += e.weight;
  return out;
}

CaringMeasure caring_measure(const Strategy& strategy, const branching::BranchTree& tree) {
  auto m = raw_masses(strategy, tree);
  const double total = m.total();
  for (auto& e : m.entries) e.weight /= total;
  return m;
}

double value_tree(const Strategy& strategy, const branching::BranchTree& tree,
                  const quantum::PayoffFunction& payoff) {
  const auto m = raw_masses(strategy, tree);
  double weighted = 0.0;
  for (const auto& [x, mass] : m.by_outcome()) weighted += mass * payoff.utility(x);
  return weighted / m.total();
}

double value_game(const Strategy& strategy, const quantum::QuantumGame& game,
                  const quantum::MeasurementRealization& realization) {
  if (const auto* table = std::get_if<TablePreference>(&strategy)) {
    const auto key = game_key(game, realization);
    for (std::size_t t = 0; t < table->tiers.size(); ++t) {
      const auto& tier = table->tiers[t];
      if (std::find(tier.begin(), tier.end(), key) != tier.end()) {
        return static_cast<double>(table->tiers.size() - t);
      }
    }
    throw ValidationError("table preference does not rank this game/realization");
  }
  const auto tree = branching::branch(game, realization);
  return value_tree(strategy, tree, game.payoff());
}

double mn_violation(const Strategy& strategy, const quantum::QuantumGame& game,
                    const std::vector<quantum::MeasurementRealization>& realizations) {
  std::vector<double> values;
  values.reserve(realizations.size());
  for (const auto& r : realizations) values.push_back(value_game(strategy, game, r));
  if (values.size() < 2) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

std::string game_key(const quantum::QuantumGame& game,
                     const quantum::MeasurementRealization& realization) {
  return io::game_to_json(game).dump() + "@" + realization.to_string();
}

PhysicalityCheck physicality_check(const Strategy& strategy, const quantum::QuantumGame& game,
                                   const quantum::MeasurementRealization& realization) {
  std::map<std::string, std::string> labels;
  for (const auto& label : game.state().labels()) labels[label] = "relabeled:" + label;
  double largest = 0.0;
  for (const auto& [label, x] : game.observable().eigenvalues()) {
    largest = std::max(largest, std::abs(x));
  }
  std::map<double, double> eigenvalues;
  for (const auto& [label, x] : game.observable().eigenvalues()) {
    eigenvalues[x] = x + 1.0 + 2.0 * largest;
  }
  const auto relabeled = quantum::relabel_game(game, labels, eigenvalues);
  PhysicalityCheck check;
  check.original = value_game(strategy, game, realization);
  check.relabeled = value_game(strategy, relabeled, realization);
  check.delta = std::abs(check.original - check.relabeled);
  return check;
}

}  // namespace branchlab::strategy

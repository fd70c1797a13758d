#pragma once

// Rival rules for how much a branching agent should care about each future
// branch, and the game values those rules imply.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "branchlab/branching.hpp"
#include "branchlab/quantum.hpp"

namespace branchlab::strategy {

/// Care in proportion to amplitude-squared branch weight.
struct Born {};

/// Care equally for every occupied cell (sub-weight above tau).
struct Egalitarian {
  double tau = 1e-6;
};

/// Care in proportion to squared branch weight, renormalized.
struct SquaredWeightRenormalized {};

/// Care in proportion to |eigenvalue| of the branch's outcome.
struct EigenvalueWeighted {};

/// Explicit ranking over (game, realization) pairs, best tier first. Values
/// are ranks only; there is no caring measure behind them.
struct TablePreference {
  std::vector<std::vector<std::string>> tiers;  // keys from game_key()
};

using Strategy =
    std::variant<Born, Egalitarian, SquaredWeightRenormalized, EigenvalueWeighted, TablePreference>;

/// "born", "egalitarian", "egalitarian:tau=1e-9", "squared", "eigenvalue".
/// Throws ValidationError on anything else.
Strategy parse_strategy(const std::string& text);
std::string to_string(const Strategy& strategy);

struct CaringEntry {
  std::size_t leaf = 0;
  std::optional<std::size_t> cell;  // set for per-cell measures
  double outcome = 0.0;
  double weight = 0.0;
};

struct CaringMeasure {
  std::vector<CaringEntry> entries;

  double total() const;
  std::map<double, double> by_outcome() const;
};

/// Throws UndefinedError when the measure cannot be normalized (no occupied
/// cells for Egalitarian, all-zero eigenvalues for EigenvalueWeighted) and
/// ValidationError for TablePreference.
CaringMeasure caring_measure(const Strategy& strategy, const branching::BranchTree& tree);

/// Sum over branches of caring weight times payoff utility.
double value_tree(const Strategy& strategy, const branching::BranchTree& tree,
                  const quantum::PayoffFunction& payoff);

double value_game(const Strategy& strategy, const quantum::QuantumGame& game,
                  const quantum::MeasurementRealization& realization);

/// Largest pairwise difference of value_game over `realizations`.
double mn_violation(const Strategy& strategy, const quantum::QuantumGame& game,
                    const std::vector<quantum::MeasurementRealization>& realizations);

/// Stable identity of a (game, realization) pair for TablePreference.
std::string game_key(const quantum::QuantumGame& game,
                     const quantum::MeasurementRealization& realization);

struct PhysicalityCheck {
  double original = 0.0;
  double relabeled = 0.0;
  double delta = 0.0;
};

/// Values `game` before and after renaming every basis label and moving
/// every eigenvalue x to x + 1 + 2 max|x|. The branch tree is the same
/// physical tree either way, so a physical strategy gives delta 0.
PhysicalityCheck physicality_check(const Strategy& strategy, const quantum::QuantumGame& game,
                                   const quantum::MeasurementRealization& realization);

}  // namespace branchlab::strategy

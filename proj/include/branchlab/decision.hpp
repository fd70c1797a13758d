#pragma once

// Finite Savage-style decision theory: states, consequences, acts, weak
// preference over acts, the expected-utility rule, axiom checks,
// qualitative probability and extraction of a (probability, utility)
// representation from a preference ordering.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace branchlab::decision {

inline constexpr double kTieTolerance = 1e-9;
inline constexpr std::size_t kMaxPowerSetStates = 12;

enum class SetupKind { Chance, Fission };

struct Setup {
  SetupKind kind = SetupKind::Chance;
  std::vector<std::string> states;
  std::vector<std::string> consequences;
};

/// Throws ValidationError if the setup is empty or has repeated labels.
void validate_setup(const Setup& setup);

/// Function from states to consequences.
class Act {
 public:
  Act() = default;
  explicit Act(std::map<std::string, std::string> assignment)
      : assignment_(std::move(assignment)) {}

  static Act constant(const Setup& setup, const std::string& consequence);
  /// `on` for states in `event`, `off` elsewhere.
  static Act bet(const Setup& setup, const std::set<std::string>& event, const std::string& on,
                 const std::string& off);

  const std::map<std::string, std::string>& assignment() const { return assignment_; }
  const std::string& at(const std::string& state) const;
  bool is_total_on(const Setup& setup) const;
  std::string to_string() const;

  friend auto operator<=>(const Act&, const Act&) = default;

 private:
  std::map<std::string, std::string> assignment_;
};

using Event = std::set<std::string>;

struct Representation {
  std::map<std::string, double> probability;
  std::map<std::string, double> utility;
};

/// Sum over states of probability times utility of the assigned consequence.
/// Throws ValidationError for a state or consequence the representation
/// does not cover.
double expected_utility(const Act& act, const Representation& rep);

struct Judgment {
  std::size_t better = 0;
  std::size_t worse = 0;
  bool strict = true;  // false: indifference
};

/// Weak preference over a finite list of acts. Pairs nobody judged are
/// unknown, so incomplete and intransitive inputs can be represented and
/// diagnosed.
class PreferenceRelation {
 public:
  /// Best tier first; acts in one tier are indifferent.
  static PreferenceRelation from_tiers(Setup setup, const std::vector<std::vector<Act>>& tiers);
  static PreferenceRelation from_judgments(Setup setup, std::vector<Act> acts,
                                           const std::vector<Judgment>& judgments);

  const Setup& setup() const { return setup_; }
  const std::vector<Act>& acts() const { return acts_; }
  std::optional<std::size_t> index_of(const Act& act) const;

  /// Unset when the pair was never judged.
  std::optional<bool> weakly_prefers(std::size_t a, std::size_t b) const;
  bool strictly_prefers(std::size_t a, std::size_t b) const;
  bool indifferent(std::size_t a, std::size_t b) const;

  /// Acts grouped best-first; only meaningful when the relation is a total
  /// preorder (check_axioms reports nothing).
  std::vector<std::vector<std::size_t>> tiers() const;

 private:
  PreferenceRelation(Setup setup, std::vector<Act> acts);

  Setup setup_;
  std::vector<Act> acts_;
  std::map<Act, std::size_t> index_;
  std::vector<std::vector<std::int8_t>> weak_;  // -1 unknown, 0 no, 1 yes
};

/// Orders `acts` by expected utility under `rep`, grouping values within
/// `tie_tolerance` of their neighbour into one tier.
PreferenceRelation generate_preferences(const Setup& setup, const std::vector<Act>& acts,
                                        const Representation& rep,
                                        double tie_tolerance = kTieTolerance);

/// Every function from states to consequences.
std::vector<Act> all_acts(const Setup& setup);

/// Power set of the states; throws ValidationError above 12 states.
std::vector<Event> all_events(const Setup& setup);

enum class AxiomKind { Completeness, Transitivity, Dominance };

struct AxiomViolation {
  AxiomKind kind;
  std::vector<std::size_t> acts;
  std::string message;
};

struct AxiomReport {
  std::vector<AxiomViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Completeness, transitivity, and dominance with respect to the ordering
/// of consequences that the constant acts induce. Stronger axiom sets are
/// not checked.
AxiomReport check_axioms(const PreferenceRelation& prefs);

enum class QualitativeComparison { HigherOrEqual, Lower, Incomparable };

/// Ea is at least as probable as Eb iff, for consequences c1 strictly above
/// c2 as constant acts, the bet paying c1 on Ea is weakly preferred to the
/// one paying c1 on Eb. The first such (c1, c2) in setup order whose bets
/// are both ranked decides; Incomparable when there is none.
QualitativeComparison qualitative_probability(const PreferenceRelation& prefs, const Event& a,
                                              const Event& b);

/// One row of the linear system the probability vector has to satisfy once
/// utilities are fixed: sum_s coefficient[s] * p[s] >= margin (strict) or
/// |sum| <= 1e-9 (tie).
struct ProbabilityConstraint {
  std::string better;
  std::string worse;
  std::map<std::string, double> coefficients;
  bool strict = true;
};

enum class ExtractionStatus { Found, Infeasible, Rejected };

struct Extraction {
  ExtractionStatus status = ExtractionStatus::Infeasible;
  std::optional<Representation> representation;
  double margin = 0.0;  // smallest EU gap between adjacent strict tiers
  std::vector<ProbabilityConstraint> constraints;
  std::string diagnostic;
  /// Infeasible only: the adjacent pair whose ranking the best candidate
  /// came closest to breaking, as (better, worse).
  std::optional<std::pair<Act, Act>> witness;
};

/// Searches for probabilities and utilities whose expected-utility ordering
/// reproduces `prefs`. Axiom-violating input is rejected before searching.
/// When probabilities are unconstrained the uniform distribution is returned.
Extraction extract_representation(const PreferenceRelation& prefs);

/// True when every judged pair comes out the same under `rep`: strict
/// preferences by more than `tie_tolerance`, indifferences within it.
bool reproduces(const PreferenceRelation& prefs, const Representation& rep,
                double tie_tolerance = kTieTolerance);

}  // namespace branchlab::decision

#pragma once

// Bayesian conditionalization, the diachronic three-bet book against an
// agent who updates some other way, and repeated-measurement confirmation
// experiments where credences are updated separately on every branch.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "branchlab/branching.hpp"
#include "branchlab/quantum.hpp"
#include "branchlab/strategy.hpp"

namespace branchlab::confirm {

inline constexpr double kCredenceTolerance = 1e-9;
inline constexpr double kQuotientParity = 1e-12;

struct CredenceState {
  std::map<std::string, double> credences;  // theory -> p(T)
  std::map<std::string, std::map<std::string, double>> likelihoods;  // theory -> A -> p(A|T)

  /// Throws ValidationError unless credences lie in [0,1] and sum to 1
  /// within 1e-9, and every likelihood lies in [0,1].
  void validate() const;
  /// Sum over theories of p(A|T) p(T); throws ValidationError if some theory
  /// has no likelihood for A.
  double evidence_probability(const std::string& evidence) const;
  /// p(T|A); throws UndefinedError when p(A) = 0.
  double posterior(const std::string& theory, const std::string& evidence) const;
};

/// p_new(T) = p(A|T) p(T) / p(A). Throws UndefinedError when p(A) = 0.
CredenceState conditionalize(const CredenceState& state, const std::string& evidence);

/// Two-theory state {T, not-T} with one evidence proposition A.
CredenceState binary_state(double prior, double likelihood_t, double likelihood_not_t,
                           const std::string& theory = "T",
                           const std::string& evidence = "A");

struct Conditionalize {};
/// Announced posterior q for each (theory, evidence) pair.
struct Deviant {
  std::map<std::pair<std::string, std::string>, double> posterior;
};
/// Keeps p_old(T) whatever is observed.
struct Rigid {};
using UpdatePolicy = std::variant<Conditionalize, Deviant, Rigid>;

/// The credence in `theory` the policy announces for after learning
/// `evidence`. Throws ValidationError for a Deviant policy without an
/// entry for the pair or with q outside [0,1].
double announced_posterior(const UpdatePolicy& policy, const CredenceState& state,
                           const std::string& theory, const std::string& evidence);

struct TruthCase {
  bool evidence = false;
  bool theory = false;

  friend bool operator==(const TruthCase&, const TruthCase&) = default;
};

inline constexpr std::array<TruthCase, 3> kTruthCases{
    TruthCase{false, false}, TruthCase{true, true}, TruthCase{true, false}};

enum class Placement { BeforeEvidence, AfterEvidence };
enum class Direction { Buy, Sell };
enum class BetKind {
  TheoryGivenEvidence,  // called off unless A
  Evidence,
  TheoryAfterEvidence,  // only placed once A is observed
};

/// A bet on a proposition at `quotient` with `stake`: the buyer pays
/// quotient * stake and collects stake if the proposition is true. Payoffs
/// are from the agent's side.
struct Bet {
  std::string description;
  Placement placement = Placement::BeforeEvidence;
  BetKind kind = BetKind::Evidence;
  Direction direction = Direction::Buy;
  double quotient = 0.0;
  double stake = 0.0;

  /// Zero when the bet is called off or never placed in that case.
  double net(TruthCase truth) const;
  /// Expected net payoff when the agent's credence in the bet's proposition
  /// (conditional on A for TheoryGivenEvidence) is `credence`.
  double expected(double credence) const;
};

struct Book {
  std::array<Bet, 3> bets;
  double p = 0.0;  // p_old(T|A)
  double q = 0.0;  // announced posterior
  double a = 0.0;  // p_old(A)
  double stake = 0.0;
  std::string construction;

  double net(TruthCase truth) const;
  /// -|p - q| * a * stake
  double guaranteed_loss() const;
};

/// The conditional bet on T given A at p, a bet on A at p_old(A) with stake
/// |p - q| S, and the reversed post-evidence bet on T at q. Empty for a
/// Conditionalize policy and when |q - p| <= 1e-12. Throws ValidationError
/// unless p_old(A) lies strictly inside (0,1) and stake >= 0.
std::optional<Book> build_dutch_book(const CredenceState& state, const UpdatePolicy& policy,
                                     const std::string& evidence, const std::string& theory,
                                     double stake);

/// Net payoff per leaf; an empty book pays zero everywhere. Throws
/// ValidationError unless there is one truth case per leaf.
std::vector<double> evaluate_book_on_branches(const std::optional<Book>& book,
                                              const branching::BranchTree& tree,
                                              const std::vector<TruthCase>& truth);

/// Likelihood of each outcome (eigenvalue) of a game under a theory.
/// `born` ignores `table` and uses the game's Born weights.
struct TheoryModel {
  std::string name;
  double prior = 0.0;
  bool born = false;
  std::map<double, double> table;

  double likelihood(const quantum::QuantumGame& game, double outcome) const;
};

struct ExperimentSpec {
  std::vector<TheoryModel> theories;
  std::string true_theory;
  std::vector<quantum::QuantumGame> games;  // game i is played at steps i, i+L, ...
  strategy::Strategy strategy = strategy::Born{};
  int depth = 0;
  double threshold = 0.95;
  int trials = 0;  // Monte Carlo paths drawn by caring weight; 0 disables
  std::uint64_t seed = 0;
};

/// Branches sharing an outcome count per game slot: the same caring mass
/// per member and the same credences.
struct OutcomeClass {
  std::string label;
  double caring_mass = 0.0;
  std::vector<double> credences;  // in ExperimentSpec::theories order
  bool frozen = false;            // met evidence every live theory ruled out
};

struct IterationSummary {
  int iteration = 0;
  std::vector<OutcomeClass> classes;
  double mean_true_credence = 0.0;  // caring-weighted
  double mass_above_threshold = 0.0;
  double frozen_mass = 0.0;
};

struct ExperimentResult {
  std::vector<IterationSummary> iterations;  // 0..depth
  std::optional<double> sampled_mass_above_threshold;

  const IterationSummary& final() const { return iterations.back(); }
};

/// Exact enumeration over outcome-count classes. Caring is multiplicative
/// across steps, each factor the strategy's caring measure on that step's
/// one-measurement tree. Throws ValidationError for an invalid spec.
ExperimentResult confirmation_experiment(const ExperimentSpec& spec);

/// Same question answered leaf by leaf on the composed tree of `depth`
/// measurements, conditionalizing along each history. Exponential; for
/// cross-checks at small depth.
IterationSummary enumerate_leaves(const ExperimentSpec& spec, int depth);

}  // namespace branchlab::confirm

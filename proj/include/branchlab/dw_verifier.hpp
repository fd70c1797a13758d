#pragma once

// Mechanical checks of the staged derivation of amplitude-squared game
// values: equal two-branch superpositions, equal n-branch superpositions,
// rational unequal weights via ancilla coupling plus measurement
// neutrality, and irrational weights as limits of rational ones.

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "branchlab/branching.hpp"
#include "branchlab/quantum.hpp"
#include "branchlab/strategy.hpp"

namespace branchlab::dw {

inline constexpr double kStageTolerance = 1e-12;
inline constexpr double kDemoWeightTolerance = 1e-9;
inline constexpr double kDemoEgalitarianShift = 1e-3;
inline constexpr double kDemoBornDrift = 1e-12;
inline constexpr std::int64_t kDefaultDenominatorCap = 4096;

enum class Stage { S1, S2, S3, S4to6, EgalitarianDemo };
enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Stage stage);
std::string to_string(Verdict verdict);

struct StageCase {
  std::string label;
  std::vector<std::pair<std::string, double>> metrics;

  double metric(const std::string& name) const;
};

struct StageReport {
  Stage stage = Stage::S1;
  Verdict verdict = Verdict::Fail;
  double residual = 0.0;
  double tolerance = kStageTolerance;
  std::string details;
  std::vector<StageCase> cases;

  bool pass() const { return verdict == Verdict::Pass; }
};

using PayoffPair = std::pair<double, double>;

/// Rational payoffs p/q with |p| <= 50 and 1 <= q <= 12, drawn from `seed`.
std::vector<double> random_rational_payoffs(std::size_t count, std::uint64_t seed);
std::vector<PayoffPair> random_payoff_pairs(std::size_t count, std::uint64_t seed);

/// Value of the equal two-branch game against the average of its payoffs.
StageReport verify_stage1(const strategy::Strategy& strategy,
                          const std::vector<PayoffPair>& payoffs);

/// Value of the 1/sqrt(n) equal superposition against the payoff average;
/// each entry of `payoffs` lists n utilities.
StageReport verify_stage2(const strategy::Strategy& strategy, int n,
                          const std::vector<std::vector<double>>& payoffs);

/// sqrt(m/n)|x1> + sqrt((n-m)/n)|x2>, valued through the ancilla
/// construction: coupling to an n-outcome ancilla makes all joint branches
/// equal, the equal-weight value of the ancilla game is compared with
/// (m u1 + (n-m) u2)/n, and measurement neutrality carries it back to a
/// direct measurement. The residual is the largest of the ancilla-game
/// error, the ancilla/ancilla-game mismatch and the neutrality violation.
StageReport verify_stage3(const strategy::Strategy& strategy, int m, int n,
                          const std::vector<PayoffPair>& payoffs);

/// Rational approximations m/n of `a1_squared` (continued-fraction
/// convergents with n <= cap), each run through the stage 3 argument.
/// Passes when the last residual is within `tolerance`; Inconclusive when
/// the cap stops the sequence short of it; Fail when any stage 3 step fails
/// or the residuals are not monotone.
StageReport verify_stage_general(const strategy::Strategy& strategy, double a1_squared,
                                 double tolerance, PayoffPair payoff = {1.0, 0.0},
                                 std::int64_t cap = kDefaultDenominatorCap);

/// k-outcome game with rational weights, reduced to two-outcome ancilla
/// games by peeling off the heaviest remaining outcome first.
StageReport verify_stage_multi(const strategy::Strategy& strategy,
                               const std::vector<quantum::Rational>& weights,
                               const std::vector<double>& utilities);

struct CoarseGrainStep {
  int factor = 1;
};

using DemoStep = std::variant<branching::RotationConfig, CoarseGrainStep>;

/// Applies `steps` to the direct-measurement tree of `game` and tracks branch
/// counts, per-outcome weights, and Egalitarian(tau) and Born values.
/// Passes iff weights are conserved within 1e-9, the Egalitarian value moves
/// by more than 1e-3 and the Born value by less than 1e-12.
StageReport egalitarian_incoherence_demo(const quantum::QuantumGame& game,
                                         const std::vector<DemoStep>& steps, int fine_dim,
                                         double tau = 1e-9);

/// The fixed regression scenario: sqrt(1/3), sqrt(2/3) game paying (10, 0),
/// fine_dim 8, epsilon 1e-3 rotations inside the x2 branch, then coarse
/// graining by 2 and by 4.
struct DemoScenario {
  quantum::QuantumGame game;
  std::vector<DemoStep> steps;
  int fine_dim = 8;
  double tau = 1e-9;
};
DemoScenario regression_demo_scenario(double epsilon = 1e-3);

/// Continued-fraction convergents p/q of x with 1 <= p < q <= cap.
std::vector<std::pair<std::int64_t, std::int64_t>> convergents(double x, std::int64_t cap);

}  // namespace branchlab::dw

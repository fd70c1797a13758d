#include "branchlab/dw_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "branchlab/csv.hpp"
#include "branchlab/errors.hpp"

namespace branchlab::dw {

using quantum::MeasurementRealization;
using quantum::QuantumGame;
using quantum::Rational;

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::S1: return "S1";
    case Stage::S2: return "S2";
    case Stage::S3: return "S3";
    case Stage::S4to6: return "S4to6";
    case Stage::EgalitarianDemo: return "EgalitarianDemo";
  }
  return "?";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

double StageCase::metric(const std::string& name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  throw std::out_of_range("no metric '" + name + "' in case " + label);
}

std::vector<double> random_rational_payoffs(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> numerator(-50, 50);
  std::uniform_int_distribution<int> denominator(1, 12);
  std::vector<double> out(count);
  for (auto& x : out) {
    const int p = numerator(rng);
    x = static_cast<double>(p) / denominator(rng);
  }
  return out;
}

std::vector<PayoffPair> random_payoff_pairs(std::size_t count, std::uint64_t seed) {
  const auto flat = random_rational_payoffs(2 * count, seed);
  std::vector<PayoffPair> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = {flat[2 * i], flat[2 * i + 1]};
  return out;
}

namespace {

std::string pair_label(const PayoffPair& u) {
  return "u=(" + csv::number(u.first) + "," + csv::number(u.second) + ")";
}

void finish(StageReport& report) {
  report.verdict = report.residual <= report.tolerance ? Verdict::Pass : Verdict::Fail;
}

struct Stage3Case {
  double expected = 0.0;
  double ancilla_game_value = 0.0;
  double ancilla_value = 0.0;
  double direct_value = 0.0;
  double mn_delta = 0.0;
  bool equal_branches = false;
  double residual = 0.0;
};

Stage3Case run_stage3(const strategy::Strategy& strategy, std::int64_t m, std::int64_t n,
                      const PayoffPair& u) {
  Stage3Case c;
  const auto game = quantum::two_outcome_game(m, n, u.first, u.second);
  const auto coupling =
      quantum::couple_ancilla(game, static_cast<int>(m), static_cast<int>(n));

  // Every joint branch must carry weight exactly 1/n for the equal-weight
  // stage to apply to the ancilla game.
  c.equal_branches = true;
  for (const auto& a : coupling.joint_state.amplitudes()) {
    if (!a.exact_norm2() || *a.exact_norm2() != Rational(1, n)) c.equal_branches = false;
  }

  const auto y_game = quantum::ancilla_game(game, coupling);
  c.ancilla_game_value = strategy::value_game(strategy, y_game, MeasurementRealization::direct());
  c.expected = (static_cast<double>(m) * u.first + static_cast<double>(n - m) * u.second) /
               static_cast<double>(n);

  const auto ancilla = MeasurementRealization::ancilla(static_cast<int>(m), static_cast<int>(n));
  const auto direct = MeasurementRealization::direct();
  c.ancilla_value = strategy::value_game(strategy, game, ancilla);
  c.direct_value = strategy::value_game(strategy, game, direct);
  c.mn_delta = strategy::mn_violation(strategy, game, {direct, ancilla});

  c.residual = std::max({std::abs(c.ancilla_game_value - c.expected),
                         std::abs(c.ancilla_value - c.ancilla_game_value), c.mn_delta});
  if (!c.equal_branches) c.residual = std::max(c.residual, 1.0);
  return c;
}

}  // namespace

StageReport verify_stage1(const strategy::Strategy& strategy,
                          const std::vector<PayoffPair>& payoffs) {
  StageReport report;
  report.stage = Stage::S1;
  for (const auto& u : payoffs) {
    const auto game = quantum::equal_superposition_game({u.first, u.second});
    const double value = strategy::value_game(strategy, game, MeasurementRealization::direct());
    const double expected = 0.5 * (u.first + u.second);
    const double residual = std::abs(value - expected);
    report.residual = std::max(report.residual, residual);
    report.cases.push_back(
        {pair_label(u), {{"value", value}, {"expected", expected}, {"residual", residual}}});
  }
  report.details = "equal two-branch game valued at the payoff average over " +
                   std::to_string(payoffs.size()) + " payoffs";
  finish(report);
  return report;
}

StageReport verify_stage2(const strategy::Strategy& strategy, int n,
                          const std::vector<std::vector<double>>& payoffs) {
  if (n < 2) throw ValidationError("stage 2 needs n >= 2");
  StageReport report;
  report.stage = Stage::S2;
  for (const auto& u : payoffs) {
    if (static_cast<int>(u.size()) != n) {
      throw ValidationError("stage 2 payoff needs " + std::to_string(n) + " utilities");
    }
    const auto game = quantum::equal_superposition_game(u);
    const double value = strategy::value_game(strategy, game, MeasurementRealization::direct());
    const double expected = std::accumulate(u.begin(), u.end(), 0.0) / n;
    const double residual = std::abs(value - expected);
    report.residual = std::max(report.residual, residual);
    report.cases.push_back({"n=" + std::to_string(n),
                            {{"n", static_cast<double>(n)},
                             {"value", value},
                             {"expected", expected},
                             {"residual", residual}}});
  }
  report.details = "1/sqrt(n) equal superposition valued at the payoff average, n=" +
                   std::to_string(n);
  finish(report);
  return report;
}

StageReport verify_stage3(const strategy::Strategy& strategy, int m, int n,
                          const std::vector<PayoffPair>& payoffs) {
  if (m < 1 || n <= m) throw ValidationError("stage 3 needs 1 <= m < n");
  StageReport report;
  report.stage = Stage::S3;
  for (const auto& u : payoffs) {
    const auto c = run_stage3(strategy, m, n, u);
    report.residual = std::max(report.residual, c.residual);
    report.cases.push_back({"m=" + std::to_string(m) + ",n=" + std::to_string(n) + "," +
                                pair_label(u),
                            {{"m", static_cast<double>(m)},
                             {"n", static_cast<double>(n)},
                             {"expected", c.expected},
                             {"ancilla_game_value", c.ancilla_game_value},
                             {"ancilla_value", c.ancilla_value},
                             {"direct_value", c.direct_value},
                             {"mn_delta", c.mn_delta},
                             {"equal_branches", c.equal_branches ? 1.0 : 0.0},
                             {"residual", c.residual}}});
  }
  report.details =
      "ancilla coupling to n equal branches, equal-weight valuation of the ancilla game, then "
      "measurement neutrality back to the direct measurement";
  finish(report);
  return report;
}

std::vector<std::pair<std::int64_t, std::int64_t>> convergents(double x, std::int64_t cap) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  long double rest = x;
  std::int64_t h_prev = 1, h_prev2 = 0;
  std::int64_t k_prev = 0, k_prev2 = 1;
  for (int term = 0; term < 64; ++term) {
    const long double whole = std::floor(rest);
    if (whole > static_cast<long double>(cap) * 2) break;
    const auto a = static_cast<std::int64_t>(whole);
    const std::int64_t h = a * h_prev + h_prev2;
    const std::int64_t k = a * k_prev + k_prev2;
    if (k > cap) break;
    if (h >= 1 && h < k) out.emplace_back(h, k);
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const long double frac = rest - whole;
    if (frac < 1e-12L) break;
    rest = 1.0L / frac;
  }
  return out;
}

StageReport verify_stage_general(const strategy::Strategy& strategy, double a1_squared,
                                 double tolerance, PayoffPair payoff, std::int64_t cap) {
  if (!(a1_squared > 0.0 && a1_squared < 1.0)) {
    throw ValidationError("a1_squared must lie in (0, 1)");
  }
  StageReport report;
  report.stage = Stage::S4to6;
  report.tolerance = tolerance;
  const double target = a1_squared * payoff.first + (1.0 - a1_squared) * payoff.second;

  bool stage3_ok = true;
  bool monotone = true;
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& [m, n] : convergents(a1_squared, cap)) {
    const auto c = run_stage3(strategy, m, n, payoff);
    const double residual = std::abs(c.ancilla_value - target);
    if (c.residual > kStageTolerance) stage3_ok = false;
    if (residual > previous + 1e-15) monotone = false;
    previous = residual;
    report.residual = residual;
    report.cases.push_back({std::to_string(m) + "/" + std::to_string(n),
                            {{"m", static_cast<double>(m)},
                             {"n", static_cast<double>(n)},
                             {"ancilla_value", c.ancilla_value},
                             {"target", target},
                             {"residual", residual},
                             {"stage3_residual", c.residual}}});
  }

  std::ostringstream details;
  details << "continued-fraction approximations of a1^2 with denominators <= " << cap;
  if (report.cases.empty()) {
    report.verdict = Verdict::Inconclusive;
    report.residual = std::abs(target);
    details << "; no approximation fits under the cap";
  } else if (!stage3_ok) {
    report.verdict = Verdict::Fail;
    details << "; a stage 3 step failed (measurement neutrality or ancilla value)";
  } else if (!monotone) {
    report.verdict = Verdict::Fail;
    details << "; residuals not monotone in the cap";
  } else if (report.residual <= tolerance) {
    report.verdict = Verdict::Pass;
  } else {
    report.verdict = Verdict::Inconclusive;
    details << "; cap reached before the tolerance";
  }
  report.details = details.str();
  return report;
}

StageReport verify_stage_multi(const strategy::Strategy& strategy,
                               const std::vector<Rational>& weights,
                               const std::vector<double>& utilities) {
  if (weights.size() != utilities.size() || weights.empty()) {
    throw ValidationError("stage multi needs one utility per weight");
  }
  Rational total(0);
  for (const auto& w : weights) {
    if (w < Rational(0)) throw ValidationError("weights must be non-negative");
    total += w;
  }
  if (total != Rational(1)) throw ValidationError("weights must sum to 1");

  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });

  StageReport report;
  report.stage = Stage::S4to6;

  // Value of outcomes order[from..] renormalized to their total weight.
  auto value_from = [&](auto& self, std::size_t from) -> double {
    if (from + 1 == order.size()) return utilities[order[from]];
    Rational rest(0);
    for (std::size_t k = from; k < order.size(); ++k) rest += weights[order[k]];
    const Rational share = weights[order[from]] / rest;
    if (share == Rational(1)) return utilities[order[from]];
    const double tail = self(self, from + 1);
    const auto m = share.numerator();
    const auto n = share.denominator();
    const auto c = run_stage3(strategy, m, n, {utilities[order[from]], tail});
    report.residual = std::max(report.residual, c.residual);
    report.cases.push_back({"outcome " + std::to_string(order[from] + 1) + " vs rest: " +
                                std::to_string(m) + "/" + std::to_string(n),
                            {{"m", static_cast<double>(m)},
                             {"n", static_cast<double>(n)},
                             {"ancilla_value", c.ancilla_value},
                             {"direct_value", c.direct_value},
                             {"mn_delta", c.mn_delta},
                             {"residual", c.residual}}});
    return c.ancilla_value;
  };

  const double value = value_from(value_from, 0);
  double expected = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    expected += static_cast<double>(weights[i].numerator()) /
                static_cast<double>(weights[i].denominator()) * utilities[i];
  }
  report.residual = std::max(report.residual, std::abs(value - expected));
  report.cases.push_back({"total", {{"value", value}, {"expected", expected}}});
  report.details = "k-outcome game reduced by pairwise ancilla coupling, heaviest outcome first";
  finish(report);
  return report;
}

namespace {

StageCase snapshot(const std::string& label, const branching::BranchTree& tree,
                   const quantum::PayoffFunction& payoff, double tau) {
  StageCase c{label, {}};
  for (const auto& [x, w] : tree.outcome_weights()) {
    c.metrics.emplace_back("count[" + csv::number(x) + "]",
                           static_cast<double>(branching::count_branches(tree, x, tau).count));
  }
  for (const auto& [x, w] : tree.outcome_weights()) {
    c.metrics.emplace_back("weight[" + csv::number(x) + "]", w);
  }
  c.metrics.emplace_back("egalitarian_value",
                         strategy::value_tree(strategy::Egalitarian{tau}, tree, payoff));
  c.metrics.emplace_back("born_value", strategy::value_tree(strategy::Born{}, tree, payoff));
  return c;
}

}  // namespace

StageReport egalitarian_incoherence_demo(const QuantumGame& game,
                                         const std::vector<DemoStep>& steps, int fine_dim,
                                         double tau) {
  quantum::require_valid(game);
  StageReport report;
  report.stage = Stage::EgalitarianDemo;
  report.tolerance = kDemoWeightTolerance;

  auto tree = branching::branch(game, MeasurementRealization::direct(), fine_dim, tau);
  const auto initial_weights = tree.outcome_weights();
  report.cases.push_back(snapshot("initial", tree, game.payoff(), tau));
  const double egal0 = report.cases.front().metric("egalitarian_value");
  const double born0 = report.cases.front().metric("born_value");

  double weight_drift = 0.0;
  double egal_shift = 0.0;
  double born_drift = 0.0;
  bool counts_changed = false;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::string label;
    if (const auto* rotation = std::get_if<branching::RotationConfig>(&steps[i])) {
      tree = branching::rotate_basis(tree, *rotation);
      label = "rotate eps=" + csv::number(rotation->epsilon) + " pairs=" +
              std::to_string(rotation->pair_schedule.size());
    } else {
      const auto factor = std::get<CoarseGrainStep>(steps[i]).factor;
      tree = branching::coarse_grain(tree, factor);
      label = "coarse_grain factor=" + std::to_string(factor);
    }
    auto c = snapshot("step " + std::to_string(i + 1) + ": " + label, tree, game.payoff(), tau);
    for (const auto& [x, w] : tree.outcome_weights()) {
      weight_drift = std::max(weight_drift, std::abs(w - initial_weights.at(x)));
    }
    for (std::size_t k = 0; k < c.metrics.size(); ++k) {
      if (c.metrics[k].first.rfind("count[", 0) == 0 &&
          c.metrics[k].second != report.cases.front().metrics[k].second) {
        counts_changed = true;
      }
    }
    egal_shift = std::max(egal_shift, std::abs(c.metric("egalitarian_value") - egal0));
    born_drift = std::max(born_drift, std::abs(c.metric("born_value") - born0));
    report.cases.push_back(std::move(c));
  }

  report.residual = weight_drift;
  const bool pass = weight_drift <= kDemoWeightTolerance && egal_shift > kDemoEgalitarianShift &&
                    born_drift < kDemoBornDrift;
  report.verdict = pass ? Verdict::Pass : Verdict::Fail;
  std::ostringstream details;
  details << "max weight drift " << csv::number(weight_drift) << ", branch counts "
          << (counts_changed ? "changed" : "unchanged") << ", egalitarian shift "
          << csv::number(egal_shift) << ", born drift " << csv::number(born_drift);
  report.details = details.str();
  return report;
}

DemoScenario regression_demo_scenario(double epsilon) {
  DemoScenario s;
  s.game = quantum::two_outcome_game(1, 3, 10.0, 0.0);
  branching::RotationConfig rotation;
  rotation.epsilon = epsilon;
  // Leaf 1 is the x2 branch (leaves are ordered by eigenvalue).
  rotation.pair_schedule = {{1, 0, 1}, {1, 0, 2}};
  s.steps = {rotation, CoarseGrainStep{2}, CoarseGrainStep{4}};
  return s;
}

}  // namespace branchlab::dw

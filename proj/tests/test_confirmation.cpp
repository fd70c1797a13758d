#include <cmath>
#include <random>

#include "doctest.h"

#include "branchlab/confirmation.hpp"
#include "branchlab/errors.hpp"
#include "oracle.hpp"

using namespace branchlab;
using namespace branchlab::confirm;

namespace {

// Agent's net on each truth case, summed from buyer cash flows: the
// conditional bet and the post-evidence bet face opposite ways, the bet on A
// is always bought.
double oracle_book_net(TruthCase t, double p, double q, double a, double stake) {
  const double sign = p > q ? 1.0 : -1.0;
  double total = oracle::bought(t.evidence, a, std::abs(p - q) * stake);
  if (t.evidence) {
    total += sign * oracle::bought(t.theory, p, stake);
    total -= sign * oracle::bought(t.theory, q, stake);
  }
  return total;
}

TheoryModel table_theory(const std::string& name, double prior, double p1) {
  return {name, prior, false, {{1.0, p1}, {2.0, 1.0 - p1}}};
}

ExperimentSpec default_spec(int depth) {
  ExperimentSpec spec;
  spec.theories = {{"born", 1.0 / 3, true, {}},
                   table_theory("only-x1", 1.0 / 3, 1.0),
                   table_theory("only-x2", 1.0 / 3, 0.0)};
  spec.true_theory = "born";
  spec.games = {quantum::two_outcome_game(1, 3, 1, 0)};
  spec.depth = depth;
  return spec;
}

}  // namespace

TEST_CASE("conditionalization on a worked example") {
  const auto state = binary_state(0.5, 0.9, 0.5);
  CHECK(state.evidence_probability("A") == doctest::Approx(0.7).epsilon(1e-15));
  const auto next = conditionalize(state, "A");
  CHECK(next.credences.at("T") == doctest::Approx(9.0 / 14).epsilon(1e-15));
  CHECK(next.credences.at("not-T") == doctest::Approx(5.0 / 14).epsilon(1e-15));
  CHECK(state.posterior("T", "A") == doctest::Approx(9.0 / 14).epsilon(1e-15));
}

TEST_CASE("conditionalization matches Bayes on random states") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  for (int trial = 0; trial < 200; ++trial) {
    CredenceState state;
    std::vector<double> prior, lik;
    double total = 0.0;
    for (int i = 0; i < 4; ++i) total += prior.emplace_back(unit(rng));
    for (int i = 0; i < 4; ++i) {
      prior[i] /= total;
      lik.push_back(unit(rng));
      const auto name = "T" + std::to_string(i);
      state.credences[name] = prior[i];
      state.likelihoods[name]["A"] = lik[i];
    }
    const auto expected = oracle::posterior(prior, lik);
    const auto next = conditionalize(state, "A");
    for (int i = 0; i < 4; ++i) {
      CHECK(next.credences.at("T" + std::to_string(i)) ==
            doctest::Approx(expected[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("uninformative evidence and dogmatic priors leave credences alone") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double prior = unit(rng), lik = 0.01 + 0.99 * unit(rng), other = unit(rng);
    const auto same = conditionalize(binary_state(prior, lik, lik), "A");
    CHECK(same.credences.at("T") == prior);
    CHECK(same.credences.at("not-T") == 1.0 - prior);
    CHECK(conditionalize(binary_state(1.0, lik, other), "A").credences.at("T") == 1.0);
    CHECK(conditionalize(binary_state(0.0, other, lik), "A").credences.at("T") == 0.0);
  }
}

TEST_CASE("conditionalizing twice does not depend on order") {
  CredenceState state;
  state.credences = {{"T1", 0.2}, {"T2", 0.5}, {"T3", 0.3}};
  state.likelihoods = {{"T1", {{"A", 0.9}, {"B", 0.1}}},
                       {"T2", {{"A", 0.4}, {"B", 0.6}}},
                       {"T3", {{"A", 0.2}, {"B", 0.7}}}};
  const auto ab = conditionalize(conditionalize(state, "A"), "B");
  const auto ba = conditionalize(conditionalize(state, "B"), "A");
  for (const auto& [name, c] : ab.credences) {
    CHECK(c == doctest::Approx(ba.credences.at(name)).epsilon(1e-14));
  }
}

TEST_CASE("impossible evidence and malformed states") {
  CHECK_THROWS_AS(conditionalize(binary_state(0.5, 0.0, 0.0), "A"), UndefinedError);
  CHECK_THROWS_AS(binary_state(0.5, 0.0, 0.0).posterior("T", "A"), UndefinedError);
  CHECK_THROWS_AS(binary_state(1.5, 0.2, 0.3), ValidationError);
  CHECK_THROWS_AS(binary_state(0.5, 1.2, 0.3), ValidationError);
  CHECK_THROWS_AS(binary_state(0.5, 0.2, 0.3).evidence_probability("B"), ValidationError);

  CredenceState bad;
  bad.credences = {{"T1", 0.5}, {"T2", 0.4}};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("announced posteriors per policy") {
  const auto state = binary_state(0.5, 0.8, 0.2);
  CHECK(announced_posterior(Conditionalize{}, state, "T", "A") ==
        doctest::Approx(0.8).epsilon(1e-15));
  CHECK(announced_posterior(Rigid{}, state, "T", "A") == 0.5);
  CHECK(announced_posterior(Deviant{{{{"T", "A"}, 0.6}}}, state, "T", "A") == 0.6);
  CHECK_THROWS_AS(announced_posterior(Deviant{}, state, "T", "A"), ValidationError);
  CHECK_THROWS_AS(announced_posterior(Deviant{{{{"T", "A"}, 1.5}}}, state, "T", "A"),
                  ValidationError);
}

TEST_CASE("three-bet book on the worked example") {
  const auto state = binary_state(0.5, 0.8, 0.2);
  const auto book = build_dutch_book(state, Deviant{{{{"T", "A"}, 0.6}}}, "A", "T", 1.0);
  REQUIRE(book);
  CHECK(book->p == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(book->q == 0.6);
  CHECK(book->a == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(book->guaranteed_loss() == doctest::Approx(-0.1).epsilon(1e-14));
  for (const auto& t : kTruthCases) {
    CHECK(book->net(t) == doctest::Approx(-0.1).epsilon(1e-14));
    CHECK(book->net(t) == doctest::Approx(oracle_book_net(t, 0.8, 0.6, 0.5, 1.0)).epsilon(1e-14));
  }
  CHECK(book->bets[0].direction == Direction::Buy);
  CHECK(book->bets[1].direction == Direction::Buy);
  CHECK(book->bets[2].direction == Direction::Sell);
  CHECK_FALSE(book->construction.empty());
}

TEST_CASE("mirrored book when the announced posterior is too high") {
  const auto state = binary_state(0.5, 0.8, 0.2);
  const auto book = build_dutch_book(state, Deviant{{{{"T", "A"}, 0.9}}}, "A", "T", 1.0);
  REQUIRE(book);
  for (const auto& t : kTruthCases) CHECK(book->net(t) == doctest::Approx(-0.05).epsilon(1e-14));
  CHECK(book->bets[0].direction == Direction::Sell);
  CHECK(book->bets[1].direction == Direction::Buy);
  CHECK(book->bets[2].direction == Direction::Buy);
}

TEST_CASE("no book against conditionalization or at parity") {
  const auto state = binary_state(0.5, 0.8, 0.2);
  CHECK_FALSE(build_dutch_book(state, Conditionalize{}, "A", "T", 1.0));
  CHECK_FALSE(build_dutch_book(state, Deviant{{{{"T", "A"}, 0.8}}}, "A", "T", 1.0));
  CHECK_FALSE(build_dutch_book(state, Deviant{{{{"T", "A"}, 0.8 + 1e-13}}}, "A", "T", 1.0));
}

TEST_CASE("a rigid updater is booked whenever evidence is relevant") {
  const auto relevant = build_dutch_book(binary_state(0.5, 0.8, 0.2), Rigid{}, "A", "T", 2.0);
  REQUIRE(relevant);
  CHECK(relevant->q == 0.5);
  CHECK(relevant->guaranteed_loss() == doctest::Approx(-0.3).epsilon(1e-14));
  CHECK_FALSE(build_dutch_book(binary_state(0.5, 0.4, 0.4), Rigid{}, "A", "T", 1.0));
}

TEST_CASE("book inputs are validated") {
  const Deviant deviant{{{{"T", "A"}, 0.6}}};
  CHECK_THROWS_AS(build_dutch_book(binary_state(0.5, 1.0, 1.0), deviant, "A", "T", 1.0),
                  ValidationError);
  CHECK_THROWS_AS(build_dutch_book(binary_state(0.5, 0.0, 0.0), deviant, "A", "T", 1.0),
                  ValidationError);
  CHECK_THROWS_AS(build_dutch_book(binary_state(0.5, 0.8, 0.2), deviant, "A", "T", -1.0),
                  ValidationError);
}

TEST_CASE("each bet is fair by the agent's own lights") {
  const auto book =
      build_dutch_book(binary_state(0.3, 0.7, 0.4), Deviant{{{{"T", "A"}, 0.2}}}, "A", "T", 5.0);
  REQUIRE(book);
  CHECK(book->bets[0].expected(book->p) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(book->bets[1].expected(book->a) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(book->bets[2].expected(book->q) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(book->bets[0].net({false, true}) == 0.0);
  CHECK(book->bets[2].net({false, false}) == 0.0);
}

TEST_CASE("random deviant updaters always lose the same amount") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  for (int trial = 0; trial < 1000; ++trial) {
    const double prior = unit(rng), lt = unit(rng), ln = unit(rng), q = unit(rng);
    const double stake = 10 * unit(rng);
    const auto state = binary_state(prior, lt, ln);
    const auto book = build_dutch_book(state, Deviant{{{{"T", "A"}, q}}}, "A", "T", stake);
    const double a = prior * lt + (1 - prior) * ln;
    const double p = prior * lt / a;
    if (std::abs(p - q) <= kQuotientParity) {
      CHECK_FALSE(book);
      continue;
    }
    REQUIRE(book);
    const double loss = -std::abs(p - q) * a * stake;
    CHECK(book->guaranteed_loss() == doctest::Approx(loss).epsilon(1e-12));
    for (const auto& t : kTruthCases) {
      CHECK(book->net(t) == doctest::Approx(oracle_book_net(t, p, q, a, stake)).epsilon(1e-12));
      CHECK(book->net(t) < 0.0);
    }
  }
}

TEST_CASE("books evaluated on branches") {
  const auto tree = branching::branch(quantum::two_outcome_game(1, 3, 1, 0),
                                      quantum::MeasurementRealization::direct());
  const auto book =
      build_dutch_book(binary_state(0.5, 0.8, 0.2), Deviant{{{{"T", "A"}, 0.6}}}, "A", "T", 1.0);
  const auto nets = evaluate_book_on_branches(book, tree, {{true, true}, {false, false}});
  REQUIRE(nets.size() == 2);
  for (double n : nets) CHECK(n == doctest::Approx(-0.1).epsilon(1e-14));

  for (double n : evaluate_book_on_branches(std::nullopt, tree, {{true, true}, {true, false}})) {
    CHECK(n == 0.0);
  }
  const auto zero =
      build_dutch_book(binary_state(0.5, 0.8, 0.2), Deviant{{{{"T", "A"}, 0.6}}}, "A", "T", 0.0);
  REQUIRE(zero);
  for (double n : evaluate_book_on_branches(zero, tree, {{true, true}, {false, false}})) {
    CHECK(n == 0.0);
  }
  CHECK_THROWS_AS(evaluate_book_on_branches(book, tree, {{true, true}}), ValidationError);
}

TEST_CASE("theory likelihoods") {
  const auto game = quantum::two_outcome_game(1, 3, 1, 0);
  const TheoryModel born{"born", 1.0, true, {}};
  CHECK(born.likelihood(game, 1.0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(table_theory("t", 1.0, 0.9).likelihood(game, 2.0) == doctest::Approx(0.1));
  const TheoryModel partial{"t", 1.0, false, {{1.0, 1.0}}};
  CHECK_THROWS_AS(partial.likelihood(game, 2.0), ValidationError);
}

TEST_CASE("depth zero returns the priors") {
  const auto result = confirmation_experiment(default_spec(0));
  REQUIRE(result.iterations.size() == 1);
  const auto& it = result.final();
  REQUIRE(it.classes.size() == 1);
  CHECK(it.classes[0].caring_mass == 1.0);
  for (double c : it.classes[0].credences) CHECK(c == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("credence concentrates on the true theory") {
  const auto result = confirmation_experiment(default_spec(20));
  REQUIRE(result.iterations.size() == 21);
  // Any history showing both outcomes rules out both rivals.
  const double both = 1.0 - std::pow(1.0 / 3, 20) - std::pow(2.0 / 3, 20);
  CHECK(result.final().mass_above_threshold == doctest::Approx(both).epsilon(1e-12));
  CHECK(result.final().mass_above_threshold > 0.99);
  CHECK(result.final().frozen_mass == 0.0);
}

TEST_CASE("born caring agrees with the binomial oracle") {
  ExperimentSpec spec;
  spec.theories = {{"born", 0.4, true, {}},
                   table_theory("uniform", 0.3, 0.5),
                   table_theory("skewed", 0.3, 0.9)};
  spec.true_theory = "born";
  spec.games = {quantum::two_outcome_game(1, 3, 1, 0)};
  for (int depth : {1, 5, 12, 20, 30}) {
    spec.depth = depth;
    const auto result = confirmation_experiment(spec);
    const double expected =
        oracle::binomial_mass_above(depth, 1.0 / 3, {0.4, 0.3, 0.3}, {1.0 / 3, 0.5, 0.9}, 0, 0.95);
    INFO("depth " << depth);
    CHECK(result.final().mass_above_threshold == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("class recursion agrees with leaf enumeration") {
  for (const auto& s : {strategy::Strategy{strategy::Born{}},
                        strategy::Strategy{strategy::Egalitarian{}},
                        strategy::Strategy{strategy::SquaredWeightRenormalized{}}}) {
    auto spec = default_spec(0);
    spec.strategy = s;
    spec.games.push_back(quantum::two_outcome_game(1, 2, 1, 0));
    spec.theories.push_back(table_theory("uniform", 0.0, 0.5));
    spec.theories[0].prior = 0.25;
    spec.theories[3].prior = 1.0 / 12;
    for (int depth = 0; depth <= 7; ++depth) {
      spec.depth = depth;
      const auto dp = confirmation_experiment(spec).final();
      const auto leaves = enumerate_leaves(spec, depth);
      INFO(strategy::to_string(s) << " depth " << depth);
      CHECK(dp.mass_above_threshold == doctest::Approx(leaves.mass_above_threshold).epsilon(1e-12));
      CHECK(dp.mean_true_credence == doctest::Approx(leaves.mean_true_credence).epsilon(1e-12));
      CHECK(dp.frozen_mass == doctest::Approx(leaves.frozen_mass).epsilon(1e-12));
    }
  }
}

TEST_CASE("theories with identical likelihoods never separate") {
  ExperimentSpec spec;
  spec.theories = {{"a", 0.7, true, {}}, {"b", 0.3, true, {}}};
  spec.true_theory = "a";
  spec.games = {quantum::two_outcome_game(1, 3, 1, 0)};
  spec.depth = 15;
  for (const auto& it : confirmation_experiment(spec).iterations) {
    for (const auto& c : it.classes) {
      CHECK(c.credences[0] == doctest::Approx(0.7).epsilon(1e-12));
      CHECK(c.credences[1] == doctest::Approx(0.3).epsilon(1e-12));
    }
  }
}

TEST_CASE("born-weighted mean credence in the truth never falls") {
  ExperimentSpec spec;
  spec.theories = {{"born", 0.2, true, {}}, table_theory("uniform", 0.8, 0.5)};
  spec.true_theory = "born";
  spec.games = {quantum::two_outcome_game(1, 3, 1, 0)};
  spec.depth = 25;
  const auto result = confirmation_experiment(spec);
  for (std::size_t i = 1; i < result.iterations.size(); ++i) {
    CHECK(result.iterations[i].mean_true_credence >=
          result.iterations[i - 1].mean_true_credence - 1e-12);
  }
}

TEST_CASE("branches every theory ruled out are frozen") {
  ExperimentSpec spec;
  spec.theories = {table_theory("only-x1", 0.5, 1.0), table_theory("only-x2", 0.5, 0.0)};
  spec.true_theory = "only-x1";
  spec.games = {quantum::two_outcome_game(1, 3, 1, 0)};
  spec.depth = 2;
  const auto result = confirmation_experiment(spec);
  CHECK(result.final().frozen_mass == doctest::Approx(4.0 / 9).epsilon(1e-14));
  bool saw = false;
  for (const auto& c : result.final().classes) {
    if (c.frozen) {
      saw = true;
      CHECK(c.label.rfind("frozen@", 0) == 0);
    }
  }
  CHECK(saw);
  CHECK(enumerate_leaves(spec, 2).frozen_mass == doctest::Approx(4.0 / 9).epsilon(1e-14));
}

TEST_CASE("sampled mass tracks the exact mass") {
  auto spec = default_spec(10);
  spec.theories[1] = table_theory("uniform", 1.0 / 3, 0.5);
  spec.trials = 20000;
  spec.seed = 4;
  const auto result = confirmation_experiment(spec);
  REQUIRE(result.sampled_mass_above_threshold);
  CHECK(std::abs(*result.sampled_mass_above_threshold - result.final().mass_above_threshold) <
        0.02);
  CHECK(confirmation_experiment(spec).sampled_mass_above_threshold ==
        result.sampled_mass_above_threshold);
}

TEST_CASE("experiment specs are validated") {
  auto spec = default_spec(3);
  spec.true_theory = "missing";
  CHECK_THROWS_AS(confirmation_experiment(spec), ValidationError);
  spec = default_spec(3);
  spec.theories[0].prior = 0.9;
  CHECK_THROWS_AS(confirmation_experiment(spec), ValidationError);
  spec = default_spec(-1);
  CHECK_THROWS_AS(confirmation_experiment(spec), ValidationError);
  spec = default_spec(3);
  spec.games.clear();
  CHECK_THROWS_AS(confirmation_experiment(spec), ValidationError);
}

#include <cmath>
#include <random>

#include "doctest.h"

#include "branchlab/errors.hpp"
#include "branchlab/strategy.hpp"

using namespace branchlab;
using namespace branchlab::strategy;
using quantum::MeasurementRealization;

namespace {

const auto kDirect = MeasurementRealization::direct();
const auto kAncilla13 = MeasurementRealization::ancilla(1, 3);

}  // namespace

TEST_CASE("caring measures on the one-third game") {
  auto game = quantum::two_outcome_game(1, 3, 10, 0);
  auto born = caring_measure(Born{}, branching::branch(game, kDirect)).by_outcome();
  CHECK(born.at(1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(born.at(2) == doctest::Approx(2.0 / 3).epsilon(1e-15));

  auto egal = caring_measure(Egalitarian{}, branching::branch(game, kDirect)).by_outcome();
  CHECK(egal.at(1) == 0.5);
  CHECK(egal.at(2) == 0.5);

  auto egal_anc = caring_measure(Egalitarian{}, branching::branch(game, kAncilla13)).by_outcome();
  CHECK(egal_anc.at(1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(egal_anc.at(2) == doctest::Approx(2.0 / 3).epsilon(1e-15));

  // w^2 renormalized: (1/9, 4/9) / (5/9)
  auto squared = caring_measure(SquaredWeightRenormalized{}, branching::branch(game, kDirect)).by_outcome();
  CHECK(squared.at(1) == doctest::Approx(0.2).epsilon(1e-14));

  // |eigenvalue|: 1 and 2
  auto eigen = caring_measure(EigenvalueWeighted{}, branching::branch(game, kDirect)).by_outcome();
  CHECK(eigen.at(2) == doctest::Approx(2.0 / 3).epsilon(1e-15));
}

TEST_CASE("game values and measurement neutrality") {
  auto game = quantum::two_outcome_game(1, 3, 10, 0);
  CHECK(std::abs(value_game(Born{}, game, kDirect) - 10.0 / 3) <= 1e-12);
  CHECK(std::abs(value_game(Born{}, game, kAncilla13) - 10.0 / 3) <= 1e-12);
  CHECK(value_game(Egalitarian{1e-6}, game, kDirect) == 5.0);
  CHECK(std::abs(value_game(Egalitarian{1e-6}, game, kAncilla13) - 10.0 / 3) <= 1e-12);

  CHECK(mn_violation(Born{}, game, {kDirect, kAncilla13}) <= 1e-12);
  CHECK(std::abs(mn_violation(Egalitarian{}, game, {kDirect, kAncilla13}) - 5.0 / 3) <= 1e-12);
  CHECK(mn_violation(Egalitarian{}, game, {kDirect}) == 0.0);
}

TEST_CASE("Born satisfies measurement neutrality on random rational games") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<std::int64_t> den(2, 50);
    const auto n = den(rng);
    std::uniform_int_distribution<std::int64_t> num(1, n - 1);
    std::uniform_int_distribution<int> pick_N(2, 40);
    const int N = pick_N(rng);
    std::uniform_int_distribution<int> pick_k(1, N - 1);
    std::uniform_real_distribution<double> u(-20, 20);
    auto game = quantum::two_outcome_game(num(rng), n, u(rng), u(rng));
    CHECK(mn_violation(Born{}, game, {kDirect, MeasurementRealization::ancilla(pick_k(rng), N)}) <=
          1e-12);
  }
}

TEST_CASE("caring measures are normalized") {
  auto game = quantum::two_outcome_game(2, 7, 1, 0);
  for (const Strategy& s : std::vector<Strategy>{Born{}, Egalitarian{}, SquaredWeightRenormalized{},
                                                 EigenvalueWeighted{}}) {
    for (const auto& r : {kDirect, MeasurementRealization::ancilla(3, 5)}) {
      CHECK(std::abs(caring_measure(s, branching::branch(game, r)).total() - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("Born caring survives rotation and coarse graining, Egalitarian caring does not") {
  auto game = quantum::two_outcome_game(1, 3, 10, 0);
  auto tree = branching::branch(game, kDirect, 8, 1e-9);
  auto rotated = branching::rotate_basis(tree, {1e-3, {{1, 0, 1}, {1, 0, 2}}, 0});
  auto born_before = caring_measure(Born{}, tree).by_outcome();
  auto born_after = caring_measure(Born{}, rotated).by_outcome();
  CHECK(std::abs(born_before.at(1) - born_after.at(1)) <= 1e-12);
  auto egal_after = caring_measure(Egalitarian{1e-9}, rotated).by_outcome();
  CHECK(egal_after.at(1) == doctest::Approx(0.25));
  auto regrained = branching::coarse_grain(rotated, 2);
  CHECK(caring_measure(Egalitarian{1e-9}, regrained).by_outcome().at(1) ==
        doctest::Approx(1.0 / 3));
}

TEST_CASE("undefined caring measures") {
  auto game = quantum::two_outcome_game(1, 3, 10, 0);
  CHECK_THROWS_AS(caring_measure(Egalitarian{0.9}, branching::branch(game, kDirect)), UndefinedError);

  quantum::QuantumGame zero(
      quantum::PureState({"a"}, {quantum::Amplitude::from_complex(1.0)}),
      quantum::Observable("Z", {{"a", 0.0}}), quantum::PayoffFunction({{0.0, {"c", 1}}}));
  CHECK_THROWS_AS(value_game(EigenvalueWeighted{}, zero, kDirect), UndefinedError);
  CHECK_THROWS_AS(caring_measure(TablePreference{}, branching::branch(game, kDirect)),
                  ValidationError);
}

TEST_CASE("physicality: relabeling leaves physical strategies alone") {
  auto game = quantum::two_outcome_game(1, 3, 10, 0);
  for (const Strategy& s : std::vector<Strategy>{Born{}, Egalitarian{}, SquaredWeightRenormalized{}}) {
    for (const auto& r : {kDirect, kAncilla13}) CHECK(physicality_check(s, game, r).delta <= 1e-12);
  }
  // 1 -> 6, 2 -> 7: caring 6/13 vs 7/13 instead of 1/3 vs 2/3
  auto eigen = physicality_check(EigenvalueWeighted{}, game, kDirect);
  CHECK(std::abs(eigen.relabeled - 60.0 / 13) <= 1e-12);
  CHECK(eigen.delta > 1.0);
}

TEST_CASE("table preferences rank game/realization pairs") {
  auto game = quantum::two_outcome_game(1, 3, 10, 0);
  TablePreference table{{{game_key(game, kAncilla13)}, {game_key(game, kDirect)}}};
  CHECK(value_game(table, game, kAncilla13) > value_game(table, game, kDirect));
  CHECK(mn_violation(table, game, {kDirect, kAncilla13}) == 1.0);
  CHECK_THROWS_AS(value_game(table, quantum::two_outcome_game(1, 2, 0, 1), kDirect),
                  ValidationError);
}

TEST_CASE("strategy strings") {
  CHECK(std::holds_alternative<Born>(parse_strategy("born")));
  CHECK(std::get<Egalitarian>(parse_strategy("egalitarian")).tau == 1e-6);
  CHECK(std::get<Egalitarian>(parse_strategy("egalitarian:tau=1e-9")).tau == 1e-9);
  CHECK(to_string(parse_strategy("egalitarian:tau=1e-9")) == "egalitarian:tau=1e-09");
  CHECK(to_string(parse_strategy("squared")) == "squared");
  CHECK(to_string(parse_strategy("eigenvalue")) == "eigenvalue");
  CHECK_THROWS_AS(parse_strategy("egalitarian:tau=0"), ValidationError);
  CHECK_THROWS_AS(parse_strategy("frequentist"), ValidationError);
}

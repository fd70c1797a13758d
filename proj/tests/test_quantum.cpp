#include <cmath>
#include <random>

#include "doctest.h"

#include "branchlab/errors.hpp"
#include "branchlab/quantum.hpp"
#include "oracle.hpp"

using namespace branchlab;
using namespace branchlab::quantum;

namespace {

QuantumGame game_of(std::vector<std::string> labels, std::vector<Amplitude> amps,
                    std::map<std::string, double> eigen, std::map<double, Consequence> pay) {
  return QuantumGame(PureState(std::move(labels), std::move(amps)), Observable("X", std::move(eigen)),
                     PayoffFunction(std::move(pay)));
}

}  // namespace

TEST_CASE("born weights of the worked states") {
  const auto half = Amplitude::sqrt_ratio(1, 2);
  auto equal = game_of({"a", "b"}, {half, half}, {{"a", 1}, {"b", 2}},
                       {{1, {"c1", 0}}, {2, {"c2", 1}}});
  auto w = born_weights(equal);
  CHECK(w.at(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w.at(2) == doctest::Approx(0.5).epsilon(1e-15));

  auto eigenstate = game_of({"a"}, {Amplitude::from_complex(1.0)}, {{"a", 1}}, {{1, {"c", 3}}});
  CHECK(born_weights(eigenstate).at(1) == 1.0);

  auto exact = born_weights_exact(two_outcome_game(1, 3, 10, 0));
  REQUIRE(exact);
  CHECK(exact->at(1) == Rational(1, 3));
  CHECK(exact->at(2) == Rational(2, 3));
}

TEST_CASE("degenerate eigenvalues add their weights") {
  auto third = Amplitude::sqrt_ratio(1, 3);
  auto g = game_of({"a", "b", "c"}, {third, third, third}, {{"a", 1}, {"b", 1}, {"c", 5}},
                   {{1, {"c1", 0}}, {5, {"c5", 1}}});
  auto exact = born_weights_exact(g);
  REQUIRE(exact);
  CHECK(exact->at(1) == Rational(2, 3));
  CHECK(exact->at(5) == Rational(1, 3));
}

TEST_CASE("born weights agree with the amplitude-squared oracle on random complex states") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + trial % 5;
    std::vector<std::complex<double>> c(k);
    double norm = 0.0;
    for (auto& z : c) {
      z = {g(rng), g(rng)};
      norm += std::norm(z);
    }
    std::vector<std::string> labels;
    std::vector<Amplitude> amps;
    std::vector<double> eigen;
    std::map<std::string, double> eigenvalues;
    std::map<double, Consequence> pay;
    for (int i = 0; i < k; ++i) {
      c[i] /= std::sqrt(norm);
      labels.push_back("l" + std::to_string(i));
      amps.push_back(Amplitude::from_complex(c[i].real(), c[i].imag()));
      eigen.push_back(static_cast<double>(i % 3));
      eigenvalues[labels.back()] = eigen.back();
      pay[eigen.back()] = {"c", 0};
    }
    const auto got = born_weights(game_of(labels, amps, eigenvalues, pay));
    const auto want = oracle::born(c, eigen);
    REQUIRE(got.size() == want.size());
    double total = 0.0;
    for (const auto& [x, w] : want) {
      CHECK(std::abs(got.at(x) - w) <= 1e-12);
      total += got.at(x);
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("born weights are permutation equivariant") {
  auto g = two_outcome_game(2, 7, 1, 2);
  auto swapped = relabel_game(g, {{"x1", "x2"}, {"x2", "x1"}}, {{1.0, 2.0}, {2.0, 1.0}});
  auto w = born_weights(g);
  auto v = born_weights(swapped);
  CHECK(v.at(2) == w.at(1));
  CHECK(v.at(1) == w.at(2));
}

TEST_CASE("validation reports name each violated invariant") {
  CHECK(validate_game(two_outcome_game(1, 3, 10, 0)).ok());

  auto short_norm = game_of({"a", "b"}, {Amplitude::sqrt_ratio(1, 2), Amplitude::sqrt_ratio(3, 10)},
                            {{"a", 1}, {"b", 2}}, {{1, {"c1", 0}}, {2, {"c2", 1}}});
  auto report = validate_game(short_norm);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == ViolationKind::Normalization);
  CHECK_THROWS_AS(born_weights(short_norm), ValidationError);

  auto partial = game_of({"a", "b"}, {Amplitude::sqrt_ratio(1, 2), Amplitude::sqrt_ratio(1, 2)},
                         {{"a", 1}, {"b", 2}}, {{1, {"c1", 0}}});
  report = validate_game(partial);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == ViolationKind::PayoffTotality);

  auto unlabeled = game_of({"a", "b"}, {Amplitude::sqrt_ratio(1, 2), Amplitude::sqrt_ratio(1, 2)},
                           {{"a", 1}}, {{1, {"c1", 0}}});
  CHECK(validate_game(unlabeled).violations[0].kind == ViolationKind::MissingEigenvalue);
}

TEST_CASE("amplitudes and states reject bad input") {
  CHECK_THROWS_AS(Amplitude::from_complex(std::nan(""), 0), ValidationError);
  CHECK_THROWS_AS(Amplitude::from_complex(INFINITY, 0), ValidationError);
  CHECK_THROWS_AS(PureState({"a", "a"}, {Amplitude::sqrt_ratio(1, 2), Amplitude::sqrt_ratio(1, 2)}),
                  ValidationError);
  CHECK_THROWS_AS(PureState({"a"}, {}), ValidationError);
  CHECK_THROWS_AS(MeasurementRealization::ancilla(3, 3), ValidationError);
  CHECK_THROWS_AS(MeasurementRealization::ancilla(0, 3), ValidationError);
  CHECK_THROWS_AS(MeasurementRealization::parse("ancilla:n=1"), ValidationError);
}

TEST_CASE("realization text round trips") {
  CHECK(MeasurementRealization::parse("direct").is_direct());
  CHECK(MeasurementRealization::parse("ancilla:n=1,N=3").to_string() == "ancilla:n=1,N=3");
}

TEST_CASE("ancilla coupling for (1,3) on the one-third game") {
  auto coupling = couple_ancilla(two_outcome_game(1, 3, 10, 0), 1, 3);
  const auto& amps = coupling.joint_state.amplitudes();
  REQUIRE(amps.size() == 3);
  for (const auto& a : amps) {
    REQUIRE(a.exact_norm2());
    CHECK(*a.exact_norm2() == Rational(1, 3));
  }
  CHECK(coupling.grouping.at("y1") == 1.0);
  CHECK(coupling.grouping.at("y2") == 2.0);
  CHECK(coupling.grouping.at("y3") == 2.0);
}

TEST_CASE("symmetric coupling n=1, N=2 keeps amplitudes and norm") {
  auto coupling = couple_ancilla(two_outcome_game(1, 2, 0, 1), 1, 2);
  for (const auto& a : coupling.joint_state.amplitudes()) {
    CHECK(a.re() == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  }
  CHECK(*coupling.joint_state.exact_norm2() == Rational(1));
}

TEST_CASE("coupling refuses states that are not two-component") {
  CHECK_THROWS_AS(couple_ancilla(equal_superposition_game({1, 2, 3}), 1, 2), UnsupportedShapeError);
  CHECK_THROWS_AS(couple_ancilla(two_outcome_game(1, 3, 0, 1), 2, 2), ValidationError);
}

TEST_CASE("coupling conserves norm and grouped weight for random rational games") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto [m, n] = oracle::random_fraction(rng, 40);
    std::uniform_int_distribution<int> pick_N(2, 30);
    const int N = pick_N(rng);
    std::uniform_int_distribution<int> pick_k(1, N - 1);
    const int k = pick_k(rng);
    auto game = two_outcome_game(m, n, 1, 0);
    auto coupling = couple_ancilla(game, k, N);
    CHECK(*coupling.joint_state.exact_norm2() == Rational(1));
    CHECK(std::abs(coupling.joint_state.norm2() - 1.0) <= 1e-12);

    std::map<double, Rational> grouped;
    for (std::size_t j = 0; j < coupling.y_labels.size(); ++j) {
      grouped[coupling.grouping.at(coupling.y_labels[j])] +=
          *coupling.joint_state.amplitudes()[j].exact_norm2();
    }
    CHECK(grouped == *born_weights_exact(game));
  }
}

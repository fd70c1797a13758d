#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "branchlab/csv.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/report.hpp"

using namespace branchlab;
using namespace branchlab::io;

namespace {

std::string recipe(const std::string& name) { return std::string(BRANCHLAB_RECIPES) + "/" + name; }

// Runs `f` and returns the ValidationError text, or "" if nothing was thrown.
template <typename F>
std::string validation_message(F&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("csv numbers and quoting") {
  CHECK(csv::number(0.0) == "0");
  CHECK(csv::number(10.0) == "10");
  CHECK(csv::number(1.0 / 3) == "0.333333333333");
  CHECK(csv::number(10.0 / 3) == "3.33333333333");
  CHECK(csv::number(-0.25) == "-0.25");
  CHECK(csv::quote("plain") == "plain");
  CHECK(csv::quote("a,b") == "\"a,b\"");
  CHECK(csv::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  std::ostringstream out;
  csv::write_row(out, {"a", "b,c"});
  CHECK(out.str() == "a,\"b,c\"\r\n");
}

TEST_CASE("game files round-trip") {
  const auto doc = read_json_file(recipe("game_1_3.json"));
  const auto game = game_from_json(doc);
  const auto weights = quantum::born_weights_exact(game);
  REQUIRE(weights);
  CHECK(weights->at(1.0) == quantum::Rational(1, 3));
  CHECK(weights->at(2.0) == quantum::Rational(2, 3));

  const auto again = game_from_json(game_to_json(game));
  CHECK(game_to_json(again) == game_to_json(game));
  CHECK(quantum::born_weights_exact(again) == weights);

  const auto built = quantum::two_outcome_game(1, 3, 10, 0);
  CHECK(game_to_json(game_from_json(game_to_json(built))) == game_to_json(built));
}

TEST_CASE("a list of games parses in order") {
  Json list = Json::array();
  list.push_back(game_to_json(quantum::two_outcome_game(1, 3, 1, 0)));
  list.push_back(game_to_json(quantum::two_outcome_game(1, 2, 1, 0)));
  const auto games = games_from_json(list);
  REQUIRE(games.size() == 2);
  CHECK(*quantum::born_weights_exact(games[1]) ==
        std::map<double, quantum::Rational>{{1.0, {1, 2}}, {2.0, {1, 2}}});
  CHECK(games_from_json(list[0]).size() == 1);
}

TEST_CASE("malformed game documents name the field") {
  auto doc = read_json_file(recipe("game_1_3.json"));

  auto missing = doc;
  missing.erase("state");
  CHECK(validation_message([&] { game_from_json(missing); }).find("state") != std::string::npos);

  auto bad_exact = doc;
  bad_exact["state"][0]["exact"] = "one third";
  CHECK(validation_message([&] { game_from_json(bad_exact); }).find("exact") !=
        std::string::npos);

  auto bad_payoff = doc;
  bad_payoff["payoff"].erase("2");
  CHECK_FALSE(validation_message([&] { game_from_json(bad_payoff); }).empty());

  auto unnormalized = doc;
  unnormalized["state"][0].erase("exact");
  unnormalized["state"][1].erase("exact");
  unnormalized["state"][0]["re"] = 0.9;
  CHECK_FALSE(validation_message([&] { game_from_json(unnormalized); }).empty());
}

TEST_CASE("unreadable files are validation errors") {
  CHECK_THROWS_AS(read_json_file("/nonexistent/game.json"), ValidationError);
  const std::string path = "branchlab_io_test_bad.json";
  {
    std::ofstream f(path);
    f << "{\n  \"state\": [\n    oops\n";
  }
  const auto message = validation_message([&] { read_json_file(path); });
  std::remove(path.c_str());
  CHECK(message.find("line 3") != std::string::npos);
}

TEST_CASE("eigenvalue keys") {
  CHECK(eigenvalue_key(1.0) == "1");
  CHECK(eigenvalue_key(-2.5) == "-2.5");
}

TEST_CASE("output formats") {
  CHECK(parse_format("json") == Format::Json);
  CHECK(parse_format("csv") == Format::Csv);
  CHECK(parse_format("table") == Format::Table);
  CHECK_THROWS_AS(parse_format("xml"), ValidationError);
}

TEST_CASE("stage reports emit deterministically") {
  const auto report = stage_report(dw::verify_stage1(strategy::Born{}, {{0, 1}}));
  const auto json = emit(report, Format::Json);
  CHECK(json == emit(report, Format::Json));
  CHECK(json.rfind("{\n  \"stage\": \"S1\",\n  \"pass\": true,\n  \"verdict\": \"pass\",\n"
                   "  \"residual\": 0,",
                   0) == 0);
  CHECK(json.back() == '\n');
  const auto parsed = Json::parse(json);
  CHECK(parsed["cases"].size() == 1);

  const auto csv = emit(report, Format::Csv);
  CHECK(csv.rfind("label,", 0) == 0);
  CHECK(csv.find("\r\n") != std::string::npos);
  CHECK(emit(report, Format::Table).find("label") == 0);
}

TEST_CASE("an empty table is its header alone") {
  Report r;
  r.table.header = {"a", "b"};
  CHECK(emit(r, Format::Csv) == "a,b\r\n");
}

TEST_CASE("json numbers use twelve significant digits") {
  Json doc;
  doc["third"] = 1.0 / 3;
  doc["inf"] = std::numeric_limits<double>::infinity();
  doc["n"] = 3;
  CHECK(dump_json(doc, -1) == "{\"third\":0.333333333333,\"inf\":null,\"n\":3}");
}

TEST_CASE("preference files as tiers") {
  const auto prefs = preferences_from_json(read_json_file(recipe("prefs.json")));
  CHECK(prefs.setup().states.size() == 2);
  CHECK(prefs.tiers().size() == 4);
  const auto again = preferences_from_json(preferences_to_json(prefs));
  CHECK(preferences_to_json(again) == preferences_to_json(prefs));
}

TEST_CASE("preference files with judgments") {
  const auto doc = Json::parse(R"({
    "setup": {"kind": "chance", "states": ["s1", "s2"], "consequences": ["win", "lose"]},
    "acts": [{"s1": "win", "s2": "win"}, {"s1": "lose", "s2": "lose"}, {"s1": "win", "s2": "lose"}],
    "judgments": [{"better": 0, "worse": 1, "strict": true}]
  })");
  const auto prefs = preferences_from_json(doc);
  CHECK(prefs.acts().size() == 3);
  CHECK(prefs.strictly_prefers(0, 1));
  CHECK_FALSE(prefs.weakly_prefers(0, 2).has_value());
}

TEST_CASE("malformed preference files") {
  CHECK_THROWS_AS(preferences_from_json(Json::parse(R"({"tiers": [], "extra": 1})")),
                  ValidationError);
  CHECK_THROWS_AS(preferences_from_json(Json::parse("42")), ValidationError);
  CHECK_THROWS_AS(preferences_from_json(Json::parse(R"([[{"s1": "win"}], [{"s2": "win"}]])")),
                  ValidationError);
  CHECK_THROWS_AS(preferences_from_json(Json::parse(R"({
    "setup": {"states": ["s1"], "consequences": ["win"]},
    "acts": [{"s1": "win"}],
    "judgments": [{"better": 0, "worse": 5}]
  })")),
                  ValidationError);
}

TEST_CASE("extraction reports carry the witness when infeasible") {
  decision::Setup setup{decision::SetupKind::Chance, {"R", "B", "Y"}, {"win", "lose"}};
  using decision::Act;
  const auto prefs = decision::PreferenceRelation::from_tiers(
      setup, {{Act::constant(setup, "win")},
              {Act::bet(setup, {"B", "Y"}, "win", "lose")},
              {Act::bet(setup, {"R", "Y"}, "win", "lose")},
              {Act::bet(setup, {"R"}, "win", "lose")},
              {Act::bet(setup, {"B"}, "win", "lose")},
              {Act::constant(setup, "lose")}});
  const auto report = extraction_report(prefs, decision::extract_representation(prefs));
  CHECK(report.document["status"] == "infeasible");
  CHECK(report.document["pass"] == false);
  CHECK(report.document["witness"].size() == 2);
}

TEST_CASE("theory files") {
  confirm::ExperimentSpec spec;
  theories_from_json(read_json_file(recipe("theories.json")), spec);
  REQUIRE(spec.theories.size() == 3);
  CHECK(spec.true_theory == "born");
  CHECK(spec.theories[0].born);
  CHECK(spec.theories[1].table.at(1.0) == 1.0);

  confirm::ExperimentSpec other;
  CHECK_THROWS_AS(theories_from_json(Json::parse(R"({"theories": []})"), other), ValidationError);
  CHECK_THROWS_AS(theories_from_json(Json::parse(R"({"true_theory": "x", "theories": [
      {"name": "y", "prior": 1, "likelihoods": "born"}]})"),
                                     other),
                  ValidationError);
}

TEST_CASE("confirmation trajectory table") {
  confirm::ExperimentSpec spec;
  theories_from_json(read_json_file(recipe("theories.json")), spec);
  spec.games = {quantum::two_outcome_game(1, 3, 1, 0)};
  spec.depth = 3;
  const auto report = confirmation_report(spec, confirm::confirmation_experiment(spec));
  REQUIRE(report.table.header.size() == 6);
  CHECK(report.table.header[0] == "iteration");
  CHECK(report.table.header[3] == "credence_born");
  CHECK(report.table.rows.front()[0] == 0);
  CHECK(report.table.rows.back()[0] == 3);
}

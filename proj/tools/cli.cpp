#include "branchlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "branchlab/confirmation.hpp"
#include "branchlab/csv.hpp"
#include "branchlab/decision.hpp"
#include "branchlab/dw_verifier.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/io.hpp"
#include "branchlab/report.hpp"
#include "branchlab/strategy.hpp"

namespace branchlab::cli {

namespace {

using io::Json;

struct Common {
  std::string format;
  std::string out;
  std::uint64_t seed = 1;
};

struct GameEval {
  std::string game;
  std::string strategy = "born";
  std::vector<std::string> realizations;
  bool physicality = false;
};

struct DwVerify {
  std::string stage;
  std::string strategy = "born";
  std::optional<int> m;
  std::optional<int> n;
  int n_max = 0;
  std::optional<int> sweep;
  std::optional<double> a1_squared;
  double tolerance = 1e-4;
  std::int64_t cap = dw::kDefaultDenominatorCap;
  double epsilon = 1e-3;
  std::string weights;
  std::string utilities;
};

struct EgalDemo {
  std::string game;
  double epsilon = 1e-3;
  int fine_dim = 8;
  int rotations = 8;
  double tau = 1e-9;
  std::vector<int> coarse;
};

struct DutchBook {
  double prior = 0.5;
  double lik_t = 0.8;
  double lik_not_t = 0.2;
  std::optional<double> q;
  std::string policy = "deviant";
  double stake = 1.0;
  int random = 0;
};

struct ConfirmRun {
  std::string theories;
  std::string games;
  std::string strategy = "born";
  int depth = 20;
  int trials = 0;
  double threshold = 0.95;
  int cross_check_depth = 0;
};

struct Extract {
  std::string prefs;
  int roundtrip = 0;
};

struct Outcome {
  io::Report report;
  bool pass = true;
  std::string default_name;
};

io::Format resolve_format(const Common& common, const std::string& path) {
  if (!common.format.empty()) return io::parse_format(common.format);
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".csv") return io::Format::Csv;
  if (ext == ".txt") return io::Format::Table;
  return io::Format::Json;
}

std::string resolve_out(const Common& common, const std::string& default_name) {
  const char* dir = std::getenv("BRANCHLAB_OUT_DIR");
  if (common.out.empty()) {
    if (!dir || !*dir) return {};
    return (std::filesystem::path(dir) / default_name).string();
  }
  std::filesystem::path path(common.out);
  if (dir && *dir && path.is_relative()) path = std::filesystem::path(dir) / path;
  return path.string();
}

void write_output(const std::string& bytes, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << bytes;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ValidationError("cannot write '" + path + "'");
  file << bytes;
  if (!file) throw ValidationError("cannot write '" + path + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used == text.size()) return x;
  } catch (const std::exception&) {
  }
  throw ValidationError(what + ": '" + text + "' is not a number");
}

quantum::QuantumGame load_game(const std::string& path) {
  return io::game_from_json(io::read_json_file(path));
}

// One report out of several runs of the same stage.
dw::StageReport merge(dw::Stage stage, std::vector<dw::StageReport> runs) {
  dw::StageReport merged;
  merged.stage = stage;
  merged.verdict = dw::Verdict::Pass;
  if (!runs.empty()) {
    merged.tolerance = runs.front().tolerance;
    merged.details = runs.front().details;
  }
  for (auto& run : runs) {
    merged.residual = std::max(merged.residual, run.residual);
    if (run.verdict == dw::Verdict::Fail) merged.verdict = dw::Verdict::Fail;
    if (run.verdict == dw::Verdict::Inconclusive && merged.verdict == dw::Verdict::Pass) {
      merged.verdict = dw::Verdict::Inconclusive;
    }
    for (auto& c : run.cases) merged.cases.push_back(std::move(c));
  }
  if (runs.size() > 1) merged.details += "; " + std::to_string(runs.size()) + " runs merged";
  return merged;
}

Outcome run_game_eval(const GameEval& opts) {
  const auto game = load_game(opts.game);
  quantum::require_valid(game);
  const auto strategy = strategy::parse_strategy(opts.strategy);
  std::vector<quantum::MeasurementRealization> realizations;
  for (const auto& text : opts.realizations) {
    realizations.push_back(quantum::MeasurementRealization::parse(text));
  }
  if (realizations.empty()) realizations.push_back(quantum::MeasurementRealization::direct());

  Outcome result{{}, true, "game-eval.json"};
  auto& doc = result.report.document;
  doc["strategy"] = strategy::to_string(strategy);
  result.report.table.header = {"realization", "value"};
  Json values = Json::array();
  for (const auto& realization : realizations) {
    const double value = strategy::value_game(strategy, game, realization);
    Json entry;
    entry["realization"] = realization.to_string();
    entry["value"] = value;
    if (!std::holds_alternative<strategy::TablePreference>(strategy)) {
      const auto tree = branching::branch(game, realization);
      entry["caring"] = Json::object();
      for (const auto& [x, w] : strategy::caring_measure(strategy, tree).by_outcome()) {
        entry["caring"][csv::number(x)] = w;
      }
    }
    values.push_back(std::move(entry));
    result.report.table.rows.push_back({realization.to_string(), value});
  }
  doc["values"] = std::move(values);
  const double mn = strategy::mn_violation(strategy, game, realizations);
  doc["mn_violation"] = mn;
  result.pass = mn <= dw::kStageTolerance;
  if (opts.physicality) {
    const auto check = strategy::physicality_check(strategy, game, realizations.front());
    doc["physicality"] = {{"original", check.original},
                          {"relabeled", check.relabeled},
                          {"delta", check.delta},
                          {"pass", check.delta <= dw::kStageTolerance}};
    result.pass = result.pass && check.delta <= dw::kStageTolerance;
    result.report.table.rows.push_back({"relabeled", check.relabeled});
  }
  doc["pass"] = result.pass;
  return result;
}

Outcome stage_outcome(const dw::StageReport& report) {
  return {io::stage_report(report), report.pass(), "dw-verify.json"};
}

Outcome run_dw_verify(const DwVerify& opts, std::uint64_t seed) {
  const auto strategy = strategy::parse_strategy(opts.strategy);
  if (opts.stage == "1") {
    std::vector<dw::PayoffPair> payoffs{{0.0, 1.0}};
    const auto random = dw::random_payoff_pairs(static_cast<std::size_t>(opts.sweep.value_or(100)), seed);
    payoffs.insert(payoffs.end(), random.begin(), random.end());
    return stage_outcome(dw::verify_stage1(strategy, payoffs));
  }
  if (opts.stage == "2") {
    const int sweep = opts.sweep.value_or(20);
    const int lo = opts.n ? *opts.n : 2;
    const int hi = opts.n ? *opts.n : (opts.n_max > 0 ? opts.n_max : 64);
    std::vector<dw::StageReport> runs;
    for (int n = lo; n <= hi; ++n) {
      const auto flat = dw::random_rational_payoffs(static_cast<std::size_t>(n * sweep),
                                                    seed + static_cast<std::uint64_t>(n));
      std::vector<std::vector<double>> payoffs;
      for (int k = 0; k < sweep; ++k) {
        payoffs.emplace_back(flat.begin() + k * n, flat.begin() + (k + 1) * n);
      }
      runs.push_back(dw::verify_stage2(strategy, n, payoffs));
    }
    return stage_outcome(merge(dw::Stage::S2, std::move(runs)));
  }
  if (opts.stage == "3") {
    const int sweep = opts.sweep.value_or(opts.m && opts.n ? 0 : 5);
    std::vector<dw::PayoffPair> payoffs{{10.0, 0.0}};
    const auto random = dw::random_payoff_pairs(static_cast<std::size_t>(sweep), seed);
    payoffs.insert(payoffs.end(), random.begin(), random.end());
    if (opts.m && opts.n) return stage_outcome(dw::verify_stage3(strategy, *opts.m, *opts.n, payoffs));
    if (opts.m || opts.n) throw ValidationError("--m and --n go together");
    const int n_max = opts.n_max > 0 ? opts.n_max : 32;
    std::vector<dw::StageReport> runs;
    for (int n = 2; n <= n_max; ++n) {
      for (int m = 1; m < n; ++m) runs.push_back(dw::verify_stage3(strategy, m, n, payoffs));
    }
    return stage_outcome(merge(dw::Stage::S3, std::move(runs)));
  }
  if (opts.stage == "general") {
    std::vector<double> targets;
    if (opts.a1_squared) {
      targets.push_back(*opts.a1_squared);
    } else {
      targets = {1.0 / std::sqrt(2.0), std::acos(-1.0) / 4.0, std::exp(1.0) / 3.0};
    }
    std::vector<dw::StageReport> runs;
    for (double a : targets) {
      runs.push_back(dw::verify_stage_general(strategy, a, opts.tolerance, {1.0, 0.0}, opts.cap));
    }
    return stage_outcome(merge(dw::Stage::S4to6, std::move(runs)));
  }
  if (opts.stage == "multi") {
    std::vector<quantum::Rational> weights;
    for (const auto& w : split(opts.weights, ',')) {
      const auto slash = w.find('/');
      try {
        weights.push_back(slash == std::string::npos
                              ? quantum::Rational(std::stoll(w))
                              : quantum::Rational(std::stoll(w.substr(0, slash)),
                                                  std::stoll(w.substr(slash + 1))));
      } catch (const std::exception&) {
        throw ValidationError("--weights: '" + w + "' is not a fraction m/n");
      }
    }
    std::vector<double> utilities;
    for (const auto& u : split(opts.utilities, ',')) utilities.push_back(parse_double(u, "--utilities"));
    return stage_outcome(dw::verify_stage_multi(strategy, weights, utilities));
  }
  if (opts.stage == "egal-demo") {
    const auto scenario = dw::regression_demo_scenario(opts.epsilon);
    return stage_outcome(dw::egalitarian_incoherence_demo(scenario.game, scenario.steps,
                                                          scenario.fine_dim, scenario.tau));
  }
  throw ValidationError("--stage must be one of 1, 2, 3, general, multi, egal-demo");
}

Outcome run_egal_demo(const EgalDemo& opts, std::uint64_t seed) {
  if (opts.game.empty()) {
    const auto scenario = dw::regression_demo_scenario(opts.epsilon);
    auto outcome = stage_outcome(dw::egalitarian_incoherence_demo(
        scenario.game, scenario.steps, scenario.fine_dim, scenario.tau));
    outcome.default_name = "egal-demo.json";
    return outcome;
  }
  const auto game = load_game(opts.game);
  const auto tree =
      branching::branch(game, quantum::MeasurementRealization::direct(), opts.fine_dim, opts.tau);
  std::vector<dw::DemoStep> steps{
      branching::RotationConfig::random(opts.epsilon, tree, opts.rotations, seed)};
  for (int factor : opts.coarse) steps.push_back(dw::CoarseGrainStep{factor});
  auto outcome =
      stage_outcome(dw::egalitarian_incoherence_demo(game, steps, opts.fine_dim, opts.tau));
  outcome.default_name = "egal-demo.json";
  return outcome;
}

confirm::UpdatePolicy make_policy(const std::string& name, std::optional<double> q) {
  if (name == "conditionalize") return confirm::Conditionalize{};
  if (name == "rigid") return confirm::Rigid{};
  if (name == "deviant") {
    if (!q) throw ValidationError("--policy deviant needs --q");
    confirm::Deviant d;
    d.posterior[{"T", "A"}] = *q;
    return d;
  }
  throw ValidationError("--policy must be deviant, rigid or conditionalize");
}

bool book_is_sure_loss(const std::optional<confirm::Book>& book) {
  if (!book) return true;
  for (const auto& truth : confirm::kTruthCases) {
    if (std::abs(book->net(truth) - book->guaranteed_loss()) > 1e-12) return false;
  }
  return true;
}

Outcome run_dutchbook(const DutchBook& opts, std::uint64_t seed) {
  if (opts.random <= 0) {
    const auto state = confirm::binary_state(opts.prior, opts.lik_t, opts.lik_not_t);
    const auto book = confirm::build_dutch_book(state, make_policy(opts.policy, opts.q), "A",
                                                "T", opts.stake);
    Outcome outcome{io::book_report(book), book_is_sure_loss(book), "dutchbook.json"};
    outcome.report.document["pass"] = outcome.pass;
    return outcome;
  }

  constexpr double kDelta = 0.01;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Outcome outcome{{}, true, "dutchbook.json"};
  auto& table = outcome.report.table;
  table.header = {"case", "p_evidence", "p", "q", "stake", "expected", "worst_error"};
  double worst = 0.0;
  bool sure_loss = true;
  for (int i = 0; i < opts.random; ++i) {
    double prior = 0.0, lt = 0.0, lnt = 0.0, a = 0.0, p = 0.0;
    do {
      prior = unit(rng);
      lt = unit(rng);
      lnt = unit(rng);
      a = prior * lt + (1.0 - prior) * lnt;
    } while (a < kDelta || a > 1.0 - kDelta);
    p = prior * lt / a;
    double q = 0.0;
    do {
      q = unit(rng);
    } while (std::abs(q - p) < kDelta);
    const double stake = 0.1 + 9.9 * unit(rng);
    const auto state = confirm::binary_state(prior, lt, lnt);
    const auto book =
        confirm::build_dutch_book(state, make_policy("deviant", q), "A", "T", stake);
    const double expected = -std::abs(p - q) * a * stake;
    double error = book ? 0.0 : std::abs(expected);
    for (const auto& truth : confirm::kTruthCases) {
      const double net = book ? book->net(truth) : 0.0;
      error = std::max(error, std::abs(net - expected));
      if (net > -kDelta * kDelta * stake) sure_loss = false;
    }
    worst = std::max(worst, error);
    table.rows.push_back({i, a, p, q, stake, expected, error});
  }
  outcome.pass = worst <= 1e-12 && sure_loss;
  auto& doc = outcome.report.document;
  doc["cases"] = opts.random;
  doc["pass"] = outcome.pass;
  doc["max_error"] = worst;
  doc["sure_loss_every_case"] = sure_loss;
  return outcome;
}

Outcome run_confirm(const ConfirmRun& opts, std::uint64_t seed) {
  confirm::ExperimentSpec spec;
  spec.strategy = strategy::parse_strategy(opts.strategy);
  spec.depth = opts.depth;
  spec.trials = opts.trials;
  spec.threshold = opts.threshold;
  spec.seed = seed;
  if (opts.games.empty()) {
    spec.games = {quantum::two_outcome_game(1, 3, 1.0, 0.0)};
  } else {
    spec.games = io::games_from_json(io::read_json_file(opts.games));
  }
  if (opts.theories.empty()) {
    confirm::TheoryModel born{"born", 1.0 / 3.0, true, {}};
    confirm::TheoryModel first{"only-x1", 1.0 / 3.0, false, {{1.0, 1.0}, {2.0, 0.0}}};
    confirm::TheoryModel second{"only-x2", 1.0 / 3.0, false, {{1.0, 0.0}, {2.0, 1.0}}};
    spec.theories = {born, first, second};
    spec.true_theory = "born";
  } else {
    io::theories_from_json(io::read_json_file(opts.theories), spec);
  }
  const auto result = confirm::confirmation_experiment(spec);
  Outcome outcome{io::confirmation_report(spec, result), true, "confirm.csv"};
  if (opts.cross_check_depth > 0) {
    if (opts.cross_check_depth > spec.depth) {
      throw ValidationError("--cross-check-depth cannot exceed --depth");
    }
    const auto leaves = confirm::enumerate_leaves(spec, opts.cross_check_depth);
    const auto& classes = result.iterations[static_cast<std::size_t>(opts.cross_check_depth)];
    const double mass_gap = std::abs(leaves.mass_above_threshold - classes.mass_above_threshold);
    const double mean_gap = std::abs(leaves.mean_true_credence - classes.mean_true_credence);
    outcome.pass = mass_gap <= 1e-12 && mean_gap <= 1e-12;
    outcome.report.document["cross_check"] = {{"depth", opts.cross_check_depth},
                                              {"leaves", leaves.classes.size()},
                                              {"mass_above_threshold", leaves.mass_above_threshold},
                                              {"mean_true_credence", leaves.mean_true_credence},
                                              {"pass", outcome.pass}};
  }
  return outcome;
}

Outcome run_extract(const Extract& opts, std::uint64_t seed) {
  if (!opts.prefs.empty()) {
    const auto prefs = io::preferences_from_json(io::read_json_file(opts.prefs));
    const auto extraction = decision::extract_representation(prefs);
    Outcome outcome{io::extraction_report(prefs, extraction), false, "extract.json"};
    outcome.pass = outcome.report.document["pass"].get<bool>();
    return outcome;
  }
  if (opts.roundtrip <= 0) throw ValidationError("extract needs --prefs or --roundtrip N");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 4);
  Outcome outcome{{}, true, "extract.json"};
  outcome.report.table.header = {"trial", "states", "consequences", "status", "margin",
                                 "reproduced"};
  int reproduced_count = 0;
  for (int trial = 0; trial < opts.roundtrip; ++trial) {
    decision::Setup setup;
    const int states = size(rng);
    const int consequences = size(rng);
    for (int s = 0; s < states; ++s) setup.states.push_back("s" + std::to_string(s + 1));
    for (int c = 0; c < consequences; ++c) setup.consequences.push_back("c" + std::to_string(c + 1));
    const auto acts = decision::all_acts(setup);
    decision::Representation rep;
    for (;;) {
      double total = 0.0;
      for (const auto& s : setup.states) total += rep.probability[s] = 0.05 + unit(rng);
      for (auto& [s, p] : rep.probability) p /= total;
      for (const auto& c : setup.consequences) rep.utility[c] = unit(rng);
      std::vector<double> eu;
      for (const auto& act : acts) eu.push_back(decision::expected_utility(act, rep));
      std::sort(eu.begin(), eu.end());
      bool distinct = true;
      for (std::size_t i = 1; i < eu.size(); ++i) distinct = distinct && eu[i] - eu[i - 1] >= 1e-6;
      if (distinct) break;
    }
    const auto prefs = decision::generate_preferences(setup, acts, rep);
    const auto extraction = decision::extract_representation(prefs);
    const bool found = extraction.status == decision::ExtractionStatus::Found;
    const bool ok = found && decision::reproduces(prefs, *extraction.representation);
    if (ok) ++reproduced_count;
    outcome.report.table.rows.push_back(
        {trial, states, consequences, found ? "found" : "not found", extraction.margin, ok});
  }
  outcome.pass = reproduced_count == opts.roundtrip;
  auto& doc = outcome.report.document;
  doc["trials"] = opts.roundtrip;
  doc["reproduced"] = reproduced_count;
  doc["pass"] = outcome.pass;
  return outcome;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decision-theoretic experiments on branching quantum games", "branchlab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "TOML/INI file of option values; flags override it");

  Common common;
  app.add_option("--format", common.format, "json, csv or table (default: from --out, else json)")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--out", common.out, "output file (relative paths resolve under BRANCHLAB_OUT_DIR)");
  app.add_option("--seed", common.seed, "seed for every randomized sweep");

  auto* game = app.add_subcommand("game", "quantum games")->require_subcommand(1)->configurable();
  GameEval game_eval;
  auto* eval = game->add_subcommand("eval", "value a game under a strategy")->configurable();
  eval->add_option("--game", game_eval.game, "game JSON file")->required();
  eval->add_option("--strategy", game_eval.strategy, "born, egalitarian[:tau=X], squared, eigenvalue");
  eval->add_option("--realization", game_eval.realizations,
                   "direct or ancilla:n=N1,N=N2 (repeatable)");
  eval->add_flag("--physicality", game_eval.physicality,
                 "also value a relabeled copy and fail if the value moves");

  auto* dw_cmd = app.add_subcommand("dw", "staged derivation checks")->require_subcommand(1)->configurable();
  DwVerify verify;
  auto* verify_cmd = dw_cmd->add_subcommand("verify", "run one stage")->configurable();
  verify_cmd->add_option("--stage", verify.stage, "1, 2, 3, general, multi or egal-demo")->required();
  verify_cmd->add_option("--strategy", verify.strategy, "strategy to test");
  verify_cmd->add_option("--m", verify.m, "stage 3 numerator");
  verify_cmd->add_option("--n", verify.n, "stage 2 size or stage 3 denominator");
  verify_cmd->add_option("--n-max", verify.n_max, "largest n when sweeping (64 for stage 2, 32 for stage 3)");
  verify_cmd->add_option("--sweep", verify.sweep, "random payoffs per case");
  verify_cmd->add_option("--a1-squared", verify.a1_squared, "general stage target weight");
  verify_cmd->add_option("--tolerance", verify.tolerance, "general stage tolerance");
  verify_cmd->add_option("--cap", verify.cap, "largest denominator for the general stage");
  verify_cmd->add_option("--epsilon", verify.epsilon, "rotation angle for egal-demo");
  verify_cmd->add_option("--weights", verify.weights, "multi stage weights, e.g. 1/2,1/3,1/6");
  verify_cmd->add_option("--utilities", verify.utilities, "multi stage utilities, e.g. 1,2,3");

  auto* egal = app.add_subcommand("egal", "egalitarian strategy")->require_subcommand(1)->configurable();
  EgalDemo demo;
  auto* demo_cmd =
      egal->add_subcommand("demo", "branch counts under rotation and coarse graining")->configurable();
  demo_cmd->add_option("--game", demo.game, "game JSON file (default: the regression scenario)");
  demo_cmd->add_option("--epsilon", demo.epsilon, "rotation angle");
  demo_cmd->add_option("--fine-dim", demo.fine_dim, "cells per leaf");
  demo_cmd->add_option("--rotations", demo.rotations, "random cell-pair rotations (with --game)");
  demo_cmd->add_option("--tau", demo.tau, "occupation threshold");
  demo_cmd->add_option("--coarse", demo.coarse, "coarse-graining factors applied in order");

  DutchBook book;
  auto* book_cmd =
      app.add_subcommand("dutchbook", "three-bet book against a deviant updater")->configurable();
  book_cmd->add_option("--prior", book.prior, "p(T)");
  book_cmd->add_option("--lik-t", book.lik_t, "p(A|T)");
  book_cmd->add_option("--lik-not-t", book.lik_not_t, "p(A|not T)");
  book_cmd->add_option("--q", book.q, "announced posterior in T after A");
  book_cmd->add_option("--policy", book.policy, "deviant, rigid or conditionalize");
  book_cmd->add_option("--stake", book.stake, "stake S");
  book_cmd->add_option("--random", book.random, "check N random deviant cases instead");

  auto* confirm_cmd =
      app.add_subcommand("confirm", "confirmation experiments")->require_subcommand(1)->configurable();
  ConfirmRun confirm_run;
  auto* run_cmd =
      confirm_cmd->add_subcommand("run", "credence trajectories over repeated games")->configurable();
  run_cmd->add_option("--theories", confirm_run.theories, "theories JSON file");
  run_cmd->add_option("--games", confirm_run.games, "game or list of games, played cyclically");
  run_cmd->add_option("--strategy", confirm_run.strategy, "caring measure per step");
  run_cmd->add_option("--depth", confirm_run.depth, "number of measurements");
  run_cmd->add_option("--trials", confirm_run.trials, "Monte Carlo paths (0: exact only)");
  run_cmd->add_option("--threshold", confirm_run.threshold, "credence threshold for the true theory");
  run_cmd->add_option("--cross-check-depth", confirm_run.cross_check_depth,
                      "compare with leaf-by-leaf enumeration at this depth");

  Extract extract;
  auto* extract_cmd =
      app.add_subcommand("extract", "probability and utility from preferences")->configurable();
  extract_cmd->add_option("--prefs", extract.prefs, "preference JSON file");
  extract_cmd->add_option("--roundtrip", extract.roundtrip, "random round trips instead");

  if (args.empty()) {
    err << app.help();
    return kExitUsage;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    Outcome outcome;
    if (eval->parsed()) {
      outcome = run_game_eval(game_eval);
    } else if (verify_cmd->parsed()) {
      outcome = run_dw_verify(verify, common.seed);
    } else if (demo_cmd->parsed()) {
      outcome = run_egal_demo(demo, common.seed);
    } else if (book_cmd->parsed()) {
      outcome = run_dutchbook(book, common.seed);
    } else if (run_cmd->parsed()) {
      outcome = run_confirm(confirm_run, common.seed);
    } else {
      outcome = run_extract(extract, common.seed);
    }
    const auto path = resolve_out(common, outcome.default_name);
    const auto format = resolve_format(common, path.empty() ? outcome.default_name : path);
    write_output(io::emit(outcome.report, format), path, out);
    return outcome.pass ? kExitOk : kExitFailed;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedShapeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UndefinedError& e) {
    err << "undefined: " << e.what() << "\n";
    return kExitFailed;
  }
}

}  // namespace branchlab::cli

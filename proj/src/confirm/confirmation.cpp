#include "branchlab/confirmation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "branchlab/csv.hpp"
#include "branchlab/errors.hpp"

namespace branchlab::confirm {

namespace {

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_unit(double x, const std::string& what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ValidationError(what + " must lie in [0,1], got " + csv::number(x));
  }
}

}  // namespace

void CredenceState::validate() const {
  if (credences.empty()) throw ValidationError("credence state has no theories");
  double total = 0.0;
  for (const auto& [theory, p] : credences) {
    require_unit(p, "credence in " + theory);
    total += p;
  }
  if (std::abs(total - 1.0) > kCredenceTolerance) {
    throw ValidationError("credences sum to " + csv::number(total) + ", not 1");
  }
  for (const auto& [theory, table] : likelihoods) {
    if (!credences.count(theory)) {
      throw ValidationError("likelihoods given for unknown theory " + theory);
    }
    for (const auto& [evidence, p] : table) {
      require_unit(p, "p(" + evidence + "|" + theory + ")");
    }
  }
}

double CredenceState::evidence_probability(const std::string& evidence) const {
  double total = 0.0;
  for (const auto& [theory, p] : credences) {
    const auto table = likelihoods.find(theory);
    if (table == likelihoods.end() || !table->second.count(evidence)) {
      throw ValidationError("no likelihood p(" + evidence + "|" + theory + ")");
    }
    total += table->second.at(evidence) * p;
  }
  return total;
}

double CredenceState::posterior(const std::string& theory, const std::string& evidence) const {
  return conditionalize(*this, evidence).credences.at(theory);
}

CredenceState conditionalize(const CredenceState& state, const std::string& evidence) {
  state.validate();
  const double pa = state.evidence_probability(evidence);
  if (!(pa > 0.0)) {
    throw UndefinedError("cannot conditionalize on " + evidence + ": p(" + evidence + ") = 0");
  }
  // Likelihoods are scaled by the largest live one, so evidence every
  // theory predicts equally multiplies each credence by exactly 1.
  double top = 0.0;
  for (const auto& [theory, p] : state.credences) {
    if (p > 0.0) top = std::max(top, state.likelihoods.at(theory).at(evidence));
  }
  CredenceState next = state;
  double total = 0.0;
  for (auto& [theory, p] : next.credences) {
    p *= state.likelihoods.at(theory).at(evidence) / top;
    total += p;
  }
  for (auto& [theory, p] : next.credences) p /= total;
  return next;
}

CredenceState binary_state(double prior, double likelihood_t, double likelihood_not_t,
                           const std::string& theory, const std::string& evidence) {
  CredenceState state;
  const std::string negation = "not-" + theory;
  state.credences = {{theory, prior}, {negation, 1.0 - prior}};
  state.likelihoods = {{theory, {{evidence, likelihood_t}}},
                       {negation, {{evidence, likelihood_not_t}}}};
  state.validate();
  return state;
}

double announced_posterior(const UpdatePolicy& policy, const CredenceState& state,
                           const std::string& theory, const std::string& evidence) {
  return std::visit(
      overloaded{
          [&](const Conditionalize&) { return state.posterior(theory, evidence); },
          [&](const Deviant& d) {
            const auto it = d.posterior.find({theory, evidence});
            if (it == d.posterior.end()) {
              throw ValidationError("deviant policy announces nothing for " + theory +
                                    " given " + evidence);
            }
            require_unit(it->second, "announced posterior q");
            return it->second;
          },
          [&](const Rigid&) { return state.credences.at(theory); },
      },
      policy);
}

double Bet::net(TruthCase truth) const {
  bool wins = false;
  switch (kind) {
    case BetKind::TheoryGivenEvidence:
    case BetKind::TheoryAfterEvidence:
      if (!truth.evidence) return 0.0;
      wins = truth.theory;
      break;
    case BetKind::Evidence:
      wins = truth.evidence;
      break;
  }
  const double buyer = stake * ((wins ? 1.0 : 0.0) - quotient);
  return direction == Direction::Buy ? buyer : -buyer;
}

double Bet::expected(double credence) const {
  const double buyer = stake * (credence - quotient);
  return direction == Direction::Buy ? buyer : -buyer;
}

double Book::net(TruthCase truth) const {
  double total = 0.0;
  for (const auto& bet : bets) total += bet.net(truth);
  return total;
}

double Book::guaranteed_loss() const { return -std::abs(p - q) * a * stake; }

std::optional<Book> build_dutch_book(const CredenceState& state, const UpdatePolicy& policy,
                                     const std::string& evidence, const std::string& theory,
                                     double stake) {
  state.validate();
  if (!state.credences.count(theory)) throw ValidationError("unknown theory " + theory);
  if (!(stake >= 0.0) || !std::isfinite(stake)) {
    throw ValidationError("stake must be a non-negative number");
  }
  const double a = state.evidence_probability(evidence);
  if (!(a > 0.0 && a < 1.0)) {
    throw ValidationError("p(" + evidence + ") must lie strictly inside (0,1), got " +
                          csv::number(a));
  }
  if (std::holds_alternative<Conditionalize>(policy)) return std::nullopt;
  const double p = state.posterior(theory, evidence);
  const double q = announced_posterior(policy, state, theory, evidence);
  if (std::abs(p - q) <= kQuotientParity) return std::nullopt;

  // With p > q the agent buys the conditional bet and later sells T at the
  // lower price; with p < q both directions flip. Either way the agent
  // buys the hedge on A.
  const auto first = p > q ? Direction::Buy : Direction::Sell;
  const auto third = p > q ? Direction::Sell : Direction::Buy;
  const std::string t = theory;
  const std::string e = evidence;

  Book book;
  book.p = p;
  book.q = q;
  book.a = a;
  book.stake = stake;
  book.bets[0] = {"(i) conditional bet on " + t + " given " + e + ", called off unless " + e,
                  Placement::BeforeEvidence,
                  BetKind::TheoryGivenEvidence,
                  first,
                  p,
                  stake};
  book.bets[1] = {"(ii) bet on " + e + " at p(" + e + ")", Placement::BeforeEvidence,
                  BetKind::Evidence, Direction::Buy, a, std::abs(p - q) * stake};
  book.bets[2] = {"(iii) bet on " + t + " after observing " + e + ", at the announced posterior",
                  Placement::AfterEvidence,
                  BetKind::TheoryAfterEvidence,
                  third,
                  q,
                  stake};

  std::ostringstream text;
  text << "agent " << (first == Direction::Buy ? "buys" : "sells") << " (i) at p(" << t << "|"
       << e << ")=" << csv::number(p) << " stake " << csv::number(stake) << "; buys (ii) at p("
       << e << ")=" << csv::number(a) << " stake |p-q|*S=" << csv::number(std::abs(p - q) * stake)
       << "; if " << e << ", " << (third == Direction::Buy ? "buys" : "sells") << " (iii) at q="
       << csv::number(q) << " stake " << csv::number(stake)
       << "; net -|p-q|*p(" << e << ")*S=" << csv::number(book.guaranteed_loss())
       << " in every case";
  book.construction = text.str();
  return book;
}

std::vector<double> evaluate_book_on_branches(const std::optional<Book>& book,
                                              const branching::BranchTree& tree,
                                              const std::vector<TruthCase>& truth) {
  if (truth.size() != tree.leaves().size()) {
    throw ValidationError("truth assignment covers " + std::to_string(truth.size()) +
                          " leaves, tree has " + std::to_string(tree.leaves().size()));
  }
  std::vector<double> out(truth.size(), 0.0);
  if (!book) return out;
  for (std::size_t i = 0; i < truth.size(); ++i) out[i] = book->net(truth[i]);
  return out;
}

double TheoryModel::likelihood(const quantum::QuantumGame& game, double outcome) const {
  if (born) {
    const auto weights = quantum::born_weights(game);
    const auto it = weights.find(outcome);
    return it == weights.end() ? 0.0 : it->second;
  }
  const auto it = table.find(outcome);
  if (it == table.end()) {
    throw ValidationError("theory " + name + " gives no likelihood for outcome " +
                          csv::number(outcome));
  }
  return it->second;
}

namespace {

// Per game slot: the outcomes, the caring share of each, and each theory's
// log-likelihood of each.
struct Slot {
  std::vector<double> outcomes;
  std::vector<double> caring;
  std::vector<std::vector<double>> log_likelihood;  // [theory][outcome]
};

std::size_t true_index(const ExperimentSpec& spec) {
  for (std::size_t t = 0; t < spec.theories.size(); ++t) {
    if (spec.theories[t].name == spec.true_theory) return t;
  }
  throw ValidationError("true theory " + spec.true_theory + " is not among the theories");
}

void validate_spec(const ExperimentSpec& spec) {
  if (spec.theories.empty()) throw ValidationError("experiment needs at least one theory");
  if (spec.games.empty()) throw ValidationError("experiment needs at least one game");
  if (spec.depth < 0) throw ValidationError("depth must be non-negative");
  if (spec.trials < 0) throw ValidationError("trials must be non-negative");
  if (!(spec.threshold >= 0.0 && spec.threshold <= 1.0)) {
    throw ValidationError("threshold must lie in [0,1]");
  }
  double total = 0.0;
  for (const auto& theory : spec.theories) {
    require_unit(theory.prior, "prior of " + theory.name);
    for (const auto& [x, p] : theory.table) {
      require_unit(p, "likelihood of " + csv::number(x) + " under " + theory.name);
    }
    total += theory.prior;
  }
  if (std::abs(total - 1.0) > kCredenceTolerance) {
    throw ValidationError("theory priors sum to " + csv::number(total) + ", not 1");
  }
  true_index(spec);
  for (const auto& game : spec.games) quantum::require_valid(game);
}

std::vector<Slot> prepare_slots(const ExperimentSpec& spec) {
  std::vector<Slot> slots;
  for (const auto& game : spec.games) {
    Slot slot;
    const auto tree = branching::branch(game, quantum::MeasurementRealization::direct());
    const auto caring = strategy::caring_measure(spec.strategy, tree).by_outcome();
    for (const auto& [x, w] : tree.outcome_weights()) {
      slot.outcomes.push_back(x);
      const auto it = caring.find(x);
      slot.caring.push_back(it == caring.end() ? 0.0 : it->second);
    }
    for (const auto& theory : spec.theories) {
      std::vector<double> row;
      for (double x : slot.outcomes) {
        const double l = theory.likelihood(game, x);
        row.push_back(l > 0.0 ? std::log(l) : kMinusInf);
      }
      slot.log_likelihood.push_back(std::move(row));
    }
    slots.push_back(std::move(slot));
  }
  return slots;
}

std::vector<double> log_priors(const ExperimentSpec& spec) {
  std::vector<double> out;
  for (const auto& theory : spec.theories) {
    out.push_back(theory.prior > 0.0 ? std::log(theory.prior) : kMinusInf);
  }
  return out;
}

// Normalized credences from unnormalized log posteriors; empty when every
// theory has been ruled out.
std::vector<double> normalize(const std::vector<double>& log_post) {
  const double top = *std::max_element(log_post.begin(), log_post.end());
  if (top == kMinusInf) return {};
  std::vector<double> out(log_post.size());
  double total = 0.0;
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = log_post[t] == kMinusInf ? 0.0 : std::exp(log_post[t] - top);
    total += out[t];
  }
  for (auto& x : out) x /= total;
  return out;
}

using Counts = std::vector<int>;  // flattened [slot][outcome]

struct Layout {
  std::vector<std::size_t> offset;  // per slot
  std::size_t size = 0;
};

Layout layout_of(const std::vector<Slot>& slots) {
  Layout l;
  for (const auto& s : slots) {
    l.offset.push_back(l.size);
    l.size += s.outcomes.size();
  }
  return l;
}

std::vector<double> log_posterior(const Counts& counts, const std::vector<Slot>& slots,
                                  const Layout& layout, const std::vector<double>& priors) {
  auto out = priors;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    for (std::size_t o = 0; o < slots[s].outcomes.size(); ++o) {
      const int k = counts[layout.offset[s] + o];
      if (k == 0) continue;
      for (std::size_t t = 0; t < out.size(); ++t) {
        out[t] += k * slots[s].log_likelihood[t][o];
      }
    }
  }
  return out;
}

std::string class_label(const Counts& counts, const std::vector<Slot>& slots,
                        const Layout& layout, bool frozen) {
  std::ostringstream out;
  if (frozen) out << "frozen@";
  bool first = true;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    for (std::size_t o = 0; o < slots[s].outcomes.size(); ++o) {
      if (!first) out << ';';
      first = false;
      if (slots.size() > 1) out << 'g' << s << ':';
      out << csv::number(slots[s].outcomes[o]) << '=' << counts[layout.offset[s] + o];
    }
  }
  return out.str();
}

void summarize(IterationSummary& summary, std::size_t truth, double threshold) {
  for (const auto& c : summary.classes) {
    const double credence = c.credences[truth];
    summary.mean_true_credence += c.caring_mass * credence;
    if (credence > threshold) summary.mass_above_threshold += c.caring_mass;
    if (c.frozen) summary.frozen_mass += c.caring_mass;
  }
}

double sample_paths(const ExperimentSpec& spec, const std::vector<Slot>& slots,
                    std::size_t truth) {
  std::mt19937_64 rng(spec.seed);
  std::vector<std::discrete_distribution<std::size_t>> pick;
  for (const auto& s : slots) pick.emplace_back(s.caring.begin(), s.caring.end());
  const auto priors = log_priors(spec);
  int above = 0;
  for (int trial = 0; trial < spec.trials; ++trial) {
    auto log_post = priors;
    for (int i = 0; i < spec.depth; ++i) {
      const std::size_t s = static_cast<std::size_t>(i) % slots.size();
      const std::size_t o = pick[s](rng);
      auto next = log_post;
      for (std::size_t t = 0; t < next.size(); ++t) next[t] += slots[s].log_likelihood[t][o];
      if (normalize(next).empty()) break;  // frozen
      log_post = std::move(next);
    }
    if (normalize(log_post)[truth] > spec.threshold) ++above;
  }
  return static_cast<double>(above) / spec.trials;
}

}  // namespace

ExperimentResult confirmation_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);
  const auto slots = prepare_slots(spec);
  const auto layout = layout_of(slots);
  const auto priors = log_priors(spec);
  const std::size_t truth = true_index(spec);

  std::map<Counts, double> active{{Counts(layout.size, 0), 1.0}};
  std::map<Counts, double> frozen;

  auto record = [&](int iteration) {
    IterationSummary summary;
    summary.iteration = iteration;
    for (const auto& [counts, mass] : active) {
      summary.classes.push_back({class_label(counts, slots, layout, false), mass,
                                 normalize(log_posterior(counts, slots, layout, priors)),
                                 false});
    }
    for (const auto& [counts, mass] : frozen) {
      summary.classes.push_back({class_label(counts, slots, layout, true), mass,
                                 normalize(log_posterior(counts, slots, layout, priors)),
                                 true});
    }
    summarize(summary, truth, spec.threshold);
    return summary;
  };

  ExperimentResult result;
  result.iterations.push_back(record(0));
  for (int i = 0; i < spec.depth; ++i) {
    const std::size_t s = static_cast<std::size_t>(i) % slots.size();
    const auto& slot = slots[s];
    std::map<Counts, double> next;
    for (const auto& [counts, mass] : active) {
      const auto log_post = log_posterior(counts, slots, layout, priors);
      for (std::size_t o = 0; o < slot.outcomes.size(); ++o) {
        if (!(slot.caring[o] > 0.0)) continue;
        bool alive = false;
        for (std::size_t t = 0; t < log_post.size(); ++t) {
          if (log_post[t] != kMinusInf && slot.log_likelihood[t][o] != kMinusInf) alive = true;
        }
        if (!alive) {
          frozen[counts] += mass * slot.caring[o];
          continue;
        }
        auto child = counts;
        ++child[layout.offset[s] + o];
        next[child] += mass * slot.caring[o];
      }
    }
    active = std::move(next);
    result.iterations.push_back(record(i + 1));
  }
  if (spec.trials > 0) result.sampled_mass_above_threshold = sample_paths(spec, slots, truth);
  return result;
}

IterationSummary enumerate_leaves(const ExperimentSpec& spec, int depth) {
  validate_spec(spec);
  const std::size_t truth = true_index(spec);
  const auto direct = quantum::MeasurementRealization::direct();
  const auto game_at = [&](int i) -> const quantum::QuantumGame& {
    return spec.games[static_cast<std::size_t>(i) % spec.games.size()];
  };

  CredenceState prior;
  for (const auto& theory : spec.theories) prior.credences[theory.name] = theory.prior;

  IterationSummary summary;
  summary.iteration = depth;
  if (depth == 0) {
    OutcomeClass root{"", 1.0, {}, false};
    for (const auto& theory : spec.theories) root.credences.push_back(theory.prior);
    summary.classes.push_back(std::move(root));
    summarize(summary, truth, spec.threshold);
    return summary;
  }

  auto tree = branching::branch(game_at(0), direct);
  for (int i = 1; i < depth; ++i) tree = branching::branch_from(tree, game_at(i), direct);
  const auto measure = strategy::caring_measure(spec.strategy, tree);
  std::vector<double> leaf_mass(tree.leaves().size(), 0.0);
  for (const auto& entry : measure.entries) leaf_mass[entry.leaf] += entry.weight;

  for (std::size_t l = 0; l < tree.leaves().size(); ++l) {
    const auto& leaf = tree.leaves()[l];
    auto labels = leaf.history;
    labels.push_back(leaf.label);
    CredenceState state = prior;
    bool frozen = false;
    for (int i = 0; i < depth && !frozen; ++i) {
      const auto& game = game_at(i);
      const double x = game.observable().eigenvalue(labels[static_cast<std::size_t>(i)]);
      const std::string evidence = "step" + std::to_string(i);
      for (const auto& theory : spec.theories) {
        state.likelihoods[theory.name][evidence] = theory.likelihood(game, x);
      }
      try {
        state = conditionalize(state, evidence);
      } catch (const UndefinedError&) {
        frozen = true;
      }
    }
    OutcomeClass c;
    for (std::size_t i = 0; i < labels.size(); ++i) c.label += (i ? "/" : "") + labels[i];
    c.caring_mass = leaf_mass[l];
    c.frozen = frozen;
    for (const auto& theory : spec.theories) c.credences.push_back(state.credences.at(theory.name));
    summary.classes.push_back(std::move(c));
  }
  summarize(summary, truth, spec.threshold);
  return summary;
}

}  // namespace branchlab::confirm

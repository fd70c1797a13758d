#include "branchlab/decision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "branchlab/errors.hpp"

namespace branchlab::decision {

void validate_setup(const Setup& setup) {
  if (setup.states.empty()) throw ValidationError("setup has no states");
  if (setup.consequences.empty()) throw ValidationError("setup has no consequences");
  if (std::set<std::string>(setup.states.begin(), setup.states.end()).size() != setup.states.size()) {
    throw ValidationError("setup has repeated states");
  }
  if (std::set<std::string>(setup.consequences.begin(), setup.consequences.end()).size() !=
      setup.consequences.size()) {
    throw ValidationError("setup has repeated consequences");
  }
}

Act Act::constant(const Setup& setup, const std::string& consequence) {
  std::map<std::string, std::string> a;
  for (const auto& s : setup.states) a[s] = consequence;
  return Act(std::move(a));
}

Act Act::bet(const Setup& setup, const std::set<std::string>& event, const std::string& on,
             const std::string& off) {
  std::map<std::string, std::string> a;
  for (const auto& s : setup.states) a[s] = event.count(s) ? on : off;
  return Act(std::move(a));
}

const std::string& Act::at(const std::string& state) const {
  auto it = assignment_.find(state);
  if (it == assignment_.end()) throw ValidationError("act " + to_string() + " misses state " + state);
  return it->second;
}

bool Act::is_total_on(const Setup& setup) const {
  if (assignment_.size() != setup.states.size()) return false;
  const std::set<std::string> consequences(setup.consequences.begin(), setup.consequences.end());
  for (const auto& s : setup.states) {
    auto it = assignment_.find(s);
    if (it == assignment_.end() || !consequences.count(it->second)) return false;
  }
  return true;
}

std::string Act::to_string() const {
  std::string out = "{";
  for (const auto& [s, c] : assignment_) {
    if (out.size() > 1) out += ",";
    out += s + ":" + c;
  }
  return out + "}";
}

double expected_utility(const Act& act, const Representation& rep) {
  double eu = 0.0;
  for (const auto& [state, p] : rep.probability) {
    const auto& c = act.at(state);
    auto it = rep.utility.find(c);
    if (it == rep.utility.end()) throw ValidationError("no utility for consequence " + c);
    eu += p * it->second;
  }
  return eu;
}

PreferenceRelation::PreferenceRelation(Setup setup, std::vector<Act> acts)
    : setup_(std::move(setup)), acts_(std::move(acts)) {
  validate_setup(setup_);
  for (std::size_t i = 0; i < acts_.size(); ++i) {
    if (!acts_[i].is_total_on(setup_)) {
      throw ValidationError("act " + acts_[i].to_string() + " is not a total map into the setup");
    }
    if (!index_.emplace(acts_[i], i).second) {
      throw ValidationError("act " + acts_[i].to_string() + " listed twice");
    }
  }
  weak_.assign(acts_.size(), std::vector<std::int8_t>(acts_.size(), -1));
  for (std::size_t i = 0; i < acts_.size(); ++i) weak_[i][i] = 1;
}

PreferenceRelation PreferenceRelation::from_tiers(Setup setup,
                                                  const std::vector<std::vector<Act>>& tiers) {
  std::vector<Act> acts;
  std::vector<std::size_t> tier_of;
  for (std::size_t t = 0; t < tiers.size(); ++t) {
    for (const auto& a : tiers[t]) {
      acts.push_back(a);
      tier_of.push_back(t);
    }
  }
  PreferenceRelation rel(std::move(setup), std::move(acts));
  for (std::size_t i = 0; i < tier_of.size(); ++i) {
    for (std::size_t j = 0; j < tier_of.size(); ++j) {
      rel.weak_[i][j] = tier_of[i] <= tier_of[j] ? 1 : 0;
    }
  }
  return rel;
}

PreferenceRelation PreferenceRelation::from_judgments(Setup setup, std::vector<Act> acts,
                                                      const std::vector<Judgment>& judgments) {
  PreferenceRelation rel(std::move(setup), std::move(acts));
  auto set = [&](std::size_t a, std::size_t b, std::int8_t v) {
    auto& cell = rel.weak_[a][b];
    if (cell != -1 && cell != v) {
      throw ValidationError("conflicting judgments between " + rel.acts_[a].to_string() + " and " +
                            rel.acts_[b].to_string());
    }
    cell = v;
  };
  for (const auto& j : judgments) {
    if (j.better >= rel.acts_.size() || j.worse >= rel.acts_.size()) {
      throw ValidationError("judgment refers to an unknown act");
    }
    if (j.better == j.worse) {
      if (j.strict) throw ValidationError("an act cannot be strictly preferred to itself");
      continue;
    }
    set(j.better, j.worse, 1);
    set(j.worse, j.better, j.strict ? 0 : 1);
  }
  return rel;
}

std::optional<std::size_t> PreferenceRelation::index_of(const Act& act) const {
  auto it = index_.find(act);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<bool> PreferenceRelation::weakly_prefers(std::size_t a, std::size_t b) const {
  const auto v = weak_.at(a).at(b);
  if (v < 0) return std::nullopt;
  return v == 1;
}

bool PreferenceRelation::strictly_prefers(std::size_t a, std::size_t b) const {
  return weak_.at(a).at(b) == 1 && weak_.at(b).at(a) == 0;
}

bool PreferenceRelation::indifferent(std::size_t a, std::size_t b) const {
  return weak_.at(a).at(b) == 1 && weak_.at(b).at(a) == 1;
}

std::vector<std::vector<std::size_t>> PreferenceRelation::tiers() const {
  const auto n = acts_.size();
  std::vector<std::size_t> beats(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) beats[i] += weak_[i][j] == 1;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return beats[a] > beats[b]; });
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || beats[order[k]] != beats[order[k - 1]]) out.emplace_back();
    out.back().push_back(order[k]);
  }
  return out;
}

PreferenceRelation generate_preferences(const Setup& setup, const std::vector<Act>& acts,
                                        const Representation& rep, double tie_tolerance) {
  std::vector<double> eu(acts.size());
  for (std::size_t i = 0; i < acts.size(); ++i) eu[i] = expected_utility(acts[i], rep);
  std::vector<std::size_t> order(acts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eu[a] > eu[b]; });
  std::vector<std::vector<Act>> tiers;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || eu[order[k - 1]] - eu[order[k]] > tie_tolerance) tiers.emplace_back();
    tiers.back().push_back(acts[order[k]]);
  }
  return PreferenceRelation::from_tiers(setup, tiers);
}

std::vector<Act> all_acts(const Setup& setup) {
  validate_setup(setup);
  const auto S = setup.states.size();
  const auto C = setup.consequences.size();
  std::vector<Act> out;
  std::vector<std::size_t> digits(S, 0);
  while (true) {
    std::map<std::string, std::string> a;
    for (std::size_t s = 0; s < S; ++s) a[setup.states[s]] = setup.consequences[digits[s]];
    out.emplace_back(std::move(a));
    std::size_t pos = S;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < C) break;
      digits[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

std::vector<Event> all_events(const Setup& setup) {
  const auto S = setup.states.size();
  if (S > kMaxPowerSetStates) {
    throw ValidationError("power set enumeration limited to 12 states, setup has " +
                          std::to_string(S));
  }
  std::vector<Event> out;
  for (std::uint32_t mask = 0; mask < (1u << S); ++mask) {
    Event e;
    for (std::size_t s = 0; s < S; ++s) {
      if (mask & (1u << s)) e.insert(setup.states[s]);
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

// Index of the constant act for each consequence, when listed.
std::map<std::string, std::size_t> constant_acts(const PreferenceRelation& prefs) {
  std::map<std::string, std::size_t> out;
  for (const auto& c : prefs.setup().consequences) {
    if (auto idx = prefs.index_of(Act::constant(prefs.setup(), c))) out[c] = *idx;
  }
  return out;
}

// Strict-preference cycle through the acts of `group`, if one exists.
std::vector<std::size_t> strict_cycle(const PreferenceRelation& prefs,
                                      const std::vector<std::size_t>& group) {
  for (auto start : group) {
    for (auto mid : group) {
      if (mid == start || !prefs.strictly_prefers(start, mid)) continue;
      for (auto end : group) {
        if (end == start || end == mid) continue;
        if (prefs.strictly_prefers(mid, end) && prefs.strictly_prefers(end, start)) {
          return {start, mid, end};
        }
      }
    }
  }
  return {};
}

}  // namespace

AxiomReport check_axioms(const PreferenceRelation& prefs) {
  AxiomReport report;
  const auto& acts = prefs.acts();
  const auto n = acts.size();

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!prefs.weakly_prefers(i, j) && !prefs.weakly_prefers(j, i)) {
        report.violations.push_back({AxiomKind::Completeness, {i, j},
                                     "no judgment between " + acts[i].to_string() + " and " +
                                         acts[j].to_string()});
      }
    }
  }

  std::vector<std::vector<std::int8_t>> weak(n, std::vector<std::int8_t>(n, -1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (auto w = prefs.weakly_prefers(i, j)) weak[i][j] = *w ? 1 : 0;
    }
  }
  std::set<std::vector<std::size_t>> reported;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || weak[i][j] != 1) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (weak[j][k] != 1 || weak[i][k] != 0) continue;
        std::vector<std::size_t> key{i, j, k};
        std::sort(key.begin(), key.end());
        if (!reported.insert(key).second) continue;
        std::string message;
        if (auto cycle = strict_cycle(prefs, key); !cycle.empty()) {
          message = "preference cycle " + acts[cycle[0]].to_string() + " > " +
                    acts[cycle[1]].to_string() + " > " + acts[cycle[2]].to_string() + " > " +
                    acts[cycle[0]].to_string();
          key = cycle;
        } else {
          message = acts[i].to_string() + " >= " + acts[j].to_string() + " >= " +
                    acts[k].to_string() + " but not " + acts[i].to_string() + " >= " +
                    acts[k].to_string();
          key = {i, j, k};
        }
        report.violations.push_back({AxiomKind::Transitivity, key, message});
      }
    }
  }

  const auto constants = constant_acts(prefs);
  const auto& states = prefs.setup().states;
  // a weakly dominates b state by state per the constant-act ordering.
  auto dominates = [&](std::size_t a, std::size_t b) {
    for (const auto& s : states) {
      const auto& ca = acts[a].at(s);
      const auto& cb = acts[b].at(s);
      if (ca == cb) continue;
      auto ia = constants.find(ca);
      auto ib = constants.find(cb);
      if (ia == constants.end() || ib == constants.end()) return false;
      if (prefs.weakly_prefers(ia->second, ib->second) != true) return false;
    }
    return true;
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b || !prefs.strictly_prefers(b, a) || !dominates(a, b)) continue;
      report.violations.push_back({AxiomKind::Dominance, {a, b},
                                   acts[a].to_string() + " dominates " + acts[b].to_string() +
                                       " state by state but " + acts[b].to_string() +
                                       " is strictly preferred"});
    }
  }
  return report;
}

QualitativeComparison qualitative_probability(const PreferenceRelation& prefs, const Event& a,
                                              const Event& b) {
  if (a == b) return QualitativeComparison::HigherOrEqual;
  const auto constants = constant_acts(prefs);
  const auto& setup = prefs.setup();
  for (const auto& good : setup.consequences) {
    for (const auto& bad : setup.consequences) {
      auto ig = constants.find(good);
      auto ib = constants.find(bad);
      if (ig == constants.end() || ib == constants.end()) continue;
      if (!prefs.strictly_prefers(ig->second, ib->second)) continue;
      auto bet_a = prefs.index_of(Act::bet(setup, a, good, bad));
      auto bet_b = prefs.index_of(Act::bet(setup, b, good, bad));
      if (!bet_a || !bet_b) continue;
      auto weak = prefs.weakly_prefers(*bet_a, *bet_b);
      if (!weak) continue;
      return *weak ? QualitativeComparison::HigherOrEqual : QualitativeComparison::Lower;
    }
  }
  return QualitativeComparison::Incomparable;
}

bool reproduces(const PreferenceRelation& prefs, const Representation& rep,
                double tie_tolerance) {
  const auto& acts = prefs.acts();
  std::vector<double> eu;
  eu.reserve(acts.size());
  for (const auto& act : acts) eu.push_back(expected_utility(act, rep));
  for (std::size_t a = 0; a < acts.size(); ++a) {
    for (std::size_t b = a + 1; b < acts.size(); ++b) {
      const auto ab = prefs.weakly_prefers(a, b);
      const auto ba = prefs.weakly_prefers(b, a);
      if (!ab && !ba) continue;
      const double gap = eu[a] - eu[b];
      if (ab.value_or(false) && ba.value_or(false)) {
        if (std::abs(gap) > tie_tolerance) return false;
      } else if (ab.value_or(false)) {
        if (!(gap > tie_tolerance)) return false;
      } else if (ba.value_or(false)) {
        if (!(-gap > tie_tolerance)) return false;
      }
    }
  }
  return true;
}

}  // namespace branchlab::decision

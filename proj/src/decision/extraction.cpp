// Representation search. Expected-utility constraints are bilinear in
// (probability, utility); with one side fixed they are linear, so the search
// alternates two margin-maximizing LPs from a deterministic list of starting
// points (probabilities fitted to the ranking of bets on events, the simplex
// barycentre, utilities spaced by constant-act rank, then a refining grid).
// Stalls are broken by a joint linearized step, then by seeded restarts.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "branchlab/decision.hpp"
#include "simplex.hpp"

namespace branchlab::decision {

namespace {

using detail::LpStatus;

// A strict tier gap must exceed this for the recovered ordering to survive
// the 1e-9 tie grouping used when preferences are regenerated.
constexpr double kMinMargin = 1e-8;
constexpr double kTieBand = 0.5 * kTieTolerance;
constexpr int kMaxAlternations = 200;
constexpr double kSpreadCap = 1e-3;
constexpr int kRandomRestarts = 200;
constexpr std::uint64_t kRestartSeed = 0x5eed;

struct PairConstraint {
  std::size_t better;
  std::size_t worse;
  bool strict;
  std::vector<std::size_t> better_cons;  // consequence index per state
  std::vector<std::size_t> worse_cons;
};

class Search {
 public:
  Search(const PreferenceRelation& prefs) : prefs_(prefs) {
    const auto& setup = prefs.setup();
    S_ = setup.states.size();
    C_ = setup.consequences.size();
    std::map<std::string, std::size_t> cons_index;
    for (std::size_t c = 0; c < C_; ++c) cons_index[setup.consequences[c]] = c;
    auto encode = [&](std::size_t act) {
      std::vector<std::size_t> out(S_);
      for (std::size_t s = 0; s < S_; ++s) {
        out[s] = cons_index.at(prefs.acts()[act].at(setup.states[s]));
      }
      return out;
    };
    const auto tiers = prefs.tiers();
    for (std::size_t t = 0; t < tiers.size(); ++t) {
      const auto head = tiers[t].front();
      for (std::size_t k = 1; k < tiers[t].size(); ++k) {
        constraints_.push_back({head, tiers[t][k], false, encode(head), encode(tiers[t][k])});
      }
      if (t + 1 < tiers.size()) {
        const auto next = tiers[t + 1].front();
        constraints_.push_back({head, next, true, encode(head), encode(next)});
      }
    }
    // Pairs implied by the ordering but not adjacent in it. Constants chain
    // the utilities apart whatever p is, and single-state swaps have gap
    // p_s (u_x - u_y); both keep alternation off degenerate vertices.
    std::vector<std::size_t> tier_of(prefs.acts().size(), 0);
    for (std::size_t t = 0; t < tiers.size(); ++t) {
      for (auto act : tiers[t]) tier_of[act] = t;
    }
    std::vector<std::pair<std::size_t, std::size_t>> constants;  // (act, consequence)
    for (std::size_t c = 0; c < C_; ++c) {
      if (auto idx = prefs.index_of(Act::constant(setup, setup.consequences[c]))) {
        constants.emplace_back(*idx, c);
      }
    }
    std::sort(constants.begin(), constants.end(),
              [&](const auto& a, const auto& b) { return tier_of[a.first] < tier_of[b.first]; });
    lp_rows_ = constraints_;
    auto add_implied = [&](std::size_t better, std::size_t worse) {
      if (tier_of[better] < tier_of[worse]) {
        lp_rows_.push_back({better, worse, true, encode(better), encode(worse)});
      }
    };
    for (std::size_t i = 0; i + 1 < constants.size(); ++i) {
      add_implied(constants[i].first, constants[i + 1].first);
      if (tier_of[constants[i].first] < tier_of[constants[i + 1].first]) {
        utility_chain_.emplace_back(constants[i].second, constants[i + 1].second);
      }
    }
    for (std::size_t i = 0; i < constants.size(); ++i) {
      for (std::size_t j = i + 1; j < constants.size(); ++j) {
        for (std::size_t s = 0; s < S_; ++s) {
          auto swapped = prefs.acts()[constants[i].first].assignment();
          swapped[setup.states[s]] = setup.consequences[constants[j].second];
          if (auto idx = prefs.index_of(Act(swapped))) add_implied(constants[i].first, *idx);
        }
      }
    }

    pins_ = utility_pins();
    if (pins_) {
      // Acts paying only the pinned consequences are bets on events; their
      // order constrains p alone.
      std::optional<std::pair<std::size_t, std::size_t>> previous;  // (tier, act)
      for (std::size_t t = 0; t < tiers.size(); ++t) {
        for (auto act : tiers[t]) {
          const auto cons = encode(act);
          if (!std::all_of(cons.begin(), cons.end(), [&](std::size_t c) {
                return c == pins_->first || c == pins_->second;
              })) {
            continue;
          }
          if (previous) {
            bet_constraints_.push_back({previous->second, act, previous->first != t,
                                        encode(previous->second), cons});
          }
          previous = std::make_pair(t, act);
        }
      }
    }
  }

  Extraction run() {
    Extraction out;
    std::vector<double> best_p;
    std::vector<double> best_u;
    double best_margin = -std::numeric_limits<double>::infinity();

    bool spread = false;
    auto attempt = [&](std::vector<double> p, std::vector<double> u) {
      double margin = polish(p, u, spread);
      if (margin > best_margin) {
        best_margin = margin;
        best_p = p;
        best_u = u;
      }
      return margin >= kMinMargin || strict_count() == 0;
    };

    auto from_starts = [&] {
      for (const auto& p : probability_starts()) {
        auto u = solve_utilities(p);
        if (!u) continue;
        if (attempt(p, *u)) return true;
        if (p == probability_starts().front()) {
          auto ranked = rank_utilities();
          if (auto q = solve_probabilities(ranked); q && attempt(*q, ranked)) return true;
        }
      }
      return false;
    };

    bool found = from_starts() || refine_utility_grid(attempt);
    if (!found) {
      // Slower second round that can leave degenerate vertices.
      spread = true;
      found = from_starts();
    }
    // Merged utilities give margin 0, which beats every start with a
    // violated constraint, so alternation drifts there. Random probability
    // starts from a fixed seed, with the constant-act utilities held apart.
    std::mt19937_64 rng(kRestartSeed);
    std::exponential_distribution<double> draw(1.0);
    for (double floor : {1e-2, 1e-3, 1e-4}) {
      floor_ = floor;
      for (int r = 0; !found && r < kRandomRestarts; ++r) {
        std::vector<double> p(S_);
        for (auto& x : p) x = draw(rng);
        p = normalized(std::move(p));
        if (auto u = solve_utilities(p)) found = attempt(p, *u);
      }
    }
    floor_ = 0.0;

    if (!found) {
      out.status = ExtractionStatus::Infeasible;
      out.margin = std::isfinite(best_margin) ? best_margin : 0.0;
      const auto& w = constraints_[worst_constraint(best_p, best_u)];
      out.witness = {prefs_.acts()[w.better], prefs_.acts()[w.worse]};
      out.diagnostic = "no representation found; best tier margin " + std::to_string(out.margin) +
                       "; witness " + out.witness->first.to_string() +
                       (w.strict ? " > " : " ~ ") + out.witness->second.to_string();
      return out;
    }

    best_p = canonical_probabilities(best_u, best_p);
    Representation rep;
    for (std::size_t s = 0; s < S_; ++s) rep.probability[prefs_.setup().states[s]] = best_p[s];
    for (std::size_t c = 0; c < C_; ++c) rep.utility[prefs_.setup().consequences[c]] = best_u[c];

    out.status = ExtractionStatus::Found;
    out.margin = achieved_margin(best_p, best_u);
    out.representation = std::move(rep);
    out.constraints = describe(best_u);
    return out;
  }

 private:
  std::size_t strict_count() const {
    return static_cast<std::size_t>(std::count_if(constraints_.begin(), constraints_.end(),
                                                  [](const auto& c) { return c.strict; }));
  }

  std::vector<double> probability_coefficients(const PairConstraint& k,
                                               const std::vector<double>& u) const {
    std::vector<double> coef(S_);
    for (std::size_t s = 0; s < S_; ++s) coef[s] = u[k.better_cons[s]] - u[k.worse_cons[s]];
    return coef;
  }

  std::vector<double> utility_coefficients(const PairConstraint& k,
                                           const std::vector<double>& p) const {
    std::vector<double> coef(C_, 0.0);
    for (std::size_t s = 0; s < S_; ++s) {
      coef[k.better_cons[s]] += p[s];
      coef[k.worse_cons[s]] -= p[s];
    }
    return coef;
  }

  // Rows for "margin <= coef.x" (strict) or "|coef.x| <= band" (tie) over
  // variables x followed by d = margin + 1 in [0, 2].
  void add_order_rows(const std::vector<double>& coef, bool strict,
                      std::vector<std::vector<double>>& A, std::vector<double>& b,
                      double required_margin, bool margin_variable) const {
    const auto n = coef.size();
    std::vector<double> row(n + (margin_variable ? 1 : 0), 0.0);
    if (strict) {
      for (std::size_t i = 0; i < n; ++i) row[i] = -coef[i];
      if (margin_variable) {
        row[n] = 1.0;
        b.push_back(1.0);
      } else {
        b.push_back(-required_margin);
      }
      A.push_back(row);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) row[i] = coef[i];
    A.push_back(row);
    b.push_back(kTieBand);
    for (std::size_t i = 0; i < n; ++i) row[i] = -coef[i];
    A.push_back(row);
    b.push_back(kTieBand);
  }

  struct SideSolution {
    std::vector<double> x;
    double margin = 0.0;
  };
  using DomainRows =
      std::function<void(std::vector<std::vector<double>>&, std::vector<double>&, std::size_t)>;

  // Maximizes the smallest strict gap coef.x over the domain. With `spread`,
  // a non-positive optimum is followed by a second pass that keeps it and
  // lifts every strict gap towards kSpreadCap: at a degenerate vertex (two
  // utilities or two probabilities equal) the swap constraints sit at zero
  // whatever the other side does, and alternation would stall there.
  std::optional<SideSolution> solve_side(const std::vector<std::vector<double>>& coefs,
                                         const std::vector<bool>& strict, std::size_t n,
                                         const DomainRows& domain, bool spread) const {
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (std::size_t i = 0; i < coefs.size(); ++i) {
      add_order_rows(coefs[i], strict[i], A, b, 0.0, true);
    }
    domain(A, b, n + 1);
    std::vector<double> cap(n + 1, 0.0);
    cap[n] = 1.0;
    A.push_back(cap);
    b.push_back(2.0);
    std::vector<double> objective(n + 1, 0.0);
    objective[n] = 1.0;
    auto result = detail::maximize(A, b, objective);
    if (result.status != LpStatus::Optimal) return std::nullopt;
    SideSolution out{{result.x.begin(), result.x.begin() + static_cast<long>(n)},
                     result.x[n] - 1.0};
    if (!spread || out.margin >= kMinMargin) return out;

    // variables: x (n), then lift + 1 per strict row
    const auto lifts = static_cast<std::size_t>(std::count(strict.begin(), strict.end(), true));
    const std::size_t width = n + lifts;
    A.clear();
    b.clear();
    std::size_t j = 0;
    for (std::size_t i = 0; i < coefs.size(); ++i) {
      auto coef = coefs[i];
      coef.resize(width, 0.0);
      if (!strict[i]) {
        add_order_rows(coef, false, A, b, 0.0, false);
        continue;
      }
      add_order_rows(coef, true, A, b, out.margin - 1e-12, false);
      for (auto& x : coef) x = -x;
      coef[n + j] = 1.0;
      A.push_back(coef);
      b.push_back(1.0);
      std::vector<double> bound(width, 0.0);
      bound[n + j] = 1.0;
      A.push_back(bound);
      b.push_back(1.0 + kSpreadCap);
      ++j;
    }
    domain(A, b, width);
    std::vector<double> lift_objective(width, 0.0);
    for (std::size_t k = n; k < width; ++k) lift_objective[k] = 1.0;
    auto lifted = detail::maximize(A, b, lift_objective);
    if (lifted.status == LpStatus::Optimal) {
      out.x.assign(lifted.x.begin(), lifted.x.begin() + static_cast<long>(n));
    }
    return out;
  }

  std::optional<std::vector<double>> solve_probabilities(const std::vector<double>& u,
                                                         double* margin = nullptr,
                                                         bool spread = false) const {
    return solve_probabilities_over(lp_rows_, u, margin, spread);
  }

  std::optional<std::vector<double>> solve_probabilities_over(
      const std::vector<PairConstraint>& rows, const std::vector<double>& u,
      double* margin = nullptr, bool spread = false) const {
    std::vector<std::vector<double>> coefs;
    std::vector<bool> strict;
    for (const auto& k : rows) {
      coefs.push_back(probability_coefficients(k, u));
      strict.push_back(k.strict);
    }
    auto solution = solve_side(
        coefs, strict, S_,
        [&](auto& A, auto& b, std::size_t width) { add_simplex_rows(A, b, width); }, spread);
    if (!solution) return std::nullopt;
    if (margin) *margin = solution->margin;
    return normalized(std::move(solution->x));
  }

  std::optional<std::vector<double>> solve_utilities(const std::vector<double>& p,
                                                     double* margin = nullptr,
                                                     bool spread = false) const {
    std::vector<std::vector<double>> coefs;
    std::vector<bool> strict;
    for (const auto& k : lp_rows_) {
      coefs.push_back(utility_coefficients(k, p));
      strict.push_back(k.strict);
    }
    auto domain = [&](std::vector<std::vector<double>>& A, std::vector<double>& b,
                      std::size_t width) {
      for (std::size_t c = 0; c < C_; ++c) {
        std::vector<double> row(width, 0.0);
        row[c] = 1.0;
        A.push_back(row);
        b.push_back(1.0);
      }
      add_floor_rows(A, b, 0, width);
      if (pins_) {
        std::vector<double> row(width, 0.0);
        row[pins_->first] = -1.0;
        A.push_back(row);
        b.push_back(-1.0);
        row[pins_->first] = 0.0;
        row[pins_->second] = 1.0;
        A.push_back(row);
        b.push_back(0.0);
      }
    };
    auto solution = solve_side(coefs, strict, C_, domain, spread);
    if (!solution) return std::nullopt;
    if (margin) *margin = solution->margin;
    return std::move(solution->x);
  }

  // u_better - u_worse >= floor_ along the constant-act chain, utilities
  // starting at column `offset`.
  void add_floor_rows(std::vector<std::vector<double>>& A, std::vector<double>& b,
                      std::size_t offset, std::size_t width) const {
    if (floor_ <= 0.0) return;
    for (const auto& [better, worse] : utility_chain_) {
      std::vector<double> row(width, 0.0);
      row[offset + better] = -1.0;
      row[offset + worse] = 1.0;
      A.push_back(row);
      b.push_back(-floor_);
    }
  }

  // sum p = 1 over the first S_ of `width` variables.
  void add_simplex_rows(std::vector<std::vector<double>>& A, std::vector<double>& b,
                        std::size_t width) const {
    std::vector<double> row(width, 0.0);
    for (std::size_t s = 0; s < S_; ++s) row[s] = 1.0;
    A.push_back(row);
    b.push_back(1.0);
    for (std::size_t s = 0; s < S_; ++s) row[s] = -1.0;
    A.push_back(row);
    b.push_back(-1.0);
  }

  static std::vector<double> normalized(std::vector<double> p) {
    for (auto& x : p) x = std::max(x, 0.0);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) x /= total;
    return p;
  }

  // Index of the constraint with the least slack under (p, u); the first
  // strict one when no candidate was ever produced.
  std::size_t worst_constraint(const std::vector<double>& p, const std::vector<double>& u) const {
    std::size_t worst = 0;
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
      const auto& k = constraints_[i];
      if (p.empty() || u.empty()) {
        if (k.strict) return i;
        continue;
      }
      const auto coef = probability_coefficients(k, u);
      const double gap = std::inner_product(coef.begin(), coef.end(), p.begin(), 0.0);
      const double s = k.strict ? gap : kTieBand - std::abs(gap);
      if (s < slack) {
        slack = s;
        worst = i;
      }
    }
    return worst;
  }

  double achieved_margin(const std::vector<double>& p, const std::vector<double>& u) const {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& k : constraints_) {
      const auto coef = probability_coefficients(k, u);
      const double gap = std::inner_product(coef.begin(), coef.end(), p.begin(), 0.0);
      if (k.strict) {
        margin = std::min(margin, gap);
      } else if (std::abs(gap) > kTieBand * (1 + 1e-6)) {
        return -std::abs(gap);
      }
    }
    return std::isfinite(margin) ? margin : 0.0;
  }

  // Alternates the two LPs until the margin stops improving. With `spread`
  // a stalled step is retried once with spread solutions before giving up.
  double polish(std::vector<double>& p, std::vector<double>& u, bool spread = false) const {
    double margin = achieved_margin(p, u);
    using Candidate = std::pair<std::vector<double>, std::vector<double>>;
    auto step = [&](bool spread) -> std::optional<Candidate> {
      auto q = solve_probabilities(u, nullptr, spread);
      if (!q) return std::nullopt;
      auto v = solve_utilities(*q, nullptr, spread);
      if (!v) return std::nullopt;
      return std::make_pair(std::move(*q), std::move(*v));
    };
    for (int it = 0; it < kMaxAlternations; ++it) {
      auto next_pair = step(false);
      double next = next_pair ? achieved_margin(next_pair->first, next_pair->second) : -INFINITY;
      if (spread && !(next > margin + 1e-13) && margin < kMinMargin) {
        next_pair = step(true);
        next = next_pair ? achieved_margin(next_pair->first, next_pair->second) : -INFINITY;
      }
      if (!(next > margin + 1e-13) && margin < kMinMargin) {
        next_pair = joint_step(p, u, margin);
        next = next_pair ? achieved_margin(next_pair->first, next_pair->second) : -INFINITY;
      }
      if (!(next > margin + 1e-13)) break;
      p = std::move(next_pair->first);
      u = std::move(next_pair->second);
      margin = next;
    }
    return margin;
  }

  // Alternation can stall where only a joint move helps. Linearizes every
  // gap around (p, u) and solves for both sides inside a shrinking box; the
  // dropped term is second order in the box size.
  std::optional<std::pair<std::vector<double>, std::vector<double>>> joint_step(
      const std::vector<double>& p, const std::vector<double>& u, double margin) const {
    const std::size_t n = S_ + C_;  // variables: p, u, then margin + 1
    for (double radius = 0.05; radius > 1e-7; radius /= 8) {
      std::vector<std::vector<double>> A;
      std::vector<double> b;
      for (const auto& k : lp_rows_) {
        const auto a = probability_coefficients(k, u);
        const auto c = utility_coefficients(k, p);
        const double gap = std::inner_product(a.begin(), a.end(), p.begin(), 0.0);
        std::vector<double> coef(n, 0.0);
        std::copy(a.begin(), a.end(), coef.begin());
        std::copy(c.begin(), c.end(), coef.begin() + static_cast<long>(S_));
        // coef.x - gap is the linearized gap
        if (k.strict) {
          for (auto& x : coef) x = -x;
          coef.push_back(1.0);
          A.push_back(coef);
          b.push_back(1.0 - gap);
        } else {
          coef.push_back(0.0);
          A.push_back(coef);
          b.push_back(kTieBand + gap);
          for (auto& x : coef) x = -x;
          A.push_back(coef);
          b.push_back(kTieBand - gap);
        }
      }
      add_simplex_rows(A, b, n + 1);
      auto box = [&](std::size_t i, double lo, double hi) {
        std::vector<double> row(n + 1, 0.0);
        row[i] = 1.0;
        A.push_back(row);
        b.push_back(hi);
        row[i] = -1.0;
        A.push_back(row);
        b.push_back(-lo);
      };
      for (std::size_t s = 0; s < S_; ++s) box(s, std::max(0.0, p[s] - radius), p[s] + radius);
      for (std::size_t c = 0; c < C_; ++c) {
        double lo = std::max(0.0, u[c] - radius);
        double hi = std::min(1.0, u[c] + radius);
        if (pins_ && c == pins_->first) lo = hi = 1.0;
        if (pins_ && c == pins_->second) lo = hi = 0.0;
        box(S_ + c, lo, hi);
      }
      add_floor_rows(A, b, S_, n + 1);
      std::vector<double> cap(n + 1, 0.0);
      cap[n] = 1.0;
      A.push_back(cap);
      b.push_back(2.0);
      std::vector<double> objective(n + 1, 0.0);
      objective[n] = 1.0;
      auto result = detail::maximize(A, b, objective);
      if (result.status != LpStatus::Optimal) continue;
      auto q = normalized({result.x.begin(), result.x.begin() + static_cast<long>(S_)});
      std::vector<double> v(result.x.begin() + static_cast<long>(S_),
                            result.x.begin() + static_cast<long>(n));
      if (achieved_margin(q, v) > margin + 1e-13) return std::make_pair(std::move(q), std::move(v));
    }
    return std::nullopt;
  }

  std::vector<std::vector<double>> probability_starts() const {
    if (!starts_.empty()) return starts_;
    if (!bet_constraints_.empty()) {
      std::vector<double> u(C_, 0.5);
      u[pins_->first] = 1.0;
      u[pins_->second] = 0.0;
      if (auto p = solve_probabilities_over(bet_constraints_, u)) starts_.push_back(*p);
    }
    const std::vector<double> uniform(S_, 1.0 / static_cast<double>(S_));
    if (std::find(starts_.begin(), starts_.end(), uniform) == starts_.end()) {
      starts_.push_back(uniform);
    }
    for (std::size_t k = 2; k <= 6; ++k) {
      std::vector<std::size_t> parts(S_, 0);
      compositions(k, 0, parts);
    }
    return starts_;
  }

  void compositions(std::size_t remaining, std::size_t pos, std::vector<std::size_t>& parts) const {
    if (pos + 1 == S_) {
      parts[pos] = remaining;
      const double total = static_cast<double>(std::accumulate(parts.begin(), parts.end(), std::size_t{0}));
      std::vector<double> p(S_);
      for (std::size_t s = 0; s < S_; ++s) p[s] = static_cast<double>(parts[s]) / total;
      if (std::find(starts_.begin(), starts_.end(), p) == starts_.end()) starts_.push_back(p);
      return;
    }
    for (std::size_t x = 0; x <= remaining; ++x) {
      parts[pos] = x;
      compositions(remaining - x, pos + 1, parts);
    }
  }

  // Zooming grid over the utilities not fixed by pins. Grid points are
  // scored by the probability LP; the best few seed the next, finer level
  // and are polished by alternation.
  template <class Attempt>
  bool refine_utility_grid(Attempt& attempt) const {
    std::vector<std::size_t> free;
    for (std::size_t c = 0; c < C_; ++c) {
      if (!pins_ || (c != pins_->first && c != pins_->second)) free.push_back(c);
    }
    if (free.empty() || free.size() > 3) return false;
    std::vector<double> start(C_, 0.5);
    if (pins_) {
      start[pins_->first] = 1.0;
      start[pins_->second] = 0.0;
    }
    constexpr int kHalfWidth = 4;
    constexpr std::size_t kBeam = 3;
    std::vector<std::vector<double>> centers{start};
    double step = 0.125;
    while (step > 1e-9) {
      std::vector<std::pair<double, std::vector<double>>> scored;
      for (const auto& center : centers) {
        std::vector<int> offset(free.size(), -kHalfWidth);
        while (true) {
          auto u = center;
          bool inside = true;
          for (std::size_t f = 0; f < free.size(); ++f) {
            u[free[f]] = center[free[f]] + offset[f] * step;
            if (u[free[f]] < 0.0 || u[free[f]] > 1.0) inside = false;
          }
          if (inside) {
            double margin = 0.0;
            if (solve_probabilities(u, &margin)) scored.emplace_back(margin, u);
          }
          std::size_t pos = 0;
          while (pos < free.size() && ++offset[pos] > kHalfWidth) offset[pos++] = -kHalfWidth;
          if (pos == free.size()) break;
        }
      }
      if (scored.empty()) return false;
      std::stable_sort(scored.begin(), scored.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      centers.clear();
      for (const auto& [margin, u] : scored) {
        if (centers.size() == kBeam) break;
        if (std::find(centers.begin(), centers.end(), u) != centers.end()) continue;
        centers.push_back(u);
        if (auto p = solve_probabilities(u); p && attempt(*p, u)) return true;
      }
      step /= 4.0;
    }
    return false;
  }

  // (best, worst) consequences by constant-act rank, when strictly ordered.
  // Fixing them to 1 and 0 removes the all-equal utility solution.
  std::optional<std::pair<std::size_t, std::size_t>> utility_pins() const {
    const auto tiers = prefs_.tiers();
    std::optional<std::pair<std::size_t, std::size_t>> best;  // (tier, consequence)
    std::optional<std::pair<std::size_t, std::size_t>> worst;
    for (std::size_t c = 0; c < C_; ++c) {
      auto idx = prefs_.index_of(Act::constant(prefs_.setup(), prefs_.setup().consequences[c]));
      if (!idx) continue;
      for (std::size_t t = 0; t < tiers.size(); ++t) {
        if (std::find(tiers[t].begin(), tiers[t].end(), *idx) == tiers[t].end()) continue;
        if (!best || t < best->first) best = std::make_pair(t, c);
        if (!worst || t > worst->first) worst = std::make_pair(t, c);
      }
    }
    if (!best || best->first == worst->first) return std::nullopt;
    return std::make_pair(best->second, worst->second);
  }

  // Utilities evenly spaced by the rank of each consequence's constant act.
  std::vector<double> rank_utilities() const {
    std::vector<double> u(C_, 0.5);
    const auto tiers = prefs_.tiers();
    std::vector<std::pair<std::size_t, std::size_t>> ranked;  // (tier, consequence)
    for (std::size_t c = 0; c < C_; ++c) {
      auto idx = prefs_.index_of(Act::constant(prefs_.setup(), prefs_.setup().consequences[c]));
      if (!idx) continue;
      for (std::size_t t = 0; t < tiers.size(); ++t) {
        if (std::find(tiers[t].begin(), tiers[t].end(), *idx) != tiers[t].end()) {
          ranked.emplace_back(t, c);
        }
      }
    }
    if (ranked.size() < 2) return u;
    std::size_t lo = ranked.front().first;
    std::size_t hi = ranked.front().first;
    for (const auto& [t, c] : ranked) {
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    for (const auto& [t, c] : ranked) {
      u[c] = hi == lo ? 0.5 : static_cast<double>(hi - t) / static_cast<double>(hi - lo);
    }
    return u;
  }

  // Among probability vectors keeping (almost) the best margin for `u`, the
  // one closest to uniform in L1.
  std::vector<double> canonical_probabilities(const std::vector<double>& u,
                                              const std::vector<double>& fallback) const {
    double best = 0.0;
    if (!solve_probabilities(u, &best)) return fallback;
    const double required =
        strict_count() == 0 ? 0.0 : std::min(best, std::max(kMinMargin, best * (1.0 - 1e-6)));
    // variables: p (S_), t (S_); maximize -sum t
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (const auto& k : constraints_) {
      auto coef = probability_coefficients(k, u);
      coef.resize(2 * S_, 0.0);
      add_order_rows(coef, k.strict, A, b, required, false);
    }
    add_simplex_rows(A, b, 2 * S_);
    const double uniform = 1.0 / static_cast<double>(S_);
    for (std::size_t s = 0; s < S_; ++s) {
      std::vector<double> row(2 * S_, 0.0);
      row[s] = 1.0;
      row[S_ + s] = -1.0;
      A.push_back(row);
      b.push_back(uniform);
      row[s] = -1.0;
      A.push_back(row);
      b.push_back(-uniform);
    }
    std::vector<double> objective(2 * S_, 0.0);
    for (std::size_t s = 0; s < S_; ++s) objective[S_ + s] = -1.0;
    auto result = detail::maximize(A, b, objective);
    if (result.status != LpStatus::Optimal) return fallback;
    auto p = normalized(std::vector<double>(result.x.begin(), result.x.begin() + static_cast<long>(S_)));
    if (achieved_margin(p, u) < std::min(kMinMargin, achieved_margin(fallback, u))) return fallback;
    return p;
  }

  std::vector<ProbabilityConstraint> describe(const std::vector<double>& u) const {
    std::vector<ProbabilityConstraint> out;
    const auto& setup = prefs_.setup();
    for (const auto& k : constraints_) {
      ProbabilityConstraint pc;
      pc.better = prefs_.acts()[k.better].to_string();
      pc.worse = prefs_.acts()[k.worse].to_string();
      pc.strict = k.strict;
      const auto coef = probability_coefficients(k, u);
      for (std::size_t s = 0; s < S_; ++s) pc.coefficients[setup.states[s]] = coef[s];
      out.push_back(std::move(pc));
    }
    return out;
  }

  const PreferenceRelation& prefs_;
  std::size_t S_ = 0;
  std::size_t C_ = 0;
  std::vector<PairConstraint> constraints_;
  std::vector<std::pair<std::size_t, std::size_t>> utility_chain_;  // strictly ranked constants
  mutable double floor_ = 0.0;
  std::vector<PairConstraint> lp_rows_;          // constraints_ plus implied pairs
  std::vector<PairConstraint> bet_constraints_;  // consecutive bets on events
  std::optional<std::pair<std::size_t, std::size_t>> pins_;
  mutable std::vector<std::vector<double>> starts_;
};

}  // namespace

Extraction extract_representation(const PreferenceRelation& prefs) {
  const auto axioms = check_axioms(prefs);
  if (!axioms.ok()) {
    Extraction out;
    out.status = ExtractionStatus::Rejected;
    out.diagnostic = axioms.violations.front().message;
    return out;
  }
  return Search(prefs).run();
}

}  // namespace branchlab::decision

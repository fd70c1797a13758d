#include "branchlab/branching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "branchlab/errors.hpp"
#include "branchlab/csv.hpp"

namespace branchlab::branching {

std::vector<double> BranchLeaf::cells() const {
  std::vector<double> out(cell_amplitudes.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = cell_weight(i);
  return out;
}

double BranchLeaf::cells_total() const {
  double total = 0.0;
  for (double a : cell_amplitudes) total += a * a;
  return total;
}

BranchTree::BranchTree(std::vector<BranchLeaf> leaves, double grain, int fine_dim)
    : leaves_(std::move(leaves)), grain_(grain), fine_dim_(fine_dim) {
  if (!(grain_ > 0.0)) throw ValidationError("grain must be positive");
  if (fine_dim_ < 1) throw ValidationError("fine_dim must be >= 1");
  double total = 0.0;
  for (const auto& leaf : leaves_) {
    if (!(leaf.weight >= 0.0)) throw ValidationError("negative leaf weight");
    if (static_cast<int>(leaf.cell_amplitudes.size()) != fine_dim_) {
      throw ValidationError("leaf has " + std::to_string(leaf.cell_amplitudes.size()) +
                            " cells, tree fine_dim is " + std::to_string(fine_dim_));
    }
    if (std::abs(leaf.cells_total() - leaf.weight) > kWeightTolerance) {
      throw ValidationError("leaf cells do not sum to its weight");
    }
    total += leaf.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw ValidationError("leaf weights sum to " + std::to_string(total) + ", expected 1");
  }
}

std::map<double, double> BranchTree::outcome_weights() const {
  std::map<double, double> out;
  for (const auto& leaf : leaves_) out[leaf.outcome] += leaf.weight;
  return out;
}

std::vector<double> BranchTree::outcomes() const {
  std::vector<double> out;
  for (const auto& [x, w] : outcome_weights()) out.push_back(x);
  return out;
}

namespace {

BranchLeaf make_leaf(double outcome, std::string label, std::vector<std::string> history,
                     double weight, int fine_dim) {
  BranchLeaf leaf;
  leaf.outcome = outcome;
  leaf.label = std::move(label);
  leaf.history = std::move(history);
  leaf.weight = weight;
  leaf.cell_amplitudes.assign(static_cast<std::size_t>(fine_dim), 0.0);
  leaf.cell_amplitudes[0] = std::sqrt(weight);
  return leaf;
}

struct Outcome {
  double eigenvalue;
  std::string label;
  double weight;
};

// Branch outcomes of one measurement, in a deterministic order.
std::vector<Outcome> measure(const quantum::QuantumGame& game,
                             const quantum::MeasurementRealization& realization) {
  std::vector<Outcome> out;
  if (realization.is_direct()) {
    const auto weights = quantum::born_weights(game);
    // Label each eigenvalue branch by its first basis label.
    std::map<double, std::string> names;
    for (const auto& label : game.state().labels()) {
      names.emplace(game.observable().eigenvalue(label), label);
    }
    for (const auto& [x, w] : weights) out.push_back({x, names.at(x), w});
    return out;
  }
  const auto& a = std::get<quantum::AncillaCoupled>(realization.kind());
  if (game.state().size() != 2) {
    throw UnsupportedShapeError("ancilla realization needs a two-component game");
  }
  const auto coupling = quantum::couple_ancilla(game, a.n, a.N);
  const auto& joint = coupling.joint_state;
  for (std::size_t j = 0; j < joint.size(); ++j) {
    out.push_back({coupling.grouping.at(coupling.y_labels[j]), coupling.y_labels[j],
                   joint.amplitudes()[j].norm2()});
  }
  return out;
}

}  // namespace

BranchTree branch(const quantum::QuantumGame& game,
                  const quantum::MeasurementRealization& realization, int fine_dim, double grain) {
  if (fine_dim < 1) throw ValidationError("fine_dim must be >= 1");
  std::vector<BranchLeaf> leaves;
  for (auto& o : measure(game, realization)) {
    leaves.push_back(make_leaf(o.eigenvalue, std::move(o.label), {}, o.weight, fine_dim));
  }
  return BranchTree(std::move(leaves), grain, fine_dim);
}

BranchTree branch_from(const BranchTree& tree, const quantum::QuantumGame& game,
                       const quantum::MeasurementRealization& realization) {
  const auto outcomes = measure(game, realization);
  std::vector<BranchLeaf> leaves;
  leaves.reserve(tree.leaves().size() * outcomes.size());
  for (const auto& parent : tree.leaves()) {
    auto history = parent.history;
    history.push_back(parent.label);
    for (const auto& o : outcomes) {
      leaves.push_back(
          make_leaf(o.eigenvalue, o.label, history, parent.weight * o.weight, tree.fine_dim()));
    }
  }
  return BranchTree(std::move(leaves), tree.grain(), tree.fine_dim());
}

BranchCount count_branches(const BranchTree& tree, double outcome) {
  return count_branches(tree, outcome, tree.grain());
}

BranchCount count_branches(const BranchTree& tree, double outcome, double grain) {
  BranchCount result;
  result.unknown_outcome = true;
  for (const auto& leaf : tree.leaves()) {
    if (leaf.outcome != outcome) continue;
    result.unknown_outcome = false;
    for (std::size_t i = 0; i < leaf.cell_amplitudes.size(); ++i) {
      if (leaf.cell_weight(i) > grain) ++result.count;
    }
  }
  return result;
}

RotationConfig RotationConfig::random(double epsilon, const BranchTree& tree, int rotations,
                                      std::uint64_t seed) {
  RotationConfig config;
  config.epsilon = epsilon;
  config.seed = seed;
  if (tree.fine_dim() < 2 || tree.leaves().empty()) return config;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_leaf(0, tree.leaves().size() - 1);
  std::uniform_int_distribution<std::size_t> pick_cell(0, static_cast<std::size_t>(tree.fine_dim()) - 1);
  for (int r = 0; r < rotations; ++r) {
    CellPair pair;
    pair.leaf = pick_leaf(rng);
    pair.first = pick_cell(rng);
    do {
      pair.second = pick_cell(rng);
    } while (pair.second == pair.first);
    config.pair_schedule.push_back(pair);
  }
  return config;
}

BranchTree rotate_basis(const BranchTree& tree, const RotationConfig& config) {
  if (!(std::abs(config.epsilon) < kMaxRotation)) {
    throw ValidationError("rotation epsilon must satisfy |epsilon| < 0.1");
  }
  const auto cells = static_cast<std::size_t>(tree.fine_dim());
  for (const auto& pair : config.pair_schedule) {
    if (pair.first >= cells || pair.second >= cells || pair.first == pair.second) {
      throw ValidationError("rotation pair (" + std::to_string(pair.first) + "," +
                            std::to_string(pair.second) + ") invalid for " +
                            std::to_string(cells) + " cells");
    }
    if (pair.leaf && *pair.leaf >= tree.leaves().size()) {
      throw ValidationError("rotation targets leaf " + std::to_string(*pair.leaf) +
                            " of a tree with " + std::to_string(tree.leaves().size()));
    }
  }

  const double c = std::cos(config.epsilon);
  const double s = std::sin(config.epsilon);
  auto leaves = tree.leaves();
  for (const auto& pair : config.pair_schedule) {
    for (std::size_t l = 0; l < leaves.size(); ++l) {
      if (pair.leaf && *pair.leaf != l) continue;
      auto& amp = leaves[l].cell_amplitudes;
      const double a = amp[pair.first];
      const double b = amp[pair.second];
      amp[pair.first] = c * a - s * b;
      amp[pair.second] = s * a + c * b;
    }
  }
  return BranchTree(std::move(leaves), tree.grain(), tree.fine_dim());
}

BranchTree coarse_grain(const BranchTree& tree, int factor) {
  if (factor < 1 || tree.fine_dim() % factor != 0) {
    throw ValidationError("coarse-grain factor " + std::to_string(factor) + " does not divide " +
                          std::to_string(tree.fine_dim()));
  }
  const int merged_dim = tree.fine_dim() / factor;
  auto leaves = tree.leaves();
  for (auto& leaf : leaves) {
    std::vector<double> merged(static_cast<std::size_t>(merged_dim), 0.0);
    for (std::size_t i = 0; i < leaf.cell_amplitudes.size(); ++i) {
      merged[i / static_cast<std::size_t>(factor)] += leaf.cell_weight(i);
    }
    for (auto& w : merged) w = std::sqrt(w);
    leaf.cell_amplitudes = std::move(merged);
  }
  return BranchTree(std::move(leaves), tree.grain(), merged_dim);
}

void write_csv(const BranchTree& tree, std::ostream& out) {
  std::vector<std::size_t> order(tree.leaves().size());
  std::iota(order.begin(), order.end(), 0);
  const auto& leaves = tree.leaves();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (leaves[a].history != leaves[b].history) return leaves[a].history < leaves[b].history;
    return leaves[a].outcome < leaves[b].outcome;
  });
  csv::write_row(out, {"outcome", "history", "cell_index", "weight"});
  for (auto l : order) {
    const auto& leaf = leaves[l];
    std::string history;
    for (const auto& h : leaf.history) history += (history.empty() ? "" : "/") + h;
    for (std::size_t i = 0; i < leaf.cell_amplitudes.size(); ++i) {
      csv::write_row(out, {csv::number(leaf.outcome), history, std::to_string(i),
                           csv::number(leaf.cell_weight(i))});
    }
  }
}

}  // namespace branchlab::branching

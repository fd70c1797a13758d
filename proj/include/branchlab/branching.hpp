#pragma once

// Decohered branch trees with amplitude-squared weights. Each leaf carries a
// row of fine-grained cells so that the number of "occupied" sub-branches can
// be perturbed (basis rotation, coarse-graining) while weights stay fixed.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "branchlab/quantum.hpp"

namespace branchlab::branching {

inline constexpr double kWeightTolerance = 1e-9;
inline constexpr double kDefaultGrain = 1e-9;

struct BranchLeaf {
  double outcome = 0.0;              // eigenvalue realized on this branch
  std::string label;                 // basis label of the branch
  std::vector<std::string> history;  // labels of earlier measurements, oldest first
  double weight = 0.0;
  std::vector<double> cell_amplitudes;  // signed; cell weight is the square

  double cell_weight(std::size_t i) const { return cell_amplitudes[i] * cell_amplitudes[i]; }
  std::vector<double> cells() const;
  double cells_total() const;
};

class BranchTree {
 public:
  /// Throws ValidationError if weights are negative, do not sum to 1, or a
  /// leaf's cells disagree with its weight (all within 1e-9).
  BranchTree(std::vector<BranchLeaf> leaves, double grain, int fine_dim);

  const std::vector<BranchLeaf>& leaves() const { return leaves_; }
  double grain() const { return grain_; }
  int fine_dim() const { return fine_dim_; }

  std::map<double, double> outcome_weights() const;
  std::vector<double> outcomes() const;

 private:
  std::vector<BranchLeaf> leaves_;
  double grain_;
  int fine_dim_;
};

/// Measures `game` under `realization`: one leaf per eigenvalue for a direct
/// measurement, one leaf per ancilla outcome otherwise. All of a leaf's
/// weight starts in cell 0.
BranchTree branch(const quantum::QuantumGame& game,
                  const quantum::MeasurementRealization& realization, int fine_dim = 1,
                  double grain = kDefaultGrain);

/// Uses every leaf of `tree` as the root of a further measurement; weights
/// multiply and the parent's label is appended to the history.
BranchTree branch_from(const BranchTree& tree, const quantum::QuantumGame& game,
                       const quantum::MeasurementRealization& realization);

struct BranchCount {
  int count = 0;
  bool unknown_outcome = false;
};

/// Cells with sub-weight above the tree's grain, across leaves with `outcome`.
BranchCount count_branches(const BranchTree& tree, double outcome);
BranchCount count_branches(const BranchTree& tree, double outcome, double grain);

struct CellPair {
  std::optional<std::size_t> leaf;  // unset: apply inside every leaf
  std::size_t first = 0;
  std::size_t second = 1;
};

struct RotationConfig {
  double epsilon = 0.0;
  std::vector<CellPair> pair_schedule;
  std::uint64_t seed = 0;

  /// `rotations` pairs drawn uniformly over leaves and distinct cell indices.
  static RotationConfig random(double epsilon, const BranchTree& tree, int rotations,
                               std::uint64_t seed);
};

inline constexpr double kMaxRotation = 0.1;

/// Applies 2x2 rotations by epsilon to cell amplitudes, pair by pair, inside
/// a leaf. Cells of different leaves never mix. Throws ValidationError for
/// |epsilon| >= 0.1 or an out-of-range pair.
BranchTree rotate_basis(const BranchTree& tree, const RotationConfig& config);

/// Merges runs of `factor` consecutive cells. Throws ValidationError unless
/// factor divides the cell count.
BranchTree coarse_grain(const BranchTree& tree, int factor);

/// One row per (leaf, cell): outcome,history,cell_index,weight ordered by
/// (history, outcome, cell_index).
void write_csv(const BranchTree& tree, std::ostream& out);

}  // namespace branchlab::branching

#pragma once

// Finite-dimensional pure states, observables with labeled eigenvalues,
// quantum games and the ways a game's measurement can be realized.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/rational.hpp>

namespace branchlab::quantum {

using Rational = boost::rational<std::int64_t>;

inline constexpr double kNormTolerance = 1e-12;

/// Complex coefficient of one basis component.
///
/// Amplitudes built with sqrt_ratio() remember |c|^2 as an exact rational so
/// that weight sums over such states are exact; anything else falls back to
/// floating point.
class Amplitude {
 public:
  Amplitude() = default;

  static Amplitude from_complex(double re, double im = 0.0);
  /// +sqrt(num/den), or -sqrt(num/den) when `negative`.
  static Amplitude sqrt_ratio(std::int64_t num, std::int64_t den, bool negative = false);

  std::complex<double> value() const { return value_; }
  double re() const { return value_.real(); }
  double im() const { return value_.imag(); }

  double norm2() const;
  const std::optional<Rational>& exact_norm2() const { return exact_norm2_; }

  /// c / sqrt(k); stays exact when this amplitude is.
  Amplitude divided_by_sqrt(std::int64_t k) const;

 private:
  std::complex<double> value_{0.0, 0.0};
  std::optional<Rational> exact_norm2_;
};

class PureState {
 public:
  PureState() = default;
  /// Throws ValidationError on length mismatch or duplicate labels.
  PureState(std::vector<std::string> labels, std::vector<Amplitude> amplitudes);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Amplitude>& amplitudes() const { return amplitudes_; }
  std::size_t size() const { return labels_.size(); }

  /// Sum of |a_i|^2, exact when every amplitude is rational-backed.
  std::optional<Rational> exact_norm2() const;
  double norm2() const;
  bool is_normalized(double tolerance = kNormTolerance) const;

 private:
  std::vector<std::string> labels_;
  std::vector<Amplitude> amplitudes_;
};

class Observable {
 public:
  Observable() = default;
  Observable(std::string name, std::map<std::string, double> eigenvalues);

  const std::string& name() const { return name_; }
  const std::map<std::string, double>& eigenvalues() const { return eigenvalues_; }
  bool has(const std::string& label) const { return eigenvalues_.count(label) != 0; }
  /// Throws ValidationError for a label without an eigenvalue.
  double eigenvalue(const std::string& label) const;

 private:
  std::string name_;
  std::map<std::string, double> eigenvalues_;
};

struct Consequence {
  std::string name;
  double utility = 0.0;

  friend bool operator==(const Consequence&, const Consequence&) = default;
};

/// Maps observed eigenvalues to consequences.
class PayoffFunction {
 public:
  PayoffFunction() = default;
  explicit PayoffFunction(std::map<double, Consequence> table);

  const std::map<double, Consequence>& table() const { return table_; }
  bool covers(double eigenvalue) const { return table_.count(eigenvalue) != 0; }
  const Consequence& at(double eigenvalue) const;
  double utility(double eigenvalue) const { return at(eigenvalue).utility; }

 private:
  std::map<double, Consequence> table_;
};

/// The triple <state, observable, payoff> an agent bets on.
class QuantumGame {
 public:
  QuantumGame() = default;
  QuantumGame(PureState state, Observable observable, PayoffFunction payoff);

  const PureState& state() const { return state_; }
  const Observable& observable() const { return observable_; }
  const PayoffFunction& payoff() const { return payoff_; }

 private:
  PureState state_;
  Observable observable_;
  PayoffFunction payoff_;
};

struct Direct {
  friend bool operator==(const Direct&, const Direct&) = default;
};

/// Measure via an ancilla with N outcomes, n of which count as the first
/// eigenvalue.
struct AncillaCoupled {
  int n = 1;
  int N = 2;
  friend bool operator==(const AncillaCoupled&, const AncillaCoupled&) = default;
};

class MeasurementRealization {
 public:
  using Kind = std::variant<Direct, AncillaCoupled>;

  static MeasurementRealization direct(std::string description = "direct measurement");
  /// Throws ValidationError unless 1 <= n < N.
  static MeasurementRealization ancilla(int n, int N, std::string description = {});
  /// "direct" or "ancilla:n=1,N=3".
  static MeasurementRealization parse(const std::string& text);

  const Kind& kind() const { return kind_; }
  const std::string& description() const { return description_; }
  bool is_direct() const { return std::holds_alternative<Direct>(kind_); }
  std::string to_string() const;

 private:
  MeasurementRealization(Kind kind, std::string description)
      : kind_(kind), description_(std::move(description)) {}

  Kind kind_;
  std::string description_;
};

enum class ViolationKind { Normalization, MissingEigenvalue, PayoffTotality };

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_game(const QuantumGame& game);

/// Throws ValidationError carrying the first violation, if any.
void require_valid(const QuantumGame& game);

/// Amplitude-squared weight per eigenvalue; degenerate labels are summed.
std::map<double, double> born_weights(const QuantumGame& game);

/// Same as born_weights() but exact; empty when some amplitude is not
/// rational-backed.
std::optional<std::map<double, Rational>> born_weights_exact(const QuantumGame& game);

struct AncillaCoupling {
  PureState joint_state;          // labels "<x label>,y<j>"
  Observable ancilla_observable;  // joint label -> j
  std::map<std::string, double> grouping;  // "y<j>" -> x eigenvalue
  std::vector<std::string> y_labels;       // y1..yN in order
};

/// Entangles a two-component game with an N-outcome ancilla so that n
/// ancilla outcomes report the first eigenvalue and N-n the second.
/// Throws UnsupportedShapeError unless the state has exactly two components.
AncillaCoupling couple_ancilla(const QuantumGame& game, int n, int N);

/// Game read off the ancilla: measure the ancilla observable on the joint
/// state and pay whatever the grouped eigenvalue pays in `game`.
QuantumGame ancilla_game(const QuantumGame& game, const AncillaCoupling& coupling);

/// Renames basis labels and eigenvalues; payoff keys follow the eigenvalue
/// map so every branch keeps its consequence.
QuantumGame relabel_game(const QuantumGame& game,
                         const std::map<std::string, std::string>& label_map,
                         const std::map<double, double>& eigenvalue_map);

/// Two-outcome game sqrt(m/n)|x1> + sqrt((n-m)/n)|x2> with eigenvalues 1, 2.
QuantumGame two_outcome_game(std::int64_t m, std::int64_t n, double u1, double u2);

/// n-component equal superposition with eigenvalues 1..n paying `utilities`.
QuantumGame equal_superposition_game(const std::vector<double>& utilities);

}  // namespace branchlab::quantum

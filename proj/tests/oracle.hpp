#pragma once

// Reference computations for the tests, written from the textbook formulas
// without going through the library.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

/// Sum of |a|^2 per eigenvalue.
inline std::map<double, double> born(const std::vector<std::complex<double>>& amplitudes,
                                     const std::vector<double>& eigenvalues) {
  std::map<double, double> out;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) out[eigenvalues[i]] += std::norm(amplitudes[i]);
  return out;
}

/// sum_s p(s) u(act(s))
inline double expected_utility(const std::map<std::string, std::string>& act,
                               const std::map<std::string, double>& p,
                               const std::map<std::string, double>& u) {
  double total = 0.0;
  for (const auto& [s, c] : act) total += p.at(s) * u.at(c);
  return total;
}

/// Every function from `states` to `consequences`, in odometer order.
inline std::vector<std::map<std::string, std::string>> all_functions(
    const std::vector<std::string>& states, const std::vector<std::string>& consequences) {
  std::vector<std::map<std::string, std::string>> out;
  std::vector<std::size_t> digit(states.size(), 0);
  for (;;) {
    std::map<std::string, std::string> f;
    for (std::size_t i = 0; i < states.size(); ++i) f[states[i]] = consequences[digit[i]];
    out.push_back(f);
    std::size_t i = 0;
    while (i < digit.size() && ++digit[i] == consequences.size()) digit[i++] = 0;
    if (i == digit.size()) break;
  }
  return out;
}

/// Bayes' rule on a finite set of hypotheses.
inline std::vector<double> posterior(const std::vector<double>& prior,
                                     const std::vector<double>& likelihood) {
  std::vector<double> out(prior.size());
  double total = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) total += out[i] = prior[i] * likelihood[i];
  for (auto& x : out) x /= total;
  return out;
}

/// Cash flow of a bet on a proposition from the buyer's side: pay r*S up
/// front, collect S if it comes true.
inline double bought(bool happens, double quotient, double stake) {
  return (happens ? stake : 0.0) - quotient * stake;
}

inline double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

/// Repeated two-outcome game with Born weight w1 on outcome 1: caring mass of
/// histories whose posterior in hypothesis `truth` exceeds `threshold`,
/// hypotheses given by their probability of outcome 1.
inline double binomial_mass_above(int depth, double w1, const std::vector<double>& prior,
                                  const std::vector<double>& p1, std::size_t truth,
                                  double threshold) {
  double mass = 0.0;
  for (int k = 0; k <= depth; ++k) {
    std::vector<double> joint(prior.size());
    double total = 0.0;
    for (std::size_t h = 0; h < prior.size(); ++h) {
      total += joint[h] = prior[h] * std::pow(p1[h], k) * std::pow(1.0 - p1[h], depth - k);
    }
    if (total > 0.0 && joint[truth] / total > threshold) {
      mass += binomial(depth, k) * std::pow(w1, k) * std::pow(1.0 - w1, depth - k);
    }
  }
  return mass;
}

/// Uniform rational in [lo, hi] with denominator at most `den`.
inline std::pair<std::int64_t, std::int64_t> random_fraction(std::mt19937_64& rng,
                                                             std::int64_t den) {
  std::uniform_int_distribution<std::int64_t> d(2, den);
  const auto q = d(rng);
  std::uniform_int_distribution<std::int64_t> n(1, q - 1);
  return {n(rng), q};
}

}  // namespace oracle

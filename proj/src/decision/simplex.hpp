#pragma once

// Dense two-phase simplex for the small LPs behind representation search:
//   maximize c.x  subject to  A x <= b,  x >= 0.

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

namespace branchlab::decision::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::vector<double> x;
};

class Simplex {
 public:
  Simplex(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
          const std::vector<double>& c)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        basic_(m_),
        nonbasic_(n_ + 1),
        D_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) D_[i][j] = A[i][j];
      basic_[i] = n_ + i;
      D_[i][n_] = -1.0;
      D_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      D_[m_][j] = -c[j];
    }
    nonbasic_[n_] = -1;
    D_[m_ + 1][n_] = 1.0;
  }

  LpResult solve() {
    LpResult result;
    int r = 0;
    for (int i = 1; i < m_; ++i) {
      if (D_[i][n_ + 1] < D_[r][n_ + 1]) r = i;
    }
    if (m_ > 0 && D_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      const auto phase1 = run(1);
      if (phase1 == LpStatus::IterationLimit) {
        result.status = phase1;
        return result;
      }
      if (phase1 != LpStatus::Optimal || D_[m_ + 1][n_ + 1] < -kEps) {
        result.status = LpStatus::Infeasible;
        return result;
      }
      for (int i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j) {
          if (s == -1 || D_[i][j] < D_[i][s] || (D_[i][j] == D_[i][s] && nonbasic_[j] < nonbasic_[s])) s = j;
        }
        pivot(i, s);
      }
    }
    result.status = run(2);
    if (result.status != LpStatus::Optimal) return result;
    result.x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basic_[i] >= 0 && basic_[i] < n_) result.x[basic_[i]] = D_[i][n_ + 1];
    }
    result.value = D_[m_][n_ + 1];
    return result;
  }

 private:
  static constexpr double kEps = 1e-12;
  static constexpr int kMaxIterations = 20000;

  void pivot(int r, int s) {
    const double inv = 1.0 / D_[r][s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || D_[i][s] == 0.0) continue;
      const double f = D_[i][s] * inv;
      for (int j = 0; j < n_ + 2; ++j) {
        if (j != s) D_[i][j] -= D_[r][j] * f;
      }
    }
    for (int j = 0; j < n_ + 2; ++j) {
      if (j != s) D_[r][j] *= inv;
    }
    for (int i = 0; i < m_ + 2; ++i) {
      if (i != r) D_[i][s] *= -inv;
    }
    D_[r][s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  LpStatus run(int phase) {
    const int row = phase == 1 ? m_ + 1 : m_;
    for (int iteration = 0; iteration < kMaxIterations; ++iteration) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasic_[j] == -1) continue;
        if (s == -1 || D_[row][j] < D_[row][s] ||
            (D_[row][j] == D_[row][s] && nonbasic_[j] < nonbasic_[s])) {
          s = j;
        }
      }
      if (D_[row][s] > -kEps) return LpStatus::Optimal;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (D_[i][s] < kEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = D_[i][n_ + 1] / D_[i][s];
        const double rhs = D_[r][n_ + 1] / D_[r][s];
        if (lhs < rhs || (lhs == rhs && basic_[i] < basic_[r])) r = i;
      }
      if (r == -1) return LpStatus::Unbounded;
      pivot(r, s);
    }
    return LpStatus::IterationLimit;
  }

  int m_;
  int n_;
  std::vector<int> basic_;
  std::vector<int> nonbasic_;
  std::vector<std::vector<double>> D_;
};

inline LpResult maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                         const std::vector<double>& c) {
  return Simplex(A, b, c).solve();
}

}  // namespace branchlab::decision::detail

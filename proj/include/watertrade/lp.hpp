#pragma once

#include <stdexcept>
#include <type_traits>
#include <vector>

#include "watertrade/rational.hpp"

namespace watertrade::lp {

enum class Sense { LessEq, GreaterEq, Eq };

// max c^T x subject to rows (a^T x <sense> b), x >= 0.
template <typename S>
struct Problem {
  int num_vars = 0;
  std::vector<S> objective;
  struct Row {
    std::vector<std::pair<int, S>> coeffs;
    Sense sense = Sense::LessEq;
    S rhs{};
  };
  std::vector<Row> rows;

  int add_row(Sense sense, S rhs) {
    rows.push_back({{}, sense, rhs});
    return static_cast<int>(rows.size()) - 1;
  }
  void add_coeff(int row, int var, S value) {
    rows[static_cast<std::size_t>(row)].coeffs.push_back({var, value});
  }
};

enum class Status { Optimal, Infeasible };

template <typename S>
struct Solution {
  Status status = Status::Infeasible;
  std::vector<S> x;
  S objective{};
};

// Dense two-phase primal simplex with Bland's rule (anti-cycling, and every
// choice is deterministic). Exact when S is Rat; with S = double a 1e-9
// tolerance stands in for exact sign tests.
template <typename S>
class Simplex {
public:
  explicit Simplex(const Problem<S>& p) : p_(p) {}

  Solution<S> solve() {
    build();
    if (!phase_one()) return {Status::Infeasible, {}, S{}};
    phase_two();
    Solution<S> sol;
    sol.status = Status::Optimal;
    sol.x.assign(p_.num_vars, S{});
    for (std::size_t r = 0; r < rows_.size(); ++r)
      if (basis_[r] < p_.num_vars) sol.x[basis_[r]] = rhs_[r];
    sol.objective = S{};
    for (int j = 0; j < p_.num_vars; ++j)
      sol.objective = sol.objective + obj_coeff(j) * sol.x[j];
    return sol;
  }

private:
  static bool positive(const S& v) {
    if constexpr (std::is_same_v<S, double>)
      return v > 1e-9;
    else
      return S{} < v;
  }
  static bool negative(const S& v) {
    if constexpr (std::is_same_v<S, double>)
      return v < -1e-9;
    else
      return v < S{};
  }
  static bool nonzero(const S& v) { return positive(v) || negative(v); }

  S obj_coeff(int j) const {
    return j < static_cast<int>(p_.objective.size()) ? p_.objective[j] : S{};
  }

  void build() {
    int m = static_cast<int>(p_.rows.size());
    int n = p_.num_vars;
    // column layout: structural | slack/surplus (one per row) | artificials
    cols_ = n + m;
    rows_.assign(m, std::vector<S>());
    rhs_.assign(m, S{});
    basis_.assign(m, -1);
    artificial_start_ = cols_;
    std::vector<int> needs_artificial;
    for (int r = 0; r < m; ++r) {
      const auto& row = p_.rows[r];
      std::vector<S> coeffs(cols_, S{});
      for (const auto& [var, val] : row.coeffs)
        coeffs[var] = coeffs[var] + val;
      S rhs = row.rhs;
      Sense sense = row.sense;
      // normalize to rhs >= 0
      if (negative(rhs)) {
        for (auto& c : coeffs) c = S{} - c;
        rhs = S{} - rhs;
        if (sense == Sense::LessEq)
          sense = Sense::GreaterEq;
        else if (sense == Sense::GreaterEq)
          sense = Sense::LessEq;
      }
      if (sense == Sense::LessEq) {
        coeffs[n + r] = S{1};
        basis_[r] = n + r;
      } else if (sense == Sense::GreaterEq) {
        coeffs[n + r] = S{} - S{1};
        needs_artificial.push_back(r);
      } else {
        needs_artificial.push_back(r);
      }
      rows_[r] = std::move(coeffs);
      rhs_[r] = rhs;
    }
    for (int r : needs_artificial) {
      for (auto& row : rows_) row.push_back(S{});
      rows_[r][cols_] = S{1};
      basis_[r] = cols_;
      ++cols_;
    }
  }

  void pivot(int prow, int pcol) {
    S inv = rows_[prow][pcol];
    for (int j = 0; j < cols_; ++j) rows_[prow][j] = rows_[prow][j] / inv;
    rhs_[prow] = rhs_[prow] / inv;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (static_cast<int>(r) == prow) continue;
      S factor = rows_[r][pcol];
      if (!nonzero(factor)) continue;
      for (int j = 0; j < cols_; ++j)
        rows_[r][j] = rows_[r][j] - factor * rows_[prow][j];
      rhs_[r] = rhs_[r] - factor * rhs_[prow];
    }
    S ofac = obj_[pcol];
    if (nonzero(ofac)) {
      for (int j = 0; j < cols_; ++j) obj_[j] = obj_[j] - ofac * rows_[prow][j];
      obj_value_ = obj_value_ + ofac * rhs_[prow];
    }
    basis_[prow] = pcol;
  }

  // Bland: entering = lowest-index improving column; leaving = min ratio,
  // ties by lowest basis variable index.
  bool optimize(int col_limit) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < col_limit; ++j)
        if (positive(obj_[j])) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      S best_ratio{};
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (!positive(rows_[r][enter])) continue;
        S ratio = rhs_[r] / rows_[r][enter];
        bool better = leave < 0 || ratio < best_ratio;
        bool tie = leave >= 0 && !(ratio < best_ratio) && !(best_ratio < ratio);
        if (better || (tie && basis_[r] < basis_[leave])) {
          leave = static_cast<int>(r);
          best_ratio = ratio;
        }
      }
      if (leave < 0)
        throw std::logic_error("linear program is unbounded");
      pivot(leave, enter);
    }
  }

  bool phase_one() {
    if (artificial_start_ == cols_) {
      // no artificials: the all-slack basis is already feasible
      return true;
    }
    obj_.assign(cols_, S{});
    obj_value_ = S{};
    for (int j = artificial_start_; j < cols_; ++j) obj_[j] = S{} - S{1};
    for (std::size_t r = 0; r < rows_.size(); ++r)
      if (basis_[r] >= artificial_start_) {
        for (int j = 0; j < cols_; ++j) obj_[j] = obj_[j] + rows_[r][j];
        obj_value_ = obj_value_ + rhs_[r];
      }
    // obj_value_ now holds -(sum of artificials) shifted; maximize it to 0
    obj_value_ = S{} - obj_value_;
    optimize(cols_);
    if (negative(obj_value_)) return false;
    // drive leftover (degenerate) artificials out of the basis
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (basis_[r] < artificial_start_) continue;
      int pcol = -1;
      for (int j = 0; j < artificial_start_; ++j)
        if (nonzero(rows_[r][j])) {
          pcol = j;
          break;
        }
      if (pcol >= 0) pivot(static_cast<int>(r), pcol);
      // else: redundant row; its artificial stays basic at value zero and
      // the banned artificial columns keep it inert.
    }
    return true;
  }

  void phase_two() {
    obj_.assign(cols_, S{});
    obj_value_ = S{};
    for (int j = 0; j < p_.num_vars; ++j) obj_[j] = obj_coeff(j);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (basis_[r] >= artificial_start_) continue;
      S cb = basis_[r] < p_.num_vars ? obj_coeff(basis_[r]) : S{};
      if (!nonzero(cb)) continue;
      for (int j = 0; j < cols_; ++j) obj_[j] = obj_[j] - cb * rows_[r][j];
      obj_value_ = obj_value_ + cb * rhs_[r];
    }
    optimize(artificial_start_);  // artificial columns stay out
  }

  const Problem<S>& p_;
  std::vector<std::vector<S>> rows_;
  std::vector<S> rhs_;
  std::vector<S> obj_;
  S obj_value_{};
  std::vector<int> basis_;
  int cols_ = 0;
  int artificial_start_ = 0;
};

template <typename S>
Solution<S> maximize(const Problem<S>& p) {
  return Simplex<S>(p).solve();
}

}  // namespace watertrade::lp

// Copyright 2026 The backdoor-mip Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "backdoor_mip/lp_simplex.h"

#include <algorithm>
#include <cmath>
#include <utility>

namespace backdoor_mip {
namespace {

enum class VarState : uint8_t { kBasic, kAtLower, kAtUpper, kFree };

struct Entry {
  int row;
  double value;
};

// Columns are laid out as [structural | slack | artificial]. Every row is an
// equality a_r x + s_r (+ sigma_r t_r) = b_r, with the row sense encoded in
// the slack bounds.
class BoundedSimplex {
 public:
  BoundedSimplex(const MipInstance& instance, const VariableBounds* overrides,
                 const LpOptions& options);

  LpSolution Solve();

 private:
  enum class PhaseResult { kOptimal, kUnbounded, kIterationLimit };

  bool SetUpBounds(const VariableBounds* overrides);
  void SetUpInitialBasis();
  PhaseResult RunPhase();
  void ComputeRowDuals(std::vector<double>& y) const;
  double ReducedCost(int col, const std::vector<double>& y) const;
  void ComputeColumn(int col, std::vector<double>& alpha) const;
  void Pivot(int row, const std::vector<double>& alpha);
  void Refactorize();
  void RecomputeBasicValues();
  LpSolution Extract(LpStatus status);

  const MipInstance& instance_;
  const VariableBounds* overrides_;
  const LpOptions& options_;
  const int n_;
  const int m_;
  std::vector<std::vector<Entry>> columns_;
  std::vector<double> rhs_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> cost_;
  std::vector<double> x_;
  std::vector<VarState> state_;
  std::vector<int> head_;
  // Dense row-major m x m basis inverse.
  std::vector<double> binv_;
  int num_artificials_ = 0;
  int updates_since_refactor_ = 0;
  int64_t iterations_ = 0;
  int64_t degenerate_run_ = 0;
  bool bland_ = false;
};

BoundedSimplex::BoundedSimplex(const MipInstance& instance, const VariableBounds* overrides,
                               const LpOptions& options)
    : instance_(instance),
      overrides_(overrides),
      options_(options),
      n_(instance.num_vars),
      m_(instance.num_rows()) {
  columns_.resize(n_ + m_);
  rhs_.resize(m_);
  for (int r = 0; r < m_; ++r) {
    const LinearRow& row = instance.rows[r];
    rhs_[r] = row.rhs;
    for (const Coefficient& entry : row.coeffs) {
      if (entry.value != 0.0) columns_[entry.var].push_back({r, entry.value});
    }
    columns_[n_ + r].push_back({r, 1.0});
  }
}

bool BoundedSimplex::SetUpBounds(const VariableBounds* overrides) {
  lower_.assign(n_ + m_, 0.0);
  upper_.assign(n_ + m_, 0.0);
  cost_.assign(n_ + m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    lower_[j] = instance_.lower[j];
    upper_[j] = instance_.upper[j];
    if (overrides != nullptr) {
      lower_[j] = std::max(lower_[j], overrides->lower[j]);
      upper_[j] = std::min(upper_[j], overrides->upper[j]);
    }
    if (lower_[j] > upper_[j]) {
      if (lower_[j] - upper_[j] > options_.feasibility_tolerance) return false;
      upper_[j] = lower_[j];
    }
  }
  for (int r = 0; r < m_; ++r) {
    switch (instance_.rows[r].sense) {
      case RowSense::kLessEqual:
        lower_[n_ + r] = 0.0;
        upper_[n_ + r] = kInfinity;
        break;
      case RowSense::kGreaterEqual:
        lower_[n_ + r] = -kInfinity;
        upper_[n_ + r] = 0.0;
        break;
      case RowSense::kEqual:
        break;
    }
  }
  return true;
}

void BoundedSimplex::SetUpInitialBasis() {
  const int num_structural_and_slack = n_ + m_;
  x_.assign(num_structural_and_slack, 0.0);
  state_.assign(num_structural_and_slack, VarState::kAtLower);
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(lower_[j])) {
      x_[j] = lower_[j];
      state_[j] = VarState::kAtLower;
    } else if (std::isfinite(upper_[j])) {
      x_[j] = upper_[j];
      state_[j] = VarState::kAtUpper;
    } else {
      x_[j] = 0.0;
      state_[j] = VarState::kFree;
    }
  }
  std::vector<double> residual = rhs_;
  for (int j = 0; j < n_; ++j) {
    if (x_[j] == 0.0) continue;
    for (const Entry& e : columns_[j]) residual[e.row] -= e.value * x_[j];
  }

  head_.assign(m_, -1);
  binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
  for (int r = 0; r < m_; ++r) {
    const int slack = n_ + r;
    const double value = residual[r];
    if (value >= lower_[slack] && value <= upper_[slack]) {
      x_[slack] = value;
      state_[slack] = VarState::kBasic;
      head_[r] = slack;
      binv_[static_cast<size_t>(r) * m_ + r] = 1.0;
      continue;
    }
    // Slack sits at its violated bound; an artificial absorbs the remainder.
    double bound = value > upper_[slack] ? upper_[slack] : lower_[slack];
    x_[slack] = bound;
    state_[slack] = value > upper_[slack] ? VarState::kAtUpper : VarState::kAtLower;
    const double sigma = value > bound ? 1.0 : -1.0;
    const int art = static_cast<int>(columns_.size());
    columns_.push_back({{r, sigma}});
    lower_.push_back(0.0);
    upper_.push_back(kInfinity);
    cost_.push_back(-1.0);
    x_.push_back(std::abs(value - bound));
    state_.push_back(VarState::kBasic);
    head_[r] = art;
    binv_[static_cast<size_t>(r) * m_ + r] = sigma;
    ++num_artificials_;
  }
}

void BoundedSimplex::ComputeRowDuals(std::vector<double>& y) const {
  y.assign(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const double c = cost_[head_[i]];
    if (c == 0.0) continue;
    const double* row = &binv_[static_cast<size_t>(i) * m_];
    for (int r = 0; r < m_; ++r) y[r] += c * row[r];
  }
}

double BoundedSimplex::ReducedCost(int col, const std::vector<double>& y) const {
  double d = cost_[col];
  for (const Entry& e : columns_[col]) d -= y[e.row] * e.value;
  return d;
}

void BoundedSimplex::ComputeColumn(int col, std::vector<double>& alpha) const {
  alpha.assign(m_, 0.0);
  for (const Entry& e : columns_[col]) {
    for (int i = 0; i < m_; ++i) alpha[i] += binv_[static_cast<size_t>(i) * m_ + e.row] * e.value;
  }
}

void BoundedSimplex::Pivot(int row, const std::vector<double>& alpha) {
  double* pivot_row = &binv_[static_cast<size_t>(row) * m_];
  const double inv = 1.0 / alpha[row];
  for (int r = 0; r < m_; ++r) pivot_row[r] *= inv;
  for (int i = 0; i < m_; ++i) {
    if (i == row || alpha[i] == 0.0) continue;
    double* target = &binv_[static_cast<size_t>(i) * m_];
    const double factor = alpha[i];
    for (int r = 0; r < m_; ++r) target[r] -= factor * pivot_row[r];
  }
  ++updates_since_refactor_;
}

void BoundedSimplex::Refactorize() {
  // Gauss-Jordan with partial pivoting on [B | I].
  std::vector<double> basis(static_cast<size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    for (const Entry& e : columns_[head_[i]]) basis[static_cast<size_t>(e.row) * m_ + i] = e.value;
  }
  binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) binv_[static_cast<size_t>(i) * m_ + i] = 1.0;
  for (int k = 0; k < m_; ++k) {
    int pivot = k;
    for (int i = k + 1; i < m_; ++i) {
      if (std::abs(basis[static_cast<size_t>(i) * m_ + k]) >
          std::abs(basis[static_cast<size_t>(pivot) * m_ + k])) {
        pivot = i;
      }
    }
    if (pivot != k) {
      for (int c = 0; c < m_; ++c) {
        std::swap(basis[static_cast<size_t>(k) * m_ + c], basis[static_cast<size_t>(pivot) * m_ + c]);
        std::swap(binv_[static_cast<size_t>(k) * m_ + c], binv_[static_cast<size_t>(pivot) * m_ + c]);
      }
    }
    const double inv = 1.0 / basis[static_cast<size_t>(k) * m_ + k];
    for (int c = 0; c < m_; ++c) {
      basis[static_cast<size_t>(k) * m_ + c] *= inv;
      binv_[static_cast<size_t>(k) * m_ + c] *= inv;
    }
    for (int i = 0; i < m_; ++i) {
      const double factor = basis[static_cast<size_t>(i) * m_ + k];
      if (i == k || factor == 0.0) continue;
      for (int c = 0; c < m_; ++c) {
        basis[static_cast<size_t>(i) * m_ + c] -= factor * basis[static_cast<size_t>(k) * m_ + c];
        binv_[static_cast<size_t>(i) * m_ + c] -= factor * binv_[static_cast<size_t>(k) * m_ + c];
      }
    }
  }
  updates_since_refactor_ = 0;
  RecomputeBasicValues();
}

void BoundedSimplex::RecomputeBasicValues() {
  std::vector<double> residual = rhs_;
  const int num_cols = static_cast<int>(columns_.size());
  for (int j = 0; j < num_cols; ++j) {
    if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
    for (const Entry& e : columns_[j]) residual[e.row] -= e.value * x_[j];
  }
  for (int i = 0; i < m_; ++i) {
    const double* row = &binv_[static_cast<size_t>(i) * m_];
    double value = 0.0;
    for (int r = 0; r < m_; ++r) value += row[r] * residual[r];
    x_[head_[i]] = value;
  }
}

BoundedSimplex::PhaseResult BoundedSimplex::RunPhase() {
  const int num_cols = static_cast<int>(columns_.size());
  const int64_t degenerate_limit = 10 * static_cast<int64_t>(n_ + m_);
  const double tol = options_.optimality_tolerance;
  std::vector<double> y;
  std::vector<double> alpha;
  for (;;) {
    if (iterations_ >= options_.iteration_limit) return PhaseResult::kIterationLimit;
    if (updates_since_refactor_ >= options_.refactorization_interval) Refactorize();
    ComputeRowDuals(y);

    // Pricing: most improving reduced cost, or lowest eligible index under
    // Bland's rule.
    int entering = -1;
    double entering_d = 0.0;
    for (int j = 0; j < num_cols; ++j) {
      const VarState state = state_[j];
      if (state == VarState::kBasic || lower_[j] == upper_[j]) continue;
      const double d = ReducedCost(j, y);
      const bool eligible = (state == VarState::kAtLower && d > tol) ||
                            (state == VarState::kAtUpper && d < -tol) ||
                            (state == VarState::kFree && std::abs(d) > tol);
      if (!eligible) continue;
      if (bland_) {
        entering = j;
        entering_d = d;
        break;
      }
      if (std::abs(d) > std::abs(entering_d)) {
        entering = j;
        entering_d = d;
      }
    }
    if (entering < 0) return PhaseResult::kOptimal;

    const double dir = entering_d > 0.0 ? 1.0 : -1.0;
    ComputeColumn(entering, alpha);

    // Ratio test over basic variables plus the entering variable's own range.
    int leaving_row = -1;
    double step = kInfinity;
    bool leaving_to_upper = false;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha[i];
      if (std::abs(a) <= options_.pivot_tolerance) continue;
      const int basic = head_[i];
      const double rate = -dir * a;
      double limit;
      bool to_upper;
      if (rate < 0.0) {
        if (!std::isfinite(lower_[basic])) continue;
        limit = (x_[basic] - lower_[basic]) / -rate;
        to_upper = false;
      } else {
        if (!std::isfinite(upper_[basic])) continue;
        limit = (upper_[basic] - x_[basic]) / rate;
        to_upper = true;
      }
      limit = std::max(limit, 0.0);
      bool take = false;
      if (leaving_row < 0 || limit < step - 1e-12) {
        take = true;
      } else if (limit <= step + 1e-12) {
        take = bland_ ? basic < head_[leaving_row]
                      : std::abs(a) > std::abs(alpha[leaving_row]);
      }
      if (take) {
        leaving_row = i;
        step = limit;
        leaving_to_upper = to_upper;
      }
    }
    const double range = upper_[entering] - lower_[entering];
    const bool flip = std::isfinite(range) && (leaving_row < 0 || range <= step);
    if (flip) step = range;
    if (!std::isfinite(step)) return PhaseResult::kUnbounded;

    ++iterations_;
    degenerate_run_ = step <= 1e-12 ? degenerate_run_ + 1 : 0;
    if (degenerate_run_ > degenerate_limit) bland_ = true;

    if (step > 0.0) {
      x_[entering] += dir * step;
      for (int i = 0; i < m_; ++i) {
        if (alpha[i] != 0.0) x_[head_[i]] -= dir * step * alpha[i];
      }
    }
    if (flip) {
      if (dir > 0.0) {
        state_[entering] = VarState::kAtUpper;
        x_[entering] = upper_[entering];
      } else {
        state_[entering] = VarState::kAtLower;
        x_[entering] = lower_[entering];
      }
      continue;
    }
    const int leaving = head_[leaving_row];
    if (leaving >= n_ + m_) {
      // Artificials never re-enter once they leave the basis.
      upper_[leaving] = 0.0;
      x_[leaving] = 0.0;
      state_[leaving] = VarState::kAtLower;
    } else if (leaving_to_upper) {
      x_[leaving] = upper_[leaving];
      state_[leaving] = VarState::kAtUpper;
    } else {
      x_[leaving] = lower_[leaving];
      state_[leaving] = VarState::kAtLower;
    }
    state_[entering] = VarState::kBasic;
    head_[leaving_row] = entering;
    Pivot(leaving_row, alpha);
  }
}

LpSolution BoundedSimplex::Extract(LpStatus status) {
  LpSolution solution;
  solution.status = status;
  solution.iterations = iterations_;
  if (status != LpStatus::kOptimal) return solution;
  Refactorize();
  solution.x.assign(x_.begin(), x_.begin() + n_);
  solution.basis.resize(n_);
  for (int j = 0; j < n_; ++j) {
    solution.basis[j] = state_[j] == VarState::kBasic     ? BasisStatus::kBasic
                        : state_[j] == VarState::kAtUpper ? BasisStatus::kAtUpper
                                                          : BasisStatus::kAtLower;
    solution.objective += instance_.objective[j] * solution.x[j];
  }
  ComputeRowDuals(solution.duals);
  return solution;
}

LpSolution BoundedSimplex::Solve() {
  if (!SetUpBounds(overrides_)) return Extract(LpStatus::kInfeasible);
  SetUpInitialBasis();
  if (num_artificials_ > 0) {
    if (RunPhase() == PhaseResult::kIterationLimit) return Extract(LpStatus::kIterationLimit);
    Refactorize();
    double infeasibility = 0.0;
    for (int j = n_ + m_; j < static_cast<int>(columns_.size()); ++j) {
      if (state_[j] == VarState::kBasic) infeasibility = std::max(infeasibility, x_[j]);
    }
    if (infeasibility > options_.feasibility_tolerance) return Extract(LpStatus::kInfeasible);
    // Remaining artificials are pinned at zero for phase two.
    for (int j = n_ + m_; j < static_cast<int>(columns_.size()); ++j) {
      upper_[j] = 0.0;
      cost_[j] = 0.0;
      if (state_[j] != VarState::kBasic) x_[j] = 0.0;
    }
    degenerate_run_ = 0;
    bland_ = false;
  }
  for (int j = 0; j < n_; ++j) cost_[j] = instance_.objective[j];
  switch (RunPhase()) {
    case PhaseResult::kOptimal:
      return Extract(LpStatus::kOptimal);
    case PhaseResult::kUnbounded:
      return Extract(LpStatus::kUnbounded);
    case PhaseResult::kIterationLimit:
      return Extract(LpStatus::kIterationLimit);
  }
  return Extract(LpStatus::kIterationLimit);
}

}  // namespace

std::string_view LpStatusToString(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "Optimal";
    case LpStatus::kInfeasible:
      return "Infeasible";
    case LpStatus::kUnbounded:
      return "Unbounded";
    case LpStatus::kIterationLimit:
      return "IterationLimit";
  }
  return "?";
}

LpSolution SolveLp(const MipInstance& instance, const VariableBounds* overrides,
                   const LpOptions& options) {
  BoundedSimplex simplex(instance, overrides, options);
  return simplex.Solve();
}

double Fractionality(double value) {
  const double below = value - std::floor(value);
  const double above = std::ceil(value) - value;
  return std::min(below, above);
}

}  // namespace backdoor_mip

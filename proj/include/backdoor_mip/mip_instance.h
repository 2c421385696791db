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

#ifndef BACKDOOR_MIP_MIP_INSTANCE_H_
#define BACKDOOR_MIP_MIP_INSTANCE_H_

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace backdoor_mip {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class RowSense { kLessEqual, kGreaterEqual, kEqual };

std::string_view RowSenseToString(RowSense sense);

struct Coefficient {
  int var = 0;
  double value = 0.0;

  bool operator==(const Coefficient&) const = default;
};

struct LinearRow {
  std::vector<Coefficient> coeffs;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;

  bool operator==(const LinearRow&) const = default;
};

// A mixed integer program in maximization form:
//   max c^T x  s.t.  rows, lower <= x <= upper, x_i integral for i in
//   integer_vars.
// Instances are treated as immutable once built; all solver entry points take
// them by const reference.
struct MipInstance {
  std::string id;
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<LinearRow> rows;
  std::vector<double> lower;
  std::vector<double> upper;
  // Sorted, unique.
  std::vector<int> integer_vars;

  int num_rows() const { return static_cast<int>(rows.size()); }
  int64_t num_nonzeros() const;
  bool IsInteger(int var) const;

  bool operator==(const MipInstance&) const = default;
};

// Returns one human-readable message per broken invariant; empty when the
// instance is well formed.
std::vector<std::string> Validate(const MipInstance& instance);

// Converts a minimization objective to the stored maximization form.
void NegateObjective(MipInstance& instance);

// Versioned JSON instance files.
inline constexpr int kInstanceFormatVersion = 1;

std::string WriteInstance(const MipInstance& instance);

// Errors: InvalidArgument for malformed content (with line or field context),
// FailedPrecondition for an unsupported format version.
absl::StatusOr<MipInstance> ReadInstance(std::string_view text);

}  // namespace backdoor_mip

#endif  // BACKDOOR_MIP_MIP_INSTANCE_H_

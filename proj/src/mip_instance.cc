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

#include "backdoor_mip/mip_instance.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace backdoor_mip {
namespace {

using json = nlohmann::json;

json BoundToJson(double value) {
  if (value == kInfinity) return "inf";
  if (value == -kInfinity) return "-inf";
  return value;
}

// Line number (1-based) of byte offset `pos` in `text`.
int LineOf(std::string_view text, size_t pos) {
  pos = std::min(pos, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

class FieldError {
 public:
  explicit FieldError(std::string message) : message_(std::move(message)) {}
  const std::string& message() const { return message_; }

 private:
  std::string message_;
};

double ReadNumber(const json& value, const std::string& field) {
  if (!value.is_number()) throw FieldError(absl::StrCat(field, ": expected a number"));
  return value.get<double>();
}

double ReadBound(const json& value, const std::string& field) {
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
  }
  if (!value.is_number()) {
    throw FieldError(absl::StrCat(field, ": expected a number, \"inf\" or \"-inf\""));
  }
  return value.get<double>();
}

int ReadIndex(const json& value, const std::string& field) {
  if (!value.is_number_integer()) throw FieldError(absl::StrCat(field, ": expected an integer"));
  return value.get<int>();
}

const json& Require(const json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end()) throw FieldError(absl::StrCat("missing field \"", key, "\""));
  return *it;
}

const json& RequireArray(const json& object, const char* key) {
  const json& value = Require(object, key);
  if (!value.is_array()) throw FieldError(absl::StrCat(key, ": expected an array"));
  return value;
}

MipInstance InstanceFromJson(const json& root) {
  if (!root.is_object()) throw FieldError("top level: expected an object");
  MipInstance instance;
  const json& id = Require(root, "id");
  if (!id.is_string()) throw FieldError("id: expected a string");
  instance.id = id.get<std::string>();
  instance.num_vars = ReadIndex(Require(root, "n"), "n");
  if (instance.num_vars < 0) throw FieldError("n: must be non-negative");

  const json& c = RequireArray(root, "c");
  for (size_t i = 0; i < c.size(); ++i) {
    instance.objective.push_back(ReadNumber(c[i], absl::StrCat("c[", i, "]")));
  }
  const json& bounds = RequireArray(root, "bounds");
  for (size_t i = 0; i < bounds.size(); ++i) {
    const std::string field = absl::StrCat("bounds[", i, "]");
    if (!bounds[i].is_array() || bounds[i].size() != 2) {
      throw FieldError(absl::StrCat(field, ": expected [lo, hi]"));
    }
    instance.lower.push_back(ReadBound(bounds[i][0], field + "[0]"));
    instance.upper.push_back(ReadBound(bounds[i][1], field + "[1]"));
  }
  const json& integer = RequireArray(root, "integer");
  for (size_t i = 0; i < integer.size(); ++i) {
    instance.integer_vars.push_back(ReadIndex(integer[i], absl::StrCat("integer[", i, "]")));
  }
  const json& rows = RequireArray(root, "rows");
  for (size_t r = 0; r < rows.size(); ++r) {
    const std::string field = absl::StrCat("rows[", r, "]");
    if (!rows[r].is_object()) throw FieldError(absl::StrCat(field, ": expected an object"));
    LinearRow row;
    const json& coeffs = rows[r].find("coeffs") != rows[r].end() ? rows[r]["coeffs"] : json();
    if (!coeffs.is_array()) throw FieldError(absl::StrCat(field, ".coeffs: expected an array"));
    for (size_t k = 0; k < coeffs.size(); ++k) {
      const std::string entry = absl::StrCat(field, ".coeffs[", k, "]");
      if (!coeffs[k].is_array() || coeffs[k].size() != 2) {
        throw FieldError(absl::StrCat(entry, ": expected [var, coefficient]"));
      }
      row.coeffs.push_back({ReadIndex(coeffs[k][0], entry + "[0]"),
                            ReadNumber(coeffs[k][1], entry + "[1]")});
    }
    auto sense = rows[r].find("sense");
    if (sense == rows[r].end() || !sense->is_string()) {
      throw FieldError(absl::StrCat(field, ".sense: expected \"<=\", \">=\" or \"=\""));
    }
    const auto& s = sense->get_ref<const std::string&>();
    if (s == "<=") {
      row.sense = RowSense::kLessEqual;
    } else if (s == ">=") {
      row.sense = RowSense::kGreaterEqual;
    } else if (s == "=") {
      row.sense = RowSense::kEqual;
    } else {
      throw FieldError(absl::StrCat(field, ".sense: unknown sense \"", s, "\""));
    }
    auto rhs = rows[r].find("rhs");
    if (rhs == rows[r].end()) throw FieldError(absl::StrCat(field, ": missing field \"rhs\""));
    row.rhs = ReadNumber(*rhs, field + ".rhs");
    instance.rows.push_back(std::move(row));
  }

  if (auto sense = root.find("objective_sense"); sense != root.end()) {
    if (*sense == "minimize") {
      NegateObjective(instance);
    } else if (*sense != "maximize") {
      throw FieldError("objective_sense: expected \"maximize\" or \"minimize\"");
    }
  }
  return instance;
}

}  // namespace

std::string_view RowSenseToString(RowSense sense) {
  switch (sense) {
    case RowSense::kLessEqual:
      return "<=";
    case RowSense::kGreaterEqual:
      return ">=";
    case RowSense::kEqual:
      return "=";
  }
  return "?";
}

int64_t MipInstance::num_nonzeros() const {
  int64_t count = 0;
  for (const LinearRow& row : rows) count += static_cast<int64_t>(row.coeffs.size());
  return count;
}

bool MipInstance::IsInteger(int var) const {
  return std::binary_search(integer_vars.begin(), integer_vars.end(), var);
}

std::vector<std::string> Validate(const MipInstance& instance) {
  std::vector<std::string> violations;
  const int n = instance.num_vars;
  if (n < 0) violations.push_back("num_vars is negative");
  auto check_size = [&](const std::vector<double>& v, const char* name) {
    if (static_cast<int>(v.size()) != n) {
      violations.push_back(absl::StrCat(name, " has length ", v.size(), ", expected ", n));
    }
  };
  check_size(instance.objective, "objective");
  check_size(instance.lower, "lower bounds");
  check_size(instance.upper, "upper bounds");
  for (size_t i = 0; i < instance.objective.size(); ++i) {
    if (!std::isfinite(instance.objective[i])) {
      violations.push_back(absl::StrCat("objective[", i, "] is not finite"));
    }
  }
  const size_t num_bounds = std::min(instance.lower.size(), instance.upper.size());
  for (size_t i = 0; i < num_bounds; ++i) {
    if (std::isnan(instance.lower[i]) || std::isnan(instance.upper[i]) ||
        instance.lower[i] > instance.upper[i] || instance.lower[i] == kInfinity ||
        instance.upper[i] == -kInfinity) {
      violations.push_back(absl::StrCat("variable ", i, " has invalid bounds [",
                                        instance.lower[i], ", ", instance.upper[i], "]"));
    }
  }
  for (size_t k = 0; k < instance.integer_vars.size(); ++k) {
    int var = instance.integer_vars[k];
    if (var < 0 || var >= n) {
      violations.push_back(absl::StrCat("integer set entry ", var, " out of range"));
    }
    if (k > 0 && instance.integer_vars[k - 1] >= var) {
      violations.push_back(absl::StrCat("integer set not sorted/unique at position ", k));
    }
  }
  for (size_t r = 0; r < instance.rows.size(); ++r) {
    const LinearRow& row = instance.rows[r];
    if (!std::isfinite(row.rhs)) violations.push_back(absl::StrCat("row ", r, " rhs is not finite"));
    std::set<int> seen;
    for (const Coefficient& entry : row.coeffs) {
      if (entry.var < 0 || entry.var >= n) {
        violations.push_back(
            absl::StrCat("row ", r, " references variable ", entry.var, " out of range"));
        continue;
      }
      if (!seen.insert(entry.var).second) {
        violations.push_back(absl::StrCat("row ", r, " has duplicate entry for variable ", entry.var));
      }
      if (!std::isfinite(entry.value)) {
        violations.push_back(
            absl::StrCat("row ", r, " coefficient of variable ", entry.var, " is not finite"));
      }
    }
  }
  return violations;
}

void NegateObjective(MipInstance& instance) {
  for (double& c : instance.objective) c = -c;
}

std::string WriteInstance(const MipInstance& instance) {
  std::ostringstream out;
  json bounds = json::array();
  for (int i = 0; i < instance.num_vars; ++i) {
    bounds.push_back(json::array({BoundToJson(instance.lower[i]), BoundToJson(instance.upper[i])}));
  }
  out << "{\n"
      << " \"version\": " << kInstanceFormatVersion << ",\n"
      << " \"id\": " << json(instance.id).dump() << ",\n"
      << " \"n\": " << instance.num_vars << ",\n"
      << " \"c\": " << json(instance.objective).dump() << ",\n"
      << " \"bounds\": " << bounds.dump() << ",\n"
      << " \"integer\": " << json(instance.integer_vars).dump() << ",\n"
      << " \"rows\": [";
  for (size_t r = 0; r < instance.rows.size(); ++r) {
    const LinearRow& row = instance.rows[r];
    json coeffs = json::array();
    for (const Coefficient& entry : row.coeffs) coeffs.push_back(json::array({entry.var, entry.value}));
    json object = {{"coeffs", coeffs},
                   {"sense", std::string(RowSenseToString(row.sense))},
                   {"rhs", row.rhs}};
    out << (r == 0 ? "\n  " : ",\n  ") << object.dump();
  }
  out << (instance.rows.empty() ? "]\n" : "\n ]\n") << "}\n";
  return out.str();
}

absl::StatusOr<MipInstance> ReadInstance(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("instance parse error at line ", LineOf(text, e.byte), ": ", e.what()));
  }
  if (!root.is_object()) return absl::InvalidArgumentError("instance: expected a JSON object");
  auto version = root.find("version");
  if (version == root.end() || !version->is_number_integer()) {
    return absl::InvalidArgumentError("instance: missing integer field \"version\"");
  }
  if (version->get<int>() != kInstanceFormatVersion) {
    return absl::FailedPreconditionError(
        absl::StrCat("unsupported instance format version ", version->dump(), " (expected ",
                     kInstanceFormatVersion, ")"));
  }
  MipInstance instance;
  try {
    instance = InstanceFromJson(root);
  } catch (const FieldError& e) {
    return absl::InvalidArgumentError(absl::StrCat("instance field error: ", e.message()));
  }
  std::vector<std::string> violations = Validate(instance);
  if (!violations.empty()) {
    return absl::InvalidArgumentError(absl::StrCat("invalid instance: ", violations.front()));
  }
  return instance;
}

}  // namespace backdoor_mip

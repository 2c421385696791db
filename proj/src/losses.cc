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

#include "backdoor_mip/losses.h"

#include <algorithm>
#include <cmath>

namespace backdoor_mip {

double MarginRankingLoss(double s1, double s2, int y, double margin) {
  return std::max(0.0, -y * (s1 - s2) + margin);
}

PairLossGrad MarginRankingLossGrad(double s1, double s2, int y, double margin) {
  PairLossGrad result;
  result.loss = MarginRankingLoss(s1, s2, y, margin);
  if (result.loss > 0.0) {
    result.d_first = -y;
    result.d_second = y;
  }
  return result;
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double BceWithLogits(double logit, double label) {
  return std::max(logit, 0.0) - logit * label + std::log1p(std::exp(-std::abs(logit)));
}

double BceWithLogitsGrad(double logit, double label) { return Sigmoid(logit) - label; }

}  // namespace backdoor_mip

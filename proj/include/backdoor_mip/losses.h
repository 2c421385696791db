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

#ifndef BACKDOOR_MIP_LOSSES_H_
#define BACKDOOR_MIP_LOSSES_H_

namespace backdoor_mip {

// max(0, -y * (s1 - s2) + margin), y in {-1, +1}.
double MarginRankingLoss(double s1, double s2, int y, double margin);

struct PairLossGrad {
  double loss = 0.0;
  double d_first = 0.0;
  double d_second = 0.0;
};

// Gradient is zero wherever the hinge is inactive (loss == 0).
PairLossGrad MarginRankingLossGrad(double s1, double s2, int y, double margin);

double Sigmoid(double x);

// Binary cross entropy on a logit, log-sum-exp form.
double BceWithLogits(double logit, double label);

// d/d(logit) of BceWithLogits: sigmoid(logit) - label.
double BceWithLogitsGrad(double logit, double label);

}  // namespace backdoor_mip

#endif  // BACKDOOR_MIP_LOSSES_H_

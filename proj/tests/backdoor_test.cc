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

#include "backdoor_mip/backdoor.h"

#include <cmath>
#include <set>

#include "backdoor_mip/gisp.h"
#include "backdoor_mip/lp_simplex.h"
#include "gtest/gtest.h"

namespace backdoor_mip {
namespace {

MipInstance BinaryInstance(int n) {
  MipInstance mip;
  mip.id = "binary";
  mip.num_vars = n;
  mip.objective.assign(n, 1.0);
  mip.lower.assign(n, 0.0);
  mip.upper.assign(n, 1.0);
  for (int j = 0; j < n; ++j) mip.integer_vars.push_back(j);
  return mip;
}

LpSolution OptimalAt(const std::vector<double>& x) {
  LpSolution lp;
  lp.status = LpStatus::kOptimal;
  lp.x = x;
  lp.basis.assign(x.size(), BasisStatus::kBasic);
  return lp;
}

TEST(CandidateSetSizeTest, CeilWithMinimumOne) {
  EXPECT_EQ(CandidateSetSize(1000, 0.01), 10);
  EXPECT_EQ(CandidateSetSize(67, 0.01), 1);
  EXPECT_EQ(CandidateSetSize(150, 0.01), 2);
  EXPECT_EQ(CandidateSetSize(100, 0.01), 1);
  EXPECT_EQ(CandidateSetSize(5, 1.0), 5);
}

TEST(SampleCandidatesTest, OnePercentOfAThousand) {
  MipInstance mip = BinaryInstance(1000);
  std::vector<double> x(1000);
  for (int j = 0; j < 1000; ++j) x[j] = (j % 3) * 0.25;
  absl::StatusOr<std::vector<CandidateSet>> sets =
      SampleCandidates(mip, OptimalAt(x), 50, 0.01, 17);
  ASSERT_TRUE(sets.ok());
  ASSERT_EQ(sets->size(), 50u);
  for (const CandidateSet& set : *sets) {
    EXPECT_EQ(set.vars.size(), 10u);
    EXPECT_TRUE(std::is_sorted(set.vars.begin(), set.vars.end()));
    EXPECT_EQ(std::set<int>(set.vars.begin(), set.vars.end()).size(), 10u);
    EXPECT_EQ(set.instance_id, "binary");
    EXPECT_EQ(set.source_seed, 17u);
  }
}

TEST(SampleCandidatesTest, IntegralRootFallsBackToUniform) {
  MipInstance mip = BinaryInstance(4);
  absl::StatusOr<std::vector<CandidateSet>> sets =
      SampleCandidates(mip, OptimalAt({0, 1, 0, 1}), 40000, 0.5, 5);
  ASSERT_TRUE(sets.ok());
  std::vector<int> hits(4, 0);
  for (const CandidateSet& set : *sets) {
    EXPECT_EQ(set.vars.size(), 2u);
    for (int v : set.vars) ++hits[v];
  }
  // Each index appears in half the sets: 20000 +- 4 sd (sd ~ 100).
  for (int h : hits) EXPECT_NEAR(h, 20000, 400);
}

TEST(SampleCandidatesTest, OnlyIntegerVariablesAreSampled) {
  MipInstance mip = BinaryInstance(6);
  mip.integer_vars = {1, 4};
  absl::StatusOr<std::vector<CandidateSet>> sets =
      SampleCandidates(mip, OptimalAt({0.5, 0.5, 0.5, 0.5, 0.5, 0.5}), 100, 0.5, 1);
  ASSERT_TRUE(sets.ok());
  for (const CandidateSet& set : *sets) {
    ASSERT_EQ(set.vars.size(), 1u);
    EXPECT_TRUE(set.vars[0] == 1 || set.vars[0] == 4);
  }
}

TEST(SampleCandidatesTest, DeterministicGivenSeed) {
  MipInstance mip = *GenerateGisp({15, 0.5, 100.0, 50.0, 2});
  LpSolution lp = SolveLp(mip);
  EXPECT_EQ(*SampleCandidates(mip, lp, 50, 0.01, 9), *SampleCandidates(mip, lp, 50, 0.01, 9));
  EXPECT_NE(*SampleCandidates(mip, lp, 50, 0.01, 9), *SampleCandidates(mip, lp, 50, 0.01, 10));
}

TEST(SampleCandidatesTest, Errors) {
  MipInstance mip = BinaryInstance(3);
  LpSolution lp = OptimalAt({0.5, 0.5, 0.5});
  EXPECT_EQ(SampleCandidates(mip, lp, 5, 0.0, 1).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(SampleCandidates(mip, lp, 5, 1.5, 1).status().code(),
            absl::StatusCode::kInvalidArgument);
  LpSolution infeasible = lp;
  infeasible.status = LpStatus::kInfeasible;
  EXPECT_EQ(SampleCandidates(mip, infeasible, 5, 0.5, 1).status().code(),
            absl::StatusCode::kFailedPrecondition);
  mip.integer_vars.clear();
  EXPECT_EQ(SampleCandidates(mip, lp, 5, 0.5, 1).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(WeightedSampleTest, WithoutReplacement) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> picks =
        WeightedSampleWithoutReplacement(std::vector<double>{1.0, 5.0, 0.1, 2.0, 1e-6}, 5, rng);
    EXPECT_EQ(std::set<int>(picks.begin(), picks.end()).size(), 5u);
  }
}

TEST(WeightedSampleTest, SizeOneFrequencyMatchesNormalizedWeight) {
  // Weight 0.5 against nine weights of 0.05: p0 = 0.5 / 0.95.
  std::vector<double> weights(10, 0.05);
  weights[0] = 0.5;
  const double p0 = 0.5 / 0.95;
  const int draws = 20000;
  Rng rng(11);
  int hits = 0;
  for (int d = 0; d < draws; ++d) {
    if (WeightedSampleWithoutReplacement(weights, 1, rng)[0] == 0) ++hits;
  }
  const double sigma = std::sqrt(p0 * (1 - p0) / draws);
  EXPECT_NEAR(static_cast<double>(hits) / draws, p0, 4 * sigma);
}

TEST(PrioritiesFromTest, Examples) {
  CandidateSet set{"x", {2, 5}, 0};
  EXPECT_EQ(PrioritiesFrom(set, 6)->priority, (std::vector<int>{0, 0, 1, 0, 0, 1}));
  CandidateSet all{"x", {0, 1, 2}, 0};
  EXPECT_EQ(PrioritiesFrom(all, 3)->priority, (std::vector<int>{1, 1, 1}));
  EXPECT_FALSE(PrioritiesFrom(CandidateSet{"x", {}, 0}, 3).ok());
  EXPECT_FALSE(PrioritiesFrom(CandidateSet{"x", {3}, 0}, 3).ok());
}

TEST(CandidateFileTest, RoundTrip) {
  std::vector<CandidateSet> sets = {{"inst", {1, 4}, 99}, {"inst", {0}, 99}};
  absl::StatusOr<std::vector<CandidateSet>> read = ReadCandidates(WriteCandidates("inst", 99, sets));
  ASSERT_TRUE(read.ok());
  EXPECT_EQ(*read, sets);
}

TEST(CandidateFileTest, MalformedInput) {
  EXPECT_FALSE(ReadCandidates("{").ok());
  EXPECT_FALSE(ReadCandidates(R"({"instance_id": "a", "seed": 1})").ok());
  EXPECT_FALSE(ReadCandidates(R"({"instance_id": "a", "seed": 1, "sets": [[2, 1]]})").ok());
  EXPECT_FALSE(ReadCandidates(R"({"instance_id": "a", "seed": 1, "sets": [[]]})").ok());
}

}  // namespace
}  // namespace backdoor_mip

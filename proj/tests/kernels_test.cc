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

#include "backdoor_mip/kernels.h"

#include <omp.h>

#include "backdoor_mip/random.h"
#include "gtest/gtest.h"

namespace backdoor_mip {
namespace {

Matrix RandomMatrix(int rows, int cols, Rng& rng, double zero_fraction = 0.1) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.Uniform() < zero_fraction ? 0.0 : rng.Normal();
  return m;
}

class KernelsTest : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    saved_threads_ = omp_get_max_threads();
    omp_set_num_threads(4);
  }
  void TearDown() override { omp_set_num_threads(saved_threads_); }

 private:
  int saved_threads_ = 1;
};

TEST_P(KernelsTest, AffineMatchesReferenceBitForBit) {
  Rng rng(GetParam());
  const int n = GetParam();
  Matrix x = RandomMatrix(n, 32, rng);
  Matrix w = RandomMatrix(32, 128, rng);
  Matrix bias = RandomMatrix(1, 128, rng);
  Matrix fast, slow;
  kernels::Affine(x, w, &bias, fast);
  kernels::reference::Affine(x, w, &bias, slow);
  EXPECT_EQ(fast, slow);
  kernels::Affine(x, w, nullptr, fast);
  kernels::reference::Affine(x, w, nullptr, slow);
  EXPECT_EQ(fast, slow);
}

TEST_P(KernelsTest, TransposedProductsMatchReferenceBitForBit) {
  Rng rng(GetParam() + 1000);
  const int n = GetParam();
  Matrix a = RandomMatrix(n, 128, rng);
  Matrix b = RandomMatrix(32, 128, rng);
  Matrix seed = RandomMatrix(n, 32, rng);
  Matrix fast = seed, slow = seed;
  kernels::AddMatMulTransB(a, b, fast);
  kernels::reference::AddMatMulTransB(a, b, slow);
  EXPECT_EQ(fast, slow);

  Matrix c = RandomMatrix(n, 32, rng);
  Matrix acc(128, 32);
  Matrix acc_ref(128, 32);
  kernels::AddMatMulTransA(a, c, acc);
  kernels::reference::AddMatMulTransA(a, c, acc_ref);
  EXPECT_EQ(acc, acc_ref);
}

// Sizes on both sides of the parallel threshold.
INSTANTIATE_TEST_SUITE_P(Sizes, KernelsTest, ::testing::Values(1, 5, 17, 64, 300));

TEST(KernelsValueTest, SmallAffineByHand) {
  Matrix x(2, 2);
  x(0, 0) = 1;
  x(0, 1) = 2;
  x(1, 0) = -1;
  x(1, 1) = 0.5;
  Matrix w(2, 3);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) w(r, c) = r * 3 + c;  // [[0,1,2],[3,4,5]]
  }
  Matrix bias(1, 3, 1.0);
  Matrix y;
  kernels::Affine(x, w, &bias, y);
  EXPECT_EQ(y.values(), (std::vector<double>{7, 10, 13, 2.5, 2, 1.5}));

  Matrix c(2, 2);
  kernels::AddMatMulTransB(x, x, c);  // x x^T
  EXPECT_EQ(c.values(), (std::vector<double>{5, 0, 0, 1.25}));

  Matrix d(2, 2);
  kernels::AddMatMulTransA(x, x, d);  // x^T x
  EXPECT_EQ(d.values(), (std::vector<double>{2, 1.5, 1.5, 4.25}));
}

}  // namespace
}  // namespace backdoor_mip

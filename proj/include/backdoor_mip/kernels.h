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

#ifndef BACKDOOR_MIP_KERNELS_H_
#define BACKDOOR_MIP_KERNELS_H_

#include "backdoor_mip/tensor.h"

// Dense kernels used by the network. The default entry points split output
// rows across OpenMP threads; `reference` holds the serial versions kept for
// testing and benchmarking. Both visit every reduction in the same order, so
// their results are bit-identical for any thread count.
namespace backdoor_mip::kernels {

// y = x * w (+ bias broadcast over rows). x: N x in, w: in x out, bias: 1 x out.
void Affine(const Matrix& x, const Matrix& w, const Matrix* bias, Matrix& y);

// c += a * b^T. a: N x K, b: M x K, c: N x M.
void AddMatMulTransB(const Matrix& a, const Matrix& b, Matrix& c);

// c += a^T * b. a: N x M, b: N x K, c: M x K.
void AddMatMulTransA(const Matrix& a, const Matrix& b, Matrix& c);

// Below this many multiply-adds the parallel entry points stay serial.
inline constexpr long kParallelWorkThreshold = 1L << 15;

namespace reference {

void Affine(const Matrix& x, const Matrix& w, const Matrix* bias, Matrix& y);
void AddMatMulTransB(const Matrix& a, const Matrix& b, Matrix& c);
void AddMatMulTransA(const Matrix& a, const Matrix& b, Matrix& c);

}  // namespace reference
}  // namespace backdoor_mip::kernels

#endif  // BACKDOOR_MIP_KERNELS_H_

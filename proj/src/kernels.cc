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

#include <cassert>
#include <vector>

namespace backdoor_mip::kernels {
namespace {

// Row bodies shared by the serial and parallel drivers.

inline void AffineRow(const Matrix& x, const Matrix& w, const Matrix* bias, Matrix& y, int i) {
  const int in = x.cols();
  const int out = w.cols();
  double* y_row = y.data() + static_cast<size_t>(i) * out;
  if (bias != nullptr) {
    const double* b = bias->data();
    for (int o = 0; o < out; ++o) y_row[o] = b[o];
  } else {
    for (int o = 0; o < out; ++o) y_row[o] = 0.0;
  }
  const double* x_row = x.data() + static_cast<size_t>(i) * in;
  for (int a = 0; a < in; ++a) {
    const double scale = x_row[a];
    if (scale == 0.0) continue;
    const double* w_row = w.data() + static_cast<size_t>(a) * out;
    for (int o = 0; o < out; ++o) y_row[o] += scale * w_row[o];
  }
}

// c[i, :] += sum_k a[i, k] * bt[k, :], with bt = b^T.
inline void TransBRow(const Matrix& a, const Matrix& bt, Matrix& c, int i) {
  const int inner = a.cols();
  const int out = c.cols();
  double* c_row = c.data() + static_cast<size_t>(i) * out;
  const double* a_row = a.data() + static_cast<size_t>(i) * inner;
  for (int k = 0; k < inner; ++k) {
    const double scale = a_row[k];
    if (scale == 0.0) continue;
    const double* bt_row = bt.data() + static_cast<size_t>(k) * out;
    for (int o = 0; o < out; ++o) c_row[o] += scale * bt_row[o];
  }
}

// c[r, :] += sum_i a[i, r] * b[i, :].
inline void TransARow(const Matrix& a, const Matrix& b, Matrix& c, int r) {
  const int n = a.rows();
  const int out = b.cols();
  double* c_row = c.data() + static_cast<size_t>(r) * out;
  for (int i = 0; i < n; ++i) {
    const double scale = a(i, r);
    if (scale == 0.0) continue;
    const double* b_row = b.data() + static_cast<size_t>(i) * out;
    for (int o = 0; o < out; ++o) c_row[o] += scale * b_row[o];
  }
}

Matrix Transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
  }
  return t;
}

bool RunParallel(long work) { return work >= kParallelWorkThreshold && !omp_in_parallel(); }

}  // namespace

void Affine(const Matrix& x, const Matrix& w, const Matrix* bias, Matrix& y) {
  assert(x.cols() == w.rows());
  if (y.rows() != x.rows() || y.cols() != w.cols()) y = Matrix(x.rows(), w.cols());
  const int n = x.rows();
  if (RunParallel(static_cast<long>(n) * x.cols() * w.cols())) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) AffineRow(x, w, bias, y, i);
  } else {
    for (int i = 0; i < n; ++i) AffineRow(x, w, bias, y, i);
  }
}

void AddMatMulTransB(const Matrix& a, const Matrix& b, Matrix& c) {
  assert(a.cols() == b.cols() && c.rows() == a.rows() && c.cols() == b.rows());
  const Matrix bt = Transpose(b);
  const int n = a.rows();
  if (RunParallel(static_cast<long>(n) * a.cols() * b.rows())) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) TransBRow(a, bt, c, i);
  } else {
    for (int i = 0; i < n; ++i) TransBRow(a, bt, c, i);
  }
}

void AddMatMulTransA(const Matrix& a, const Matrix& b, Matrix& c) {
  assert(a.rows() == b.rows() && c.rows() == a.cols() && c.cols() == b.cols());
  const int m = a.cols();
  if (RunParallel(static_cast<long>(a.rows()) * m * b.cols())) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < m; ++r) TransARow(a, b, c, r);
  } else {
    for (int r = 0; r < m; ++r) TransARow(a, b, c, r);
  }
}

namespace reference {

void Affine(const Matrix& x, const Matrix& w, const Matrix* bias, Matrix& y) {
  if (y.rows() != x.rows() || y.cols() != w.cols()) y = Matrix(x.rows(), w.cols());
  for (int i = 0; i < x.rows(); ++i) AffineRow(x, w, bias, y, i);
}

void AddMatMulTransB(const Matrix& a, const Matrix& b, Matrix& c) {
  const Matrix bt = Transpose(b);
  for (int i = 0; i < a.rows(); ++i) TransBRow(a, bt, c, i);
}

void AddMatMulTransA(const Matrix& a, const Matrix& b, Matrix& c) {
  for (int r = 0; r < a.cols(); ++r) TransARow(a, b, c, r);
}

}  // namespace reference
}  // namespace backdoor_mip::kernels

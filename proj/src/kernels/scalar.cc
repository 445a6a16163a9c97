// Copyright 2026 The mtforge Authors.
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

#include "mtforge/kernels/kernels.h"

namespace mtforge::kernels {
namespace {

void accumulate_f32_scalar(double* acc, const float* row, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += static_cast<double>(row[i]);
}

void divide_to_f32_scalar(float* out, const double* acc, double divisor,
                          std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(acc[i] / divisor);
}

constexpr KernelTable kScalar{Isa::kScalar, &accumulate_f32_scalar,
                              &divide_to_f32_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace mtforge::kernels

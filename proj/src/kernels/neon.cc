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

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace mtforge::kernels {

#if defined(__aarch64__)
namespace {

void accumulate_f32_neon(double* acc, const float* row, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t f = vld1q_f32(row + i);
    const float64x2_t lo = vcvt_f64_f32(vget_low_f32(f));
    const float64x2_t hi = vcvt_high_f64_f32(f);
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), lo));
    vst1q_f64(acc + i + 2, vaddq_f64(vld1q_f64(acc + i + 2), hi));
  }
  for (; i < n; ++i) acc[i] += static_cast<double>(row[i]);
}

void divide_to_f32_neon(float* out, const double* acc, double divisor,
                        std::size_t n) {
  const float64x2_t div = vdupq_n_f64(divisor);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t q = vdivq_f64(vld1q_f64(acc + i), div);
    vst1_f32(out + i, vcvt_f32_f64(q));
  }
  for (; i < n; ++i) out[i] = static_cast<float>(acc[i] / divisor);
}

constexpr KernelTable kNeon{Isa::kNeon, &accumulate_f32_neon, &divide_to_f32_neon};

}  // namespace

namespace detail {
const KernelTable* neon_table() { return &kNeon; }
}  // namespace detail

#else

namespace detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace detail

#endif

}  // namespace mtforge::kernels

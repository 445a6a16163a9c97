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

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define MTFORGE_HAVE_AVX2_KERNELS 1
#endif

namespace mtforge::kernels {

#if MTFORGE_HAVE_AVX2_KERNELS
namespace {

__attribute__((target("avx2"))) void accumulate_f32_avx2(double* acc,
                                                          const float* row,
                                                          std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 f = _mm256_loadu_ps(row + i);
    const __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(f));
    const __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(f, 1));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), lo));
    _mm256_storeu_pd(acc + i + 4, _mm256_add_pd(_mm256_loadu_pd(acc + i + 4), hi));
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_cvtps_pd(_mm_loadu_ps(row + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), d));
  }
  for (; i < n; ++i) acc[i] += static_cast<double>(row[i]);
}

__attribute__((target("avx2"))) void divide_to_f32_avx2(float* out,
                                                        const double* acc,
                                                        double divisor,
                                                        std::size_t n) {
  const __m256d div = _mm256_set1_pd(divisor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d q = _mm256_div_pd(_mm256_loadu_pd(acc + i), div);
    _mm_storeu_ps(out + i, _mm256_cvtpd_ps(q));
  }
  for (; i < n; ++i) out[i] = static_cast<float>(acc[i] / divisor);
}

constexpr KernelTable kAvx2{Isa::kAvx2, &accumulate_f32_avx2, &divide_to_f32_avx2};

}  // namespace

namespace detail {
const KernelTable* avx2_table() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}
}  // namespace detail

#else

namespace detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace detail

#endif

}  // namespace mtforge::kernels

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

#ifndef MTFORGE_KERNELS_KERNELS_H_
#define MTFORGE_KERNELS_KERNELS_H_

#include <cstddef>
#include <string_view>
#include <vector>

namespace mtforge::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

// Column-wise float -> double accumulation used by embedding surgery. Every
// variant performs the same IEEE operations per lane in the same order, so
// results are bit-identical to the scalar reference.
struct KernelTable {
  Isa isa;
  // acc[i] += double(row[i]) for i in [0, n).
  void (*accumulate_f32)(double* acc, const float* row, std::size_t n);
  // out[i] = float(acc[i] / divisor) for i in [0, n).
  void (*divide_to_f32)(float* out, const double* acc, double divisor,
                        std::size_t n);
};

const KernelTable& scalar_table();

// Tables for which both the build and the running CPU have support; the
// scalar table is always first.
std::vector<const KernelTable*> available_tables();

// Best available table. MTFORGE_ISA=scalar|avx2|neon in the environment
// restricts the choice (unknown or unavailable values fall back to scalar).
const KernelTable& active();

std::string_view isa_name(Isa isa);

namespace detail {
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace detail

}  // namespace mtforge::kernels

#endif  // MTFORGE_KERNELS_KERNELS_H_

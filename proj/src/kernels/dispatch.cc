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

#include <cstdlib>
#include <string>

#include "mtforge/kernels/kernels.h"

namespace mtforge::kernels {

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> tables{&scalar_table()};
  if (const KernelTable* t = detail::avx2_table()) tables.push_back(t);
  if (const KernelTable* t = detail::neon_table()) tables.push_back(t);
  return tables;
}

const KernelTable& active() {
  static const KernelTable* selected = [] {
    const auto tables = available_tables();
    const char* env = std::getenv("MTFORGE_ISA");
    if (env == nullptr || *env == '\0') return tables.back();
    for (const KernelTable* t : tables) {
      if (isa_name(t->isa) == env) return t;
    }
    return tables.front();
  }();
  return *selected;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

}  // namespace mtforge::kernels

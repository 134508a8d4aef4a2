//
// Copyright 2026 The dp-saddle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <cstdlib>
#include <string_view>

#include "dpsaddle/kernels.h"

namespace dpsaddle::kernels {
namespace {

constexpr KernelTable kScalarTable{Isa::kScalar, &scalar::ExpShifted,
                                   &scalar::WeightedMoments};

#if defined(DPSADDLE_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::kAvx2, &avx2::ExpShifted,
                                 &avx2::WeightedMoments};

bool CpuHasAvx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable& Select() {
  const char* forced = std::getenv("DP_SADDLE_ISA");
  if (forced != nullptr && std::string_view(forced) == "scalar") {
    return kScalarTable;
  }
  if (const KernelTable* t = ForIsa(Isa::kAvx2); t != nullptr) return *t;
  return kScalarTable;
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* ForIsa(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &kScalarTable;
    case Isa::kAvx2:
#if defined(DPSADDLE_HAVE_AVX2)
      if (CpuHasAvx2()) return &kAvx2Table;
#endif
      return nullptr;
  }
  return nullptr;
}

const KernelTable& Active() {
  static const KernelTable& table = Select();
  return table;
}

}  // namespace dpsaddle::kernels

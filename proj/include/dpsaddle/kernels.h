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

// Data-parallel inner loops of the quadrature code. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2+FMA variant. The variant
// is picked once at first use from the CPU features; setting the environment
// variable DP_SADDLE_ISA=scalar forces the reference path.

#ifndef DPSADDLE_KERNELS_H_
#define DPSADDLE_KERNELS_H_

#include <span>
#include <string_view>

namespace dpsaddle::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view IsaName(Isa isa);

// Weighted power sums about `center`:
//   s_k = Σ w_i (v_i − c)^k for k = 0..4,  abs3 = Σ w_i |v_i − c|³.
struct MomentSums {
  double s0 = 0;
  double s1 = 0;
  double s2 = 0;
  double s3 = 0;
  double s4 = 0;
  double abs3 = 0;
};

// out[i] = exp(a[i] − shift). Arguments below −700 map to 0.
using ExpShiftedFn = void (*)(std::span<const double> a, double shift,
                              std::span<double> out);
using WeightedMomentsFn = MomentSums (*)(std::span<const double> weights,
                                         std::span<const double> values,
                                         double center);

struct KernelTable {
  Isa isa;
  ExpShiftedFn exp_shifted;
  WeightedMomentsFn weighted_moments;
};

// The table selected for this process.
const KernelTable& Active();

// Table for a specific ISA, or nullptr if it is not compiled in or the CPU
// lacks it. Used by the equivalence tests.
const KernelTable* ForIsa(Isa isa);

inline void ExpShifted(std::span<const double> a, double shift,
                       std::span<double> out) {
  Active().exp_shifted(a, shift, out);
}

inline MomentSums WeightedMoments(std::span<const double> weights,
                                  std::span<const double> values,
                                  double center) {
  return Active().weighted_moments(weights, values, center);
}

namespace scalar {
void ExpShifted(std::span<const double> a, double shift, std::span<double> out);
MomentSums WeightedMoments(std::span<const double> weights,
                           std::span<const double> values, double center);
}  // namespace scalar

namespace avx2 {
void ExpShifted(std::span<const double> a, double shift, std::span<double> out);
MomentSums WeightedMoments(std::span<const double> weights,
                           std::span<const double> values, double center);
}  // namespace avx2

}  // namespace dpsaddle::kernels

#endif  // DPSADDLE_KERNELS_H_

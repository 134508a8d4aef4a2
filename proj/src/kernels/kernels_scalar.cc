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

#include <cmath>
#include <cstddef>

#include "dpsaddle/kernels.h"

namespace dpsaddle::kernels::scalar {

void ExpShifted(std::span<const double> a, double shift,
                std::span<double> out) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i] - shift;
    out[i] = x < -700.0 ? 0.0 : std::exp(x);
  }
}

MomentSums WeightedMoments(std::span<const double> weights,
                           std::span<const double> values, double center) {
  MomentSums m;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    const double d = values[i] - center;
    const double d2 = d * d;
    m.s0 += w;
    m.s1 += w * d;
    m.s2 += w * d2;
    m.s3 += w * d2 * d;
    m.s4 += w * d2 * d2;
    m.abs3 += w * d2 * std::abs(d);
  }
  return m;
}

}  // namespace dpsaddle::kernels::scalar

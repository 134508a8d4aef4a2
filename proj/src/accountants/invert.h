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

#ifndef DPSADDLE_ACCOUNTANTS_INVERT_H_
#define DPSADDLE_ACCOUNTANTS_INVERT_H_

#include <functional>

#include "absl/status/statusor.h"

namespace dpsaddle::internal {

// Smallest ε ≥ 0 with log_delta(ε) ≤ log(delta_target) for a nonincreasing
// curve, to max(1e-9, 1e-9·ε). The bracket is grown by doubling from ε = 1
// up to 1e6.
absl::StatusOr<double> InvertLogDelta(
    const std::function<absl::StatusOr<double>(double)>& log_delta,
    double delta_target);

}  // namespace dpsaddle::internal

#endif  // DPSADDLE_ACCOUNTANTS_INVERT_H_

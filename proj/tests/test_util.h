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

#ifndef DPSADDLE_TESTS_TEST_UTIL_H_
#define DPSADDLE_TESTS_TEST_UTIL_H_

#include <cmath>

#include "absl/status/statusor.h"
#include "gtest/gtest.h"

#define DPS_CONCAT_INNER(a, b) a##b
#define DPS_CONCAT(a, b) DPS_CONCAT_INNER(a, b)

// Unwraps a StatusOr into `lhs`, failing the test on error.
#define ASSERT_OK_AND_ASSIGN(lhs, expr) \
  ASSERT_OK_AND_ASSIGN_IMPL(DPS_CONCAT(status_or_, __LINE__), lhs, expr)
#define ASSERT_OK_AND_ASSIGN_IMPL(tmp, lhs, expr) \
  auto tmp = (expr);                              \
  ASSERT_TRUE(tmp.ok()) << tmp.status();          \
  lhs = std::move(tmp).value()

#define EXPECT_OK(expr)                   \
  do {                                    \
    const auto& dps_result = (expr);      \
    EXPECT_TRUE(dps_result.ok()) << dps_result.status(); \
  } while (0)

namespace dpsaddle::testing {

inline double RelErr(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

}  // namespace dpsaddle::testing

#endif  // DPSADDLE_TESTS_TEST_UTIL_H_

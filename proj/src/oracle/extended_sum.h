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

#ifndef DPSADDLE_ORACLE_EXTENDED_SUM_H_
#define DPSADDLE_ORACLE_EXTENDED_SUM_H_

#include <memory>

namespace dpsaddle::internal {

// Running sum of doubles held in an MPFR float, so that the order of the
// terms and cancellation between them do not cost accuracy.
class ExtendedSum {
 public:
  explicit ExtendedSum(int precision_bits);
  ExtendedSum(const ExtendedSum&) = delete;
  ExtendedSum& operator=(const ExtendedSum&) = delete;
  ~ExtendedSum();

  void Add(double x);
  // Adds a·b with the product formed exactly.
  void AddProduct(double a, double b);
  void Reset();
  double Value() const;

 private:
  struct Rep;
  std::unique_ptr<Rep> rep_;
};

}  // namespace dpsaddle::internal

#endif  // DPSADDLE_ORACLE_EXTENDED_SUM_H_

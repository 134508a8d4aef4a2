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

#include "oracle/extended_sum.h"

#include <mpfr.h>

#include <algorithm>

namespace dpsaddle::internal {

struct ExtendedSum::Rep {
  mpfr_t sum;
  mpfr_t term;
};

ExtendedSum::ExtendedSum(int precision_bits) : rep_(std::make_unique<Rep>()) {
  const mpfr_prec_t bits = std::max(precision_bits, 64);
  mpfr_init2(rep_->sum, bits);
  mpfr_init2(rep_->term, bits);
  mpfr_set_zero(rep_->sum, 1);
}

ExtendedSum::~ExtendedSum() {
  mpfr_clear(rep_->sum);
  mpfr_clear(rep_->term);
}

void ExtendedSum::Add(double x) { mpfr_add_d(rep_->sum, rep_->sum, x, MPFR_RNDN); }

void ExtendedSum::AddProduct(double a, double b) {
  // 106 bits hold the product of two doubles exactly.
  mpfr_set_d(rep_->term, a, MPFR_RNDN);
  mpfr_mul_d(rep_->term, rep_->term, b, MPFR_RNDN);
  mpfr_add(rep_->sum, rep_->sum, rep_->term, MPFR_RNDN);
}

void ExtendedSum::Reset() { mpfr_set_zero(rep_->sum, 1); }

double ExtendedSum::Value() const { return mpfr_get_d(rep_->sum, MPFR_RNDN); }

}  // namespace dpsaddle::internal

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

// Numerically stable special functions shared by the accountants. Anything
// that may fall below the double range has a log-space twin.

#ifndef DPSADDLE_SPECFUN_H_
#define DPSADDLE_SPECFUN_H_

#include "absl/status/statusor.h"

namespace dpsaddle {

// A probability in [0, 1].
class Probability {
 public:
  static absl::StatusOr<Probability> Create(double value);

  double value() const { return value_; }

 private:
  explicit Probability(double value) : value_(value) {}
  double value_;
};

// Standard normal CDF, evaluated through erfc so that the lower tail keeps
// full relative precision.
absl::StatusOr<Probability> PhiCdf(double z);

// log Φ(z). Finite for every finite z.
absl::StatusOr<double> LogPhiCdf(double z);

// Inverse of the standard normal CDF for p in (0, 1).
absl::StatusOr<double> InversePhi(double p);

// Scaled complementary error function erfcx(x) = exp(x²)·erfc(x).
double Erfcx(double x);

// log erfcx(x); finite for every finite x.
double LogErfcx(double x);

// q(z) = Q(z)·√(2π)·exp(z²/2), computed as √(π/2)·erfcx(z/√2).
absl::StatusOr<double> QScaled(double z);

// log q(z). Unlike QScaled, never overflows for very negative z.
double LogQScaled(double z);

// log(q(lo) − q(hi)) for lo < hi. Returns -inf when lo >= hi.
double LogQDifference(double lo, double hi);

// log(exp(a) + exp(b)).
double LogSumExp(double a, double b);

// log(exp(a) − exp(b)) for a >= b; -inf when a == b.
double LogDiffExp(double a, double b);

}  // namespace dpsaddle

#endif  // DPSADDLE_SPECFUN_H_

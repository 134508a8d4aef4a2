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

#include "dpsaddle/specfun.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "boost/math/special_functions/erf.hpp"

namespace dpsaddle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrtHalfPi = 1.2533141373155002512;  // √(π/2)
constexpr double kLogSqrtHalfPi = 0.22579135264472743236;
constexpr double kInvSqrtPi = 0.56418958354775628695;

// Above this erfc(x) underflows, so switch to the continued fraction.
constexpr double kErfcxAsymptoticThreshold = 26.0;

absl::Status CheckFinite(double z, const char* what) {
  if (!std::isfinite(z)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: argument must be finite, got %g", what, z));
  }
  return absl::OkStatus();
}

// exp(x²) with the rounding error of x² folded back in.
double ExpSquare(double x) {
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  return std::exp(hi) * (1.0 + lo);
}

// Continued fraction for erfc, valid for large positive x.
double ErfcxContinuedFraction(double x) {
  double f = x;
  for (int k = 24; k >= 1; --k) {
    f = x + (0.5 * k) / f;
  }
  return kInvSqrtPi / f;
}

}  // namespace

absl::StatusOr<Probability> Probability::Create(double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("probability out of [0,1]: %g", value));
  }
  return Probability(value);
}

absl::StatusOr<Probability> PhiCdf(double z) {
  if (absl::Status s = CheckFinite(z, "PhiCdf"); !s.ok()) return s;
  return Probability::Create(0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0));
}

absl::StatusOr<double> LogPhiCdf(double z) {
  if (absl::Status s = CheckFinite(z, "LogPhiCdf"); !s.ok()) return s;
  const double x = -z / std::numbers::sqrt2;
  if (z > 0.0) {
    // Φ(z) = 1 − erfc(z/√2)/2.
    return std::log1p(-0.5 * std::erfc(-x));
  }
  // Φ(z) = erfcx(x)·exp(−x²)/2 with x ≥ 0.
  return LogErfcx(x) - x * x - std::numbers::ln2;
}

absl::StatusOr<double> InversePhi(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("InversePhi: p must lie in (0,1), got %g", p));
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double Erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x >= kErfcxAsymptoticThreshold) return ErfcxContinuedFraction(x);
  if (x < -26.7) return kInf;
  return ExpSquare(x) * std::erfc(x);
}

double LogErfcx(double x) {
  if (x >= kErfcxAsymptoticThreshold) return std::log(ErfcxContinuedFraction(x));
  if (x >= 0.0) return std::log(ExpSquare(x) * std::erfc(x));
  // erfc(x) ∈ (1, 2] here so the product form is safe in log space.
  return x * x + std::log(std::erfc(x));
}

absl::StatusOr<double> QScaled(double z) {
  if (absl::Status s = CheckFinite(z, "QScaled"); !s.ok()) return s;
  return kSqrtHalfPi * Erfcx(z / std::numbers::sqrt2);
}

double LogQScaled(double z) {
  return kLogSqrtHalfPi + LogErfcx(z / std::numbers::sqrt2);
}

double LogQDifference(double lo, double hi) {
  if (!(lo < hi)) return -kInf;
  const double log_lo = LogQScaled(lo);
  const double log_hi = LogQScaled(hi);
  // q is strictly decreasing, so log_hi < log_lo up to rounding.
  const double d = log_hi - log_lo;
  if (d >= 0.0) return -kInf;
  return log_lo + std::log(-std::expm1(d));
}

double LogSumExp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double LogDiffExp(double a, double b) {
  if (b == -kInf) return a;
  if (!(a > b)) return -kInf;
  return a + std::log(-std::expm1(b - a));
}

}  // namespace dpsaddle

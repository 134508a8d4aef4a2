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

// Estimators of the composed privacy curve δ(ε) = E[(1 − e^{−(L−ε)})⁺].
// Every result is carried as log δ so that values far below the double range
// survive.

#ifndef DPSADDLE_ACCOUNTANTS_H_
#define DPSADDLE_ACCOUNTANTS_H_

#include <optional>
#include <string_view>

#include "absl/status/statusor.h"
#include "dpsaddle/plrv.h"
#include "dpsaddle/specfun.h"

namespace dpsaddle {

enum class Method {
  kSpMsd0,
  kSpMsd1,
  kSpClt,
  kMa,
  kMaRefined,
  kMaQuadratic,
  kCltStandard,
};

// Lower-case, dash-separated names as used on the command line ("sp-msd1").
std::string_view MethodName(Method method);
std::optional<Method> ParseMethod(std::string_view name);

struct DeltaEstimate {
  Method method = Method::kSpMsd0;
  double epsilon = 0;
  double log_delta = 0;
  // Natural log of the symmetric error radius; SP-CLT only.
  std::optional<double> log_err_bound;
  bool is_upper_bound = false;

  double delta() const;
  std::optional<double> err_bound() const;
};

// Saddle-point approximation of order zero: e^{F(t0)}/√(2πF″(t0)).
absl::StatusOr<DeltaEstimate> DeltaSpMsd0(const Composition& composition,
                                          double epsilon);

// Order-one correction 1 + F⁗/(8F″²) − 5F‴²/(24F″³) applied to MSD0.
absl::StatusOr<DeltaEstimate> DeltaSpMsd1(const Composition& composition,
                                          double epsilon);

// Tilted CLT with its Berry–Esseen radius. The tilt defaults to the saddle
// point; any positive tilt gives a valid radius.
absl::StatusOr<DeltaEstimate> DeltaSpClt(const Composition& composition,
                                         double epsilon,
                                         std::optional<double> tilt = {});

// log of the SP-CLT error radius
//   e^{K(t)−εt}·t^t/(1+t)^{1+t}·1.12·P_t/K″(t)^{3/2}.
absl::StatusOr<double> LogErrSp(const Composition& composition, double epsilon,
                                double tilt);
absl::StatusOr<double> ErrSp(const Composition& composition, double epsilon,
                             double tilt);

// Untilted Berry–Esseen radius 0.56·P_0/Var[L]^{3/2}.
absl::StatusOr<double> ErrStandard(const Composition& composition);

// inf_{t ≥ 0} exp(K(t) − εt).
absl::StatusOr<DeltaEstimate> DeltaMa(const Composition& composition,
                                      double epsilon);

// exp(K(t) − εt + t·log t − (t+1)·log(t+1)) at its optimal t.
absl::StatusOr<DeltaEstimate> DeltaMaRefined(const Composition& composition,
                                             double epsilon);

// exp(K(t) − εt)·(f(x0, t) + t·(t/(1+t))^{1+3t}·K″(t)) with
// f(x, t) = e^{−xt}(1 − e^{−x}) and x0 = 3·log((t+1)/t).
absl::StatusOr<DeltaEstimate> DeltaMaQuadratic(const Composition& composition,
                                               double epsilon);

// Curve of the Gaussian with the same mean and variance as the composed loss.
absl::StatusOr<DeltaEstimate> DeltaCltStandard(const Composition& composition,
                                               double epsilon);

absl::StatusOr<DeltaEstimate> EstimateDelta(Method method,
                                            const Composition& composition,
                                            double epsilon);

// Smallest ε ≥ 0 with δ_method(ε) ≤ target, to max(1e-9, 1e-9·ε).
// Errors: OutOfRange if δ stays above the target for all ε ≤ 1e6.
absl::StatusOr<double> EpsilonOfDelta(Method method,
                                      const Composition& composition,
                                      Probability delta_target);

}  // namespace dpsaddle

#endif  // DPSADDLE_ACCOUNTANTS_H_

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

// Reference values for testing the accountants. These are slow and are not
// meant for production accounting.
//
// The composed curve is recovered from the inverse Laplace representation
//   δ(ε) = (1/2πi) ∫_{t−i∞}^{t+i∞} e^{−zε} M(z) / (z(1+z)) dz,   t > 0,
// integrated along the vertical line through the saddle point, where the
// integrand is most concentrated.

#ifndef DPSADDLE_ORACLE_H_
#define DPSADDLE_ORACLE_H_

#include <optional>

#include "absl/status/statusor.h"
#include "dpsaddle/plrv.h"
#include "dpsaddle/specfun.h"

namespace dpsaddle {

struct OracleConfig {
  // Target relative accuracy of δ.
  double rel_tol = 1e-10;
  // Differences below exp(abs_tol_log) in δ count as converged.
  double abs_tol_log = -736.8272081;  // log(1e-320)
  // Cap on the number of s-panels per refinement level.
  int max_panels = 4096;
  // Mantissa bits of the accumulator.
  int working_precision_bits = 256;
  // Real part of the contour; the saddle point when unset.
  std::optional<double> abscissa;
};

// Natural log of the composed δ(ε). Errors: ResourceExhausted when the panel
// cap is reached before rel_tol; degenerate compositions give −inf.
absl::StatusOr<double> LogDeltaTruth(const Composition& composition,
                                     double epsilon,
                                     const OracleConfig& config = {});
absl::StatusOr<Probability> DeltaTruth(const Composition& composition,
                                       double epsilon,
                                       const OracleConfig& config = {});

// δ(ε) of a single mechanism by direct quadrature of
// E[(1 − e^{−(L−ε)})⁺] over the region where L > ε.
absl::StatusOr<double> LogDeltaDirectN1(const MechanismSpec& mechanism,
                                        double epsilon);
absl::StatusOr<Probability> DeltaDirectN1(const MechanismSpec& mechanism,
                                          double epsilon);

enum class HockeyStickDirection {
  // E_γ((1−λ)N(0,σ²) + λN(1,σ²) ‖ N(0,σ²)).
  kMixtureFirst,
  // E_γ(N(0,σ²) ‖ (1−λ)N(0,σ²) + λN(1,σ²)).
  kGaussianFirst,
};

// E_γ(P‖Q) = ∫ (p − γq)⁺ for γ ≥ 1, sensitivity 1.
absl::StatusOr<double> HockeyStick(HockeyStickDirection direction,
                                   double sigma, double lambda, double gamma);

// Smallest ε ≥ 0 with δ_truth(ε) ≤ target.
absl::StatusOr<double> EpsilonTruth(const Composition& composition,
                                    Probability delta_target,
                                    const OracleConfig& config = {});

}  // namespace dpsaddle

#endif  // DPSADDLE_ORACLE_H_

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

// Tilt equations. The saddle point of
//   F_ε(t) = K(t) − εt − log t − log(1 + t)
// and the optimal tilts of the three moments-accountant style bounds all
// solve K′(t) = ε + r(t) for a nonincreasing r, so one bracketed
// Newton/bisection hybrid serves all four.

#ifndef DPSADDLE_SADDLE_H_
#define DPSADDLE_SADDLE_H_

#include "absl/status/statusor.h"
#include "dpsaddle/plrv.h"

namespace dpsaddle {

// F_ε and its derivatives at t.
struct FExponent {
  double t = 0;
  double f0 = 0;
  double f1 = 0;
  double f2 = 0;
  double f3 = 0;
  double f4 = 0;
};

// Builds F from an already evaluated CGF.
FExponent FExponentFromCgf(const CgfEvaluation& cgf, double epsilon);

// Errors: InvalidArgument if t ≤ 0 or ε is not finite.
absl::StatusOr<FExponent> EvaluateFExponent(const Composition& composition,
                                            double epsilon, double t,
                                            int max_order = 4);

struct SaddleInfo {
  double t0 = 0;
  double f0 = 0;
  double f2 = 0;
  double f3 = 0;
  double f4 = 0;
  // |F′(t0)|.
  double residual = 0;
  // K at t0, kept so callers need not re-run the quadrature.
  CgfEvaluation cgf;
};

// Errors: FailedPrecondition for a degenerate composition (Var[L] < 1e-300),
// Aborted if the iteration cap is hit, OutOfRange if no bracket is found.
absl::StatusOr<SaddleInfo> SolveSaddle(const Composition& composition,
                                       double epsilon);

// Root of K′(t) = ε, or 0 when E[L] ≥ ε.
absl::StatusOr<double> SolveMaTilt(const Composition& composition,
                                   double epsilon);

// Root of K′(t) = ε + log((t + 1)/t).
absl::StatusOr<double> SolveRefinedMaTilt(const Composition& composition,
                                          double epsilon);

// Root of K′(t) = ε + 3·log((t + 1)/t).
absl::StatusOr<double> SolveQuadraticMaTilt(const Composition& composition,
                                            double epsilon);

}  // namespace dpsaddle

#endif  // DPSADDLE_SADDLE_H_

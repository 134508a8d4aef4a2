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

#include "dpsaddle/saddle.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace dpsaddle {
namespace {

constexpr int kMaxIterations = 200;
constexpr double kMinVariance = 1e-300;
constexpr double kMaxTilt = 1e7;
constexpr double kMinTilt = 1e-30;

absl::Status CheckEpsilon(double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and >= 0, got %g", epsilon));
  }
  return absl::OkStatus();
}

// Extra right-hand side r(t) and its derivative.
struct Rhs {
  double (*value)(double t);
  double (*slope)(double t);
};

double SaddleRhs(double t) { return 1.0 / t + 1.0 / (1.0 + t); }
double SaddleRhsSlope(double t) {
  return -1.0 / (t * t) - 1.0 / ((1.0 + t) * (1.0 + t));
}
double LogRatio(double t) { return std::log1p(1.0 / t); }
double LogRatioSlope(double t) { return -1.0 / (t * (1.0 + t)); }
double TripleLogRatio(double t) { return 3.0 * LogRatio(t); }
double TripleLogRatioSlope(double t) { return 3.0 * LogRatioSlope(t); }
double Zero(double) { return 0.0; }

constexpr Rhs kSaddle{&SaddleRhs, &SaddleRhsSlope};
constexpr Rhs kRefined{&LogRatio, &LogRatioSlope};
constexpr Rhs kQuadratic{&TripleLogRatio, &TripleLogRatioSlope};
constexpr Rhs kPlain{&Zero, &Zero};

struct Point {
  double t;
  double g;   // K′(t) − ε − r(t)
  double dg;  // K″(t) − r′(t)
  CgfEvaluation cgf;
};

absl::StatusOr<Point> Evaluate(const Composition& c, double epsilon,
                               const Rhs& rhs, double t) {
  absl::StatusOr<CgfEvaluation> k = Cgf(c, t, 4);
  if (!k.ok()) return k.status();
  return Point{t, k->k1 - epsilon - rhs.value(t), k->k2 - rhs.slope(t), *k};
}

double Bisect(double lo, double hi) {
  if (lo > 0 && hi / lo > 8.0) return std::sqrt(lo * hi);
  return 0.5 * (lo + hi);
}

// Increasing g with g(lo) < 0 < g(hi) once bracketed. `lower` is set when the
// caller already knows g(lower_t) < 0 (the plain tilt starts at 0).
absl::StatusOr<Point> SolveIncreasing(const Composition& c, double epsilon,
                                      const Rhs& rhs,
                                      const Point* lower = nullptr) {
  const double tol = 1e-12 * std::max(1.0, std::abs(epsilon));

  absl::StatusOr<Point> start = Evaluate(c, epsilon, rhs, 1.0);
  if (!start.ok()) return start.status();
  if (std::abs(start->g) <= tol) return *start;

  Point lo_pt = lower != nullptr ? *lower : *start;
  Point hi_pt = *start;
  if (start->g < 0) {
    lo_pt = *start;
    double t = 1.0;
    while (true) {
      t *= 4.0;
      if (t > kMaxTilt) {
        return absl::OutOfRangeError(absl::StrFormat(
            "no tilt bracket below %g (epsilon=%g, g=%g)", kMaxTilt, epsilon,
            lo_pt.g));
      }
      absl::StatusOr<Point> p = Evaluate(c, epsilon, rhs, t);
      if (!p.ok()) return p.status();
      if (std::abs(p->g) <= tol) return *p;
      if (p->g > 0) {
        hi_pt = *p;
        break;
      }
      lo_pt = *p;
    }
  } else if (lower == nullptr) {
    double t = 1.0;
    while (true) {
      t /= 4.0;
      if (t < kMinTilt) {
        return absl::OutOfRangeError(absl::StrFormat(
            "no tilt bracket above %g (epsilon=%g)", kMinTilt, epsilon));
      }
      absl::StatusOr<Point> p = Evaluate(c, epsilon, rhs, t);
      if (!p.ok()) return p.status();
      if (std::abs(p->g) <= tol) return *p;
      if (p->g < 0) {
        lo_pt = *p;
        break;
      }
      hi_pt = *p;
    }
  }

  Point cur = std::abs(lo_pt.g) < std::abs(hi_pt.g) ? lo_pt : hi_pt;
  double prev_abs = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const double lo = lo_pt.t;
    const double hi = hi_pt.t;
    double next = cur.t - cur.g / cur.dg;
    const bool slow = std::abs(cur.g) > 0.5 * prev_abs;
    if (!(next > lo && next < hi) || cur.dg <= 0 || slow) next = Bisect(lo, hi);
    prev_abs = std::abs(cur.g);

    absl::StatusOr<Point> p = Evaluate(c, epsilon, rhs, next);
    if (!p.ok()) return p.status();
    cur = *p;
    if (std::abs(cur.g) <= tol) return cur;
    if (cur.g < 0) {
      lo_pt = cur;
    } else {
      hi_pt = cur;
    }
    // The computed g may be flat at the last few ulps; accept the best end.
    if (hi_pt.t - lo_pt.t <= 4.0 * std::numeric_limits<double>::epsilon() *
                                     hi_pt.t) {
      return std::abs(lo_pt.g) < std::abs(hi_pt.g) ? lo_pt : hi_pt;
    }
  }
  return absl::AbortedError(absl::StrFormat(
      "tilt solver did not converge in %d iterations: bracket [%.17g, %.17g], "
      "g = [%g, %g]",
      kMaxIterations, lo_pt.t, hi_pt.t, lo_pt.g, hi_pt.g));
}

absl::Status CheckNonDegenerate(const Composition& c) {
  absl::StatusOr<MeanVariance> mv = MeanVar(c);
  if (!mv.ok()) return mv.status();
  if (!(mv->variance >= kMinVariance)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "degenerate privacy loss (variance %g)", mv->variance));
  }
  return absl::OkStatus();
}

}  // namespace

FExponent FExponentFromCgf(const CgfEvaluation& k, double epsilon) {
  const double t = k.t;
  const double u = 1.0 + t;
  FExponent f;
  f.t = t;
  f.f0 = k.k0 - epsilon * t - std::log(t) - std::log1p(t);
  f.f1 = k.k1 - epsilon - (1.0 / t + 1.0 / u);
  f.f2 = k.k2 + (1.0 / (t * t) + 1.0 / (u * u));
  f.f3 = k.k3 - 2.0 * (1.0 / (t * t * t) + 1.0 / (u * u * u));
  f.f4 = k.k4 + 6.0 * (1.0 / (t * t * t * t) + 1.0 / (u * u * u * u));
  return f;
}

absl::StatusOr<FExponent> EvaluateFExponent(const Composition& composition,
                                            double epsilon, double t,
                                            int max_order) {
  if (!std::isfinite(epsilon)) {
    return absl::InvalidArgumentError("epsilon must be finite");
  }
  if (!std::isfinite(t) || t <= 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("t must be finite and > 0, got %g", t));
  }
  absl::StatusOr<CgfEvaluation> k = Cgf(composition, t, max_order);
  if (!k.ok()) return k.status();
  FExponent f = FExponentFromCgf(*k, epsilon);
  double* orders[] = {&f.f1, &f.f2, &f.f3, &f.f4};
  for (int j = std::max(max_order, 0); j < 4; ++j) *orders[j] = 0;
  return f;
}

absl::StatusOr<SaddleInfo> SolveSaddle(const Composition& composition,
                                       double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (absl::Status s = CheckNonDegenerate(composition); !s.ok()) return s;
  absl::StatusOr<Point> root = SolveIncreasing(composition, epsilon, kSaddle);
  if (!root.ok()) return root.status();
  const FExponent f = FExponentFromCgf(root->cgf, epsilon);
  SaddleInfo info;
  info.t0 = root->t;
  info.f0 = f.f0;
  info.f2 = f.f2;
  info.f3 = f.f3;
  info.f4 = f.f4;
  info.residual = std::abs(f.f1);
  info.cgf = root->cgf;
  return info;
}

absl::StatusOr<double> SolveMaTilt(const Composition& composition,
                                   double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  absl::StatusOr<Point> origin = Evaluate(composition, epsilon, kPlain, 0.0);
  if (!origin.ok()) return origin.status();
  if (origin->g >= 0) return 0.0;
  if (!(origin->cgf.k2 >= kMinVariance)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "degenerate privacy loss (variance %g)", origin->cgf.k2));
  }
  absl::StatusOr<Point> root =
      SolveIncreasing(composition, epsilon, kPlain, &*origin);
  if (!root.ok()) return root.status();
  return root->t;
}

absl::StatusOr<double> SolveRefinedMaTilt(const Composition& composition,
                                          double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (absl::Status s = CheckNonDegenerate(composition); !s.ok()) return s;
  absl::StatusOr<Point> root = SolveIncreasing(composition, epsilon, kRefined);
  if (!root.ok()) return root.status();
  return root->t;
}

absl::StatusOr<double> SolveQuadraticMaTilt(const Composition& composition,
                                            double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (absl::Status s = CheckNonDegenerate(composition); !s.ok()) return s;
  absl::StatusOr<Point> root = SolveIncreasing(composition, epsilon, kQuadratic);
  if (!root.ok()) return root.status();
  return root->t;
}

}  // namespace dpsaddle

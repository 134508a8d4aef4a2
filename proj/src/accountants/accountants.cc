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

#include "dpsaddle/accountants.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "boost/math/tools/roots.hpp"
#include "accountants/invert.h"
#include "dpsaddle/saddle.h"

namespace dpsaddle {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2π)
constexpr double kMaxEpsilon = 1e6;

absl::Status CheckEpsilon(double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and >= 0, got %g", epsilon));
  }
  return absl::OkStatus();
}

DeltaEstimate Make(Method method, double epsilon, double log_delta) {
  DeltaEstimate e;
  e.method = method;
  e.epsilon = epsilon;
  e.log_delta = log_delta;
  e.is_upper_bound = method == Method::kMa || method == Method::kMaRefined ||
                     method == Method::kMaQuadratic;
  return e;
}

// t·log t with the t → 0 limit.
double XLogX(double t) { return t > 0 ? t * std::log(t) : 0.0; }

// log(t^t/(1+t)^{1+t}); tends to 0 as t → 0.
double LogTiltFactor(double t) { return XLogX(t) - (1.0 + t) * std::log1p(t); }

struct MethodEntry {
  Method method;
  std::string_view name;
};
constexpr std::array<MethodEntry, 7> kMethods{{
    {Method::kSpMsd0, "sp-msd0"},
    {Method::kSpMsd1, "sp-msd1"},
    {Method::kSpClt, "sp-clt"},
    {Method::kMa, "ma"},
    {Method::kMaRefined, "ma-refined"},
    {Method::kMaQuadratic, "ma-quadratic"},
    {Method::kCltStandard, "clt-standard"},
}};

}  // namespace

std::string_view MethodName(Method method) {
  for (const MethodEntry& e : kMethods) {
    if (e.method == method) return e.name;
  }
  return "unknown";
}

std::optional<Method> ParseMethod(std::string_view name) {
  for (const MethodEntry& e : kMethods) {
    if (e.name == name) return e.method;
  }
  return std::nullopt;
}

double DeltaEstimate::delta() const { return std::exp(log_delta); }

std::optional<double> DeltaEstimate::err_bound() const {
  if (!log_err_bound.has_value()) return std::nullopt;
  return std::exp(*log_err_bound);
}

absl::StatusOr<DeltaEstimate> DeltaSpMsd0(const Composition& composition,
                                          double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (composition.is_degenerate()) {
    return Make(Method::kSpMsd0, epsilon, kNegInf);
  }
  absl::StatusOr<SaddleInfo> info = SolveSaddle(composition, epsilon);
  if (!info.ok()) return info.status();
  return Make(Method::kSpMsd0, epsilon,
              info->f0 - 0.5 * (kLogTwoPi + std::log(info->f2)));
}

absl::StatusOr<DeltaEstimate> DeltaSpMsd1(const Composition& composition,
                                          double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (composition.is_degenerate()) {
    return Make(Method::kSpMsd1, epsilon, kNegInf);
  }
  absl::StatusOr<SaddleInfo> info = SolveSaddle(composition, epsilon);
  if (!info.ok()) return info.status();
  const double f2 = info->f2;
  const double correction = 1.0 + info->f4 / (8.0 * f2 * f2) -
                            5.0 * info->f3 * info->f3 / (24.0 * f2 * f2 * f2);
  if (!(correction > 0)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "first-order saddle-point correction is not positive (%g) at "
        "epsilon=%g",
        correction, epsilon));
  }
  return Make(Method::kSpMsd1, epsilon,
              info->f0 - 0.5 * (kLogTwoPi + std::log(f2)) +
                  std::log(correction));
}

absl::StatusOr<DeltaEstimate> DeltaSpClt(const Composition& composition,
                                         double epsilon,
                                         std::optional<double> tilt) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (composition.is_degenerate()) {
    DeltaEstimate e = Make(Method::kSpClt, epsilon, kNegInf);
    e.log_err_bound = kNegInf;
    return e;
  }
  double t;
  if (tilt.has_value()) {
    if (!std::isfinite(*tilt) || *tilt <= 0) {
      return absl::InvalidArgumentError(
          absl::StrFormat("tilt must be finite and > 0, got %g", *tilt));
    }
    t = *tilt;
  } else {
    absl::StatusOr<SaddleInfo> info = SolveSaddle(composition, epsilon);
    if (!info.ok()) return info.status();
    t = info->t0;
  }
  absl::StatusOr<TiltedMoments> m = EvaluateTilted(composition, t);
  if (!m.ok()) return m.status();
  const CgfEvaluation& k = m->cgf;
  if (!(k.k2 > 0)) {
    return absl::FailedPreconditionError("tilted variance is zero");
  }
  const double sd = std::sqrt(k.k2);
  const double gamma = (k.k1 - epsilon) / sd;
  const double alpha = sd * t - gamma;
  const double beta = sd * (t + 1.0) - gamma;
  const double log_exp = k.k0 - epsilon * t;
  DeltaEstimate e = Make(Method::kSpClt, epsilon,
                         log_exp - 0.5 * gamma * gamma +
                             LogQDifference(alpha, beta) - 0.5 * kLogTwoPi);
  e.log_err_bound = log_exp + LogTiltFactor(t) + std::log(1.12) +
                    std::log(m->abs_third) - 1.5 * std::log(k.k2);
  return e;
}

absl::StatusOr<double> LogErrSp(const Composition& composition, double epsilon,
                                double tilt) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (!std::isfinite(tilt) || tilt <= 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("tilt must be finite and > 0, got %g", tilt));
  }
  if (composition.is_degenerate()) return kNegInf;
  absl::StatusOr<DeltaEstimate> e = DeltaSpClt(composition, epsilon, tilt);
  if (!e.ok()) return e.status();
  return *e->log_err_bound;
}

absl::StatusOr<double> ErrSp(const Composition& composition, double epsilon,
                             double tilt) {
  absl::StatusOr<double> log_err = LogErrSp(composition, epsilon, tilt);
  if (!log_err.ok()) return log_err.status();
  return std::exp(*log_err);
}

absl::StatusOr<double> ErrStandard(const Composition& composition) {
  if (composition.is_degenerate()) return 0.0;
  absl::StatusOr<TiltedMoments> m = EvaluateTilted(composition, 0.0);
  if (!m.ok()) return m.status();
  return 0.56 * m->abs_third / std::pow(m->cgf.k2, 1.5);
}

absl::StatusOr<DeltaEstimate> DeltaMa(const Composition& composition,
                                      double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (composition.is_degenerate() && epsilon > 0) {
    return Make(Method::kMa, epsilon, kNegInf);
  }
  absl::StatusOr<double> t = SolveMaTilt(composition, epsilon);
  if (!t.ok()) return t.status();
  if (*t == 0) return Make(Method::kMa, epsilon, 0.0);
  absl::StatusOr<CgfEvaluation> k = Cgf(composition, *t, 0);
  if (!k.ok()) return k.status();
  return Make(Method::kMa, epsilon, std::min(0.0, k->k0 - epsilon * *t));
}

absl::StatusOr<DeltaEstimate> DeltaMaRefined(const Composition& composition,
                                             double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (composition.is_degenerate()) {
    return Make(Method::kMaRefined, epsilon, kNegInf);
  }
  absl::StatusOr<double> t = SolveRefinedMaTilt(composition, epsilon);
  if (!t.ok()) return t.status();
  absl::StatusOr<CgfEvaluation> k = Cgf(composition, *t, 0);
  if (!k.ok()) return k.status();
  return Make(Method::kMaRefined, epsilon,
              std::min(0.0, k->k0 - epsilon * *t + LogTiltFactor(*t)));
}

absl::StatusOr<DeltaEstimate> DeltaMaQuadratic(const Composition& composition,
                                               double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (composition.is_degenerate()) {
    return Make(Method::kMaQuadratic, epsilon, kNegInf);
  }
  absl::StatusOr<double> root = SolveQuadraticMaTilt(composition, epsilon);
  if (!root.ok()) return root.status();
  const double t = *root;
  absl::StatusOr<CgfEvaluation> k = Cgf(composition, t, 2);
  if (!k.ok()) return k.status();
  const double x0 = 3.0 * std::log1p(1.0 / t);
  const double log_f = -x0 * t + std::log(-std::expm1(-x0));
  const double log_curv = std::log(t) +
                          (1.0 + 3.0 * t) * (std::log(t) - std::log1p(t)) +
                          std::log(k->k2);
  return Make(Method::kMaQuadratic, epsilon,
              std::min(0.0, k->k0 - epsilon * t + LogSumExp(log_f, log_curv)));
}

absl::StatusOr<DeltaEstimate> DeltaCltStandard(const Composition& composition,
                                               double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (composition.is_degenerate()) {
    return Make(Method::kCltStandard, epsilon, kNegInf);
  }
  absl::StatusOr<MeanVariance> mv = MeanVar(composition);
  if (!mv.ok()) return mv.status();
  if (!(mv->variance > 0)) {
    return Make(Method::kCltStandard, epsilon, kNegInf);
  }
  // For Z ~ N(E, s²):
  //   E[(1 − e^{−(Z−ε)})⁺] = e^{−a²/2}·(q(a) − q(a + s))/√(2π),
  // with a = (ε − E)/s.
  const double s = std::sqrt(mv->variance);
  const double a = (epsilon - mv->mean) / s;
  return Make(Method::kCltStandard, epsilon,
              -0.5 * a * a + LogQDifference(a, a + s) - 0.5 * kLogTwoPi);
}

absl::StatusOr<DeltaEstimate> EstimateDelta(Method method,
                                            const Composition& composition,
                                            double epsilon) {
  switch (method) {
    case Method::kSpMsd0:
      return DeltaSpMsd0(composition, epsilon);
    case Method::kSpMsd1:
      return DeltaSpMsd1(composition, epsilon);
    case Method::kSpClt:
      return DeltaSpClt(composition, epsilon);
    case Method::kMa:
      return DeltaMa(composition, epsilon);
    case Method::kMaRefined:
      return DeltaMaRefined(composition, epsilon);
    case Method::kMaQuadratic:
      return DeltaMaQuadratic(composition, epsilon);
    case Method::kCltStandard:
      return DeltaCltStandard(composition, epsilon);
  }
  return absl::InvalidArgumentError("unknown method");
}

namespace internal {

absl::StatusOr<double> InvertLogDelta(
    const std::function<absl::StatusOr<double>(double)>& log_delta,
    double delta_target) {
  if (!(delta_target > 0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "delta target must be > 0, got %g", delta_target));
  }
  if (delta_target >= 1) return 0.0;
  const double log_target = std::log(delta_target);

  absl::StatusOr<double> at_zero = log_delta(0.0);
  if (!at_zero.ok()) return at_zero.status();
  if (*at_zero <= log_target) return 0.0;

  double lo = 0.0;
  double lo_value = *at_zero;
  double hi = 1.0;
  double hi_value;
  while (true) {
    absl::StatusOr<double> v = log_delta(hi);
    if (!v.ok()) return v.status();
    hi_value = *v;
    if (hi_value <= log_target) break;
    lo = hi;
    lo_value = hi_value;
    hi *= 2.0;
    if (hi > kMaxEpsilon) {
      return absl::OutOfRangeError(absl::StrFormat(
          "delta stays above %g for every epsilon <= %g", delta_target,
          kMaxEpsilon));
    }
  }
  if (hi_value == log_target) return hi;
  if (!(hi_value <= lo_value)) {
    return absl::FailedPreconditionError(
        "delta is not nonincreasing on the search bracket");
  }

  absl::Status failure;
  auto f = [&](double eps) -> double {
    absl::StatusOr<double> v = log_delta(eps);
    if (!v.ok()) {
      if (failure.ok()) failure = v.status();
      return -1.0;  // any value; the error is reported below
    }
    const double h = *v - log_target;
    // −inf is a valid "far below"; keep the root finder's arithmetic finite.
    return std::max(h, -1e300);
  };
  auto done = [](double a, double b) {
    return std::abs(b - a) <= std::max(1e-9, 1e-9 * std::min(a, b));
  };
  std::uintmax_t max_iter = 200;
  const double lo_h = std::max(lo_value - log_target, -1e300);
  const double hi_h = std::max(hi_value - log_target, -1e300);
  const std::pair<double, double> r = boost::math::tools::toms748_solve(
      f, lo, hi, lo_h, hi_h, done, max_iter);
  if (!failure.ok()) return failure;
  if (!done(r.first, r.second)) {
    return absl::AbortedError(absl::StrFormat(
        "epsilon search did not converge: bracket [%.17g, %.17g]", r.first,
        r.second));
  }
  // The upper end satisfies δ ≤ target.
  return r.second;
}

}  // namespace internal

absl::StatusOr<double> EpsilonOfDelta(Method method,
                                      const Composition& composition,
                                      Probability delta_target) {
  return internal::InvertLogDelta(
      [&](double eps) -> absl::StatusOr<double> {
        absl::StatusOr<DeltaEstimate> e =
            EstimateDelta(method, composition, eps);
        if (!e.ok()) return e.status();
        return e->log_delta;
      },
      delta_target.value());
}

}  // namespace dpsaddle

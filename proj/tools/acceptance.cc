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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Each check also enforces its time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dpsaddle/accountants.h"
#include "dpsaddle/oracle.h"
#include "dpsaddle/plrv.h"
#include "dpsaddle/saddle.h"
#include "dpsaddle/specfun.h"

namespace dpsaddle {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Unwraps a StatusOr inside a check; a library error fails the criterion.
#define ASSIGN_OR_FAIL(lhs, expr)                                   \
  auto lhs##_or = (expr);                                           \
  if (!lhs##_or.ok()) {                                             \
    return Outcome{false, std::string(lhs##_or.status().ToString())}; \
  }                                                                 \
  auto lhs = *std::move(lhs##_or)

double RelErr(double a, double b) { return std::abs(a / b - 1.0); }

absl::StatusOr<Composition> Gauss(double sigma, std::int64_t n) {
  absl::StatusOr<MechanismSpec> m = MechanismSpec::Gaussian(sigma);
  if (!m.ok()) return m.status();
  return Composition::Homogeneous(*m, n);
}

absl::StatusOr<Composition> Subsampled(double sigma, double lambda,
                                       std::int64_t n) {
  absl::StatusOr<MechanismSpec> m =
      MechanismSpec::SubsampledGaussian(sigma, lambda);
  if (!m.ok()) return m.status();
  return Composition::Homogeneous(*m, n);
}

// ε = E[L] + b·σ_L.
absl::StatusOr<double> EpsilonAt(const Composition& c, double b) {
  absl::StatusOr<MeanVariance> mv = MeanVar(c);
  if (!mv.ok()) return mv.status();
  return mv->mean + b * std::sqrt(mv->variance);
}

Outcome GaussianExactness() {
  ASSIGN_OR_FAIL(c, Gauss(1.0, 1));
  double worst = 0;
  for (double eps : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    ASSIGN_OR_FAIL(truth, LogDeltaTruth(c, eps));
    ASSIGN_OR_FAIL(ref, LogGaussianReferenceDelta(1.0, eps));
    worst = std::max(worst, std::abs(std::expm1(truth - ref)));
  }
  return {worst <= 1e-10, absl::StrFormat("max rel err %.3g (tol 1e-10)", worst)};
}

Outcome GaussianComposition() {
  ASSIGN_OR_FAIL(c, Gauss(10.0, 100));
  double worst = 0;
  for (double eps : {0.5, 1.0, 2.0}) {
    ASSIGN_OR_FAIL(truth, LogDeltaTruth(c, eps));
    ASSIGN_OR_FAIL(ref, LogGaussianReferenceDelta(1.0, eps));
    worst = std::max(worst, std::abs(std::expm1(truth - ref)));
  }
  return {worst <= 1e-8, absl::StrFormat("max rel err %.3g (tol 1e-8)", worst)};
}

Outcome BerryEsseenSandwich() {
  ASSIGN_OR_FAIL(c, Subsampled(2.0, 1e-2, 2000));
  ASSIGN_OR_FAIL(hi_delta, Probability::Create(1e-1));
  ASSIGN_OR_FAIL(lo_delta, Probability::Create(1e-12));
  ASSIGN_OR_FAIL(eps_lo, EpsilonTruth(c, hi_delta));
  ASSIGN_OR_FAIL(eps_hi, EpsilonTruth(c, lo_delta));
  constexpr int kPoints = 20;
  int inside = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kPoints; ++i) {
    const double eps = eps_lo + (eps_hi - eps_lo) * i / (kPoints - 1);
    ASSIGN_OR_FAIL(truth, DeltaTruth(c, eps));
    ASSIGN_OR_FAIL(clt, DeltaSpClt(c, eps));
    if (!clt.err_bound()) return {false, "SP-CLT returned no error bound"};
    const double radius = *clt.err_bound();
    const double gap = std::abs(truth.value() - clt.delta());
    if (gap <= radius) ++inside;
    worst_margin = std::min(worst_margin, radius / std::max(gap, 1e-300));
  }
  return {inside == kPoints,
          absl::StrFormat("%d/%d inside, eps in [%.4f, %.4f], min radius/gap "
                          "%.3g",
                          inside, kPoints, eps_lo, eps_hi, worst_margin)};
}

Outcome RelativeErrorReproduction() {
  ASSIGN_OR_FAIL(target, Probability::Create(1e-5));
  double worst_100 = 0;
  double worst_300 = 0;
  for (std::int64_t n : {100, 150, 200, 300, 400, 500, 700, 1000, 1500, 2000}) {
    ASSIGN_OR_FAIL(c, Subsampled(0.65, 1e-2, n));
    ASSIGN_OR_FAIL(truth, EpsilonTruth(c, target));
    ASSIGN_OR_FAIL(msd1, EpsilonOfDelta(Method::kSpMsd1, c, target));
    const double rel = RelErr(msd1, truth);
    worst_100 = std::max(worst_100, rel);
    if (n >= 300) worst_300 = std::max(worst_300, rel);
  }
  return {worst_100 < 1e-2 && worst_300 < 1e-3,
          absl::StrFormat("max rel err %.3g for n>=100 (tol 1e-2), %.3g for "
                          "n>=300 (tol 1e-3)",
                          worst_100, worst_300)};
}

Outcome UpperBoundValidity() {
  int points = 0;
  int failures = 0;
  std::string first_failure;
  for (double sigma : {0.8, 1.0, 2.0}) {
    for (double lambda : {0.01, 0.1, 0.5}) {
      for (std::int64_t n : {10, 100, 1000}) {
        ASSIGN_OR_FAIL(c, Subsampled(sigma, lambda, n));
        for (double b : {0.0, 0.5, 1.0, 2.0, 3.0}) {
          ASSIGN_OR_FAIL(eps, EpsilonAt(c, b));
          ASSIGN_OR_FAIL(truth, LogDeltaTruth(c, eps));
          ASSIGN_OR_FAIL(ma, DeltaMa(c, eps));
          ASSIGN_OR_FAIL(refined, DeltaMaRefined(c, eps));
          ASSIGN_OR_FAIL(quad, DeltaMaQuadratic(c, eps));
          ++points;
          const bool ok = ma.log_delta >= truth && refined.log_delta >= truth &&
                          quad.log_delta >= truth &&
                          refined.log_delta <= ma.log_delta;
          if (!ok && failures++ == 0) {
            first_failure = absl::StrFormat(
                "; first failure sigma=%g lambda=%g n=%d eps=%g", sigma, lambda,
                n, eps);
          }
        }
      }
    }
  }
  return {failures == 0, absl::StrFormat("%d/%d points hold%s",
                                         points - failures, points,
                                         first_failure)};
}

Outcome SaddleAsymptotic() {
  double worst_4 = 0;
  double worst_6 = 0;
  for (std::int64_t n : {10000, 1000000}) {
    ASSIGN_OR_FAIL(c, Gauss(1.0, n));
    ASSIGN_OR_FAIL(mv, MeanVar(c));
    const double sd = std::sqrt(mv.variance);
    for (double b : {0.5, 1.0, 2.0}) {
      ASSIGN_OR_FAIL(info, SolveSaddle(c, mv.mean + b * sd));
      const double ratio = info.t0 * 2.0 * sd / (b + std::sqrt(b * b + 4.0));
      double& worst = n == 10000 ? worst_4 : worst_6;
      worst = std::max(worst, std::abs(ratio - 1.0));
    }
  }
  return {worst_4 <= 0.05 && worst_6 <= 0.01,
          absl::StrFormat("max |ratio-1| %.3g at n=1e4 (tol 0.05), %.3g at "
                          "n=1e6 (tol 0.01)",
                          worst_4, worst_6)};
}

Outcome ErrorDecay() {
  std::vector<double> scaled;
  for (std::int64_t n : {1000, 10000, 100000}) {
    ASSIGN_OR_FAIL(c, Gauss(1.0, n));
    ASSIGN_OR_FAIL(eps, EpsilonAt(c, 1.0));
    ASSIGN_OR_FAIL(info, SolveSaddle(c, eps));
    ASSIGN_OR_FAIL(log_err, LogErrSp(c, eps, info.t0));
    scaled.push_back(std::exp(log_err) * std::sqrt(static_cast<double>(n)));
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  const double spread = *hi / *lo - 1.0;
  return {spread < 0.25,
          absl::StrFormat("err*sqrt(n) = %.4g, %.4g, %.4g; spread %.3g (tol "
                          "0.25)",
                          scaled[0], scaled[1], scaled[2], spread)};
}

Outcome HighCompositionLimit() {
  ASSIGN_OR_FAIL(c, Subsampled(1.0, 1e-2, 5000));
  ASSIGN_OR_FAIL(z, InversePhi(0.05));
  ASSIGN_OR_FAIL(eps, EpsilonAt(c, -z));
  ASSIGN_OR_FAIL(truth, DeltaTruth(c, eps));
  const double rel = RelErr(truth.value(), 0.05);
  return {rel <= 0.1, absl::StrFormat("delta_truth %.6g at eps %.6g; |delta/"
                                      "0.05-1| = %.3g (tol 0.1)",
                                      truth.value(), eps, rel)};
}

Outcome SubsamplingOrdering() {
  int points = 0;
  int failures = 0;
  std::string first_failure;
  for (double lambda : {0.001, 0.01, 0.1, 0.5}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      for (double eps : {0.0, 0.5, 1.0, 2.0}) {
        const double gamma = std::exp(eps);
        ASSIGN_OR_FAIL(mix, HockeyStick(HockeyStickDirection::kMixtureFirst,
                                        sigma, lambda, gamma));
        ASSIGN_OR_FAIL(gauss, HockeyStick(HockeyStickDirection::kGaussianFirst,
                                          sigma, lambda, gamma));
        ++points;
        // Equality is judged relative to the divergence itself; several grid
        // points have both values far below 1e-12.
        const double scale = std::max(mix, gauss);
        const bool equal = std::abs(mix - gauss) <= 1e-12 * scale;
        const bool expect_equal = gamma == 1.0 || lambda == 0.0;
        const bool ok = gauss <= mix * (1 + 1e-12) && equal == expect_equal;
        if (!ok && failures++ == 0) {
          first_failure = absl::StrFormat(
              "; first failure lambda=%g sigma=%g eps=%g (%.17g vs %.17g)",
              lambda, sigma, eps, gauss, mix);
        }
      }
    }
  }
  return {failures == 0 && points == 48,
          absl::StrFormat("%d/%d points hold%s", points - failures, points,
                          first_failure)};
}

Outcome ConstantTime() {
  ASSIGN_OR_FAIL(small, Subsampled(1.0, 1e-2, 10));
  ASSIGN_OR_FAIL(large, Subsampled(1.0, 1e-2, 1000000));
  constexpr double kEps = 2.0;
  constexpr int kReps = 100;
  auto median_seconds = [&](const Composition& c) -> absl::StatusOr<double> {
    std::vector<double> times;
    for (int i = 0; i <= kReps; ++i) {
      const auto start = Clock::now();
      absl::StatusOr<DeltaEstimate> d = DeltaSpMsd1(c, kEps);
      const std::chrono::duration<double> dt = Clock::now() - start;
      if (!d.ok()) return d.status();
      if (i > 0) times.push_back(dt.count());  // first call warms caches
    }
    std::nth_element(times.begin(), times.begin() + kReps / 2, times.end());
    return times[kReps / 2];
  };
  ASSIGN_OR_FAIL(t_small, median_seconds(small));
  ASSIGN_OR_FAIL(t_large, median_seconds(large));
  const double ratio = t_large / t_small;
  return {ratio <= 2.0,
          absl::StrFormat("median %.3g ms (n=10) vs %.3g ms (n=1e6), ratio "
                          "%.3g (tol 2)",
                          1e3 * t_small, 1e3 * t_large, ratio)};
}

Outcome SmallDelta() {
  struct Point {
    double sigma;
    std::int64_t n;
    double eps;
    double reference_sigma;
  };
  // Both points sit near δ ≈ 1e-50; n copies of σ√n compose to σ.
  const std::vector<Point> points = {{1.0, 1, 16.0, 1.0},
                                     {10.0, 100, 16.0, 1.0}};
  double worst = 0;
  for (const Point& p : points) {
    ASSIGN_OR_FAIL(c, Gauss(p.sigma, p.n));
    ASSIGN_OR_FAIL(ref, LogGaussianReferenceDelta(p.reference_sigma, p.eps));
    for (Method m : {Method::kSpMsd0, Method::kSpMsd1, Method::kSpClt}) {
      ASSIGN_OR_FAIL(d, EstimateDelta(m, c, p.eps));
      if (!std::isfinite(d.log_delta)) {
        return {false, absl::StrFormat("%s not finite", std::string(MethodName(m)))};
      }
      worst = std::max(worst, std::abs(d.log_delta - ref) / std::numbers::ln10);
    }
  }
  return {worst <= 0.05,
          absl::StrFormat("max |log10 diff| %.3g (tol 0.05)", worst)};
}

Outcome QFunctionBounds() {
  constexpr int kPoints = 10000;
  int failures = 0;
  double first = 0;
  for (int i = 0; i < kPoints; ++i) {
    const double z = std::pow(10.0, -3.0 + 6.0 * i / (kPoints - 1));
    absl::StatusOr<double> q = QScaled(z);
    if (!q.ok()) return {false, std::string(q.status().ToString())};
    const double lower = 2.0 / (z + std::sqrt(z * z + 4.0));
    const double upper = 2.0 / (z + std::sqrt(z * z + 8.0 / std::numbers::pi));
    if (!(lower < *q && *q <= upper) && failures++ == 0) first = z;
  }
  return {failures == 0,
          failures == 0
              ? absl::StrFormat("%d log-spaced z in [1e-3, 1e3]", kPoints)
              : absl::StrFormat("%d failures, first at z=%.6g", failures,
                                first)};
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace dpsaddle

int main() {
  using dpsaddle::Criterion;
  const std::vector<Criterion> criteria = {
      {"gaussian exactness", 5, dpsaddle::GaussianExactness},
      {"gaussian composition identity", 10, dpsaddle::GaussianComposition},
      {"berry-esseen sandwich", 120, dpsaddle::BerryEsseenSandwich},
      {"relative-error reproduction", 300, dpsaddle::RelativeErrorReproduction},
      {"upper-bound validity", 180, dpsaddle::UpperBoundValidity},
      {"saddle-point asymptotic", 1, dpsaddle::SaddleAsymptotic},
      {"error decay", 1, dpsaddle::ErrorDecay},
      {"high-composition limit", 60, dpsaddle::HighCompositionLimit},
      {"subsampling ordering", 30, dpsaddle::SubsamplingOrdering},
      {"constant-time contract", 10, dpsaddle::ConstantTime},
      {"small-delta robustness", 60, dpsaddle::SmallDelta},
      {"q-function bounds", 1, dpsaddle::QFunctionBounds},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    const auto start = dpsaddle::Clock::now();
    dpsaddle::Outcome out = c.check();
    const std::chrono::duration<double> dt = dpsaddle::Clock::now() - start;
    const bool in_time = dt.count() <= c.budget_seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s  %2zu %-30s %s; %.2f s%s\n", pass ? "PASS" : "FAIL", i + 1,
                c.name, out.detail.c_str(), dt.count(),
                in_time ? "" : absl::StrFormat(" (budget %g s)",
                                               c.budget_seconds)
                                   .c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

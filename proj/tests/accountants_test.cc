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

#include <cmath>
#include <numbers>
#include <vector>

#include "dpsaddle/oracle.h"
#include "dpsaddle/saddle.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpsaddle {
namespace {

using ::dpsaddle::testing::RelErr;

constexpr Method kAllMethods[] = {
    Method::kSpMsd0,    Method::kSpMsd1,      Method::kSpClt,
    Method::kMa,        Method::kMaRefined,   Method::kMaQuadratic,
    Method::kCltStandard};

Composition Make(const absl::StatusOr<MechanismSpec>& mech,
                 std::int64_t count = 1) {
  return *Composition::Homogeneous(*mech, count);
}

// Contour-integral δ for σ = 1, λ = 0.01, n = 2000; bracketed by an
// independent FFT privacy-loss convolution at ε = 1 and 2.
struct TruthPoint {
  double eps, delta;
};
constexpr TruthPoint kTruth2000[] = {{0.5, 7.9915024517e-02},
                                     {1.0, 1.8273811670e-02},
                                     {2.0, 2.549593194e-04}};

Composition Subsampled2000() {
  return Make(MechanismSpec::SubsampledGaussian(1.0, 0.01), 2000);
}

TEST(Methods, NamesRoundTrip) {
  for (Method m : kAllMethods) {
    EXPECT_EQ(ParseMethod(MethodName(m)), m);
  }
  EXPECT_EQ(MethodName(Method::kSpMsd1), "sp-msd1");
  EXPECT_FALSE(ParseMethod("fft").has_value());
}

TEST(SpMsd0, AlgebraicFormsAgree) {
  // e^{F}/√(2πF″) against e^{K−εt}/√(2π[t²(1+t)²K″ + t² + (1+t)²]).
  for (const Composition& c :
       {Make(MechanismSpec::Gaussian(1.0)), Subsampled2000(),
        Make(MechanismSpec::SubsampledGaussian(0.8, 0.1), 50)}) {
    for (double eps : {0.5, 1.0, 3.0}) {
      ASSERT_OK_AND_ASSIGN(DeltaEstimate d, DeltaSpMsd0(c, eps));
      ASSERT_OK_AND_ASSIGN(SaddleInfo s, SolveSaddle(c, eps));
      const double t = s.t0, k = s.cgf.k0, k2 = s.cgf.k2;
      const double denom =
          t * t * (1 + t) * (1 + t) * k2 + t * t + (1 + t) * (1 + t);
      const double other =
          k - eps * t - 0.5 * std::log(2 * std::numbers::pi * denom);
      EXPECT_LT(std::abs(std::expm1(d.log_delta - other)), 1e-12) << eps;
    }
  }
}

TEST(SpMsd0, MatchesIndependentEvaluation) {
  // 50-digit mpmath: t0 = 3.4015103323570219, δ0 = 0.017845761754584345,
  // δ1 = 0.01835378848222039.
  const Composition c = Subsampled2000();
  ASSERT_OK_AND_ASSIGN(SaddleInfo s, SolveSaddle(c, 1.0));
  EXPECT_LT(RelErr(s.t0, 3.4015103323570219), 1e-10);
  ASSERT_OK_AND_ASSIGN(DeltaEstimate d0, DeltaSpMsd0(c, 1.0));
  EXPECT_LT(RelErr(d0.delta(), 0.017845761754584345), 1e-9);
  EXPECT_FALSE(d0.is_upper_bound);
  EXPECT_FALSE(d0.err_bound().has_value());
  ASSERT_OK_AND_ASSIGN(DeltaEstimate d1, DeltaSpMsd1(c, 1.0));
  EXPECT_LT(RelErr(d1.delta(), 0.01835378848222039), 1e-9);
  ASSERT_OK_AND_ASSIGN(DeltaEstimate g, DeltaSpMsd0(Make(MechanismSpec::Gaussian(1.0)), 1.0));
  EXPECT_GT(g.delta(), 0.0);
  EXPECT_LT(g.delta(), 1.0);
}

TEST(SpMsd1, CloseToTruth) {
  const Composition c = Subsampled2000();
  ASSERT_OK_AND_ASSIGN(DeltaEstimate d0, DeltaSpMsd0(c, 1.0));
  ASSERT_OK_AND_ASSIGN(DeltaEstimate d1, DeltaSpMsd1(c, 1.0));
  const double factor = std::exp(d1.log_delta - d0.log_delta);
  EXPECT_GT(factor, 0.9);
  EXPECT_LT(factor, 1.1);
  for (const TruthPoint& p : kTruth2000) {
    ASSERT_OK_AND_ASSIGN(DeltaEstimate e, DeltaSpMsd1(c, p.eps));
    EXPECT_LT(RelErr(e.delta(), p.delta), 0.02) << p.eps;
  }
}

TEST(SpMsd1, CorrectionVanishesAtFixedTilt) {
  // With ε = n·K₁′(1) the saddle point stays near t = 1, where both
  // F⁗/F″² and F‴²/F″³ are O(1/n).
  const MechanismSpec m = *MechanismSpec::SubsampledGaussian(1.0, 0.1);
  ASSERT_OK_AND_ASSIGN(CgfEvaluation k1, Cgf(*Composition::Homogeneous(m, 1), 1.0));
  double prev = INFINITY;
  for (std::int64_t n : {100, 1000, 10000, 100000}) {
    const Composition cn = Make(m, n);
    const double eps = static_cast<double>(n) * k1.k1;
    ASSERT_OK_AND_ASSIGN(DeltaEstimate a, DeltaSpMsd0(cn, eps));
    ASSERT_OK_AND_ASSIGN(DeltaEstimate b, DeltaSpMsd1(cn, eps));
    const double gap = std::abs(b.log_delta - a.log_delta);
    EXPECT_LT(gap, 0.2 * prev) << n;
    prev = gap;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(SpClt, SandwichAgainstTruth) {
  const Composition c = Make(MechanismSpec::SubsampledGaussian(2.0, 0.01), 2000);
  for (double eps : {0.1, 0.3, 0.6}) {
    ASSERT_OK_AND_ASSIGN(DeltaEstimate e, DeltaSpClt(c, eps));
    ASSERT_OK_AND_ASSIGN(Probability truth, DeltaTruth(c, eps));
    ASSERT_TRUE(e.err_bound().has_value());
    EXPECT_LE(std::abs(truth.value() - e.delta()), *e.err_bound()) << eps;
  }
}

TEST(SpClt, BelowTiltedUpperBound) {
  const Composition c = Subsampled2000();
  for (double eps : {0.5, 1.0, 2.0}) {
    ASSERT_OK_AND_ASSIGN(SaddleInfo s, SolveSaddle(c, eps));
    for (double tilt : {s.t0, 0.5 * s.t0, 2.0 * s.t0}) {
      ASSERT_OK_AND_ASSIGN(DeltaEstimate e, DeltaSpClt(c, eps, tilt));
      ASSERT_OK_AND_ASSIGN(FExponent f, EvaluateFExponent(c, eps, tilt, 2));
      ASSERT_OK_AND_ASSIGN(CgfEvaluation k, Cgf(c, tilt, 2));
      EXPECT_LE(e.log_delta,
                f.f0 - 0.5 * std::log(2 * std::numbers::pi * k.k2) + 1e-12);
    }
  }
  EXPECT_FALSE(DeltaSpClt(c, 1.0, -1.0).ok());
}

TEST(SpClt, GaussianCompositionWithinRadius) {
  const Composition c = Make(MechanismSpec::Gaussian(1.0), 100);
  ASSERT_OK_AND_ASSIGN(MeanVariance mv, MeanVar(c));
  const double eps = mv.mean + 2 * std::sqrt(mv.variance);
  ASSERT_OK_AND_ASSIGN(DeltaEstimate e, DeltaSpClt(c, eps));
  ASSERT_OK_AND_ASSIGN(double exact, GaussianReferenceDelta(0.1, eps));
  EXPECT_LE(std::abs(exact - e.delta()), *e.err_bound());
}

TEST(ErrSp, DecaysLikeInverseRootN) {
  // Gaussian, ε = E + σ_L: √n·err_sp approaches a constant.
  auto scaled = [](std::int64_t n) -> double {
    const Composition c = Make(MechanismSpec::Gaussian(1.0), n);
    const MeanVariance mv = *MeanVar(c);
    const double eps = mv.mean + std::sqrt(mv.variance);
    const double t = SolveSaddle(c, eps)->t0;
    return *ErrSp(c, eps, t) * std::sqrt(static_cast<double>(n));
  };
  const double ref = scaled(10000);
  for (std::int64_t n : {1000, 100000}) {
    EXPECT_LT(RelErr(scaled(n), ref), 0.25) << n;
  }
}

TEST(ErrSp, SmallTiltFactorAndDegenerate) {
  // t^t/(1+t)^{1+t} → 1 as t → 0, so the radius tends to 1.12·P_0/K″(0)^{3/2}.
  const Composition c = Make(MechanismSpec::Gaussian(1.0), 4);
  ASSERT_OK_AND_ASSIGN(double small, ErrSp(c, 2.0, 1e-9));
  const double p0 = 4 * 2 * std::sqrt(2 / std::numbers::pi);
  EXPECT_LT(RelErr(small, 1.12 * p0 / std::pow(4.0, 1.5)), 1e-6);
  const Composition none = Make(MechanismSpec::SubsampledGaussian(1.0, 0.0));
  ASSERT_OK_AND_ASSIGN(double zero, ErrSp(none, 1.0, 1.0));
  EXPECT_EQ(zero, 0.0);
}

TEST(ErrSp, BeatsUntiltedBerryEsseen) {
  // At n = 10⁴, b = 2: err_sp/err_standard ≤ 2√e/C(b)^0.9.
  const double b = 2.0;
  const Composition c = Make(MechanismSpec::Gaussian(1.0), 10000);
  ASSERT_OK_AND_ASSIGN(MeanVariance mv, MeanVar(c));
  const double eps = mv.mean + b * std::sqrt(mv.variance);
  ASSERT_OK_AND_ASSIGN(SaddleInfo s, SolveSaddle(c, eps));
  ASSERT_OK_AND_ASSIGN(double sp, ErrSp(c, eps, s.t0));
  ASSERT_OK_AND_ASSIGN(double standard, ErrStandard(c));
  const double cb = std::exp((b * b + b * std::sqrt(b * b + 4)) / 4);
  EXPECT_LE(sp / standard, 2 * std::sqrt(std::numbers::e) / std::pow(cb, 0.9));
}

TEST(Ma, GaussianClosedForm) {
  const Composition g = Make(MechanismSpec::Gaussian(1.0));
  ASSERT_OK_AND_ASSIGN(DeltaEstimate e, DeltaMa(g, 1.0));
  EXPECT_NEAR(e.delta(), std::exp(-0.125), 1e-15);
  EXPECT_TRUE(e.is_upper_bound);
  ASSERT_OK_AND_ASSIGN(DeltaEstimate low, DeltaMa(g, 0.25));
  EXPECT_EQ(low.delta(), 1.0);
  ASSERT_OK_AND_ASSIGN(DeltaEstimate refined, DeltaMaRefined(g, 1.0));
  EXPECT_LT(refined.delta(), e.delta());
}

TEST(UpperBounds, AboveTruthAndOrdered) {
  struct Case {
    Composition c;
    std::vector<TruthPoint> points;
  };
  std::vector<Case> cases;
  cases.push_back({Subsampled2000(), {std::begin(kTruth2000), std::end(kTruth2000)}});
  std::vector<TruthPoint> gauss;
  for (double eps : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    gauss.push_back({eps, *GaussianReferenceDelta(1.0, eps)});
  }
  cases.push_back({Make(MechanismSpec::Gaussian(1.0)), gauss});
  for (const Case& k : cases) {
    for (const TruthPoint& p : k.points) {
      ASSERT_OK_AND_ASSIGN(DeltaEstimate ma, DeltaMa(k.c, p.eps));
      ASSERT_OK_AND_ASSIGN(DeltaEstimate refined, DeltaMaRefined(k.c, p.eps));
      ASSERT_OK_AND_ASSIGN(DeltaEstimate quad, DeltaMaQuadratic(k.c, p.eps));
      EXPECT_GE(ma.delta(), p.delta) << p.eps;
      EXPECT_GE(refined.delta(), p.delta) << p.eps;
      EXPECT_GE(quad.delta(), p.delta) << p.eps;
      EXPECT_LE(refined.delta(), ma.delta()) << p.eps;
      EXPECT_TRUE(quad.is_upper_bound);
      EXPECT_LE(quad.delta(), 1.0);
    }
  }
}

TEST(CltStandard, ExactForGaussianCompositions) {
  for (std::int64_t n : {1, 100, 10000}) {
    const double sigma = 3.0;
    const Composition c = Make(MechanismSpec::Gaussian(sigma), n);
    const double eff = sigma / std::sqrt(static_cast<double>(n));
    for (double eps : {0.0, 0.5, 2.0, 8.0}) {
      ASSERT_OK_AND_ASSIGN(DeltaEstimate e, DeltaCltStandard(c, eps));
      ASSERT_OK_AND_ASSIGN(double ref, LogGaussianReferenceDelta(eff, eps));
      EXPECT_LT(std::abs(std::expm1(e.log_delta - ref)), 1e-10)
          << "n=" << n << " eps=" << eps;
    }
  }
}

TEST(CltStandard, UnderreportsSmallDelta) {
  const Composition c = Subsampled2000();
  ASSERT_OK_AND_ASSIGN(DeltaEstimate e, DeltaCltStandard(c, 2.0));
  EXPECT_LT(e.delta(), kTruth2000[2].delta);
}

TEST(AllMethods, DegenerateGivesZero) {
  const Composition c = Make(MechanismSpec::SubsampledGaussian(1.0, 0.0), 100);
  for (Method m : kAllMethods) {
    ASSERT_OK_AND_ASSIGN(DeltaEstimate e, EstimateDelta(m, c, 1.0));
    EXPECT_EQ(e.delta(), 0.0) << MethodName(m);
    EXPECT_EQ(e.method, m);
  }
  ASSERT_OK_AND_ASSIGN(DeltaEstimate clt, DeltaSpClt(c, 1.0));
  EXPECT_EQ(clt.err_bound(), 0.0);
}

TEST(AllMethods, NonincreasingInEpsilon) {
  const Composition c = Make(MechanismSpec::SubsampledGaussian(0.8, 0.05), 300);
  for (Method m : kAllMethods) {
    double prev = INFINITY;
    for (double eps = 0.0; eps <= 6.0; eps += 0.25) {
      ASSERT_OK_AND_ASSIGN(DeltaEstimate e, EstimateDelta(m, c, eps));
      EXPECT_LE(e.log_delta, prev + 1e-12) << MethodName(m) << " eps=" << eps;
      prev = e.log_delta;
    }
  }
}

TEST(AllMethods, RejectNegativeEpsilon) {
  const Composition c = Make(MechanismSpec::Gaussian(1.0));
  for (Method m : kAllMethods) {
    EXPECT_EQ(EstimateDelta(m, c, -0.1).status().code(),
              absl::StatusCode::kInvalidArgument)
        << MethodName(m);
  }
}

TEST(EpsilonOfDelta, RoundTripAndEdges) {
  const Composition c = Make(MechanismSpec::Gaussian(1.0));
  ASSERT_OK_AND_ASSIGN(Probability target, Probability::Create(*GaussianReferenceDelta(1.0, 1.0)));
  ASSERT_OK_AND_ASSIGN(double eps, EpsilonOfDelta(Method::kCltStandard, c, target));
  EXPECT_NEAR(eps, 1.0, 2e-9);

  ASSERT_OK_AND_ASSIGN(double zero,
                       EpsilonOfDelta(Method::kSpMsd1, c, *Probability::Create(0.9)));
  EXPECT_EQ(zero, 0.0);

  const Composition s = Make(MechanismSpec::SubsampledGaussian(0.65, 0.01), 1000);
  double prev = INFINITY;
  for (double d : {1e-10, 1e-7, 1e-5, 1e-3}) {
    ASSERT_OK_AND_ASSIGN(double e, EpsilonOfDelta(Method::kSpMsd1, s, *Probability::Create(d)));
    EXPECT_LT(e, prev) << d;
    prev = e;
    ASSERT_OK_AND_ASSIGN(DeltaEstimate back, DeltaSpMsd1(s, e));
    EXPECT_LE(back.delta(), d * (1 + 1e-7));
  }
  EXPECT_FALSE(EpsilonOfDelta(Method::kMa, c, *Probability::Create(0.0)).ok());
}

}  // namespace
}  // namespace dpsaddle

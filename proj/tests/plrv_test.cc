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

#include "dpsaddle/plrv.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "gtest/gtest.h"
#include "test_util.h"

namespace dpsaddle {
namespace {

using ::dpsaddle::testing::RelErr;

Composition Make(const absl::StatusOr<MechanismSpec>& mech,
                 std::int64_t count = 1) {
  return *Composition::Homogeneous(*mech, count);
}

TEST(MechanismSpec, Validation) {
  EXPECT_FALSE(MechanismSpec::Gaussian(0.0).ok());
  EXPECT_FALSE(MechanismSpec::Gaussian(-1.0).ok());
  EXPECT_FALSE(MechanismSpec::Gaussian(1.0, 0.0).ok());
  EXPECT_FALSE(MechanismSpec::SubsampledGaussian(1.0, 1.5).ok());
  EXPECT_FALSE(MechanismSpec::SubsampledGaussian(1.0, -0.1).ok());
  EXPECT_FALSE(MechanismSpec::SubsampledGaussian(NAN, 0.1).ok());
  ASSERT_OK_AND_ASSIGN(MechanismSpec m,
                       MechanismSpec::SubsampledGaussian(3.0, 0.2, 2.0));
  EXPECT_DOUBLE_EQ(m.normalized_sigma(), 1.5);
  EXPECT_FALSE(m.is_degenerate());
  EXPECT_TRUE(MechanismSpec::SubsampledGaussian(1.0, 0.0)->is_degenerate());
  EXPECT_FALSE(Composition::Homogeneous(m, 0).ok());
  EXPECT_FALSE(Composition::Create({}).ok());
}

TEST(Cgf, GaussianClosedForm) {
  const Composition c = Make(MechanismSpec::Gaussian(1.0));
  ASSERT_OK_AND_ASSIGN(CgfEvaluation k, Cgf(c, 1.0));
  EXPECT_NEAR(k.k0, 1.0, 1e-15);
  EXPECT_NEAR(k.k1, 1.5, 1e-15);
  EXPECT_NEAR(k.k2, 1.0, 1e-15);
  EXPECT_EQ(k.k3, 0.0);
  EXPECT_EQ(k.k4, 0.0);
}

TEST(Cgf, ZeroTiltIsZero) {
  for (const Composition& c :
       {Make(MechanismSpec::Gaussian(0.7), 3),
        Make(MechanismSpec::SubsampledGaussian(1.0, 0.01), 100),
        Make(MechanismSpec::SubsampledGaussian(0.5, 0.3))}) {
    ASSERT_OK_AND_ASSIGN(CgfEvaluation k, Cgf(c, 0.0));
    EXPECT_EQ(k.k0, 0.0);
  }
}

TEST(Cgf, RejectsBadTilt) {
  const Composition c = Make(MechanismSpec::SubsampledGaussian(1.0, 0.1));
  EXPECT_EQ(Cgf(c, -0.5).status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(Cgf(c, INFINITY).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(TiltedAbsThirdMoment(c, -1.0).ok());
}

TEST(Cgf, FullSamplingMatchesGaussian) {
  const Composition sub = Make(MechanismSpec::SubsampledGaussian(1.0, 1.0));
  ASSERT_OK_AND_ASSIGN(CgfEvaluation k2, Cgf(sub, 2.0));
  EXPECT_NEAR(k2.k0, 3.0, 1e-12);
  EXPECT_NEAR(k2.k1, 2.5, 1e-12);
  EXPECT_NEAR(k2.k2, 1.0, 1e-12);
  EXPECT_NEAR(k2.k3, 0.0, 1e-10);
  EXPECT_NEAR(k2.k4, 0.0, 1e-10);
  for (double t = 0.25; t <= 20.0; t += 0.25) {
    ASSERT_OK_AND_ASSIGN(CgfEvaluation k, Cgf(sub, t));
    EXPECT_LT(RelErr(k.k0, t * (t + 1) / 2), 1e-10) << "t=" << t;
    EXPECT_LT(RelErr(k.k1, t + 0.5), 1e-10) << "t=" << t;
    EXPECT_LT(RelErr(k.k2, 1.0), 1e-10) << "t=" << t;
  }
}

TEST(Cgf, SubsampledMatchesReference) {
  // mpmath, 50 digits; σ = 1, λ = 0.1.
  const struct {
    double t, k0, k1, k2, abs3;
  } cases[] = {{0.5, 0.0058672960983426178, 0.016580593327349069,
                0.021014922868378581, 0.011494671828051405},
               {2.0, 0.06342460060675285, 0.069202809414503821,
                0.059273198079461179, 0.057303299853335932}};
  const Composition c = Make(MechanismSpec::SubsampledGaussian(1.0, 0.1));
  for (const auto& r : cases) {
    ASSERT_OK_AND_ASSIGN(TiltedMoments m, EvaluateTilted(c, r.t));
    EXPECT_LT(RelErr(m.cgf.k0, r.k0), 1e-11);
    EXPECT_LT(RelErr(m.cgf.k1, r.k1), 1e-11);
    EXPECT_LT(RelErr(m.cgf.k2, r.k2), 1e-11);
    EXPECT_LT(RelErr(m.abs_third, r.abs3), 1e-9);
  }
}

TEST(Cgf, FiniteDifferencesAgree) {
  const double h = 1e-4;
  for (const Composition& c :
       {Make(MechanismSpec::SubsampledGaussian(1.0, 0.01)),
        Make(MechanismSpec::SubsampledGaussian(0.8, 0.1)),
        Make(MechanismSpec::SubsampledGaussian(2.0, 0.5))}) {
    for (double t : {0.3, 1.0, 4.0, 15.0}) {
      ASSERT_OK_AND_ASSIGN(CgfEvaluation lo, Cgf(c, t - h));
      ASSERT_OK_AND_ASSIGN(CgfEvaluation mid, Cgf(c, t));
      ASSERT_OK_AND_ASSIGN(CgfEvaluation hi, Cgf(c, t + h));
      const auto tol = [](double v) { return std::max(1e-7, 1e-5 * std::abs(v)); };
      EXPECT_NEAR((hi.k0 - lo.k0) / (2 * h), mid.k1, tol(mid.k1)) << t;
      EXPECT_NEAR((hi.k1 - lo.k1) / (2 * h), mid.k2, tol(mid.k2)) << t;
      EXPECT_NEAR((hi.k2 - lo.k2) / (2 * h), mid.k3, tol(mid.k3)) << t;
      EXPECT_NEAR((hi.k3 - lo.k3) / (2 * h), mid.k4, tol(mid.k4)) << t;
    }
  }
}

TEST(Cgf, ConvexOnGrid) {
  const Composition c = Make(MechanismSpec::SubsampledGaussian(0.65, 0.01));
  double prev = -INFINITY;
  for (double t = 0.0; t <= 60.0; t += 0.5) {
    ASSERT_OK_AND_ASSIGN(CgfEvaluation k, Cgf(c, t));
    EXPECT_GE(k.k2, 0.0) << t;
    EXPECT_GE(k.k1, prev) << t;
    prev = k.k1;
  }
}

TEST(Cgf, CompositionScalesExactly) {
  const MechanismSpec m = *MechanismSpec::SubsampledGaussian(1.0, 0.01);
  ASSERT_OK_AND_ASSIGN(CgfEvaluation one, Cgf(Make(m), 3.0));
  ASSERT_OK_AND_ASSIGN(CgfEvaluation many, Cgf(Make(m, 2000), 3.0));
  EXPECT_EQ(many.k0, 2000 * one.k0);
  EXPECT_EQ(many.k1, 2000 * one.k1);
  EXPECT_EQ(many.k2, 2000 * one.k2);
  EXPECT_EQ(many.k4, 2000 * one.k4);
  // A mixed composition is the sum of its parts.
  ASSERT_OK_AND_ASSIGN(
      Composition mixed,
      Composition::Create({{m, 3}, {*MechanismSpec::Gaussian(2.0), 2}}));
  ASSERT_OK_AND_ASSIGN(CgfEvaluation g, Cgf(Make(MechanismSpec::Gaussian(2.0)), 3.0));
  ASSERT_OK_AND_ASSIGN(CgfEvaluation both, Cgf(mixed, 3.0));
  EXPECT_NEAR(both.k0, 3 * one.k0 + 2 * g.k0, 1e-14);
  EXPECT_EQ(mixed.total_count(), 5);
}

TEST(Cgf, SensitivityEntersThroughRatio) {
  ASSERT_OK_AND_ASSIGN(
      CgfEvaluation a,
      Cgf(Make(MechanismSpec::SubsampledGaussian(2.0, 0.2, 2.0)), 1.5));
  ASSERT_OK_AND_ASSIGN(
      CgfEvaluation b, Cgf(Make(MechanismSpec::SubsampledGaussian(1.0, 0.2)), 1.5));
  EXPECT_EQ(a.k0, b.k0);
  EXPECT_EQ(a.k2, b.k2);
}

TEST(CgfComplex, RealAxisAndClosedForm) {
  const Composition g = Make(MechanismSpec::Gaussian(1.0));
  ASSERT_OK_AND_ASSIGN(ComplexCgfValue z, CgfComplex(g, 1.0, 1.0));
  EXPECT_NEAR(z.re, 0.5, 1e-15);
  EXPECT_NEAR(z.im, 1.5, 1e-15);

  const Composition c = Make(MechanismSpec::SubsampledGaussian(1.0, 0.1), 7);
  ASSERT_OK_AND_ASSIGN(ComplexCgfValue axis, CgfComplex(c, 1.3, 0.0));
  ASSERT_OK_AND_ASSIGN(CgfEvaluation k, Cgf(c, 1.3));
  EXPECT_EQ(axis.im, 0.0);
  EXPECT_NEAR(axis.re, k.k0, 1e-13 * std::abs(k.k0));
}

TEST(CgfComplex, ConjugateSymmetryAndModulusBound) {
  const Composition c = Make(MechanismSpec::SubsampledGaussian(0.8, 0.05), 10);
  for (double t : {0.2, 1.0, 5.0}) {
    ASSERT_OK_AND_ASSIGN(CgfEvaluation k, Cgf(c, t));
    for (double s : {0.1, 1.0, 7.5, 40.0, 300.0}) {
      ASSERT_OK_AND_ASSIGN(ComplexCgfValue plus, CgfComplex(c, t, s));
      ASSERT_OK_AND_ASSIGN(ComplexCgfValue minus, CgfComplex(c, t, -s));
      EXPECT_DOUBLE_EQ(plus.re, minus.re);
      EXPECT_DOUBLE_EQ(plus.im, -minus.im);
      EXPECT_LE(plus.re, k.k0 + 1e-12) << "t=" << t << " s=" << s;
    }
  }
}

TEST(TiltedCharacteristic, MatchesDirectCharacteristicFunction) {
  // Brute-force E[e^{isL}] under the tilted law for σ = 1, λ = 0.1.
  const double sigma = 1.0, lambda = 0.1, t = 1.0;
  const Composition c = Make(MechanismSpec::SubsampledGaussian(sigma, lambda));
  ASSERT_OK_AND_ASSIGN(TiltedCharacteristic tc, TiltedCharacteristic::Create(c, t));
  EXPECT_EQ(tc.t(), t);
  for (double s : {0.5, 3.0, 20.0}) {
    std::complex<double> num = 0, den = 0;
    const double lo = -14.0, hi = 16.0;
    const int steps = 600000;
    const double dx = (hi - lo) / steps;
    for (int i = 0; i < steps; ++i) {
      const double x = lo + (i + 0.5) * dx;
      const double q = std::exp(-x * x / 2);
      const double y = (2 * x - 1) / 2;
      const double w = 1 - lambda + lambda * std::exp(y);
      const double l = std::log(w);
      const double mass = q * std::pow(w, 1 + t);
      num += mass * std::polar(1.0, s * l);
      den += mass;
    }
    const std::complex<double> want = std::log(num / den);
    const std::complex<double> got = tc.LogRatio(s);
    EXPECT_NEAR(got.real(), want.real(), 1e-8) << "s=" << s;
    EXPECT_NEAR(std::remainder(got.imag() - want.imag(), 2 * std::numbers::pi),
                0.0, 1e-8)
        << "s=" << s;
  }
}

TEST(TiltedAbsThirdMoment, Gaussian) {
  const double want = 2 * std::sqrt(2 / std::numbers::pi);
  for (double t : {0.0, 0.5, 3.0}) {
    ASSERT_OK_AND_ASSIGN(double p, TiltedAbsThirdMoment(Make(MechanismSpec::Gaussian(1.0)), t));
    EXPECT_LT(RelErr(p, want), 1e-13);
  }
  ASSERT_OK_AND_ASSIGN(double p4,
                       TiltedAbsThirdMoment(Make(MechanismSpec::Gaussian(1.0), 4), 0.0));
  EXPECT_LT(RelErr(p4, 4 * want), 1e-13);
}

TEST(TiltedAbsThirdMoment, SubsampledReference) {
  ASSERT_OK_AND_ASSIGN(
      double p,
      TiltedAbsThirdMoment(Make(MechanismSpec::SubsampledGaussian(1.0, 0.01)), 0.0));
  EXPECT_LT(RelErr(p, 1.2918110890145148e-5), 1e-8);
}

TEST(MeanVar, KnownValues) {
  ASSERT_OK_AND_ASSIGN(MeanVariance g, MeanVar(Make(MechanismSpec::Gaussian(1.0))));
  EXPECT_DOUBLE_EQ(g.mean, 0.5);
  EXPECT_DOUBLE_EQ(g.variance, 1.0);
  ASSERT_OK_AND_ASSIGN(MeanVariance g5, MeanVar(Make(MechanismSpec::Gaussian(1.0), 5)));
  EXPECT_DOUBLE_EQ(g5.mean, 2.5);
  EXPECT_DOUBLE_EQ(g5.variance, 5.0);
  ASSERT_OK_AND_ASSIGN(MeanVariance zero,
                       MeanVar(Make(MechanismSpec::SubsampledGaussian(1.0, 0.0))));
  EXPECT_EQ(zero.mean, 0.0);
  EXPECT_EQ(zero.variance, 0.0);
  ASSERT_OK_AND_ASSIGN(MeanVariance s,
                       MeanVar(Make(MechanismSpec::SubsampledGaussian(1.0, 0.01))));
  EXPECT_LT(RelErr(s.mean, 8.3812207650831788e-5), 1e-10);
  EXPECT_LT(RelErr(s.variance, 0.00017163050624741355), 1e-10);
}

TEST(Degenerate, NoSampling) {
  const Composition c = Make(MechanismSpec::SubsampledGaussian(1.0, 0.0), 50);
  EXPECT_TRUE(c.is_degenerate());
  ASSERT_OK_AND_ASSIGN(CgfEvaluation k, Cgf(c, 2.0));
  EXPECT_EQ(k.k0, 0.0);
  EXPECT_EQ(k.k2, 0.0);
  ASSERT_OK_AND_ASSIGN(double p, TiltedAbsThirdMoment(c, 2.0));
  EXPECT_EQ(p, 0.0);
}

TEST(GaussianReferenceDelta, KnownValues) {
  // mpmath, 50 digits.
  const struct {
    double eps, want;
  } cases[] = {{0.0, 0.38292492254802621},  {0.5, 0.23842170813487663},
               {1.0, 0.12693673750664395},  {2.0, 0.020923635821113731},
               {4.0, 4.7122412007931199e-5}};
  for (const auto& c : cases) {
    ASSERT_OK_AND_ASSIGN(double d, GaussianReferenceDelta(1.0, c.eps));
    EXPECT_LT(RelErr(d, c.want), 1e-13) << c.eps;
  }
  ASSERT_OK_AND_ASSIGN(double tiny, LogGaussianReferenceDelta(1.0, 16.0));
  EXPECT_LT(RelErr(tiny, std::log(1.0433669260341165e-55)), 1e-13);
  ASSERT_OK_AND_ASSIGN(double none, GaussianReferenceDelta(1e8, 0.0));
  EXPECT_LT(none, 1e-8);
  EXPECT_FALSE(GaussianReferenceDelta(0.0, 1.0).ok());
}

}  // namespace
}  // namespace dpsaddle

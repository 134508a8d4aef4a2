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

#include "plrv/quadrature.h"

#include <array>
#include <cmath>
#include <complex>

#include "boost/math/special_functions/bessel.hpp"
#include "boost/math/special_functions/legendre.hpp"
#include "gtest/gtest.h"

namespace dpsaddle::internal {
namespace {

TEST(Quadrature, PanelRuleIntegratesHighDegreeExactly) {
  const GaussLegendreRule& r = PanelRule();
  // A 20-point rule is exact through degree 39.
  for (int d : {0, 2, 10, 38}) {
    double sum = 0;
    for (std::size_t j = 0; j < kPanelOrder; ++j) {
      sum += r.weights[j] * std::pow(r.nodes[j], d);
    }
    EXPECT_NEAR(sum, 2.0 / (d + 1), 1e-14) << "degree " << d;
  }
}

TEST(Quadrature, CompositeRuleCoversInterval) {
  const CompositeNodes c = CompositeRule(-1.0, 3.0, 7);
  ASSERT_EQ(c.x.size(), 7 * kPanelOrder);
  ASSERT_EQ(c.w.size(), c.x.size());
  double len = 0, cube = 0;
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    EXPECT_GT(c.x[i], -1.0);
    EXPECT_LT(c.x[i], 3.0);
    len += c.w[i];
    cube += c.w[i] * c.x[i] * c.x[i] * c.x[i];
  }
  EXPECT_NEAR(len, 4.0, 1e-13);
  EXPECT_NEAR(cube, (81.0 - 1.0) / 4.0, 1e-12);
}

TEST(Quadrature, LegendreProjectionRecoversPolynomials) {
  const GaussLegendreRule& r = PanelRule();
  const LegendreProjection& m = PanelLegendreProjection();
  for (unsigned deg : {0u, 1u, 5u, 19u}) {
    std::array<double, kPanelOrder> f;
    for (std::size_t j = 0; j < kPanelOrder; ++j) {
      f[j] = boost::math::legendre_p(deg, r.nodes[j]);
    }
    for (std::size_t k = 0; k < kPanelOrder; ++k) {
      double a = 0;
      for (std::size_t j = 0; j < kPanelOrder; ++j) a += m[k][j] * f[j];
      EXPECT_NEAR(a, k == deg ? 1.0 : 0.0, 1e-13) << "P" << deg << " a" << k;
    }
  }
}

// Below w = k, j_k has no zeros and is compared relatively; past that it
// oscillates inside a 1/w envelope, which sets the scale near its zeros.
TEST(Quadrature, SphericalBesselMatchesBoost) {
  std::array<double, kPanelOrder> j;
  double worst = 0;
  for (double w = 0.0; w < 3000.0; w = w * 1.03 + 1e-9) {
    SphericalBesselJ(w, j);
    for (unsigned k = 0; k < kPanelOrder; ++k) {
      const double ref = boost::math::sph_bessel(k, w);
      const double scale = w < k ? std::abs(ref) : 1.0 / std::max(1.0, w);
      if (scale == 0.0) {
        EXPECT_EQ(j[k], 0.0);
        continue;
      }
      worst = std::max(worst, std::abs(j[k] - ref) / scale);
    }
  }
  EXPECT_LT(worst, 1e-13);
}

TEST(Quadrature, FilonIntegralOfLegendreSeries) {
  // ∫_{-1}^{1} P_3(u) e^{iwu} du = 2i³ j_3(w), against a fine GL sum.
  const double w = 37.5;
  std::array<double, kPanelOrder> j;
  SphericalBesselJ(w, j);
  const std::complex<double> filon = 2.0 * std::complex<double>(0, -1) * j[3];
  const CompositeNodes c = CompositeRule(-1.0, 1.0, 64);
  std::complex<double> brute = 0;
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    brute += c.w[i] * boost::math::legendre_p(3, c.x[i]) *
             std::polar(1.0, w * c.x[i]);
  }
  EXPECT_NEAR(filon.real(), brute.real(), 1e-14);
  EXPECT_NEAR(filon.imag(), brute.imag(), 1e-14);
}

}  // namespace
}  // namespace dpsaddle::internal

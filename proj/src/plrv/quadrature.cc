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

#include <cmath>

#include "boost/math/quadrature/gauss.hpp"

namespace dpsaddle::internal {

const GaussLegendreRule& PanelRule() {
  static const GaussLegendreRule rule = [] {
    using Gauss = boost::math::quadrature::gauss<double, kPanelOrder>;
    const auto& abscissa = Gauss::abscissa();
    const auto& weights = Gauss::weights();
    // Boost stores the non-negative half; an even order has no zero node.
    static_assert(kPanelOrder % 2 == 0);
    GaussLegendreRule r;
    const std::size_t half = kPanelOrder / 2;
    for (std::size_t i = 0; i < half; ++i) {
      r.nodes[half - 1 - i] = -abscissa[i];
      r.weights[half - 1 - i] = weights[i];
      r.nodes[half + i] = abscissa[i];
      r.weights[half + i] = weights[i];
    }
    return r;
  }();
  return rule;
}

CompositeNodes CompositeRule(double lo, double hi, std::size_t panels) {
  const GaussLegendreRule& rule = PanelRule();
  CompositeNodes out;
  out.x.reserve(panels * kPanelOrder);
  out.w.reserve(panels * kPanelOrder);
  const double width = (hi - lo) / static_cast<double>(panels);
  const double half = 0.5 * width;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = lo + (static_cast<double>(p) + 0.5) * width;
    for (std::size_t k = 0; k < kPanelOrder; ++k) {
      out.x.push_back(mid + half * rule.nodes[k]);
      out.w.push_back(half * rule.weights[k]);
    }
  }
  return out;
}

const LegendreProjection& PanelLegendreProjection() {
  static const LegendreProjection projection = [] {
    const GaussLegendreRule& rule = PanelRule();
    LegendreProjection m;
    for (std::size_t j = 0; j < kPanelOrder; ++j) {
      const double u = rule.nodes[j];
      std::array<double, kPanelOrder> p;
      p[0] = 1.0;
      p[1] = u;
      for (std::size_t k = 1; k + 1 < kPanelOrder; ++k) {
        // Bonnet: (k+1)P_{k+1} = (2k+1)uP_k − kP_{k−1}.
        const double kk = static_cast<double>(k);
        p[k + 1] = ((2.0 * kk + 1.0) * u * p[k] - kk * p[k - 1]) / (kk + 1.0);
      }
      for (std::size_t k = 0; k < kPanelOrder; ++k) {
        m[k][j] = (static_cast<double>(k) + 0.5) * rule.weights[j] * p[k];
      }
    }
    return m;
  }();
  return projection;
}

void SphericalBesselJ(double w, std::span<double, kPanelOrder> out) {
  constexpr int n = static_cast<int>(kPanelOrder);
  if (w < 1e-8) {
    // Leading term w^k/(2k+1)!!; the next one is smaller by w².
    double term = 1.0;
    for (int k = 0; k < n; ++k) {
      out[k] = term;
      term *= w / (2.0 * k + 3.0);
    }
    out[0] = 1.0 - w * w / 6.0;
    return;
  }
  const double s = std::sin(w);
  const double c = std::cos(w);
  const double j0 = s / w;
  const double j1 = (s / w - c) / w;
  if (w >= n) {
    // Upward recurrence is stable while k < w.
    out[0] = j0;
    out[1] = j1;
    for (int k = 1; k + 1 < n; ++k) {
      out[k + 1] = (2.0 * k + 1.0) / w * out[k] - out[k - 1];
    }
    return;
  }
  // Miller's downward recurrence from well above the turning point,
  // normalised against whichever of j0, j1 is further from a zero.
  const int start = n + 2 * static_cast<int>(std::ceil(w)) + 30;
  double above = 0.0;
  double here = 1e-300;
  for (int k = start; k > 0; --k) {
    const double below = (2.0 * k + 1.0) / w * here - above;
    above = here;
    here = below;
    if (k - 1 < n) out[k - 1] = here;
    if (std::abs(here) > 1e150) {
      above *= 1e-150;
      here *= 1e-150;
      for (int i = k - 1; i < n; ++i) out[i] *= 1e-150;
    }
  }
  const double scale = std::abs(j0) >= std::abs(j1) ? j0 / out[0] : j1 / out[1];
  for (int k = 0; k < n; ++k) out[k] *= scale;
}

}  // namespace dpsaddle::internal

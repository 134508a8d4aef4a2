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

#ifndef DPSADDLE_PLRV_QUADRATURE_H_
#define DPSADDLE_PLRV_QUADRATURE_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace dpsaddle::internal {

// Gauss–Legendre rule on [-1, 1] used for every composite rule in the
// library.
inline constexpr std::size_t kPanelOrder = 20;

struct GaussLegendreRule {
  std::array<double, kPanelOrder> nodes;
  std::array<double, kPanelOrder> weights;
};

// Shared read-only table, built on first use.
const GaussLegendreRule& PanelRule();

// Nodes and weights of the composite rule with `panels` equal panels on
// [lo, hi].
struct CompositeNodes {
  std::vector<double> x;
  std::vector<double> w;
};
CompositeNodes CompositeRule(double lo, double hi, std::size_t panels);

// Row k maps samples f(u_j) at the rule's nodes to the Legendre coefficient
// a_k of the degree-19 interpolant f ≈ Σ a_k P_k(u).
using LegendreProjection =
    std::array<std::array<double, kPanelOrder>, kPanelOrder>;
const LegendreProjection& PanelLegendreProjection();

// Spherical Bessel functions j_0(w) … j_19(w) for w ≥ 0. Together with
// ∫_{-1}^{1} P_k(u) e^{iwu} du = 2 i^k j_k(w) they integrate a Legendre
// series against an oscillation of any frequency.
void SphericalBesselJ(double w, std::span<double, kPanelOrder> out);

}  // namespace dpsaddle::internal

#endif  // DPSADDLE_PLRV_QUADRATURE_H_

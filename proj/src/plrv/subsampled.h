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

// Quadrature for one Poisson-subsampled Gaussian with unit sensitivity.
//
// With q the N(0,σ²) density and w(x) = 1 − λ + λ·exp((2x−1)/(2σ²)), the
// mixture density is q·w and the loss is ℓ = log w, so
//   M(t) = ∫ q(x) w(x)^{1+t} dx.
// The integrand peaks near x = 0 and x = 1 + t, so a composite
// Gauss–Legendre rule on [−14σ, 1 + t + 14σ] is used instead of a rule
// anchored at the untilted components.

#ifndef DPSADDLE_PLRV_SUBSAMPLED_H_
#define DPSADDLE_PLRV_SUBSAMPLED_H_

#include <complex>
#include <cstddef>
#include <vector>

#include "absl/status/statusor.h"

namespace dpsaddle::internal {

// ℓ(x) without cancellation for any λ in (0, 1].
double SubsampledLoss(double x, double sigma, double lambda);

// log of the mixture density (1−λ)φ(x/σ)/σ + λφ((x−1)/σ)/σ.
double SubsampledLogDensity(double x, double sigma, double lambda);

struct SubsampledMoments {
  double k0 = 0;
  double k1 = 0;
  double k2 = 0;
  double k3 = 0;
  double k4 = 0;
  double abs3 = 0;
};

// Requires λ in (0, 1], t ≥ 0.
absl::StatusOr<SubsampledMoments> SubsampledCumulants(double sigma,
                                                      double lambda, double t);

// s ↦ log(M(t+is)/M(t)) for one mechanism.
//
// The tilted law of ℓ is integrated in the ℓ variable, where e^{isℓ} is a
// plain exponential: x(ℓ) = σ²·log1p(expm1(ℓ)/λ) + 1/2 is explicit, so each
// x-panel of the real-axis rule maps to an ℓ-panel on which the density is
// expanded in Legendre polynomials and integrated against e^{isℓ} exactly.
// The cost of one evaluation is therefore independent of |s|.
class SubsampledCharacteristic {
 public:
  static absl::StatusOr<SubsampledCharacteristic> Create(double sigma,
                                                         double lambda,
                                                         double t,
                                                         int refinement);

  const SubsampledMoments& moments() const { return moments_; }
  std::complex<double> LogRatio(double s) const;

 private:
  SubsampledCharacteristic() = default;

  SubsampledMoments moments_;
  // Per ℓ-panel: centre minus K′(t), half-width, and kPanelOrder Legendre
  // coefficients of the normalised density with the factor 2·half·i^k folded
  // in up to the power of i.
  std::vector<double> offset_;
  std::vector<double> half_;
  std::vector<double> coef_;
};

}  // namespace dpsaddle::internal

#endif  // DPSADDLE_PLRV_SUBSAMPLED_H_

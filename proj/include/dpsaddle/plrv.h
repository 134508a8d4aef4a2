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

// Privacy-loss random variables (PLRVs) of the supported mechanisms and the
// cumulant generating function K(t) = log E[exp(tL)] of their compositions.
//
// For the Gaussian mechanism with noise σ and sensitivity s the loss is
// exactly N(s²/(2σ²), s²/σ²). For the Poisson-subsampled Gaussian the pair is
// P = (1−λ)N(0,σ²) + λN(s,σ²) against Q = N(0,σ²), and
//   L = log(1 − λ + λ·exp(s(2X − s)/(2σ²))),  X ~ P.
// Only s/σ matters, so everything is normalised to s = 1 internally.

#ifndef DPSADDLE_PLRV_H_
#define DPSADDLE_PLRV_H_

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace dpsaddle {

enum class MechanismKind { kGaussian, kSubsampledGaussian };

class MechanismSpec {
 public:
  static absl::StatusOr<MechanismSpec> Gaussian(double sigma,
                                                double sensitivity = 1.0);
  static absl::StatusOr<MechanismSpec> SubsampledGaussian(
      double sigma, double lambda, double sensitivity = 1.0);

  MechanismKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double sensitivity() const { return sensitivity_; }
  // Always 1 for the plain Gaussian.
  double lambda() const { return lambda_; }
  // σ/s, the only scale the loss depends on.
  double normalized_sigma() const { return sigma_ / sensitivity_; }
  // L ≡ 0 (nothing is ever sampled).
  bool is_degenerate() const { return lambda_ == 0.0; }

  std::string DebugString() const;

 private:
  MechanismSpec(MechanismKind kind, double sigma, double sensitivity,
                double lambda)
      : kind_(kind), sigma_(sigma), sensitivity_(sensitivity), lambda_(lambda) {}

  MechanismKind kind_;
  double sigma_;
  double sensitivity_;
  double lambda_;
};

struct CompositionTerm {
  MechanismSpec mechanism;
  std::int64_t count;
};

// A multiset of mechanisms. The composed loss is the sum of independent
// per-mechanism losses, so its CGF is Σ count·K_mechanism.
class Composition {
 public:
  static absl::StatusOr<Composition> Create(std::vector<CompositionTerm> terms);
  static absl::StatusOr<Composition> Homogeneous(const MechanismSpec& mechanism,
                                                 std::int64_t count);

  const std::vector<CompositionTerm>& terms() const { return terms_; }
  std::int64_t total_count() const;
  // True when every term has L ≡ 0.
  bool is_degenerate() const;

 private:
  explicit Composition(std::vector<CompositionTerm> terms)
      : terms_(std::move(terms)) {}

  std::vector<CompositionTerm> terms_;
};

// K and its first four derivatives at a real tilt t.
struct CgfEvaluation {
  double t = 0;
  double k0 = 0;
  double k1 = 0;
  double k2 = 0;
  double k3 = 0;
  double k4 = 0;
};

// K(t + is).
struct ComplexCgfValue {
  double re = 0;
  double im = 0;

  std::complex<double> value() const { return {re, im}; }
};

// Derivatives above `max_order` are left at zero. Errors: InvalidArgument for
// negative or non-finite t, ResourceExhausted if the quadrature does not
// reach its tolerance.
absl::StatusOr<CgfEvaluation> Cgf(const Composition& composition, double t,
                                  int max_order = 4);

absl::StatusOr<ComplexCgfValue> CgfComplex(const Composition& composition,
                                           double t, double s);

// P_t = Σ count·E|L̃ − K′(t)|³ where L̃ is the loss tilted by exp(tL).
absl::StatusOr<double> TiltedAbsThirdMoment(const Composition& composition,
                                            double t);

// Cgf and TiltedAbsThirdMoment from a single quadrature pass.
struct TiltedMoments {
  CgfEvaluation cgf;
  double abs_third = 0;
};
absl::StatusOr<TiltedMoments> EvaluateTilted(const Composition& composition,
                                             double t);

struct MeanVariance {
  double mean = 0;
  double variance = 0;
};
absl::StatusOr<MeanVariance> MeanVar(const Composition& composition);

// Exact privacy curve of a single Gaussian mechanism with sensitivity 1:
// Φ(1/(2σ) − εσ) − e^ε·Φ(−1/(2σ) − εσ).
absl::StatusOr<double> GaussianReferenceDelta(double sigma, double epsilon);
// Its natural log; finite far below the double range.
absl::StatusOr<double> LogGaussianReferenceDelta(double sigma, double epsilon);

// Evaluates s ↦ K(t + is) − K(t) for a fixed composition and tilt. Building
// it runs the real quadrature once; each call then costs one complex sum per
// distinct mechanism, at a cost that does not grow with |s|. Immutable after
// construction.
class TiltedCharacteristic {
 public:
  // `refinement` ≥ 1 multiplies the node density of the subsampled terms.
  static absl::StatusOr<TiltedCharacteristic> Create(
      const Composition& composition, double t, int refinement = 1);

  TiltedCharacteristic(TiltedCharacteristic&&) noexcept;
  TiltedCharacteristic& operator=(TiltedCharacteristic&&) noexcept;
  ~TiltedCharacteristic();

  double t() const;
  const CgfEvaluation& cgf() const;
  // K(t + is) − K(t).
  std::complex<double> LogRatio(double s) const;

 private:
  struct Impl;
  explicit TiltedCharacteristic(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace dpsaddle

#endif  // DPSADDLE_PLRV_H_

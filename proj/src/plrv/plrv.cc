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
#include <limits>
#include <numbers>
#include <optional>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dpsaddle/specfun.h"
#include "plrv/subsampled.h"

namespace dpsaddle {
namespace {

absl::Status CheckTilt(double t) {
  if (!std::isfinite(t) || t < 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("tilt must be finite and >= 0, got %g", t));
  }
  return absl::OkStatus();
}

// Moments of one mechanism at tilt t, before multiplying by its count.
absl::StatusOr<internal::SubsampledMoments> TermMoments(const MechanismSpec& m,
                                                        double t) {
  internal::SubsampledMoments out;
  if (m.is_degenerate()) return out;
  const double sigma = m.normalized_sigma();
  if (m.kind() == MechanismKind::kGaussian || m.lambda() == 1.0) {
    // L ~ N(1/(2σ²), 1/σ²).
    const double v = 1.0 / (sigma * sigma);
    out.k0 = 0.5 * v * t * (t + 1.0);
    out.k1 = 0.5 * v + t * v;
    out.k2 = v;
    out.abs3 = 2.0 * std::sqrt(2.0 / std::numbers::pi) * v * std::sqrt(v);
    return out;
  }
  return internal::SubsampledCumulants(sigma, m.lambda(), t);
}

}  // namespace

absl::StatusOr<MechanismSpec> MechanismSpec::Gaussian(double sigma,
                                                      double sensitivity) {
  if (!std::isfinite(sigma) || sigma <= 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be finite and > 0, got %g", sigma));
  }
  if (!std::isfinite(sensitivity) || sensitivity <= 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "sensitivity must be finite and > 0, got %g", sensitivity));
  }
  return MechanismSpec(MechanismKind::kGaussian, sigma, sensitivity, 1.0);
}

absl::StatusOr<MechanismSpec> MechanismSpec::SubsampledGaussian(
    double sigma, double lambda, double sensitivity) {
  absl::StatusOr<MechanismSpec> base = Gaussian(sigma, sensitivity);
  if (!base.ok()) return base.status();
  if (!(lambda >= 0 && lambda <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("lambda must lie in [0, 1], got %g", lambda));
  }
  return MechanismSpec(MechanismKind::kSubsampledGaussian, sigma, sensitivity,
                       lambda);
}

std::string MechanismSpec::DebugString() const {
  if (kind_ == MechanismKind::kGaussian) {
    return absl::StrFormat("gaussian(sigma=%g, sens=%g)", sigma_, sensitivity_);
  }
  return absl::StrFormat("subsampled_gaussian(sigma=%g, lambda=%g, sens=%g)",
                         sigma_, lambda_, sensitivity_);
}

absl::StatusOr<Composition> Composition::Create(
    std::vector<CompositionTerm> terms) {
  if (terms.empty()) {
    return absl::InvalidArgumentError("composition must have at least one term");
  }
  for (const CompositionTerm& term : terms) {
    if (term.count < 1) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "composition counts must be >= 1, got %d", term.count));
    }
  }
  return Composition(std::move(terms));
}

absl::StatusOr<Composition> Composition::Homogeneous(
    const MechanismSpec& mechanism, std::int64_t count) {
  return Create({CompositionTerm{mechanism, count}});
}

std::int64_t Composition::total_count() const {
  std::int64_t n = 0;
  for (const CompositionTerm& term : terms_) n += term.count;
  return n;
}

bool Composition::is_degenerate() const {
  for (const CompositionTerm& term : terms_) {
    if (!term.mechanism.is_degenerate()) return false;
  }
  return true;
}

absl::StatusOr<TiltedMoments> EvaluateTilted(const Composition& composition,
                                             double t) {
  if (absl::Status s = CheckTilt(t); !s.ok()) return s;
  TiltedMoments out;
  out.cgf.t = t;
  for (const CompositionTerm& term : composition.terms()) {
    absl::StatusOr<internal::SubsampledMoments> m =
        TermMoments(term.mechanism, t);
    if (!m.ok()) return m.status();
    const double n = static_cast<double>(term.count);
    out.cgf.k0 += n * m->k0;
    out.cgf.k1 += n * m->k1;
    out.cgf.k2 += n * m->k2;
    out.cgf.k3 += n * m->k3;
    out.cgf.k4 += n * m->k4;
    out.abs_third += n * m->abs3;
  }
  return out;
}

absl::StatusOr<CgfEvaluation> Cgf(const Composition& composition, double t,
                                  int max_order) {
  if (max_order < 0 || max_order > 4) {
    return absl::InvalidArgumentError(
        absl::StrFormat("max_order must lie in [0, 4], got %d", max_order));
  }
  absl::StatusOr<TiltedMoments> m = EvaluateTilted(composition, t);
  if (!m.ok()) return m.status();
  CgfEvaluation out = m->cgf;
  double* orders[] = {&out.k1, &out.k2, &out.k3, &out.k4};
  for (int j = max_order; j < 4; ++j) *orders[j] = 0;
  return out;
}

absl::StatusOr<double> TiltedAbsThirdMoment(const Composition& composition,
                                            double t) {
  absl::StatusOr<TiltedMoments> m = EvaluateTilted(composition, t);
  if (!m.ok()) return m.status();
  return m->abs_third;
}

absl::StatusOr<MeanVariance> MeanVar(const Composition& composition) {
  absl::StatusOr<TiltedMoments> m = EvaluateTilted(composition, 0.0);
  if (!m.ok()) return m.status();
  return MeanVariance{m->cgf.k1, m->cgf.k2};
}

absl::StatusOr<double> LogGaussianReferenceDelta(double sigma, double epsilon) {
  if (!std::isfinite(sigma) || sigma <= 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be finite and > 0, got %g", sigma));
  }
  if (std::isnan(epsilon)) {
    return absl::InvalidArgumentError("epsilon must not be NaN");
  }
  if (epsilon == std::numeric_limits<double>::infinity()) {
    return -std::numeric_limits<double>::infinity();
  }
  // Φ(−a) − e^ε·Φ(−a−1/σ) with a = εσ − 1/(2σ), rewritten through the scaled
  // tail q so that e^ε never appears on its own:
  //   δ = e^{−a²/2}·(q(a) − q(a + 1/σ))/√(2π).
  const double a = epsilon * sigma - 0.5 / sigma;
  const double log_diff = LogQDifference(a, a + 1.0 / sigma);
  return -0.5 * a * a + log_diff - 0.5 * std::log(2.0 * std::numbers::pi);
}

absl::StatusOr<double> GaussianReferenceDelta(double sigma, double epsilon) {
  absl::StatusOr<double> log_delta = LogGaussianReferenceDelta(sigma, epsilon);
  if (!log_delta.ok()) return log_delta.status();
  return std::exp(*log_delta);
}

// Gaussian terms contribute a closed form; each subsampled term owns its
// cached node tables.
struct TiltedCharacteristic::Impl {
  struct Term {
    double count;
    double inv_var;  // 1/σ² for Gaussian terms, 0 for subsampled ones
    std::optional<internal::SubsampledCharacteristic> subsampled;
  };
  double t = 0;
  CgfEvaluation cgf;
  std::vector<Term> terms;
};

TiltedCharacteristic::TiltedCharacteristic(std::unique_ptr<Impl> impl)
    : impl_(std::move(impl)) {}
TiltedCharacteristic::TiltedCharacteristic(TiltedCharacteristic&&) noexcept =
    default;
TiltedCharacteristic& TiltedCharacteristic::operator=(
    TiltedCharacteristic&&) noexcept = default;
TiltedCharacteristic::~TiltedCharacteristic() = default;

absl::StatusOr<TiltedCharacteristic> TiltedCharacteristic::Create(
    const Composition& composition, double t, int refinement) {
  if (absl::Status s = CheckTilt(t); !s.ok()) return s;
  auto impl = std::make_unique<Impl>();
  impl->t = t;
  absl::StatusOr<CgfEvaluation> cgf = Cgf(composition, t, 4);
  if (!cgf.ok()) return cgf.status();
  impl->cgf = *cgf;
  for (const CompositionTerm& term : composition.terms()) {
    const MechanismSpec& m = term.mechanism;
    if (m.is_degenerate()) continue;
    Impl::Term entry{static_cast<double>(term.count), 0.0, std::nullopt};
    const double sigma = m.normalized_sigma();
    if (m.kind() == MechanismKind::kGaussian || m.lambda() == 1.0) {
      entry.inv_var = 1.0 / (sigma * sigma);
    } else {
      absl::StatusOr<internal::SubsampledCharacteristic> c =
          internal::SubsampledCharacteristic::Create(sigma, m.lambda(), t,
                                                     refinement);
      if (!c.ok()) return c.status();
      entry.subsampled = std::move(*c);
    }
    impl->terms.push_back(std::move(entry));
  }
  return TiltedCharacteristic(std::move(impl));
}

double TiltedCharacteristic::t() const { return impl_->t; }

const CgfEvaluation& TiltedCharacteristic::cgf() const { return impl_->cgf; }

std::complex<double> TiltedCharacteristic::LogRatio(double s) const {
  std::complex<double> sum = 0;
  const double t = impl_->t;
  for (const Impl::Term& term : impl_->terms) {
    if (term.subsampled.has_value()) {
      sum += term.count * term.subsampled->LogRatio(s);
    } else {
      // K(z) = z(z+1)/(2σ²), so K(t+is) − K(t) = (is(2t+1) − s²)/(2σ²).
      sum += term.count * 0.5 * term.inv_var *
             std::complex<double>(-s * s, s * (2.0 * t + 1.0));
    }
  }
  return sum;
}

absl::StatusOr<ComplexCgfValue> CgfComplex(const Composition& composition,
                                           double t, double s) {
  if (!std::isfinite(s)) {
    return absl::InvalidArgumentError("imaginary part must be finite");
  }
  absl::StatusOr<TiltedCharacteristic> c =
      TiltedCharacteristic::Create(composition, t);
  if (!c.ok()) return c.status();
  const std::complex<double> k = c->cgf().k0 + c->LogRatio(s);
  return ComplexCgfValue{k.real(), k.imag()};
}

}  // namespace dpsaddle

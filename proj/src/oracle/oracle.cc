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

#include "dpsaddle/oracle.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "accountants/invert.h"
#include "dpsaddle/saddle.h"
#include "oracle/extended_sum.h"
#include "plrv/quadrature.h"
#include "plrv/subsampled.h"

namespace dpsaddle {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxLevels = 7;
// Panels always integrated before the tail test may stop the sweep.
constexpr int kMinPanels = 8;

absl::Status CheckEpsilon(double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and >= 0, got %g", epsilon));
  }
  return absl::OkStatus();
}

absl::Status CheckConfig(const OracleConfig& config) {
  if (!(config.rel_tol > 0)) {
    return absl::InvalidArgumentError("oracle rel_tol must be > 0");
  }
  if (config.max_panels < 8) {
    return absl::InvalidArgumentError("oracle max_panels must be >= 8");
  }
  if (config.abscissa.has_value() &&
      !(std::isfinite(*config.abscissa) && *config.abscissa > 0)) {
    return absl::InvalidArgumentError("contour abscissa must be > 0");
  }
  return absl::OkStatus();
}

struct ContourResult {
  double integral;
  double tail;
  int panels;
};

// ∫_0^S Re[exp(K(t+is) − K(t) − isε)/((t+is)(1+t+is))] ds, with S grown
// panel by panel until the remaining tail is negligible.
absl::StatusOr<ContourResult> IntegrateContour(
    const TiltedCharacteristic& phi, double epsilon, double width,
    double tail_scale, const OracleConfig& config) {
  const double t = phi.t();
  const internal::GaussLegendreRule& rule = internal::PanelRule();
  internal::ExtendedSum sum(config.working_precision_bits);
  const double floor = std::exp(config.abs_tol_log - tail_scale);
  int quiet = 0;
  double tail = std::numeric_limits<double>::infinity();
  for (int k = 0; k < config.max_panels; ++k) {
    const double mid = (k + 0.5) * width;
    double peak = 0;
    for (std::size_t j = 0; j < internal::kPanelOrder; ++j) {
      const double s = mid + 0.5 * width * rule.nodes[j];
      const std::complex<double> z(t, s);
      const std::complex<double> value =
          std::exp(phi.LogRatio(s) - std::complex<double>(0.0, s * epsilon)) /
          (z * (1.0 + z));
      sum.AddProduct(0.5 * width * rule.weights[j], value.real());
      peak = std::max(peak, std::abs(value));
    }
    // |integrand| decays at least like 1/s², so ∫_S^∞ ≲ |f(S)|·S.
    const double end = (k + 1) * width;
    tail = peak * end;
    const double total = std::abs(sum.Value());
    if (tail <= 0.1 * config.rel_tol * total || tail <= floor) {
      ++quiet;
    } else {
      quiet = 0;
    }
    if (k + 1 >= kMinPanels && quiet >= 2) {
      return ContourResult{sum.Value(), tail, k + 1};
    }
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "contour integral needs more than %d panels (tail estimate %g relative "
      "to %g)",
      config.max_panels, tail, std::abs(sum.Value())));
}

}  // namespace

absl::StatusOr<double> LogDeltaTruth(const Composition& composition,
                                     double epsilon,
                                     const OracleConfig& config) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (absl::Status s = CheckConfig(config); !s.ok()) return s;
  if (composition.is_degenerate()) return kNegInf;

  double t;
  if (config.abscissa.has_value()) {
    t = *config.abscissa;
  } else {
    absl::StatusOr<SaddleInfo> info = SolveSaddle(composition, epsilon);
    if (!info.ok()) return info.status();
    t = info->t0;
  }

  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int level = 0; level < kMaxLevels; ++level) {
    const int refinement = 1 << level;
    absl::StatusOr<TiltedCharacteristic> phi =
        TiltedCharacteristic::Create(composition, t, refinement);
    if (!phi.ok()) return phi.status();
    const CgfEvaluation& k = phi->cgf();
    const double f2 = k.k2 + 1.0 / (t * t) + 1.0 / ((1.0 + t) * (1.0 + t));
    const double width = 2.0 / std::sqrt(f2) / refinement;
    // δ = exp(scale)·I.
    const double scale = k.k0 - epsilon * t - std::log(std::numbers::pi);

    absl::StatusOr<ContourResult> r =
        IntegrateContour(*phi, epsilon, width, scale, config);
    if (!r.ok()) return r.status();
    const double value = r->integral;
    if (level > 0) {
      const double diff = std::abs(value - previous);
      if (diff <= config.rel_tol * std::abs(value) ||
          std::log(diff) + scale <= config.abs_tol_log) {
        if (!(value > 0)) {
          return absl::ResourceExhaustedError(absl::StrFormat(
              "contour integral is not positive (%g); delta is below the "
              "oracle's resolution",
              value));
        }
        return scale + std::log(value);
      }
    }
    previous = value;
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "contour integral did not settle to rel_tol %g after %d refinements",
      config.rel_tol, kMaxLevels));
}

absl::StatusOr<Probability> DeltaTruth(const Composition& composition,
                                       double epsilon,
                                       const OracleConfig& config) {
  absl::StatusOr<double> log_delta =
      LogDeltaTruth(composition, epsilon, config);
  if (!log_delta.ok()) return log_delta.status();
  return Probability::Create(std::exp(*log_delta));
}

absl::StatusOr<double> LogDeltaDirectN1(const MechanismSpec& mechanism,
                                        double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (mechanism.is_degenerate()) return kNegInf;
  const double sigma = mechanism.normalized_sigma();
  // A plain Gaussian is the λ = 1 member of the family.
  const double lambda = mechanism.kind() == MechanismKind::kGaussian
                            ? 1.0
                            : mechanism.lambda();

  // ℓ is increasing in x, and ℓ(x) > ε ⇔ x > x_ε.
  const double y_eps = std::log1p(std::expm1(epsilon) / lambda);
  const double x_eps = sigma * sigma * y_eps + 0.5;

  // Scale by the density at the most likely point of the region.
  double log_scale = internal::SubsampledLogDensity(x_eps, sigma, lambda);
  for (double x : {0.0, 1.0}) {
    if (x > x_eps) {
      log_scale = std::max(
          log_scale, internal::SubsampledLogDensity(x, sigma, lambda));
    }
  }
  auto integrand = [&](double u) -> double {
    const double x = x_eps + u;
    const double gap = internal::SubsampledLoss(x, sigma, lambda) - epsilon;
    if (!(gap > 0)) return 0.0;
    return std::exp(internal::SubsampledLogDensity(x, sigma, lambda) -
                    log_scale) *
           -std::expm1(-gap);
  };

  // Split at the scale over which the integrand varies so every piece is
  // smooth on its own panel width, then refine each piece by doubling.
  const double local =
      std::min(sigma, sigma * sigma / std::max(x_eps - 1.0, 1e-300));
  const double breaks[] = {0.0, local, 8.0 * local, 64.0 * local,
                           64.0 * local + 40.0 * sigma};
  auto integrate = [&](double a, double b, std::size_t panels) {
    const internal::CompositeNodes nodes =
        internal::CompositeRule(a, b, panels);
    internal::ExtendedSum sum(128);
    for (std::size_t i = 0; i < nodes.x.size(); ++i) {
      sum.AddProduct(nodes.w[i], integrand(nodes.x[i]));
    }
    return sum.Value();
  };
  double total = 0;
  for (int i = 0; i + 1 < 5; ++i) {
    std::size_t panels = 2;
    double prev = integrate(breaks[i], breaks[i + 1], panels);
    while (true) {
      panels *= 2;
      const double next = integrate(breaks[i], breaks[i + 1], panels);
      const double diff = std::abs(next - prev);
      prev = next;
      if (diff <= 1e-14 * std::max(std::abs(next), total)) break;
      if (panels >= (1u << 14)) {
        return absl::ResourceExhaustedError(absl::StrFormat(
            "direct quadrature did not settle on [%g, %g] (last change %g)",
            x_eps + breaks[i], x_eps + breaks[i + 1], diff));
      }
    }
    total += prev;
  }
  if (!(total > 0)) return kNegInf;
  return log_scale + std::log(total);
}

absl::StatusOr<Probability> DeltaDirectN1(const MechanismSpec& mechanism,
                                          double epsilon) {
  absl::StatusOr<double> log_delta = LogDeltaDirectN1(mechanism, epsilon);
  if (!log_delta.ok()) return log_delta.status();
  return Probability::Create(std::exp(*log_delta));
}

absl::StatusOr<double> HockeyStick(HockeyStickDirection direction,
                                   double sigma, double lambda, double gamma) {
  if (!std::isfinite(sigma) || sigma <= 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be finite and > 0, got %g", sigma));
  }
  if (!(lambda >= 0 && lambda <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("lambda must lie in [0, 1], got %g", lambda));
  }
  if (!(gamma >= 1) || !std::isfinite(gamma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("gamma must be finite and >= 1, got %g", gamma));
  }
  if (lambda == 0) return 0.0;
  // Upper tail Q(z) = Φ(−z) through erfc.
  auto upper = [](double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); };
  auto lower = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };

  // The likelihood ratio of mixture to Gaussian, w(x) = 1 − λ + λe^y with
  // y = (2x − 1)/(2σ²), is increasing in x.
  auto x_of_y = [sigma](double y) { return sigma * sigma * y + 0.5; };
  if (direction == HockeyStickDirection::kMixtureFirst) {
    // w > γ on x > x_γ:  λQ((x_γ−1)/σ) − (γ − 1 + λ)Q(x_γ/σ).
    const double x = x_of_y(std::log1p((gamma - 1.0) / lambda));
    return std::max(0.0, lambda * upper((x - 1.0) / sigma) -
                             (gamma - 1.0 + lambda) * upper(x / sigma));
  }
  // 1/w > γ on x < x′ where w(x′) = 1/γ; empty when 1/γ ≤ 1 − λ.
  const double ratio = (1.0 / gamma - 1.0 + lambda) / lambda;
  if (!(ratio > 0)) return 0.0;
  const double x = x_of_y(std::log(ratio));
  return std::max(0.0, (1.0 - gamma * (1.0 - lambda)) * lower(x / sigma) -
                           gamma * lambda * lower((x - 1.0) / sigma));
}

absl::StatusOr<double> EpsilonTruth(const Composition& composition,
                                    Probability delta_target,
                                    const OracleConfig& config) {
  return internal::InvertLogDelta(
      [&](double eps) { return LogDeltaTruth(composition, eps, config); },
      delta_target.value());
}

}  // namespace dpsaddle

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

#include "plrv/subsampled.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dpsaddle/kernels.h"
#include "dpsaddle/specfun.h"
#include "plrv/quadrature.h"

namespace dpsaddle::internal {
namespace {

constexpr double kTailWidths = 14.0;
constexpr int kMaxRefinements = 5;
// Nodes whose tilted weight is below exp(−kNegligibleLog) of the peak are
// dropped from the complex tables.
constexpr double kNegligibleLog = 80.0;

double LogGaussianDensity(double x, double sigma) {
  return -0.5 * (x / sigma) * (x / sigma) - std::log(sigma) -
         0.5 * std::log(2.0 * std::numbers::pi);
}

struct Interval {
  double lo;
  double hi;
};

Interval Support(double sigma, double t) {
  return {-kTailWidths * sigma, 1.0 + t + kTailWidths * sigma};
}

// Half the local length scale of log(q·w^{1+t}), whose curvature is bounded by
// 1/σ² + (1+t)/(4σ⁴).
std::size_t BasePanels(double sigma, double t, const Interval& range) {
  const double curvature =
      1.0 / (sigma * sigma) + (1.0 + t) / (4.0 * sigma * sigma * sigma * sigma);
  const double width = 0.5 / std::sqrt(curvature);
  return static_cast<std::size_t>(
      std::max(8.0, std::ceil((range.hi - range.lo) / width)));
}

// Tilted log-integrand log(ω·q·w^{1+t}) at each node, plus ℓ.
struct NodeValues {
  std::vector<double> log_weight;
  std::vector<double> loss;
  std::vector<double> x;
};

NodeValues Tabulate(const CompositeNodes& nodes, double sigma, double lambda,
                    double t) {
  NodeValues v;
  const std::size_t n = nodes.x.size();
  v.log_weight.resize(n);
  v.loss.resize(n);
  v.x = nodes.x;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = SubsampledLoss(nodes.x[i], sigma, lambda);
    v.loss[i] = l;
    v.log_weight[i] = std::log(nodes.w[i]) +
                      LogGaussianDensity(nodes.x[i], sigma) + (1.0 + t) * l;
  }
  return v;
}

SubsampledMoments Reduce(const NodeValues& v, const CompositeNodes& nodes,
                         double sigma, double t) {
  const std::size_t n = v.loss.size();
  std::vector<double> w(n);

  // Normaliser ∫q·w, which is 1 up to quadrature error. Dividing by the
  // computed value makes K(0) = 0 exactly.
  std::vector<double> log_w0(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_w0[i] = std::log(nodes.w[i]) + LogGaussianDensity(nodes.x[i], sigma) +
                v.loss[i];
  }
  const double m0 = *std::max_element(log_w0.begin(), log_w0.end());
  std::vector<double> w0(n);
  kernels::ExpShifted(log_w0, m0, w0);

  double max_abs_loss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (w0[i] > 0) max_abs_loss = std::max(max_abs_loss, std::abs(v.loss[i]));
  }

  const auto peak = std::max_element(v.log_weight.begin(), v.log_weight.end());
  const double m = *peak;
  kernels::ExpShifted(v.log_weight, m, w);

  SubsampledMoments out;
  const double pivot = v.loss[peak - v.log_weight.begin()];
  const kernels::MomentSums first = kernels::WeightedMoments(w, v.loss, pivot);
  const double mean = pivot + first.s1 / first.s0;
  const kernels::MomentSums c = kernels::WeightedMoments(w, v.loss, mean);
  const double mu1 = c.s1 / c.s0;  // residual of the first pass
  const double mu2 = c.s2 / c.s0 - mu1 * mu1;
  out.k1 = mean + mu1;
  out.k2 = std::max(0.0, mu2);
  out.k3 = c.s3 / c.s0;
  out.k4 = c.s4 / c.s0 - 3.0 * out.k2 * out.k2;
  out.abs3 = c.abs3 / c.s0;

  if (t * max_abs_loss <= 600.0) {
    // K = log1p(E[expm1(tL)]) keeps full relative accuracy as K → 0. Nodes
    // whose untilted weight underflowed carry less than e^{−100} of the sum
    // because K ≥ 0 for t ≥ 0.
    double num = 0;
    double den = 0;
    for (std::size_t i = 0; i < n; ++i) {
      num += w0[i] * std::expm1(t * v.loss[i]);
      den += w0[i];
    }
    out.k0 = std::log1p(num / den);
  } else {
    double den = 0;
    for (double x : w0) den += x;
    out.k0 = (m + std::log(first.s0)) - (m0 + std::log(den));
  }
  return out;
}

bool Agrees(const SubsampledMoments& a, const SubsampledMoments& b) {
  constexpr double kRel = 1e-12;
  const double scale = std::sqrt(std::max(a.k2, 0.0));
  return std::abs(a.k0 - b.k0) <= kRel * std::abs(a.k0) + 1e-15 &&
         std::abs(a.k1 - b.k1) <= kRel * std::abs(a.k1) + 1e-13 * scale &&
         std::abs(a.k2 - b.k2) <= kRel * a.k2 + 1e-300;
}

struct Converged {
  SubsampledMoments moments;
  NodeValues values;
  std::size_t panels;
};

absl::StatusOr<Converged> Solve(double sigma, double lambda, double t) {
  const Interval range = Support(sigma, t);
  std::size_t panels = BasePanels(sigma, t, range);
  CompositeNodes nodes = CompositeRule(range.lo, range.hi, panels);
  NodeValues values = Tabulate(nodes, sigma, lambda, t);
  SubsampledMoments prev = Reduce(values, nodes, sigma, t);
  for (int r = 0; r < kMaxRefinements; ++r) {
    panels *= 2;
    nodes = CompositeRule(range.lo, range.hi, panels);
    values = Tabulate(nodes, sigma, lambda, t);
    const SubsampledMoments next = Reduce(values, nodes, sigma, t);
    if (Agrees(prev, next)) return Converged{next, std::move(values), panels};
    prev = next;
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "subsampled Gaussian CGF quadrature did not converge (sigma=%g, "
      "lambda=%g, t=%g, panels=%d, last K=%.17g)",
      sigma, lambda, t, panels, prev.k0));
}

}  // namespace

double SubsampledLoss(double x, double sigma, double lambda) {
  const double y = (2.0 * x - 1.0) / (2.0 * sigma * sigma);
  const double v = lambda * std::expm1(y);
  if (std::abs(v) < 0.5) return std::log1p(v);
  return LogSumExp(std::log1p(-lambda), std::log(lambda) + y);
}

double SubsampledLogDensity(double x, double sigma, double lambda) {
  return LogGaussianDensity(x, sigma) + SubsampledLoss(x, sigma, lambda);
}

absl::StatusOr<SubsampledMoments> SubsampledCumulants(double sigma,
                                                      double lambda, double t) {
  absl::StatusOr<Converged> c = Solve(sigma, lambda, t);
  if (!c.ok()) return c.status();
  return c->moments;
}

absl::StatusOr<SubsampledCharacteristic> SubsampledCharacteristic::Create(
    double sigma, double lambda, double t, int refinement) {
  absl::StatusOr<Converged> c = Solve(sigma, lambda, t);
  if (!c.ok()) return c.status();

  // Shrink the range to where the tilted weight is not negligible.
  const std::vector<double>& lw = c->values.log_weight;
  const double peak = *std::max_element(lw.begin(), lw.end());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < lw.size(); ++i) {
    if (lw[i] - peak >= -kNegligibleLog) {
      lo = std::min(lo, c->values.x[i]);
      hi = std::max(hi, c->values.x[i]);
    }
  }
  const Interval full = Support(sigma, t);
  lo = std::max(full.lo, lo - sigma);
  hi = std::min(full.hi, hi + sigma);
  const double fraction = (hi - lo) / (full.hi - full.lo);
  const auto panels = static_cast<std::size_t>(std::max(
      8.0, std::ceil(fraction * static_cast<double>(c->panels) *
                     static_cast<double>(std::max(1, refinement)))));

  // log of the tilted density in ℓ: q(x)·e^{(1+t)ℓ}·dx/dℓ with
  // dx/dℓ = σ²e^ℓ/(λ·e^{(x−1/2)/σ²}).
  const double s2 = sigma * sigma;
  auto log_density = [&](double l) {
    const double log_a = std::log1p(std::expm1(l) / lambda);
    if (std::isnan(log_a) || std::isinf(log_a)) {
      return -std::numeric_limits<double>::infinity();  // ℓ at or below inf ℓ
    }
    const double x = s2 * log_a + 0.5;
    return LogGaussianDensity(x, sigma) + (2.0 + t) * l + std::log(s2) -
           std::log(lambda) - log_a;
  };

  const GaussLegendreRule& rule = PanelRule();
  const LegendreProjection& project = PanelLegendreProjection();
  const double width = (hi - lo) / static_cast<double>(panels);
  std::vector<double> log_h(panels * kPanelOrder);
  std::vector<double> centre(panels);
  std::vector<double> half(panels);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < panels; ++p) {
    const double la = SubsampledLoss(lo + static_cast<double>(p) * width,
                                      sigma, lambda);
    const double lb = SubsampledLoss(lo + static_cast<double>(p + 1) * width,
                                      sigma, lambda);
    centre[p] = 0.5 * (la + lb);
    half[p] = 0.5 * (lb - la);
    for (std::size_t j = 0; j < kPanelOrder; ++j) {
      const double v = log_density(centre[p] + half[p] * rule.nodes[j]);
      log_h[p * kPanelOrder + j] = v;
      top = std::max(top, v);
    }
  }

  SubsampledCharacteristic out;
  out.moments_ = c->moments;
  out.offset_.resize(panels);
  out.half_ = half;
  out.coef_.assign(panels * kPanelOrder, 0.0);
  std::vector<double> h(kPanelOrder);
  double mass = 0;
  for (std::size_t p = 0; p < panels; ++p) {
    out.offset_[p] = centre[p] - c->moments.k1;
    for (std::size_t j = 0; j < kPanelOrder; ++j) {
      h[j] = std::exp(log_h[p * kPanelOrder + j] - top);
    }
    for (std::size_t k = 0; k < kPanelOrder; ++k) {
      double a = 0;
      for (std::size_t j = 0; j < kPanelOrder; ++j) a += project[k][j] * h[j];
      // i^k = 1, i, −1, −i: keep the sign here, the parity at evaluation.
      const double sign = (k % 4 == 2 || k % 4 == 3) ? -1.0 : 1.0;
      out.coef_[p * kPanelOrder + k] = 2.0 * half[p] * a * sign;
    }
    mass += out.coef_[p * kPanelOrder];
  }
  if (!(mass > 0)) {
    return absl::InternalError(absl::StrFormat(
        "tilted density vanished on its own support (sigma=%g, lambda=%g, "
        "t=%g)",
        sigma, lambda, t));
  }
  for (double& v : out.coef_) v /= mass;
  return out;
}

std::complex<double> SubsampledCharacteristic::LogRatio(double s) const {
  if (s == 0) return {0.0, 0.0};
  // φ(−s) = conj φ(s).
  const double a = std::abs(s);
  std::array<double, kPanelOrder> j;
  double re = 0;
  double im = 0;
  for (std::size_t p = 0; p < half_.size(); ++p) {
    SphericalBesselJ(a * half_[p], j);
    const double* c = &coef_[p * kPanelOrder];
    double even = 0;
    double odd = 0;
    for (std::size_t k = 0; k < kPanelOrder; k += 2) {
      even += c[k] * j[k];
      odd += c[k + 1] * j[k + 1];
    }
    const double phase = a * offset_[p];
    const double cs = std::cos(phase);
    const double sn = std::sin(phase);
    re += cs * even - sn * odd;
    im += sn * even + cs * odd;
  }
  const std::complex<double> v =
      std::complex<double>(0.0, a * moments_.k1) +
      std::log(std::complex<double>(re, im));
  return s > 0 ? v : std::conj(v);
}

}  // namespace dpsaddle::internal

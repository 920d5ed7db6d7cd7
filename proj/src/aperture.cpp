// SPDX-License-Identifier: Apache-2.0
//
// sparsedas: delay-and-sum beamforming as a sparse matrix product
// Copyright (C) 2026 The sparsedas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "das/aperture.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>

#include "das/error.hpp"

namespace das {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// Scan resolution used to isolate the first threshold crossing before the
// bounded minimization refines it.
constexpr int kScanSteps = 4096;

// 2^(1-24) * pi/2 + 2^(1-24)/4 < 1e-6 rad.
constexpr int kBrentBits = 24;

double sinc(double u) { return u == 0 ? 1.0 : std::sin(u) / u; }

} // namespace

void ApertureConfig::validate() const {
  require(std::isfinite(f_number) && f_number >= 0,
          "f-number must be nonnegative");
  require(directivity_threshold > 0 && directivity_threshold <= 1,
          "directivity threshold must lie in (0, 1]");
  require(std::abs(receive_steer) < kHalfPi,
          "receive steering must lie in (-pi/2, pi/2)");
}

double directivity(double theta, double width_over_lambda) {
  return std::cos(theta) *
         sinc(std::numbers::pi * width_over_lambda * std::sin(theta));
}

double lambda_min(double c, double fc, double bandwidth) {
  require(c > 0 && fc > 0, "c and fc must be positive");
  require(bandwidth >= 0 && bandwidth < 2 * fc,
          "bandwidth must lie in [0, 2 fc)");
  return c / (fc + bandwidth / 2);
}

double solve_angle_of_view(double width_over_lambda, double d_thresh,
                           double receive_steer) {
  require(width_over_lambda > 0, "W/lambda must be positive");
  require(d_thresh > 0 && d_thresh <= 1,
          "directivity threshold must lie in (0, 1]");
  const double steer = std::abs(receive_steer);
  require(steer < kHalfPi, "receive steering must lie in (-pi/2, pi/2)");

  auto d = [&](double alpha) {
    return directivity(alpha + steer, width_over_lambda);
  };
  const double d0 = d(0);
  if (d0 < d_thresh) {
    throw Error(ErrorCode::threshold_unreachable,
                "threshold unreachable at this steering");
  }
  if (d0 == d_thresh) {
    return 0;
  }

  // Smallest root: the first scan step where D drops below the threshold.
  // D(pi/2) = 0, so a crossing exists before alpha + steer reaches pi/2.
  const double span = kHalfPi - steer;
  double lo = 0;
  double hi = span;
  for (int k = 1; k <= kScanSteps; ++k) {
    const double a = span * k / kScanSteps;
    if (d(a) < d_thresh) {
      lo = span * (k - 1) / kScanSteps;
      hi = a;
      break;
    }
  }

  const auto [alpha, residual] = boost::math::tools::brent_find_minima(
      [&](double a) { return std::abs(d(a) - d_thresh); }, lo, hi,
      kBrentBits);
  (void)residual;
  return alpha;
}

double fnumber_from_angle(double alpha) {
  if (alpha == 0) {
    throw Error(ErrorCode::infinite_fnumber,
                "infinite f-number (zero angle-of-view)");
  }
  require(alpha > 0 && alpha < kHalfPi, "alpha must lie in (0, pi/2)");
  return 1 / (2 * std::tan(alpha));
}

DirectivityFnumber directivity_fnumber(double element_width, double c,
                                       double fc, double bandwidth,
                                       double d_thresh,
                                       double receive_steer) {
  require(element_width > 0, "element width must be positive");
  DirectivityFnumber out{};
  out.lambda_min = lambda_min(c, fc, bandwidth);
  out.alpha = solve_angle_of_view(element_width / out.lambda_min, d_thresh,
                                  receive_steer);
  out.f_number = fnumber_from_angle(out.alpha);
  return out;
}

std::vector<bool> aperture_mask(Point pt, std::span<const double> xs,
                                double f_number) {
  require(std::isfinite(f_number) && f_number >= 0,
          "f-number must be nonnegative");
  std::vector<bool> mask(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mask[i] = in_aperture(pt, xs[i], f_number);
  }
  return mask;
}

} // namespace das

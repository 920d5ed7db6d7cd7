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

#pragma once

// Element directivity and the receive f-number derived from it.

#include <span>
#include <vector>

#include "das/geometry.hpp"

namespace das {

struct ApertureConfig {
  double f_number = 0;                // 0 means full aperture
  double directivity_threshold = 0.71; // -3 dB
  double receive_steer = 0;           // [rad]

  void validate() const;
};

/// Soft-baffle piston element: cos(theta) * sinc(pi (W/lambda) sin(theta)),
/// with the unnormalized sinc(u) = sin(u)/u.
[[nodiscard]] double directivity(double theta, double width_over_lambda);

/// Smallest significant wavelength, c / (fc + B/2).
[[nodiscard]] double lambda_min(double c, double fc, double bandwidth);

/// Half angle-of-view: the smallest alpha in [0, pi/2] with
/// D(alpha + |receive_steer|) == d_thresh, to 1e-6 rad.
/// Throws ErrorCode::threshold_unreachable when D(|receive_steer|) < d_thresh.
[[nodiscard]] double solve_angle_of_view(double width_over_lambda,
                                         double d_thresh,
                                         double receive_steer = 0);

/// f# = 1 / (2 tan(alpha)).
[[nodiscard]] double fnumber_from_angle(double alpha);

struct DirectivityFnumber {
  double lambda_min;    // [m]
  double alpha;         // [rad]
  double f_number;
};

/// Convenience chain used by the CLI: lambda_min -> alpha -> f#.
[[nodiscard]] DirectivityFnumber
directivity_fnumber(double element_width, double c, double fc,
                    double bandwidth, double d_thresh = 0.71,
                    double receive_steer = 0);

/// Element i is active iff |x_s - x_i| <= z_s / (2 f#). f# = 0 keeps all.
[[nodiscard]] inline bool in_aperture(Point pt, double element_x,
                                      double f_number) {
  if (f_number == 0) {
    return true;
  }
  const double dx = pt.x - element_x;
  return (dx < 0 ? -dx : dx) <= pt.z / (2 * f_number);
}

[[nodiscard]] std::vector<bool> aperture_mask(Point pt,
                                              std::span<const double> xs,
                                              double f_number);

} // namespace das

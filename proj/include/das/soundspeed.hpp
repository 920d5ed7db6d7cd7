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

// Average speed-of-sound estimation from the phase dispersion of I/Q samples
// along diffraction hyperbolas.
//
// For a candidate c, the DAS matrix is applied to a block-diagonal operand so
// that row k returns the N_e phase-rotated samples lying on the hyperbola of
// grid point k instead of their sum. The phase-based quality metric
//
//   Qp(c) = mean_k |sum_i h_ki|^2 / Var(unwrapped arg h_k.)
//
// peaks when the hyperbolas match the echoes, i.e. at the true c.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "das/beamformer.hpp"

namespace das {

/// Row k holds the samples of hyperbola k, one column per element.
/// Entries without matrix support are absent.
struct HyperbolaSamples {
  std::size_t rows = 0;
  std::size_t n_elements = 0;
  std::vector<cplx> values;            // row-major rows x n_elements
  std::vector<std::uint8_t> present;   // same layout

  [[nodiscard]] std::span<const cplx> row(std::size_t k) const {
    return std::span(values).subspan(k * n_elements, n_elements);
  }
  [[nodiscard]] std::span<const std::uint8_t> row_present(
      std::size_t k) const {
    return std::span(present).subspan(k * n_elements, n_elements);
  }

  /// Element-wise coherent sum with another transmit of the same grid.
  /// Presence is the union.
  void accumulate(const HyperbolaSamples& other);
};

/// Rows sum (over present entries) to the beamformed values of `frame`.
[[nodiscard]] HyperbolaSamples hyperbola_samples(const DasMatrix& matrix,
                                                 const ChannelData& data,
                                                 std::size_t frame = 0);

/// Floor on the phase variance of a row.
inline constexpr double kQpVarianceFloor = 1e-12;

[[nodiscard]] double qp_metric(const HyperbolaSamples& h);

struct SosOptions {
  double c0 = 1540;         // [m/s] speed the grid depths were chosen for
  double c_lo = 1200;       // [m/s]
  double c_hi = 1700;       // [m/s]
  double tolerance = 1;     // [m/s]
  double scan_step = 25;    // [m/s] coarse bracketing step
  Interpolation interp = Interpolation::linear;
};

struct SosEstimate {
  int c_hat = 0;                                  // [m/s], rounded
  double c_opt = 0;                               // [m/s], unrounded
  std::vector<std::pair<double, double>> qp_curve; // (c, Qp), sorted by c
  double c_lo = 0;
  double c_hi = 0;
  /// c_hat within tolerance of a bound: the true maximum may lie outside.
  bool at_bound = false;
};

/// Qp for one candidate speed. Frame f is beamformed with schemes[f] (or
/// schemes[0] when only one is given); hyperbola samples of all frames are
/// summed before the metric. The grid depths are scaled by c / c0.
[[nodiscard]] double qp_at(double c, const ChannelData& iq,
                           const BeamformGrid& grid,
                           const ArrayGeometry& geom,
                           std::span<const TransmitScheme> schemes,
                           const ApertureConfig& aperture,
                           const SosOptions& options);

/// Maximizes Qp over [c_lo, c_hi]: a coarse scan locates the best bracket,
/// then a bounded Brent search refines it to `tolerance`.
[[nodiscard]] SosEstimate estimate_sos(const ChannelData& iq,
                                       const BeamformGrid& grid,
                                       const ArrayGeometry& geom,
                                       std::span<const TransmitScheme> schemes,
                                       const ApertureConfig& aperture,
                                       const SosOptions& options = {});

} // namespace das

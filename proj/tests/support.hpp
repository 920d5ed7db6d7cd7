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

// Shared fixtures for the unit and acceptance tests.

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "das/beamformer.hpp"
#include "das/simulator.hpp"

namespace das::test {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDeg = kPi / 180;

/// L7-4-like linear array (128 elements, 0.298 mm pitch, 0.245 mm width).
inline ArrayGeometry l74(int n = 128) { return {n, 0.298e-3, 0.245e-3}; }

inline AcquisitionSettings acquisition(double fc, double fs_over_fc,
                                       std::size_t n_s, double frac_bw = 0.65) {
  AcquisitionSettings a;
  a.fc = fc;
  a.fs = fs_over_fc * fc;
  a.bandwidth = frac_bw * fc;
  a.n_samples = n_s;
  return a;
}

inline double rms(std::span<const cplx> v) {
  double s = 0;
  for (auto x : v) {
    s += std::norm(x);
  }
  return std::sqrt(s / static_cast<double>(v.size()));
}

/// Analytic signal through a direct DFT: zero negative frequencies, double
/// positive ones.
inline std::vector<cplx> analytic(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<cplx> X(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t t = 0; t < n; ++t) {
      X[k] += x[t] * std::polar(1.0, -2 * kPi * double(k * t % n) / double(n));
    }
  }
  for (std::size_t k = 1; k < n; ++k) {
    X[k] *= k < (n + 1) / 2 ? 2.0 : (2 * k == n ? 1.0 : 0.0);
  }
  std::vector<cplx> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < n; ++k) {
      out[t] += X[k] * std::polar(1.0, 2 * kPi * double(k * t % n) / double(n));
    }
    out[t] /= double(n);
  }
  return out;
}

/// Speed-of-sound scene: seven wires over diffuse speckle, plane wave at 0.
/// Qp is intensity weighted, so the wires carry the estimate; with only one
/// or two of them the grid-to-wire alignment biases the result.
inline Phantom sos_phantom() {
  Phantom ph;
  for (auto [x, z] : {std::pair{0.0, 15.0}, {0.0, 25.0}, {-8.0, 35.0},
                      {8.0, 35.0}, {-5.0, 20.0}, {5.0, 30.0}, {0.0, 40.0}}) {
    ph.scatterers.push_back({x * 1e-3, z * 1e-3, 8});
  }
  ph.background = DiffuseBackground{6000, -19e-3, 19e-3, 5e-3, 50e-3, {}};
  return ph;
}

inline BeamformGrid sos_grid(std::size_t n = 128) {
  return BeamformGrid::rectilinear(-15e-3, 15e-3, 10e-3, 45e-3, n, n);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("das-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Position of the envelope maximum on a grid.
inline Point argmax(std::span<const cplx> values, const BeamformGrid& grid) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (std::abs(values[k]) > std::abs(values[best])) {
      best = k;
    }
  }
  return grid.points[best];
}

} // namespace das::test

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

// Point-scatterer channel data synthesizer.
//
// Each scatterer returns a Gaussian-enveloped tone burst centered on its
// two-way delay, weighted by its reflectivity and by the receive directivity
// of the element. No attenuation, no multiple scattering. The synthesizer
// shares delays with the geometry module but nothing with the DAS matrix.

#include <cstdint>
#include <optional>
#include <vector>

#include "das/geometry.hpp"
#include "das/signal.hpp"

namespace das {

struct Scatterer {
  double x = 0;            // [m]
  double z = 0;            // [m]
  double reflectivity = 1; // dimensionless
};

struct Disk {
  Point center;
  double radius = 0; // [m]

  [[nodiscard]] bool contains(Point p) const {
    const double dx = p.x - center.x;
    const double dz = p.z - center.z;
    return dx * dx + dz * dz <= radius * radius;
  }
};

/// Uniformly random diffuse scatterers in a rectangle, with Gaussian
/// reflectivities. Scatterers falling inside an anechoic disk are dropped.
struct DiffuseBackground {
  std::size_t count = 0;
  double x_min = 0, x_max = 0; // [m]
  double z_min = 0, z_max = 0; // [m]
  std::vector<Disk> anechoic;
};

struct Phantom {
  std::vector<Scatterer> scatterers;
  std::optional<DiffuseBackground> background;

  void validate() const;
};

struct AcquisitionSettings {
  double fs = 0;        // [Hz]
  double fc = 0;        // [Hz]
  double bandwidth = 0; // [Hz], -6 dB full width of the pulse spectrum
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  /// Selects an independent noise realization for the same scatterers,
  /// e.g. one per transmit.
  std::uint64_t noise_stream = 0;
  /// Additive white Gaussian noise, relative to the RMS of the noise-free
  /// channel data of each frame.
  std::optional<double> snr_db;
};

/// Deterministic list of all scatterers (explicit plus drawn background).
[[nodiscard]] std::vector<Scatterer> realize_scatterers(const Phantom& phantom,
                                                        std::uint64_t seed);

/// Pulse envelope exp(-a t^2) whose spectrum falls to -6 dB at +-B/2.
[[nodiscard]] double pulse_envelope_rate(double bandwidth);

/// Half the support of the truncated pulse envelope, in seconds.
[[nodiscard]] double pulse_half_duration(double bandwidth);

[[nodiscard]] ChannelData synth_channel_data(const Phantom& phantom,
                                             const ArrayGeometry& geom,
                                             const TransmitScheme& scheme,
                                             const Medium& medium,
                                             const AcquisitionSettings& acq);

/// Direct baseband synthesis, matching iq_demodulate(synth_channel_data(...))
/// away from filter transients.
[[nodiscard]] ChannelData synth_iq(const Phantom& phantom,
                                   const ArrayGeometry& geom,
                                   const TransmitScheme& scheme,
                                   const Medium& medium,
                                   const AcquisitionSettings& acq);

} // namespace das

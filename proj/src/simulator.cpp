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

#include "das/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "das/aperture.hpp"
#include "das/error.hpp"

namespace das {

namespace {

// Envelope truncation level.
constexpr double kEnvelopeFloor = 1e-7;

// Separates the noise stream from the background-scatterer stream.
constexpr std::uint64_t kNoiseStream = 0x9e3779b97f4a7c15ULL;

ChannelData synthesize(const Phantom& phantom, const ArrayGeometry& geom,
                       const TransmitScheme& scheme, const Medium& medium,
                       const AcquisitionSettings& acq, bool baseband) {
  phantom.validate();
  geom.validate();
  scheme.validate();
  medium.validate();
  require(acq.n_samples >= 2, "need at least 2 samples");
  require(acq.fc > 0 && acq.fs >= 4 * acq.fc,
          "sampling frequency must be at least 4 fc");
  require(acq.bandwidth > 0 && acq.bandwidth < 2 * acq.fc,
          "bandwidth must lie in (0, 2 fc)");

  const auto n_e = static_cast<std::size_t>(geom.num_elements);
  auto out = ChannelData::zeros(acq.n_samples, n_e, 1,
                                baseband ? SampleKind::iq : SampleKind::rf,
                                acq.fs, acq.fc, acq.bandwidth);

  const auto xs = element_x(geom);
  const double width_over_lambda =
      geom.element_width * acq.fc / medium.speed_of_sound;
  const double rate = pulse_envelope_rate(acq.bandwidth);
  const double half = pulse_half_duration(acq.bandwidth);
  const double omega = 2 * std::numbers::pi * acq.fc;
  const auto last = static_cast<double>(acq.n_samples - 1);

  for (const auto& s : realize_scatterers(phantom, acq.seed)) {
    if (s.reflectivity == 0) {
      continue;
    }
    const Point pt{s.x, s.z};
    for (std::size_t e = 0; e < n_e; ++e) {
      const double tau = travel_time(pt, xs[e], scheme, geom, medium);
      const double d_rx = receive_distance(pt, xs[e]);
      const double angle = std::asin((s.x - xs[e]) / d_rx);
      const double amp = s.reflectivity * directivity(angle, width_over_lambda);

      const double k_lo = std::max(0.0, std::ceil((tau - half) * acq.fs));
      const double k_hi = std::min(last, std::floor((tau + half) * acq.fs));
      if (k_lo > k_hi) {
        continue;
      }
      auto col = out.column(e);
      const cplx rotor = std::polar(amp, -omega * tau);
      for (auto k = static_cast<std::size_t>(k_lo);
           k <= static_cast<std::size_t>(k_hi); ++k) {
        const double dt = static_cast<double>(k) / acq.fs - tau;
        const double g = std::exp(-rate * dt * dt);
        if (baseband) {
          col[k] += g * rotor;
        } else {
          col[k] += amp * g * std::cos(omega * dt);
        }
      }
    }
  }

  if (acq.snr_db) {
    double power = 0;
    for (const auto& v : out.samples) {
      power += std::norm(v);
    }
    const double rms = std::sqrt(power / static_cast<double>(out.samples.size()));
    const double sigma = rms * std::pow(10.0, -*acq.snr_db / 20);
    std::mt19937_64 rng(acq.seed ^ (kNoiseStream + acq.noise_stream));
    if (baseband) {
      std::normal_distribution<double> noise(0.0, sigma / std::numbers::sqrt2);
      for (auto& v : out.samples) {
        v += cplx{noise(rng), noise(rng)};
      }
    } else {
      std::normal_distribution<double> noise(0.0, sigma);
      for (auto& v : out.samples) {
        v += noise(rng);
      }
    }
  }
  return out;
}

} // namespace

void Phantom::validate() const {
  for (const auto& s : scatterers) {
    require(std::isfinite(s.x) && std::isfinite(s.z) && s.z > 0,
            "scatterers must lie below the array (z > 0)");
    require(std::isfinite(s.reflectivity) && s.reflectivity >= 0,
            "reflectivity must be finite and nonnegative");
  }
  if (background) {
    require(background->x_min < background->x_max &&
                background->z_min < background->z_max &&
                background->z_min > 0,
            "background rectangle must be nonempty and below the array");
  }
}

std::vector<Scatterer> realize_scatterers(const Phantom& phantom,
                                          std::uint64_t seed) {
  std::vector<Scatterer> out = phantom.scatterers;
  if (!phantom.background) {
    return out;
  }
  const auto& bg = *phantom.background;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(bg.x_min, bg.x_max);
  std::uniform_real_distribution<double> uz(bg.z_min, bg.z_max);
  std::normal_distribution<double> amp(0.0, 1.0);
  out.reserve(out.size() + bg.count);
  for (std::size_t k = 0; k < bg.count; ++k) {
    const Point p{ux(rng), uz(rng)};
    const double a = std::abs(amp(rng));
    const bool hollow = std::any_of(bg.anechoic.begin(), bg.anechoic.end(),
                                    [&](const Disk& d) { return d.contains(p); });
    if (!hollow) {
      out.push_back({p.x, p.z, a});
    }
  }
  return out;
}

double pulse_envelope_rate(double bandwidth) {
  require(bandwidth > 0, "bandwidth must be positive");
  return std::numbers::pi * std::numbers::pi * bandwidth * bandwidth /
         (4 * std::numbers::ln2);
}

double pulse_half_duration(double bandwidth) {
  return std::sqrt(-std::log(kEnvelopeFloor) / pulse_envelope_rate(bandwidth));
}

ChannelData synth_channel_data(const Phantom& phantom,
                               const ArrayGeometry& geom,
                               const TransmitScheme& scheme,
                               const Medium& medium,
                               const AcquisitionSettings& acq) {
  return synthesize(phantom, geom, scheme, medium, acq, false);
}

ChannelData synth_iq(const Phantom& phantom, const ArrayGeometry& geom,
                     const TransmitScheme& scheme, const Medium& medium,
                     const AcquisitionSettings& acq) {
  return synthesize(phantom, geom, scheme, medium, acq, true);
}

} // namespace das

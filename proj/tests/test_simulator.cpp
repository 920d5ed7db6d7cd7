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

#include <doctest.h>

#include "das/error.hpp"
#include "das/simulator.hpp"
#include "support.hpp"

using namespace das;
using das::test::kDeg;
using das::test::kPi;
using doctest::Approx;

namespace {

const Medium kWater{1540};

Phantom three() {
  Phantom ph;
  ph.scatterers = {{-3e-3, 12e-3, 1}, {0, 18e-3, 0.7}, {4e-3, 25e-3, 1.3}};
  return ph;
}

} // namespace

TEST_CASE("empty phantom gives silent channels") {
  const auto d = synth_channel_data({}, test::l74(16), TransmitScheme::plane(0),
                                    kWater, test::acquisition(5e6, 4, 256));
  CHECK(d.kind == SampleKind::rf);
  CHECK(d.samples == std::vector<cplx>(256 * 16));
}

TEST_CASE("channel data is linear in the reflectivities") {
  const auto geom = test::l74(16);
  const auto acq = test::acquisition(5e6, 4, 800);
  auto ph = three();
  const auto a = synth_channel_data(ph, geom, TransmitScheme::plane(0.1),
                                    kWater, acq);
  for (auto& s : ph.scatterers) {
    s.reflectivity *= 2;
  }
  const auto b = synth_channel_data(ph, geom, TransmitScheme::plane(0.1),
                                    kWater, acq);
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    REQUIRE(b.samples[k] == 2.0 * a.samples[k]);
  }
}

TEST_CASE("per-element echoes peak at the travel time") {
  const auto geom = test::l74(32);
  const auto acq = test::acquisition(5e6, 4, 1000);
  Phantom ph;
  ph.scatterers = {{1e-3, 15e-3, 1}};
  for (const auto& scheme :
       {TransmitScheme::plane(0), TransmitScheme::plane(10 * kDeg, 2e-6),
        TransmitScheme::circular(0, 60 * kDeg, geom.aperture_length())}) {
    const auto iq = synth_iq(ph, geom, scheme, kWater, acq);
    const auto xs = element_x(geom);
    for (std::size_t e = 0; e < xs.size(); ++e) {
      const auto col = iq.column(e);
      std::size_t best = 0;
      for (std::size_t k = 1; k < col.size(); ++k) {
        if (std::abs(col[k]) > std::abs(col[best])) {
          best = k;
        }
      }
      const double tau = travel_time({1e-3, 15e-3}, xs[e], scheme, geom, kWater);
      CHECK(std::abs(double(best) - tau * acq.fs) <= 1.0);
      // Undoing the carrier rotation leaves a positive real peak.
      const cplx rotated = col[best] * std::polar(1.0, 2 * kPi * acq.fc * tau);
      CHECK(std::abs(std::arg(rotated)) < 1e-9);
    }
  }
}

TEST_CASE("direct baseband synthesis matches demodulated RF") {
  const auto geom = test::l74(16);
  const auto acq = test::acquisition(5e6, 4, 900);
  const auto scheme = TransmitScheme::plane(5 * kDeg);
  const auto rf = synth_channel_data(three(), geom, scheme, kWater, acq);
  const auto iq = synth_iq(three(), geom, scheme, kWater, acq);
  const auto demod = iq_demodulate(rf);
  const std::size_t lo = acq.n_samples / 10, hi = acq.n_samples - lo;
  double err = 0, ref = 0;
  for (std::size_t e = 0; e < 16; ++e) {
    for (std::size_t k = lo; k < hi; ++k) {
      err += std::norm(iq.at(k, e) - demod.at(k, e));
      ref += std::norm(iq.at(k, e));
    }
  }
  CHECK(std::sqrt(err / ref) < 0.01);
}

TEST_CASE("background scatterers") {
  Phantom ph;
  ph.background = DiffuseBackground{2000, -5e-3, 5e-3, 10e-3, 20e-3,
                                    {{{0, 15e-3}, 2e-3}}};
  const auto a = realize_scatterers(ph, 11);
  const auto b = realize_scatterers(ph, 11);
  const auto c = realize_scatterers(ph, 12);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].x == b[k].x);
    CHECK(a[k].reflectivity == b[k].reflectivity);
  }
  CHECK(a.front().x != c.front().x);
  CHECK(a.size() < 2000);
  // Hole area is ~12.6% of the rectangle.
  CHECK(double(a.size()) / 2000 == Approx(1 - kPi * 4 / 100).epsilon(0.05));
  for (const auto& s : a) {
    CHECK_FALSE(ph.background->anechoic[0].contains({s.x, s.z}));
    CHECK(s.reflectivity >= 0);
    CHECK(s.x >= -5e-3);
    CHECK(s.z <= 20e-3);
  }
}

TEST_CASE("additive noise") {
  const auto geom = test::l74(16);
  auto acq = test::acquisition(5e6, 4, 800);
  const auto clean = synth_iq(three(), geom, TransmitScheme::plane(0), kWater,
                              acq);
  acq.snr_db = 10;
  const auto n1 = synth_iq(three(), geom, TransmitScheme::plane(0), kWater, acq);
  const auto n1b = synth_iq(three(), geom, TransmitScheme::plane(0), kWater, acq);
  acq.noise_stream = 1;
  const auto n2 = synth_iq(three(), geom, TransmitScheme::plane(0), kWater, acq);
  CHECK(n1.samples == n1b.samples);
  CHECK(n1.samples != n2.samples);

  std::vector<cplx> noise(clean.samples.size());
  for (std::size_t k = 0; k < noise.size(); ++k) {
    noise[k] = n1.samples[k] - clean.samples[k];
  }
  const double snr = 20 * std::log10(test::rms(clean.samples) / test::rms(noise));
  CHECK(snr == Approx(10).epsilon(0.03));
}

TEST_CASE("acquisition settings are validated") {
  auto acq = test::acquisition(5e6, 3, 800);
  CHECK_THROWS_AS((void)synth_channel_data(three(), test::l74(16),
                                     TransmitScheme::plane(0), kWater, acq),
                  Error);
  Phantom bad;
  bad.scatterers = {{0, -1e-3, 1}};
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK(pulse_half_duration(3e6) > 0);
  // exp(-a t^2) at the -6 dB bandwidth edge: spectrum exp(-pi^2 f^2 / a)
  const double a = pulse_envelope_rate(3e6);
  CHECK(std::exp(-kPi * kPi * 1.5e6 * 1.5e6 / a) == Approx(0.5));
}

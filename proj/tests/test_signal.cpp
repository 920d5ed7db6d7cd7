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

#include <array>

#include "das/error.hpp"
#include "das/signal.hpp"
#include "support.hpp"

using namespace das;
using das::test::kPi;
using doctest::Approx;

namespace {

cplx biquad_response(const std::vector<Biquad>& sections, double w) {
  const cplx z1 = std::polar(1.0, -w);
  const cplx z2 = z1 * z1;
  cplx h = 1;
  for (const auto& s : sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return h;
}

ChannelData tone(std::size_t n, double fc, double fs, double phase) {
  auto d = ChannelData::zeros(n, 1, 1, SampleKind::rf, fs, fc, 0.6 * fc);
  for (std::size_t k = 0; k < n; ++k) {
    d.samples[k] = std::cos(2 * kPi * fc * static_cast<double>(k) / fs + phase);
  }
  return d;
}

} // namespace

TEST_CASE("Butterworth low-pass matches the reference design") {
  // scipy.signal.butter(5, 0.5)
  const std::array<double, 6> b{0.05278640450004204, 0.2639320225002102,
                                0.5278640450004204,  0.5278640450004204,
                                0.2639320225002102,  0.05278640450004204};
  const std::array<double, 6> a{1.0, 0.0, 0.6334368540005048,
                                0.0, 0.05572809000084120, 0.0};
  const auto sections = butterworth_lowpass(5, 0.5);
  CHECK(sections.size() == 3);
  for (double w = 0; w < kPi; w += kPi / 37) {
    cplx num = 0, den = 0;
    for (std::size_t k = 0; k < 6; ++k) {
      num += b[k] * std::polar(1.0, -w * double(k));
      den += a[k] * std::polar(1.0, -w * double(k));
    }
    const cplx ref = num / den;
    CHECK(std::abs(biquad_response(sections, w) - ref) < 1e-12);
  }
  CHECK(std::abs(biquad_response(sections, kPi / 2)) ==
        Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS((void)butterworth_lowpass(0, 0.5), Error);
  CHECK_THROWS_AS((void)butterworth_lowpass(5, 1.0), Error);
}

TEST_CASE("zero-phase filtering matches the reference implementation") {
  // scipy.signal.filtfilt(b, a, x, padtype="odd", padlen=15)
  const std::array<double, 48> expected{
      0.49916223755978778,  0.1177125642563146,   0.43425334644343028,
      1.077165608818667,    1.2869056094095526,   1.1293463652195075,
      1.1652254230806922,   1.3257847572935759,   1.1472114877580242,
      0.76392082341142431,  0.60271020420568922,  0.50632976801489504,
      0.16433338789741861,  -0.14870948094291664, -0.14870049548365047,
      -0.12506743957341063, -0.24604635303574859, -0.16405750564971608,
      0.20017693699575562,  0.46803848961272904,  0.62976036665514301,
      1.0218787357789474,   1.514044095664044,    1.7467523661136424,
      1.8863789258960213,   2.1974556711682389,   2.4034592224414166,
      2.2833137606361493,   2.1590214960274059,   2.1742584967101233,
      1.9920489148528913,   1.592449208482495,    1.3666062981614637,
      1.2898938896265804,   1.0345890377564289,   0.76361892431259804,
      0.81114065870915686,  0.96487839487639493,  0.96219595411562975,
      1.0820140197996384,   1.5058057749151272,   1.8843905322445309,
      2.0725740142339637,   2.3906011847254782,   2.8630181228223517,
      3.1334324108341338,   3.1778208739108726,   3.2430319419311648};
  std::vector<cplx> x(48), xi(48);
  for (std::size_t k = 0; k < 48; ++k) {
    const double t = double(k);
    x[k] = std::sin(0.3 * t) + 0.5 * std::cos(1.7 * t) + 0.05 * t;
    xi[k] = cplx{0.0, x[k].real()};
  }
  const auto sections = butterworth_lowpass(5, 0.5);
  filtfilt(sections, x);
  filtfilt(sections, xi);
  for (std::size_t k = 0; k < 48; ++k) {
    CHECK(x[k].real() == Approx(expected[k]).epsilon(1e-11));
    CHECK(x[k].imag() == 0);
    CHECK(xi[k].imag() == Approx(expected[k]).epsilon(1e-11));
  }
}

TEST_CASE("I/Q demodulation of a pure carrier") {
  const std::size_t n = 1000;
  const double fc = 5e6, fs = 4 * fc;
  const auto c = iq_demodulate(tone(n, fc, fs, 0));
  const auto s = iq_demodulate(tone(n, fc, fs, -kPi / 2)); // sin
  CHECK(c.kind == SampleKind::iq);
  for (std::size_t k = n / 10; k < n - n / 10; ++k) {
    CHECK(std::abs(c.samples[k] - cplx{1, 0}) < 0.01);
    CHECK(std::abs(s.samples[k] - cplx{0, -1}) < 0.01);
  }
  CHECK_THROWS_AS((void)iq_demodulate(c), Error);
}

TEST_CASE("I/Q magnitude follows the analytic-signal envelope") {
  const std::size_t n = 400;
  const double fc = 5e6, fs = 4 * fc;
  auto rf = ChannelData::zeros(n, 2, 1, SampleKind::rf, fs, fc, 0.6 * fc);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = double(k) / fs;
    const double u = (double(k) - 200.0) / 60.0;
    const double a = 0.3 + std::exp(-u * u);
    x[k] = a * std::cos(2 * kPi * fc * t + 0.7);
    rf.samples[k] = x[k];
    rf.samples[n + k] = 2 * x[k];
  }
  const auto iq = iq_demodulate(rf);
  const auto ref = test::analytic(x);
  for (std::size_t k = n / 10; k < n - n / 10; ++k) {
    CHECK(std::abs(iq.samples[k]) == Approx(std::abs(ref[k])).epsilon(0.01));
    CHECK(std::abs(iq.samples[n + k]) ==
          Approx(2 * std::abs(ref[k])).epsilon(0.01));
  }
}

TEST_CASE("envelope") {
  const std::vector<cplx> v{{3, 4}, {0, 0}, {-1, 0}};
  CHECK(envelope(v) == std::vector<double>{5, 0, 1});
  for (double phi : {0.3, -2.0, 3.1}) {
    const auto r = std::polar(1.0, phi);
    CHECK(envelope(std::vector<cplx>{r * v[0]})[0] == Approx(5));
  }
}

TEST_CASE("log compression") {
  const auto a = log_compress(std::vector<double>{1, 0.1}, 40);
  CHECK(a[0] == 1);
  CHECK(a[1] == Approx(0.5));
  const auto b = log_compress(std::vector<double>{1, 0.01, 1e-9, 0}, 40);
  CHECK(b == std::vector<double>{1, 0, 0, 0});
  CHECK(log_compress(std::vector<double>{0, 0}, 40) ==
        std::vector<double>{0, 0});
  CHECK_THROWS_AS((void)log_compress(std::vector<double>{1}, 0), Error);
}

TEST_CASE("channel data validation") {
  auto d = ChannelData::zeros(16, 4, 2, SampleKind::iq, 20e6, 5e6, 3e6);
  CHECK_NOTHROW(d.validate());
  CHECK(d.frame(1).size() == 64);
  d.at(3, 2, 1) = 7;
  CHECK(d.column(2, 1)[3] == cplx{7, 0});
  CHECK(d.samples[64 + 2 * 16 + 3] == cplx{7, 0});
  d.samples.pop_back();
  CHECK_THROWS_AS(d.validate(), Error);
}

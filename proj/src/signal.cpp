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

#include "das/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "das/error.hpp"

namespace das {

ChannelData ChannelData::zeros(std::size_t n_samples, std::size_t n_elements,
                               std::size_t n_frames, SampleKind kind,
                               double fs, double fc, double bandwidth) {
  ChannelData d;
  d.n_samples = n_samples;
  d.n_elements = n_elements;
  d.n_frames = n_frames;
  d.kind = kind;
  d.fs = fs;
  d.fc = fc;
  d.bandwidth = bandwidth;
  d.samples.assign(n_samples * n_elements * n_frames, cplx{});
  return d;
}

void ChannelData::validate() const {
  require(n_samples >= 2, "channel data needs at least 2 samples");
  require(n_elements >= 1 && n_frames >= 1, "empty channel data");
  require(samples.size() == n_samples * n_elements * n_frames,
          "sample buffer does not match the declared shape",
          ErrorCode::shape_mismatch);
  require(std::isfinite(fs) && fs > 0, "fs must be positive");
  require(std::isfinite(fc) && fc > 0, "fc must be positive");
  require(bandwidth > 0 && bandwidth < 2 * fc,
          "bandwidth must lie in (0, 2 fc)");
}

std::vector<Biquad> butterworth_lowpass(int order, double cutoff) {
  require(order >= 1, "filter order must be positive");
  require(cutoff > 0 && cutoff < 1, "cutoff must lie in (0, 1)");

  // Analog prototype pre-warped for a bilinear transform with fs = 2.
  const double warped = 4 * std::tan(std::numbers::pi * cutoff / 2);
  std::vector<Biquad> sections;

  for (int k = 0; k < order / 2; ++k) {
    const double angle =
        std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    const cplx s = warped * std::polar(1.0, angle);
    const cplx z = (4.0 + s) / (4.0 - s);
    // Conjugate pair -> z^2 - 2 Re(z) z + |z|^2, zeros at z = -1 (double).
    const double a1 = -2 * z.real();
    const double a2 = std::norm(z);
    const double g = (1 + a1 + a2) / 4;
    sections.push_back({g, 2 * g, g, a1, a2});
  }
  if (order % 2 == 1) {
    const double s = -warped;
    const double p = (4 + s) / (4 - s);
    const double a1 = -p;
    const double g = (1 + a1) / 2;
    sections.push_back({g, g, 0, a1, 0});
  }
  return sections;
}

namespace {

// Direct form II transposed over one section, in place.
void run_section(const Biquad& q, std::span<cplx> x, cplx z1, cplx z2) {
  for (auto& v : x) {
    const cplx in = v;
    const cplx out = q.b0 * in + z1;
    z1 = q.b1 * in - q.a1 * out + z2;
    z2 = q.b2 * in - q.a2 * out;
    v = out;
  }
}

// Cascade pass with steady-state initial conditions scaled to x[0].
void run_cascade(std::span<const Biquad> sections, std::span<cplx> x) {
  if (x.empty()) {
    return;
  }
  cplx level = x.front();
  for (const auto& q : sections) {
    const double gain = (q.b0 + q.b1 + q.b2) / (1 + q.a1 + q.a2);
    const double z2 = q.b2 - q.a2 * gain;
    const double z1 = q.b1 - q.a1 * gain + z2;
    run_section(q, x, z1 * level, z2 * level);
    level *= gain;
  }
}

} // namespace

void filtfilt(std::span<const Biquad> sections, std::span<cplx> signal) {
  const std::size_t n = signal.size();
  if (n < 2 || sections.empty()) {
    return;
  }
  std::size_t order = 0;
  for (const auto& q : sections) {
    order += (q.a2 != 0 || q.b2 != 0) ? 2 : 1;
  }
  const std::size_t pad = std::min(3 * order, n - 1);

  std::vector<cplx> ext(n + 2 * pad);
  const cplx first = signal.front();
  const cplx last = signal.back();
  for (std::size_t k = 0; k < pad; ++k) {
    ext[k] = 2.0 * first - signal[pad - k];
    ext[pad + n + k] = 2.0 * last - signal[n - 2 - k];
  }
  std::copy(signal.begin(), signal.end(), ext.begin() + pad);

  run_cascade(sections, ext);
  std::reverse(ext.begin(), ext.end());
  run_cascade(sections, ext);
  std::reverse(ext.begin(), ext.end());

  std::copy(ext.begin() + pad, ext.begin() + pad + n, signal.begin());
}

ChannelData iq_demodulate(const ChannelData& rf) {
  rf.validate();
  require(rf.kind == SampleKind::rf, "I/Q demodulation expects RF input");
  require(rf.fc < rf.fs / 2, "fc must be below Nyquist (fs / 2)");

  const auto sections = butterworth_lowpass(5, 0.5);
  ChannelData iq = rf;
  iq.kind = SampleKind::iq;

  std::vector<cplx> mixer(rf.n_samples);
  for (std::size_t k = 0; k < rf.n_samples; ++k) {
    const double t = static_cast<double>(k) / rf.fs;
    mixer[k] = std::polar(1.0, -2 * std::numbers::pi * rf.fc * t);
  }
  for (std::size_t f = 0; f < rf.n_frames; ++f) {
    for (std::size_t e = 0; e < rf.n_elements; ++e) {
      auto col = iq.column(e, f);
      for (std::size_t k = 0; k < col.size(); ++k) {
        col[k] = col[k].real() * mixer[k];
      }
      filtfilt(sections, col);
      for (auto& v : col) {
        v *= 2.0;
      }
    }
  }
  return iq;
}

std::vector<double> envelope(std::span<const cplx> values) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [](cplx v) { return std::abs(v); });
  return out;
}

std::vector<double> log_compress(std::span<const double> env,
                                 double dynamic_range_db) {
  require(dynamic_range_db > 0, "dynamic range must be positive");
  std::vector<double> out(env.size(), 0.0);
  if (env.empty()) {
    return out;
  }
  const double peak = *std::max_element(env.begin(), env.end());
  if (!(peak > 0)) {
    return out;
  }
  for (std::size_t k = 0; k < env.size(); ++k) {
    if (env[k] <= 0) {
      continue;
    }
    const double db = 20 * std::log10(env[k] / peak);
    out[k] = std::clamp(1 + db / dynamic_range_db, 0.0, 1.0);
  }
  return out;
}

} // namespace das

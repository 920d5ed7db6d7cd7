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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace das {

using cplx = std::complex<double>;

enum class SampleKind { rf, iq };

/// Raw per-element signals. Storage is frame-major, then element-major
/// blocks of n_samples fast-time samples (element 1's samples first). RF data
/// is stored with zero imaginary parts.
struct ChannelData {
  std::size_t n_samples = 0;
  std::size_t n_elements = 0;
  std::size_t n_frames = 1;
  SampleKind kind = SampleKind::rf;
  double fs = 0;        // [Hz] sampling frequency
  double fc = 0;        // [Hz] center frequency
  double bandwidth = 0; // [Hz] full width
  std::vector<cplx> samples;

  static ChannelData zeros(std::size_t n_samples, std::size_t n_elements,
                           std::size_t n_frames, SampleKind kind, double fs,
                           double fc, double bandwidth);

  [[nodiscard]] std::size_t frame_size() const {
    return n_samples * n_elements;
  }
  [[nodiscard]] std::span<const cplx> frame(std::size_t f) const {
    return std::span(samples).subspan(f * frame_size(), frame_size());
  }
  [[nodiscard]] std::span<cplx> frame(std::size_t f) {
    return std::span(samples).subspan(f * frame_size(), frame_size());
  }
  [[nodiscard]] std::span<cplx> column(std::size_t element,
                                       std::size_t f = 0) {
    return frame(f).subspan(element * n_samples, n_samples);
  }
  [[nodiscard]] std::span<const cplx> column(std::size_t element,
                                             std::size_t f = 0) const {
    return frame(f).subspan(element * n_samples, n_samples);
  }
  cplx& at(std::size_t sample, std::size_t element, std::size_t f = 0) {
    return samples[f * frame_size() + element * n_samples + sample];
  }
  [[nodiscard]] const cplx& at(std::size_t sample, std::size_t element,
                               std::size_t f = 0) const {
    return samples[f * frame_size() + element * n_samples + sample];
  }

  void validate() const;
};

/// Second-order section in direct form II transposed, a0 normalized to 1.
/// A first-order section has b2 == a2 == 0.
struct Biquad {
  double b0, b1, b2;
  double a1, a2;
};

/// Digital Butterworth low-pass designed by the bilinear transform.
/// `cutoff` is normalized to Nyquist (0 < cutoff < 1). DC gain is 1.
[[nodiscard]] std::vector<Biquad> butterworth_lowpass(int order,
                                                      double cutoff);

/// Zero-phase forward-backward filtering with odd-reflection padding of
/// 3 * order samples and steady-state initial conditions.
void filtfilt(std::span<const Biquad> sections, std::span<cplx> signal);

/// Downmix each column by exp(-i 2 pi fc t), low-pass at half-Nyquist
/// (5th-order Butterworth, zero phase) and scale by 2.
[[nodiscard]] ChannelData iq_demodulate(const ChannelData& rf);

[[nodiscard]] std::vector<double> envelope(std::span<const cplx> values);

/// Map an envelope to [0, 1]: 1 + 20 log10(env / max) / dynamic_range,
/// clamped. An all-zero envelope maps to all zeros.
[[nodiscard]] std::vector<double> log_compress(std::span<const double> env,
                                               double dynamic_range_db);

} // namespace das

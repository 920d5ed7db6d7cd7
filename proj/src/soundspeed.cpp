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

#include "das/soundspeed.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <map>
#include <numbers>

#include "das/error.hpp"

namespace das {

namespace {

// Wrap to (-pi, pi].
double wrap(double a) {
  constexpr double two_pi = 2 * std::numbers::pi;
  a = std::remainder(a, two_pi);
  return a <= -std::numbers::pi ? a + two_pi : a;
}

} // namespace

void HyperbolaSamples::accumulate(const HyperbolaSamples& other) {
  require(other.rows == rows && other.n_elements == n_elements,
          "hyperbola samples of different shapes", ErrorCode::shape_mismatch);
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] += other.values[k];
    present[k] = static_cast<std::uint8_t>(present[k] | other.present[k]);
  }
}

HyperbolaSamples hyperbola_samples(const DasMatrix& matrix,
                                   const ChannelData& data,
                                   std::size_t frame) {
  require(data.kind == SampleKind::iq,
          "hyperbola samples need I/Q data (RF phases are meaningless)");
  const auto& prov = matrix.provenance();
  MatrixProvenance seen = prov;
  seen.signal = SignalLayout::of(data);
  seen.geom.num_elements = static_cast<int>(data.n_elements);
  if (const auto d = prov.diff(seen); !d.empty()) {
    throw Error(ErrorCode::shape_mismatch,
                "channel data does not match the DAS matrix: " + d);
  }
  require(frame < data.n_frames, "frame index out of range");

  const std::size_t n_s = data.n_samples;
  const std::size_t n_e = data.n_elements;
  HyperbolaSamples h;
  h.rows = matrix.rows();
  h.n_elements = n_e;
  h.values.assign(h.rows * n_e, cplx{});
  h.present.assign(h.rows * n_e, 0);

  const auto x = data.frame(frame);
  const auto rp = matrix.row_ptr();
  const auto ci = matrix.col_index();
  const auto w = matrix.values();
  for (std::size_t r = 0; r < h.rows; ++r) {
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) {
      const std::size_t e = ci[k] / n_s;
      h.values[r * n_e + e] += w[k] * x[ci[k]];
      h.present[r * n_e + e] = 1;
    }
  }
  // A zero sample carries no phase.
  for (std::size_t k = 0; k < h.values.size(); ++k) {
    if (h.values[k] == cplx{}) {
      h.present[k] = 0;
    }
  }
  return h;
}

double qp_metric(const HyperbolaSamples& h) {
  double total = 0;
  std::size_t eligible = 0;
  std::vector<double> phase;
  phase.reserve(h.n_elements);

  for (std::size_t r = 0; r < h.rows; ++r) {
    const auto vals = h.row(r);
    const auto mask = h.row_present(r);
    phase.clear();
    cplx sum{};
    double prev = 0;
    // Absent entries are skipped, so neighbors over the aperture stay
    // adjacent in the unwrapped sequence.
    for (std::size_t e = 0; e < h.n_elements; ++e) {
      if (!mask[e]) {
        continue;
      }
      sum += vals[e];
      const double a = std::arg(vals[e]);
      phase.push_back(phase.empty() ? a : phase.back() + wrap(a - prev));
      prev = a;
    }
    if (phase.size() < 2) {
      continue;
    }
    const double n = static_cast<double>(phase.size());
    double mean = 0;
    for (double p : phase) {
      mean += p;
    }
    mean /= n;
    double ss = 0;
    for (double p : phase) {
      ss += (p - mean) * (p - mean);
    }
    const double var = ss / (n - 1);
    total += std::norm(sum) / std::max(var, kQpVarianceFloor);
    ++eligible;
  }
  if (eligible == 0) {
    throw Error(ErrorCode::insufficient_aperture,
                "insufficient aperture for Qp");
  }
  return total / static_cast<double>(eligible);
}

double qp_at(double c, const ChannelData& iq, const BeamformGrid& grid,
             const ArrayGeometry& geom, std::span<const TransmitScheme> schemes,
             const ApertureConfig& aperture, const SosOptions& options) {
  require(!schemes.empty() &&
              (schemes.size() == 1 || schemes.size() == iq.n_frames),
          "need one transmit scheme, or one per frame");
  require(options.c0 > 0, "nominal speed of sound must be positive");

  const auto scaled = grid.scaled_depth(c / options.c0);
  const Medium medium{c};
  const auto layout = SignalLayout::of(iq);

  HyperbolaSamples sum;
  if (schemes.size() == 1) {
    const auto m = build_das_matrix(scaled, geom, schemes[0], medium, layout,
                                    aperture, options.interp);
    for (std::size_t f = 0; f < iq.n_frames; ++f) {
      auto h = hyperbola_samples(m, iq, f);
      if (f == 0) {
        sum = std::move(h);
      } else {
        sum.accumulate(h);
      }
    }
  } else {
    for (std::size_t f = 0; f < iq.n_frames; ++f) {
      const auto m = build_das_matrix(scaled, geom, schemes[f], medium,
                                      layout, aperture, options.interp);
      auto h = hyperbola_samples(m, iq, f);
      if (f == 0) {
        sum = std::move(h);
      } else {
        sum.accumulate(h);
      }
    }
  }
  return qp_metric(sum);
}

SosEstimate estimate_sos(const ChannelData& iq, const BeamformGrid& grid,
                         const ArrayGeometry& geom,
                         std::span<const TransmitScheme> schemes,
                         const ApertureConfig& aperture,
                         const SosOptions& options) {
  require(options.c_lo > 0 && options.c_lo < options.c_hi,
          "speed-of-sound bounds must satisfy 0 < c_lo < c_hi");
  require(options.tolerance > 0 && options.scan_step > 0,
          "tolerance and scan step must be positive");

  std::map<double, double> curve;
  auto eval = [&](double c) {
    if (auto it = curve.find(c); it != curve.end()) {
      return it->second;
    }
    const double q = qp_at(c, iq, grid, geom, schemes, aperture, options);
    curve.emplace(c, q);
    return q;
  };

  std::vector<double> scan;
  for (double c = options.c_lo; c < options.c_hi; c += options.scan_step) {
    scan.push_back(c);
  }
  scan.push_back(options.c_hi);
  std::size_t best = 0;
  double best_q = -1;
  for (std::size_t k = 0; k < scan.size(); ++k) {
    const double q = eval(scan[k]);
    if (q > best_q) {
      best_q = q;
      best = k;
    }
  }

  const double lo = scan[best == 0 ? 0 : best - 1];
  const double hi = scan[std::min(best + 1, scan.size() - 1)];
  const int bits =
      1 + static_cast<int>(std::ceil(std::log2(
              2 * std::max(std::abs(lo), std::abs(hi)) / options.tolerance)));
  (void)boost::math::tools::brent_find_minima(
      [&](double c) { return -eval(c); }, lo, hi, bits);

  SosEstimate out;
  out.c_lo = options.c_lo;
  out.c_hi = options.c_hi;
  double arg = scan[best];
  for (const auto& [c, q] : curve) {
    out.qp_curve.emplace_back(c, q);
    if (q > curve.at(arg)) {
      arg = c;
    }
  }
  out.c_opt = arg;
  out.c_hat = static_cast<int>(std::lround(arg));
  out.at_bound = (out.c_hat - options.c_lo) <= options.tolerance ||
                 (options.c_hi - out.c_hat) <= options.tolerance;
  return out;
}

} // namespace das

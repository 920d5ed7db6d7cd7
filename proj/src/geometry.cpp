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

#include "das/geometry.hpp"

#include <cmath>
#include <numbers>

#include "das/error.hpp"

namespace das {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

double sgn(double v) { return static_cast<double>((v > 0) - (v < 0)); }

// H(0) = 0: an edge source (|x0| == L/2) takes the |z0| branch.
double heaviside(double v) { return v > 0 ? 1.0 : 0.0; }

} // namespace

void ArrayGeometry::validate() const {
  require(num_elements >= 2, "array needs at least 2 elements");
  require(std::isfinite(pitch) && pitch > 0, "pitch must be positive");
  require(std::isfinite(element_width) && element_width > 0 &&
              element_width <= pitch,
          "element width must lie in (0, pitch]");
}

TransmitScheme TransmitScheme::plane(double tilt, double t0) {
  TransmitScheme s;
  s.kind = TransmitKind::plane;
  s.tilt = tilt;
  s.t0 = t0;
  s.validate();
  return s;
}

TransmitScheme TransmitScheme::circular(double tilt, double width,
                                        double aperture_length, double t0) {
  TransmitScheme s;
  s.kind = TransmitKind::circular;
  s.tilt = tilt;
  s.width = width;
  s.virtual_source = das::virtual_source(tilt, width, aperture_length);
  s.t0 = t0;
  s.validate();
  return s;
}

TransmitScheme TransmitScheme::focused(Point focus, double t0) {
  TransmitScheme s;
  s.kind = TransmitKind::focused;
  s.virtual_source = focus;
  s.t0 = t0;
  s.validate();
  return s;
}

void TransmitScheme::validate() const {
  require(std::isfinite(t0), "t0 must be finite");
  switch (kind) {
  case TransmitKind::plane:
    require(std::abs(tilt) < kHalfPi, "tilt must lie in (-pi/2, pi/2)");
    break;
  case TransmitKind::circular:
    require(std::abs(tilt) < kHalfPi, "tilt must lie in (-pi/2, pi/2)");
    require(width > 0 && width < std::numbers::pi,
            "circular width must lie in (0, pi)");
    require(virtual_source.z < 0,
            "circular wave needs a virtual source behind the array");
    break;
  case TransmitKind::focused:
    require(std::isfinite(virtual_source.x) && virtual_source.z > 0,
            "focused wave needs a focus in front of the array");
    break;
  }
}

void Medium::validate() const {
  require(std::isfinite(speed_of_sound) && speed_of_sound > 0,
          "speed of sound must be positive and finite");
}

std::vector<Point> element_positions(const ArrayGeometry& geom) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(geom.num_elements));
  for (double x : element_x(geom)) {
    out.push_back({x, 0.0});
  }
  return out;
}

std::vector<double> element_x(const ArrayGeometry& geom) {
  geom.validate();
  const int n = geom.num_elements;
  std::vector<double> xs(static_cast<std::size_t>(n));
  // Fill symmetric pairs from the same magnitude so x_i == -x_{N+1-i} exactly.
  for (int i = 1; i <= n; ++i) {
    const int k = 2 * i - n - 1;
    xs[static_cast<std::size_t>(i - 1)] =
        k < 0 ? -(geom.pitch / 2) * (-k) : (geom.pitch / 2) * k;
  }
  return xs;
}

Point virtual_source(double theta, double beta, double L) {
  require(beta > 0 && beta < std::numbers::pi,
          "beta must lie in (0, pi)");
  require(std::abs(theta) < kHalfPi, "theta must lie in (-pi/2, pi/2)");
  require(L > 0, "aperture length must be positive");
  const double sb = std::sin(beta);
  return {(L / 2) * std::sin(2 * theta) / sb,
          -(L / 2) * (std::cos(beta) + std::cos(2 * theta)) / sb};
}

double transmit_distance_circular(Point pt, Point source, double L) {
  const double edge = std::abs(source.x) - L / 2;
  return std::hypot(pt.x - source.x, pt.z - source.z) -
         std::sqrt(heaviside(edge) * edge * edge + source.z * source.z);
}

double transmit_distance_plane(Point pt, double theta, double L) {
  return (sgn(theta) * L / 2 - pt.x) * std::sin(theta) +
         pt.z * std::cos(theta);
}

double transmit_distance_general(Point pt, Point source, double L) {
  require(source.z != 0, "virtual source cannot lie on the array line");
  const double side = sgn(source.z);
  const double edge = std::abs(source.x) + side * L / 2;
  // sign(z0) selects the near (diverging) or far (focused) array edge; the
  // edge term is subtracted in both cases so that z0 < 0 is exactly the
  // circular formula.
  return sgn(pt.z - source.z) * std::hypot(pt.x - source.x, pt.z - source.z) -
         std::sqrt(heaviside(edge) * edge * edge + source.z * source.z);
}

double transmit_distance(Point pt, const TransmitScheme& scheme, double L) {
  switch (scheme.kind) {
  case TransmitKind::plane:
    return transmit_distance_plane(pt, scheme.tilt, L);
  case TransmitKind::circular:
    return transmit_distance_circular(pt, scheme.virtual_source, L);
  case TransmitKind::focused:
    return transmit_distance_general(pt, scheme.virtual_source, L);
  }
  return 0;
}

double receive_distance(Point pt, double element_x) {
  return std::hypot(element_x - pt.x, pt.z);
}

double travel_time(Point pt, double element_x, const TransmitScheme& scheme,
                   const ArrayGeometry& geom, const Medium& medium) {
  const double d_tx = transmit_distance(pt, scheme, geom.aperture_length());
  return (d_tx + receive_distance(pt, element_x)) / medium.speed_of_sound -
         scheme.t0;
}

double hyperbola_residual(Point pt, double x, double t,
                          const TransmitScheme& scheme,
                          const ArrayGeometry& geom, const Medium& medium) {
  const double c = medium.speed_of_sound;
  const double d_tx = transmit_distance(pt, scheme, geom.aperture_length());
  const double dt = t - d_tx / c;
  const double dx = x - pt.x;
  return (dt * dt) / (pt.z * pt.z / (c * c)) - (dx * dx) / (pt.z * pt.z) - 1;
}

} // namespace das

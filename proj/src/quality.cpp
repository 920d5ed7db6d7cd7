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

#include "das/quality.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "das/error.hpp"

namespace das {

namespace {

// dB floor for exactly-zero pixels.
constexpr double kFloorDb = -300;

struct Stats {
  double mean = 0;
  double var = 0;
  std::size_t n = 0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  s.n = v.size();
  for (double x : v) {
    s.mean += x;
  }
  s.mean /= static_cast<double>(s.n);
  for (double x : v) {
    s.var += (x - s.mean) * (x - s.mean);
  }
  s.var /= static_cast<double>(s.n - 1);
  return s;
}

bool in_exterior(const std::variant<Annulus, Rectangle>& ext, Point p) {
  if (const auto* a = std::get_if<Annulus>(&ext)) {
    const double r = std::hypot(p.x - a->center.x, p.z - a->center.z);
    return r >= a->inner && r <= a->outer;
  }
  const auto& r = std::get<Rectangle>(ext);
  return p.x >= r.x_min && p.x <= r.x_max && p.z >= r.z_min && p.z <= r.z_max;
}

} // namespace

double cnr(std::span<const cplx> values, const BeamformGrid& grid,
           const RegionSpec& region) {
  require(values.size() == grid.size(), "frame does not match the grid",
          ErrorCode::shape_mismatch);
  double peak = 0;
  for (auto v : values) {
    peak = std::max(peak, std::abs(v));
  }
  if (!(peak > 0)) {
    throw Error(ErrorCode::unusable_region, "frame is identically zero");
  }

  std::vector<double> in;
  std::vector<double> out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point p = grid.points[k];
    const bool a = region.interior.contains(p);
    const bool b = in_exterior(region.exterior, p);
    if (a && b) {
      throw Error(ErrorCode::unusable_region,
                  "interior and exterior regions overlap");
    }
    if (!a && !b) {
      continue;
    }
    const double env = std::abs(values[k]);
    const double db = env > 0 ? 20 * std::log10(env / peak) : kFloorDb;
    (a ? in : out).push_back(std::max(db, kFloorDb));
  }
  if (in.size() < kMinRegionPixels || out.size() < kMinRegionPixels) {
    throw Error(ErrorCode::unusable_region,
                "regions need at least 25 pixels each");
  }
  const Stats si = stats(in);
  const Stats so = stats(out);
  const double denom = std::sqrt(si.var + so.var);
  if (!(denom > 0)) {
    throw Error(ErrorCode::unusable_region,
                "zero-variance regions: CNR undefined");
  }
  return std::abs(si.mean - so.mean) / denom;
}

double fwhm(std::span<const cplx> values, const BeamformGrid& grid,
            Point near, Axis axis, double search_radius) {
  require(values.size() == grid.size(), "frame does not match the grid",
          ErrorCode::shape_mismatch);
  require(search_radius > 0, "search radius must be positive");

  std::size_t best = grid.size();
  double peak = -1;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point p = grid.points[k];
    if (std::hypot(p.x - near.x, p.z - near.z) > search_radius) {
      continue;
    }
    const double env = std::abs(values[k]);
    if (env > peak) {
      peak = env;
      best = k;
    }
  }
  if (best == grid.size() || !(peak > 0)) {
    throw Error(ErrorCode::unresolvable, "no envelope peak near the target");
  }

  const std::size_t ix = best / grid.nz;
  const std::size_t iz = best % grid.nz;
  const bool lateral = axis == Axis::lateral;
  const std::size_t n = lateral ? grid.nx : grid.nz;
  const std::size_t at = lateral ? ix : iz;
  auto index = [&](std::size_t j) {
    return lateral ? grid.index(j, iz) : grid.index(ix, j);
  };
  auto coord = [&](std::size_t j) {
    const Point p = grid.points[index(j)];
    return lateral ? p.x : p.z;
  };
  auto env = [&](std::size_t j) { return std::abs(values[index(j)]); };

  const double half = peak / 2;
  auto crossing = [&](std::size_t below, std::size_t above) {
    const double e0 = env(below);
    const double e1 = env(above);
    const double t = (half - e0) / (e1 - e0);
    return coord(below) + t * (coord(above) - coord(below));
  };

  std::size_t j = at;
  while (j > 0 && env(j) >= half) {
    --j;
  }
  if (env(j) >= half) {
    throw Error(ErrorCode::unresolvable,
                "profile does not fall to half maximum before the grid edge");
  }
  const double left = crossing(j, j + 1);

  j = at;
  while (j + 1 < n && env(j) >= half) {
    ++j;
  }
  if (env(j) >= half) {
    throw Error(ErrorCode::unresolvable,
                "profile does not fall to half maximum before the grid edge");
  }
  const double right = crossing(j, j - 1);
  return std::abs(right - left);
}

} // namespace das

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

// Delay-and-sum beamforming written as a sparse matrix product.
//
// A DasMatrix maps the stacked channel samples of one transmit (element-major
// blocks of n_samples) to M beamformed values. Each row holds, for every
// element inside the receive aperture, the interpolation weights of the
// fractional fast-time index of the two-way delay; for I/Q data the weights
// also carry the phase rotator exp(+i 2 pi fc tau). The matrix is built once
// per (grid, transmit, array, speed of sound, sampling) and can be applied to
// any number of frames.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "das/aperture.hpp"
#include "das/geometry.hpp"
#include "das/signal.hpp"

namespace das {

/// Beamforming points in column-major (z fastest) order:
/// index = ix * nz + iz.
struct BeamformGrid {
  std::vector<Point> points;
  std::size_t nz = 0; // rows
  std::size_t nx = 0; // cols

  /// Inclusive linspace over [x0, x1] x [z0, z1].
  static BeamformGrid rectilinear(double x0, double x1, double z0, double z1,
                                  std::size_t nx, std::size_t nz);

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] std::size_t index(std::size_t ix, std::size_t iz) const {
    return ix * nz + iz;
  }
  /// Copy with every depth multiplied by `factor`.
  [[nodiscard]] BeamformGrid scaled_depth(double factor) const;
  [[nodiscard]] std::uint64_t hash() const;

  void validate() const;
};

enum class Interpolation { nearest = 1, linear = 2 };

/// Number of taps q of an interpolator.
[[nodiscard]] constexpr int taps(Interpolation interp) {
  return static_cast<int>(interp);
}

struct SignalLayout {
  double fs = 0;           // [Hz]
  double fc = 0;           // [Hz]
  std::size_t n_samples = 0;
  bool is_iq = true;

  static SignalLayout of(const ChannelData& data);

  friend bool operator==(const SignalLayout&, const SignalLayout&) = default;
};

/// Everything a matrix depends on. Two matrices with equal provenance are
/// bit-identical.
struct MatrixProvenance {
  std::uint64_t grid_hash = 0;
  std::size_t grid_size = 0;
  ArrayGeometry geom;
  TransmitScheme scheme;
  double speed_of_sound = 0;
  SignalLayout signal;
  double f_number = 0;
  Interpolation interp = Interpolation::linear;

  [[nodiscard]] std::uint64_t hash() const;
  /// Human-readable list of fields that differ, empty when equal.
  [[nodiscard]] std::string diff(const MatrixProvenance& other) const;

  friend bool operator==(const MatrixProvenance&,
                         const MatrixProvenance&) = default;
};

/// Compressed sparse row matrix of complex weights. Column indices are
/// strictly increasing within each row.
class DasMatrix {
public:
  DasMatrix() = default;
  DasMatrix(std::size_t rows, std::size_t cols,
            std::vector<std::size_t> row_ptr, std::vector<std::uint32_t> cols_idx,
            std::vector<cplx> values, MatrixProvenance provenance);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] std::size_t nnz() const { return values_.size(); }
  /// Set when no sample fell inside the fast-time window: usually a grid or
  /// t0 mismatch.
  [[nodiscard]] bool empty_warning() const { return nnz() == 0; }

  [[nodiscard]] std::span<const std::size_t> row_ptr() const {
    return row_ptr_;
  }
  [[nodiscard]] std::span<const std::uint32_t> col_index() const {
    return col_;
  }
  [[nodiscard]] std::span<const cplx> values() const { return values_; }
  [[nodiscard]] const MatrixProvenance& provenance() const {
    return provenance_;
  }

  /// y = M x for one stacked frame.
  void multiply(std::span<const cplx> x, std::span<cplx> y) const;

  friend bool operator==(const DasMatrix&, const DasMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_;
  std::vector<cplx> values_;
  MatrixProvenance provenance_;
};

[[nodiscard]] DasMatrix build_das_matrix(const BeamformGrid& grid,
                                         const ArrayGeometry& geom,
                                         const TransmitScheme& scheme,
                                         const Medium& medium,
                                         const SignalLayout& signal,
                                         const ApertureConfig& aperture,
                                         Interpolation interp =
                                             Interpolation::linear);

struct BeamformedFrame {
  std::vector<cplx> values; // aligned with BeamformGrid ordering
  MatrixProvenance provenance;
};

/// Applies the matrix to every frame of `data` as one product against the
/// stacked right-hand side.
[[nodiscard]] std::vector<BeamformedFrame> beamform(const DasMatrix& matrix,
                                                    const ChannelData& data);

/// Coherent mean of frames sharing one grid.
[[nodiscard]] BeamformedFrame compound(std::span<const BeamformedFrame> frames);

/// 1 - nnz / (rows * cols).
[[nodiscard]] double sparsity(const DasMatrix& matrix);

// On-disk cache. Layout (all little-endian):
//   8 bytes   magic "DASMTX\0\0"
//   u32       version (1)
//   u32       reserved (0)
//   u64       provenance hash
//   u64       rows, u64 cols, u64 nnz
//   u32[nnz]  row index, u32[nnz] column index
//   f64[nnz]  real part, f64[nnz] imaginary part
// Triplets are stored in canonical (row, col) order.
void save_das_matrix(const std::filesystem::path& path,
                     const DasMatrix& matrix);

/// Loads a cached matrix; the stored hash must match `expected.hash()`.
[[nodiscard]] DasMatrix load_das_matrix(const std::filesystem::path& path,
                                        const MatrixProvenance& expected);

/// Cache file name for a provenance, e.g. "das-0123456789abcdef.mtx".
[[nodiscard]] std::string cache_file_name(const MatrixProvenance& provenance);

/// Loads from `cache_dir` when a matching file exists, otherwise builds and
/// stores it there.
[[nodiscard]] DasMatrix cached_das_matrix(
    const std::filesystem::path& cache_dir, const BeamformGrid& grid,
    const ArrayGeometry& geom, const TransmitScheme& scheme,
    const Medium& medium, const SignalLayout& signal,
    const ApertureConfig& aperture,
    Interpolation interp = Interpolation::linear);

} // namespace das

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

#include "das/beamformer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "binary_io.hpp"
#include "das/error.hpp"
#include "das/hash.hpp"

namespace das {

namespace {

constexpr char kMagic[8] = {'D', 'A', 'S', 'M', 'T', 'X', '\0', '\0'};
constexpr std::uint32_t kCacheVersion = 1;

void hash_geometry(Fnv1a& h, const ArrayGeometry& g) {
  h.u64(static_cast<std::uint64_t>(g.num_elements));
  h.f64(g.pitch);
  h.f64(g.element_width);
}

void hash_scheme(Fnv1a& h, const TransmitScheme& s) {
  h.u64(static_cast<std::uint64_t>(s.kind));
  h.f64(s.tilt);
  h.f64(s.width);
  h.f64(s.virtual_source.x);
  h.f64(s.virtual_source.z);
  h.f64(s.t0);
}

template <typename T>
void diff_field(std::ostringstream& os, const char* name, const T& a,
                const T& b) {
  if (!(a == b)) {
    os << name << ": " << a << " vs " << b << "; ";
  }
}

} // namespace

BeamformGrid BeamformGrid::rectilinear(double x0, double x1, double z0,
                                       double z1, std::size_t nx,
                                       std::size_t nz) {
  require(nx >= 1 && nz >= 1, "grid needs at least one point per axis");
  auto lin = [](double a, double b, std::size_t n, std::size_t k) {
    return n == 1 ? a : a + (b - a) * static_cast<double>(k) /
                                static_cast<double>(n - 1);
  };
  BeamformGrid g;
  g.nx = nx;
  g.nz = nz;
  g.points.reserve(nx * nz);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t iz = 0; iz < nz; ++iz) {
      g.points.push_back({lin(x0, x1, nx, ix), lin(z0, z1, nz, iz)});
    }
  }
  g.validate();
  return g;
}

BeamformGrid BeamformGrid::scaled_depth(double factor) const {
  BeamformGrid g = *this;
  for (auto& p : g.points) {
    p.z *= factor;
  }
  return g;
}

std::uint64_t BeamformGrid::hash() const {
  Fnv1a h;
  h.u64(nz);
  h.u64(nx);
  for (const auto& p : points) {
    h.f64(p.x);
    h.f64(p.z);
  }
  return h.value();
}

void BeamformGrid::validate() const {
  require(!points.empty(), "grid is empty");
  require(nz * nx == points.size(), "grid shape does not match point count");
  for (const auto& p : points) {
    require(std::isfinite(p.x) && std::isfinite(p.z) && p.z > 0,
            "grid points must lie below the array (z > 0)");
  }
}

SignalLayout SignalLayout::of(const ChannelData& data) {
  return {data.fs, data.fc, data.n_samples, data.kind == SampleKind::iq};
}

std::uint64_t MatrixProvenance::hash() const {
  Fnv1a h;
  h.text("das-matrix/1");
  h.u64(grid_hash);
  h.u64(grid_size);
  hash_geometry(h, geom);
  hash_scheme(h, scheme);
  h.f64(speed_of_sound);
  h.f64(signal.fs);
  h.f64(signal.fc);
  h.u64(signal.n_samples);
  h.u64(signal.is_iq ? 1 : 0);
  h.f64(f_number);
  h.u64(static_cast<std::uint64_t>(taps(interp)));
  return h.value();
}

std::string MatrixProvenance::diff(const MatrixProvenance& o) const {
  std::ostringstream os;
  os.precision(17);
  diff_field(os, "grid_hash", grid_hash, o.grid_hash);
  diff_field(os, "grid_size", grid_size, o.grid_size);
  diff_field(os, "num_elements", geom.num_elements, o.geom.num_elements);
  diff_field(os, "pitch", geom.pitch, o.geom.pitch);
  diff_field(os, "element_width", geom.element_width, o.geom.element_width);
  diff_field(os, "transmit_kind", static_cast<int>(scheme.kind),
             static_cast<int>(o.scheme.kind));
  diff_field(os, "tilt", scheme.tilt, o.scheme.tilt);
  diff_field(os, "width", scheme.width, o.scheme.width);
  diff_field(os, "source_x", scheme.virtual_source.x,
             o.scheme.virtual_source.x);
  diff_field(os, "source_z", scheme.virtual_source.z,
             o.scheme.virtual_source.z);
  diff_field(os, "t0", scheme.t0, o.scheme.t0);
  diff_field(os, "c", speed_of_sound, o.speed_of_sound);
  diff_field(os, "fs", signal.fs, o.signal.fs);
  diff_field(os, "fc", signal.fc, o.signal.fc);
  diff_field(os, "n_samples", signal.n_samples, o.signal.n_samples);
  diff_field(os, "is_iq", signal.is_iq, o.signal.is_iq);
  diff_field(os, "f_number", f_number, o.f_number);
  diff_field(os, "interp", taps(interp), taps(o.interp));
  return os.str();
}

DasMatrix::DasMatrix(std::size_t rows, std::size_t cols,
                     std::vector<std::size_t> row_ptr,
                     std::vector<std::uint32_t> cols_idx,
                     std::vector<cplx> values, MatrixProvenance provenance)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)),
      col_(std::move(cols_idx)), values_(std::move(values)),
      provenance_(std::move(provenance)) {
  require(row_ptr_.size() == rows_ + 1 && row_ptr_.front() == 0 &&
              row_ptr_.back() == values_.size() &&
              col_.size() == values_.size(),
          "inconsistent CSR arrays");
  for (std::size_t r = 0; r < rows_; ++r) {
    require(row_ptr_[r] <= row_ptr_[r + 1], "row pointers must be sorted");
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      require(col_[k] < cols_, "column index out of range");
      require(k == row_ptr_[r] || col_[k - 1] < col_[k],
              "columns must be strictly increasing within a row");
    }
  }
}

void DasMatrix::multiply(std::span<const cplx> x, std::span<cplx> y) const {
  require(x.size() == cols_ && y.size() == rows_,
          "operand sizes do not match the matrix", ErrorCode::shape_mismatch);
  for (std::size_t r = 0; r < rows_; ++r) {
    cplx acc{};
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      acc += values_[k] * x[col_[k]];
    }
    y[r] = acc;
  }
}

DasMatrix build_das_matrix(const BeamformGrid& grid, const ArrayGeometry& geom,
                           const TransmitScheme& scheme, const Medium& medium,
                           const SignalLayout& signal,
                           const ApertureConfig& aperture,
                           Interpolation interp) {
  grid.validate();
  geom.validate();
  scheme.validate();
  medium.validate();
  aperture.validate();
  require(signal.fs > 0 && signal.fc > 0, "fs and fc must be positive");
  require(signal.n_samples >= 2, "need at least 2 fast-time samples");

  const std::size_t n_s = signal.n_samples;
  const auto n_e = static_cast<std::size_t>(geom.num_elements);
  const std::size_t n_cols = n_s * n_e;
  require(n_cols <= std::numeric_limits<std::uint32_t>::max(),
          "channel data too large for 32-bit column indices");

  const auto xs = element_x(geom);
  const double L = geom.aperture_length();
  const double c = medium.speed_of_sound;
  const double last = static_cast<double>(n_s) - 2; // 0-based window end
  const double omega = 2 * std::numbers::pi * signal.fc;

  std::vector<std::size_t> row_ptr;
  row_ptr.reserve(grid.size() + 1);
  row_ptr.push_back(0);
  std::vector<std::uint32_t> cols;
  std::vector<cplx> vals;

  auto emit = [&](std::size_t col, double w, double tau) {
    if (w == 0) {
      return;
    }
    cols.push_back(static_cast<std::uint32_t>(col));
    vals.push_back(signal.is_iq ? w * std::polar(1.0, omega * tau)
                                : cplx{w, 0.0});
  };

  for (const Point& pt : grid.points) {
    const double d_tx = transmit_distance(pt, scheme, L);
    for (std::size_t e = 0; e < n_e; ++e) {
      if (!in_aperture(pt, xs[e], aperture.f_number)) {
        continue;
      }
      const double tau = (d_tx + receive_distance(pt, xs[e])) / c - scheme.t0;
      // 0-based fractional index; 1-based window [1, n_s - 1].
      const double v = tau * signal.fs;
      if (!(v >= 0 && v <= last)) {
        continue;
      }
      const std::size_t base = e * n_s;
      if (interp == Interpolation::nearest) {
        emit(base + static_cast<std::size_t>(std::lround(v)), 1.0, tau);
      } else {
        const double fl = std::floor(v);
        const double frac = v - fl;
        const auto k = static_cast<std::size_t>(fl);
        emit(base + k, 1 - frac, tau);
        emit(base + k + 1, frac, tau);
      }
    }
    row_ptr.push_back(vals.size());
  }

  MatrixProvenance prov;
  prov.grid_hash = grid.hash();
  prov.grid_size = grid.size();
  prov.geom = geom;
  prov.scheme = scheme;
  prov.speed_of_sound = c;
  prov.signal = signal;
  prov.f_number = aperture.f_number;
  prov.interp = interp;
  return DasMatrix(grid.size(), n_cols, std::move(row_ptr), std::move(cols),
                   std::move(vals), prov);
}

std::vector<BeamformedFrame> beamform(const DasMatrix& matrix,
                                      const ChannelData& data) {
  const auto& prov = matrix.provenance();
  MatrixProvenance seen = prov;
  seen.signal = SignalLayout::of(data);
  seen.geom.num_elements = static_cast<int>(data.n_elements);
  if (const auto d = prov.diff(seen); !d.empty()) {
    throw Error(ErrorCode::shape_mismatch,
                "channel data does not match the DAS matrix: " + d);
  }
  require(data.samples.size() == data.frame_size() * data.n_frames,
          "sample buffer does not match the declared shape",
          ErrorCode::shape_mismatch);

  const std::size_t nf = data.n_frames;
  const std::size_t stride = data.frame_size();
  std::vector<BeamformedFrame> out(nf);
  for (auto& f : out) {
    f.values.assign(matrix.rows(), cplx{});
    f.provenance = prov;
  }

  const auto rp = matrix.row_ptr();
  const auto ci = matrix.col_index();
  const auto w = matrix.values();
  const cplx* x = data.samples.data();
  std::vector<cplx> acc(nf);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    std::fill(acc.begin(), acc.end(), cplx{});
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) {
      const cplx wk = w[k];
      const std::size_t col = ci[k];
      for (std::size_t f = 0; f < nf; ++f) {
        acc[f] += wk * x[f * stride + col];
      }
    }
    for (std::size_t f = 0; f < nf; ++f) {
      out[f].values[r] = acc[f];
    }
  }
  return out;
}

BeamformedFrame compound(std::span<const BeamformedFrame> frames) {
  require(!frames.empty(), "cannot compound an empty list of frames");
  const auto& ref = frames.front().provenance;
  BeamformedFrame out;
  out.provenance = ref;
  out.values.assign(frames.front().values.size(), cplx{});
  for (const auto& f : frames) {
    if (f.provenance.grid_hash != ref.grid_hash ||
        f.values.size() != out.values.size()) {
      throw Error(ErrorCode::shape_mismatch,
                  "frames to compound do not share one grid");
    }
    for (std::size_t k = 0; k < out.values.size(); ++k) {
      out.values[k] += f.values[k];
    }
  }
  const double n = static_cast<double>(frames.size());
  for (auto& v : out.values) {
    v /= n;
  }
  return out;
}

double sparsity(const DasMatrix& matrix) {
  const double total =
      static_cast<double>(matrix.rows()) * static_cast<double>(matrix.cols());
  if (total == 0) {
    return 1;
  }
  return 1 - static_cast<double>(matrix.nnz()) / total;
}

void save_das_matrix(const std::filesystem::path& path,
                     const DasMatrix& matrix) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw Error(ErrorCode::io, "cannot write " + path.string());
  }
  os.write(kMagic, sizeof kMagic);
  binary::put_u32(os, kCacheVersion);
  binary::put_u32(os, 0);
  binary::put_u64(os, matrix.provenance().hash());
  binary::put_u64(os, matrix.rows());
  binary::put_u64(os, matrix.cols());
  binary::put_u64(os, matrix.nnz());
  const auto rp = matrix.row_ptr();
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) {
      binary::put_u32(os, static_cast<std::uint32_t>(r));
    }
  }
  for (auto c : matrix.col_index()) {
    binary::put_u32(os, c);
  }
  for (auto v : matrix.values()) {
    binary::put_f64(os, v.real());
  }
  for (auto v : matrix.values()) {
    binary::put_f64(os, v.imag());
  }
  if (!os) {
    throw Error(ErrorCode::io, "failed writing " + path.string());
  }
}

DasMatrix load_das_matrix(const std::filesystem::path& path,
                          const MatrixProvenance& expected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw Error(ErrorCode::io, "cannot read " + path.string());
  }
  char magic[8];
  if (!is.read(magic, sizeof magic) ||
      !std::equal(magic, magic + 8, kMagic)) {
    throw Error(ErrorCode::schema, "not a DAS matrix file: " + path.string());
  }
  if (const auto v = binary::get_u32(is); v != kCacheVersion) {
    throw Error(ErrorCode::schema,
                "unsupported DAS matrix version " + std::to_string(v));
  }
  (void)binary::get_u32(is);
  if (binary::get_u64(is) != expected.hash()) {
    throw Error(ErrorCode::cache_mismatch,
                "cached matrix provenance does not match: " + path.string());
  }
  const auto rows = binary::get_u64(is);
  const auto cols = binary::get_u64(is);
  const auto nnz = binary::get_u64(is);
  require(rows == expected.grid_size &&
              cols == expected.signal.n_samples *
                          static_cast<std::uint64_t>(expected.geom.num_elements),
          "cached matrix shape does not match its provenance",
          ErrorCode::cache_mismatch);

  std::vector<std::size_t> row_ptr(rows + 1, 0);
  std::vector<std::uint32_t> col(nnz);
  std::vector<cplx> val(nnz);
  std::uint32_t prev = 0;
  for (std::uint64_t k = 0; k < nnz; ++k) {
    const auto r = binary::get_u32(is);
    require(r < rows && r >= prev, "cached rows out of order",
            ErrorCode::schema);
    prev = r;
    ++row_ptr[r + 1];
  }
  for (std::uint64_t r = 0; r < rows; ++r) {
    row_ptr[r + 1] += row_ptr[r];
  }
  for (auto& c : col) {
    c = binary::get_u32(is);
  }
  for (auto& v : val) {
    v.real(binary::get_f64(is));
  }
  for (auto& v : val) {
    v.imag(binary::get_f64(is));
  }
  return DasMatrix(rows, cols, std::move(row_ptr), std::move(col),
                   std::move(val), expected);
}

std::string cache_file_name(const MatrixProvenance& provenance) {
  return "das-" + binary::hex64(provenance.hash()) + ".mtx";
}

DasMatrix cached_das_matrix(const std::filesystem::path& cache_dir,
                            const BeamformGrid& grid,
                            const ArrayGeometry& geom,
                            const TransmitScheme& scheme, const Medium& medium,
                            const SignalLayout& signal,
                            const ApertureConfig& aperture,
                            Interpolation interp) {
  MatrixProvenance prov;
  prov.grid_hash = grid.hash();
  prov.grid_size = grid.size();
  prov.geom = geom;
  prov.scheme = scheme;
  prov.speed_of_sound = medium.speed_of_sound;
  prov.signal = signal;
  prov.f_number = aperture.f_number;
  prov.interp = interp;

  const auto path = cache_dir / cache_file_name(prov);
  if (std::filesystem::exists(path)) {
    return load_das_matrix(path, prov);
  }
  auto m = build_das_matrix(grid, geom, scheme, medium, signal, aperture,
                            interp);
  std::filesystem::create_directories(cache_dir);
  save_das_matrix(path, m);
  return m;
}

} // namespace das

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

#include "das/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "binary_io.hpp"
#include "das/error.hpp"

namespace das::io {

using nlohmann::json;

namespace {

constexpr char kDatasetMagic[8] = {'D', 'A', 'S', 'D', 'S', 'E', 'T', '1'};
constexpr char kRawMagic[8] = {'D', 'A', 'S', 'R', 'A', 'W', '0', '1'};

constexpr double kDeg = std::numbers::pi / 180;

[[noreturn]] void schema_error(const std::string& field,
                               const std::string& what) {
  throw Error(ErrorCode::schema, "metadata field '" + field + "': " + what);
}

double number(const json& doc, const std::string& key) {
  if (!doc.contains(key)) {
    schema_error(key, "missing");
  }
  if (!doc[key].is_number()) {
    schema_error(key, "expected a number");
  }
  return doc[key].get<double>();
}

double number_or(const json& doc, const std::string& key, double fallback) {
  return doc.contains(key) ? number(doc, key) : fallback;
}

std::size_t count(const json& doc, const std::string& key) {
  if (!doc.contains(key)) {
    schema_error(key, "missing");
  }
  const auto& v = doc[key];
  if (!v.is_number_unsigned() &&
      !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    schema_error(key, "expected a nonnegative integer");
  }
  return doc[key].get<std::size_t>();
}

std::string text(const json& doc, const std::string& key) {
  if (!doc.contains(key) || !doc[key].is_string()) {
    schema_error(key, "expected a string");
  }
  return doc[key].get<std::string>();
}

// Converts library validation failures into schema errors naming the field.
template <typename F> void checked(const std::string& field, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::schema) {
      throw;
    }
    schema_error(field, e.what());
  }
}

TransmitScheme parse_transmit(const json& tx, double aperture, double t0,
                              const std::string& where) {
  if (!tx.is_object()) {
    schema_error(where, "expected an object");
  }
  const auto kind = text(tx, "kind");
  const double local_t0 = number_or(tx, "t0", t0);
  TransmitScheme s;
  checked(where, [&] {
    if (kind == "plane") {
      s = TransmitScheme::plane(number(tx, "tilt_deg") * kDeg, local_t0);
    } else if (kind == "circular") {
      s = TransmitScheme::circular(number_or(tx, "tilt_deg", 0) * kDeg,
                                   number(tx, "beta_deg") * kDeg, aperture,
                                   local_t0);
    } else if (kind == "focused") {
      s = TransmitScheme::focused(
          {number(tx, "source_x_m"), number(tx, "source_z_m")}, local_t0);
    } else {
      schema_error(where + ".kind", "unknown transmit kind '" + kind + "'");
    }
  });
  return s;
}

json transmit_json(const TransmitScheme& s, double t0) {
  json tx;
  switch (s.kind) {
  case TransmitKind::plane:
    tx["kind"] = "plane";
    tx["tilt_deg"] = s.tilt / kDeg;
    break;
  case TransmitKind::circular:
    tx["kind"] = "circular";
    tx["tilt_deg"] = s.tilt / kDeg;
    tx["beta_deg"] = s.width / kDeg;
    break;
  case TransmitKind::focused:
    tx["kind"] = "focused";
    tx["source_x_m"] = s.virtual_source.x;
    tx["source_z_m"] = s.virtual_source.z;
    break;
  }
  if (s.t0 != t0) {
    tx["t0"] = s.t0;
  }
  return tx;
}

std::vector<TransmitScheme> parse_transmits(const json& meta,
                                            double aperture, double t0) {
  if (!meta.contains("transmit")) {
    schema_error("transmit", "missing");
  }
  const auto& tx = meta["transmit"];
  std::vector<TransmitScheme> out;
  if (tx.is_array()) {
    for (std::size_t k = 0; k < tx.size(); ++k) {
      out.push_back(parse_transmit(tx[k], aperture, t0,
                                   "transmit[" + std::to_string(k) + "]"));
    }
    if (out.empty()) {
      schema_error("transmit", "empty list");
    }
  } else {
    out.push_back(parse_transmit(tx, aperture, t0, "transmit"));
  }
  return out;
}

void write_header(std::ostream& os, const char (&magic)[8], const json& meta) {
  const std::string doc = meta.dump(2);
  os.write(magic, 8);
  binary::put_u64(os, doc.size());
  os.write(doc.data(), static_cast<std::streamsize>(doc.size()));
}

json read_header(std::istream& is, const char (&magic)[8],
                 const std::string& what) {
  char got[8];
  if (!is.read(got, 8) || !std::equal(got, got + 8, magic)) {
    throw Error(ErrorCode::schema, "not a " + what + " file");
  }
  const auto n = binary::get_u64(is);
  std::string doc(n, '\0');
  if (!is.read(doc.data(), static_cast<std::streamsize>(n))) {
    throw Error(ErrorCode::payload_size, "truncated " + what + " metadata");
  }
  try {
    return json::parse(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema,
                what + " metadata is not valid JSON: " + e.what());
  }
}

std::uintmax_t remaining_bytes(std::istream& is) {
  const auto here = is.tellg();
  is.seekg(0, std::ios::end);
  const auto end = is.tellg();
  is.seekg(here);
  return static_cast<std::uintmax_t>(end - here);
}

std::vector<char> read_all(std::istream& is, std::uintmax_t n) {
  std::vector<char> buf(n);
  if (!is.read(buf.data(), static_cast<std::streamsize>(n))) {
    throw Error(ErrorCode::payload_size, "truncated payload");
  }
  return buf;
}

template <typename U> U le_at(const char* p) {
  U v = 0;
  for (std::size_t k = 0; k < sizeof(U); ++k) {
    v |= static_cast<U>(static_cast<unsigned char>(p[k])) << (8 * k);
  }
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw Error(ErrorCode::io, "cannot open " + path.string());
  }
  return is;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw Error(ErrorCode::io, "cannot write " + path.string());
  }
  return os;
}

} // namespace

json dataset_metadata(const Dataset& ds) {
  json meta = ds.metadata.is_object() ? ds.metadata : json::object();
  const auto& d = ds.data;
  meta["schema_version"] = kSchemaVersion;
  meta["fs"] = d.fs;
  meta["fc"] = d.fc;
  meta["bandwidth"] = d.bandwidth;
  meta["kind"] = d.kind == SampleKind::iq ? "iq" : "rf";
  meta["n_s"] = d.n_samples;
  meta["N_e"] = d.n_elements;
  meta["frames"] = d.n_frames;
  meta["pitch"] = ds.geom.pitch;
  meta["element_width"] = ds.geom.element_width;
  meta["c0_nominal"] = ds.c0;

  const double t0 = ds.transmits.empty() ? 0 : ds.transmits.front().t0;
  // Keep the stored transmit document verbatim when it still describes the
  // same schemes, so degree values survive a load/save cycle bit for bit.
  bool reuse = false;
  if (ds.metadata.contains("transmit") && ds.metadata.contains("t0")) {
    try {
      reuse = parse_transmits(ds.metadata, ds.geom.aperture_length(),
                              ds.metadata["t0"].get<double>()) ==
                  ds.transmits &&
              ds.metadata["t0"].get<double>() == t0;
    } catch (const std::exception&) {
      reuse = false;
    }
  }
  if (!reuse) {
    meta["t0"] = t0;
    if (ds.transmits.size() == 1) {
      meta["transmit"] = transmit_json(ds.transmits.front(), t0);
    } else {
      json arr = json::array();
      for (const auto& s : ds.transmits) {
        arr.push_back(transmit_json(s, t0));
      }
      meta["transmit"] = arr;
    }
  }
  return meta;
}

void parse_dataset_metadata(const json& meta, Dataset& ds) {
  if (!meta.is_object()) {
    throw Error(ErrorCode::schema, "metadata must be a JSON object");
  }
  if (!meta.contains("schema_version")) {
    schema_error("schema_version", "missing");
  }
  if (const auto v = count(meta, "schema_version"); v != kSchemaVersion) {
    schema_error("schema_version", "unsupported version " + std::to_string(v));
  }
  auto& d = ds.data;
  d.fs = number(meta, "fs");
  d.fc = number(meta, "fc");
  d.bandwidth = number(meta, "bandwidth");
  const auto kind = text(meta, "kind");
  if (kind == "rf") {
    d.kind = SampleKind::rf;
  } else if (kind == "iq") {
    d.kind = SampleKind::iq;
  } else {
    schema_error("kind", "expected 'rf' or 'iq'");
  }
  d.n_samples = count(meta, "n_s");
  d.n_elements = count(meta, "N_e");
  d.n_frames = meta.contains("frames") ? count(meta, "frames") : 1;
  if (d.n_samples < 2) {
    schema_error("n_s", "need at least 2 samples");
  }
  if (d.n_frames < 1) {
    schema_error("frames", "need at least 1 frame");
  }
  if (!(d.fs > 0)) {
    schema_error("fs", "must be positive");
  }
  if (!(d.fc > 0)) {
    schema_error("fc", "must be positive");
  }
  if (!(d.bandwidth > 0 && d.bandwidth < 2 * d.fc)) {
    schema_error("bandwidth", "must lie in (0, 2 fc)");
  }

  ds.geom.num_elements = static_cast<int>(d.n_elements);
  ds.geom.pitch = number(meta, "pitch");
  ds.geom.element_width = number(meta, "element_width");
  checked("pitch/element_width", [&] { ds.geom.validate(); });
  ds.c0 = number_or(meta, "c0_nominal", 1540);
  if (!(ds.c0 > 0)) {
    schema_error("c0_nominal", "must be positive");
  }
  const double t0 = number_or(meta, "t0", 0);
  ds.transmits = parse_transmits(meta, ds.geom.aperture_length(), t0);
  if (ds.transmits.size() != 1 && ds.transmits.size() != d.n_frames) {
    schema_error("transmit", "list length must equal 'frames'");
  }
  ds.metadata = meta;
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
  ds.data.validate();
  require(ds.geom.num_elements == static_cast<int>(ds.data.n_elements),
          "geometry and data disagree on the element count",
          ErrorCode::shape_mismatch);
  auto os = open_out(path);
  write_header(os, kDatasetMagic, dataset_metadata(ds));
  const bool iq = ds.data.kind == SampleKind::iq;
  for (const auto& v : ds.data.samples) {
    binary::put_f32(os, static_cast<float>(v.real()));
    if (iq) {
      binary::put_f32(os, static_cast<float>(v.imag()));
    }
  }
  if (!os) {
    throw Error(ErrorCode::io, "failed writing " + path.string());
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  auto is = open_in(path);
  Dataset ds;
  parse_dataset_metadata(read_header(is, kDatasetMagic, "dataset"), ds);
  auto& d = ds.data;
  const bool iq = d.kind == SampleKind::iq;
  const std::uintmax_t values = d.n_samples * d.n_elements * d.n_frames;
  const std::uintmax_t floats = values * (iq ? 2 : 1);
  const auto bytes = remaining_bytes(is);
  if (bytes % 4 != 0) {
    throw Error(ErrorCode::payload_size,
                "payload is not a whole number of float32 values");
  }
  if (iq && (bytes / 4) % 2 != 0) {
    throw Error(ErrorCode::payload_size,
                "I/Q payload has an odd number of floats");
  }
  if (bytes != 4 * floats) {
    throw Error(ErrorCode::payload_size,
                "payload size mismatch: expected " + std::to_string(4 * floats) +
                    " bytes, found " + std::to_string(bytes));
  }
  const auto buf = read_all(is, bytes);
  d.samples.resize(values);
  const char* p = buf.data();
  for (auto& v : d.samples) {
    const float re = std::bit_cast<float>(le_at<std::uint32_t>(p));
    p += 4;
    float im = 0;
    if (iq) {
      im = std::bit_cast<float>(le_at<std::uint32_t>(p));
      p += 4;
    }
    v = {re, im};
  }
  return ds;
}

PhantomFile parse_phantom(const json& doc) {
  PhantomFile pf;
  json meta = doc;
  // Channel-data shape keys are implied by the phantom.
  if (!meta.contains("kind")) {
    meta["kind"] = "rf";
  }
  if (!meta.contains("schema_version")) {
    meta["schema_version"] = kSchemaVersion;
  }
  const std::size_t n_tx =
      meta.contains("transmit") && meta["transmit"].is_array()
          ? meta["transmit"].size()
          : 1;
  meta["frames"] = n_tx;
  parse_dataset_metadata(meta, pf.acquisition);

  pf.speed_of_sound = number_or(doc, "speed_of_sound", pf.acquisition.c0);
  pf.settings.fs = pf.acquisition.data.fs;
  pf.settings.fc = pf.acquisition.data.fc;
  pf.settings.bandwidth = pf.acquisition.data.bandwidth;
  pf.settings.n_samples = pf.acquisition.data.n_samples;
  if (doc.contains("seed")) {
    pf.settings.seed = count(doc, "seed");
  }
  if (doc.contains("snr_db")) {
    pf.settings.snr_db = number(doc, "snr_db");
  }

  if (doc.contains("scatterers")) {
    const auto& rows = doc["scatterers"];
    if (!rows.is_array()) {
      schema_error("scatterers", "expected an array of [x_m, z_m, r]");
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      if (!r.is_array() || r.size() != 3 || !r[0].is_number() ||
          !r[1].is_number() || !r[2].is_number()) {
        schema_error("scatterers[" + std::to_string(k) + "]",
                     "expected [x_m, z_m, reflectivity]");
      }
      pf.phantom.scatterers.push_back(
          {r[0].get<double>(), r[1].get<double>(), r[2].get<double>()});
    }
  }
  if (doc.contains("background")) {
    const auto& b = doc["background"];
    DiffuseBackground bg;
    bg.count = count(b, "count");
    bg.x_min = number(b, "x_min");
    bg.x_max = number(b, "x_max");
    bg.z_min = number(b, "z_min");
    bg.z_max = number(b, "z_max");
    if (b.contains("anechoic")) {
      for (const auto& d : b["anechoic"]) {
        if (!d.is_array() || d.size() != 3) {
          schema_error("background.anechoic", "expected [x_m, z_m, radius_m]");
        }
        bg.anechoic.push_back(
            {{d[0].get<double>(), d[1].get<double>()}, d[2].get<double>()});
      }
    }
    pf.phantom.background = bg;
  }
  checked("scatterers", [&] { pf.phantom.validate(); });
  return pf;
}

PhantomFile load_phantom(const std::filesystem::path& path) {
  auto is = open_in(path);
  try {
    return parse_phantom(json::parse(is));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema,
                "phantom file is not valid JSON: " + std::string(e.what()));
  }
}

GridSpec parse_grid(std::string_view s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  if (parts.size() != 6) {
    throw Error(ErrorCode::invalid_argument,
                "grid must be X0,X1,Z0,Z1,NX,NZ");
  }
  auto num = [&](std::size_t k) {
    try {
      std::size_t used = 0;
      const double v = std::stod(parts[k], &used);
      if (used != parts[k].size()) {
        throw std::invalid_argument("trailing characters");
      }
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument,
                  "grid value '" + parts[k] + "' is not a number");
    }
  };
  GridSpec g{num(0), num(1), num(2), num(3), 0, 0};
  const double nx = num(4);
  const double nz = num(5);
  if (nx < 1 || nz < 1 || nx != std::floor(nx) || nz != std::floor(nz)) {
    throw Error(ErrorCode::invalid_argument,
                "grid counts NX, NZ must be positive integers");
  }
  g.nx = static_cast<std::size_t>(nx);
  g.nz = static_cast<std::size_t>(nz);
  if (!(g.z0 > 0 && g.z1 > 0)) {
    throw Error(ErrorCode::invalid_argument, "grid depths must be positive");
  }
  return g;
}

void save_raw(const std::filesystem::path& path, const BeamformedImage& img) {
  json meta = img.metadata.is_object() ? img.metadata : json::object();
  meta["schema_version"] = kSchemaVersion;
  meta["grid"] = {{"x0", img.grid.x0}, {"x1", img.grid.x1},
                  {"z0", img.grid.z0}, {"z1", img.grid.z1}, {"nx", img.grid.nx},
                  {"nz", img.grid.nz}};
  meta["ordering"] = "column-major, z fastest: index = ix * nz + iz";
  meta["value_type"] = "complex128 little-endian (re, im)";
  meta["frames"] = img.frames.size();
  const std::size_t m = img.grid.nx * img.grid.nz;
  for (const auto& f : img.frames) {
    require(f.size() == m, "frame does not match the grid",
            ErrorCode::shape_mismatch);
  }
  auto os = open_out(path);
  write_header(os, kRawMagic, meta);
  for (const auto& f : img.frames) {
    for (auto v : f) {
      binary::put_f64(os, v.real());
      binary::put_f64(os, v.imag());
    }
  }
  if (!os) {
    throw Error(ErrorCode::io, "failed writing " + path.string());
  }
}

BeamformedImage load_raw(const std::filesystem::path& path) {
  auto is = open_in(path);
  BeamformedImage img;
  img.metadata = read_header(is, kRawMagic, "raw beamformed");
  if (!img.metadata.contains("grid")) {
    schema_error("grid", "missing");
  }
  const auto& g = img.metadata["grid"];
  img.grid = {number(g, "x0"), number(g, "x1"), number(g, "z0"),
              number(g, "z1"), count(g, "nx"), count(g, "nz")};
  const std::size_t frames = count(img.metadata, "frames");
  const std::size_t m = img.grid.nx * img.grid.nz;
  const auto bytes = remaining_bytes(is);
  if (bytes != frames * m * 16) {
    throw Error(ErrorCode::payload_size,
                "raw payload size mismatch: expected " +
                    std::to_string(frames * m * 16) + " bytes, found " +
                    std::to_string(bytes));
  }
  const auto buf = read_all(is, bytes);
  const char* p = buf.data();
  img.frames.assign(frames, std::vector<cplx>(m));
  for (auto& f : img.frames) {
    for (auto& v : f) {
      const double re = std::bit_cast<double>(le_at<std::uint64_t>(p));
      const double im = std::bit_cast<double>(le_at<std::uint64_t>(p + 8));
      p += 16;
      v = {re, im};
    }
  }
  return img;
}

std::vector<std::uint8_t> to_gray(std::span<const double> img) {
  std::vector<std::uint8_t> out(img.size());
  std::transform(img.begin(), img.end(), out.begin(), [](double v) {
    return static_cast<std::uint8_t>(std::lround(255 * std::clamp(v, 0.0, 1.0)));
  });
  return out;
}

void write_pgm(const std::filesystem::path& path, std::span<const double> img,
               std::size_t nx, std::size_t nz) {
  require(img.size() == nx * nz, "image does not match the grid",
          ErrorCode::shape_mismatch);
  const auto gray = to_gray(img);
  auto os = open_out(path);
  os << "P5\n" << nx << ' ' << nz << "\n255\n";
  // Grid order is z fastest; PGM is row-major with z down the rows.
  std::vector<char> row(nx);
  for (std::size_t iz = 0; iz < nz; ++iz) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      row[ix] = static_cast<char>(gray[ix * nz + iz]);
    }
    os.write(row.data(), static_cast<std::streamsize>(nx));
  }
  if (!os) {
    throw Error(ErrorCode::io, "failed writing " + path.string());
  }
}

std::vector<Target> load_targets(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line)) {
    throw Error(ErrorCode::schema, "targets file is empty");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != "kind,x_m,z_m,radius_m,outer_m") {
    throw Error(ErrorCode::schema,
                "targets header must be kind,x_m,z_m,radius_m,outer_m");
  }
  std::vector<Target> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::stringstream ss(line);
    std::string kind;
    std::string field;
    std::vector<double> v;
    std::getline(ss, kind, ',');
    while (std::getline(ss, field, ',')) {
      try {
        v.push_back(field.empty() ? 0.0 : std::stod(field));
      } catch (const std::exception&) {
        throw Error(ErrorCode::schema,
                    "targets line " + std::to_string(lineno) + ": bad number");
      }
    }
    if (v.size() < 3) {
      throw Error(ErrorCode::schema,
                  "targets line " + std::to_string(lineno) +
                      ": expected kind,x_m,z_m,radius_m,outer_m");
    }
    Target t;
    if (kind == "cyst") {
      t.kind = TargetKind::cyst;
    } else if (kind == "wire") {
      t.kind = TargetKind::wire;
    } else {
      throw Error(ErrorCode::schema, "targets line " + std::to_string(lineno) +
                                         ": kind must be cyst or wire");
    }
    t.center = {v[0], v[1]};
    t.radius = v[2];
    t.outer = v.size() > 3 ? v[3] : 0;
    out.push_back(t);
  }
  return out;
}

} // namespace das::io

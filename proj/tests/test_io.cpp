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

#include <fstream>
#include <functional>
#include <sstream>

#include "das/error.hpp"
#include "das/io.hpp"
#include "support.hpp"

using namespace das;
using das::test::kDeg;
using nlohmann::json;

namespace {

io::Dataset sample(SampleKind kind, std::size_t frames) {
  io::Dataset ds;
  ds.geom = test::l74(8);
  ds.data = ChannelData::zeros(32, 8, frames, kind, 20.8e6, 5.2e6, 3.38e6);
  std::mt19937_64 rng(5);
  std::normal_distribution<float> n;
  for (auto& v : ds.data.samples) {
    v = {n(rng), kind == SampleKind::iq ? n(rng) : 0.0f};
  }
  for (std::size_t f = 0; f < frames; ++f) {
    ds.transmits.push_back(
        TransmitScheme::plane((-5.0 + 5.0 * double(f)) * kDeg, 1.5e-6));
  }
  ds.c0 = 1480;
  return ds;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// Rewrites a dataset file with edited metadata and the original payload.
void rewrite(const std::filesystem::path& p,
             const std::function<void(json&)>& edit, long trim = 0) {
  const auto all = slurp(p);
  std::uint64_t n = 0;
  for (int k = 0; k < 8; ++k) {
    n |= std::uint64_t(static_cast<unsigned char>(all[8 + k])) << (8 * k);
  }
  auto meta = json::parse(all.substr(16, n));
  edit(meta);
  const auto doc = meta.dump();
  std::string out = all.substr(0, 8);
  for (int k = 0; k < 8; ++k) {
    out.push_back(static_cast<char>((doc.size() >> (8 * k)) & 0xff));
  }
  out += doc;
  const auto payload = all.substr(16 + n);
  out += payload.substr(0, payload.size() - static_cast<std::size_t>(trim));
  std::ofstream(p, std::ios::binary | std::ios::trunc) << out;
}

ErrorCode load_error(const std::filesystem::path& p, std::string* what = nullptr) {
  try {
    (void)io::load_dataset(p);
  } catch (const Error& e) {
    if (what) {
      *what = e.what();
    }
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::invalid_argument;
}

} // namespace

TEST_CASE("dataset round trip") {
  const auto dir = test::scratch("io");
  for (auto kind : {SampleKind::rf, SampleKind::iq}) {
    for (std::size_t frames : {1u, 3u}) {
      auto ds = sample(kind, frames);
      ds.metadata["operator"] = "bench 2";
      const auto path = dir / "a.dset";
      io::save_dataset(path, ds);
      const auto back = io::load_dataset(path);
      CHECK(back.data.samples == ds.data.samples);
      CHECK(back.data.kind == kind);
      CHECK(back.data.n_frames == frames);
      CHECK(back.geom == ds.geom);
      CHECK(back.transmits == ds.transmits);
      CHECK(back.c0 == 1480);
      CHECK(back.metadata["operator"] == "bench 2");
      CHECK(io::dataset_metadata(back) == io::dataset_metadata(ds));

      // A second cycle is byte-identical.
      const auto path2 = dir / "b.dset";
      io::save_dataset(path2, back);
      CHECK(slurp(path) == slurp(path2));
    }
  }
}

TEST_CASE("transmit metadata keeps degree values verbatim") {
  const auto dir = test::scratch("io-tx");
  const auto path = dir / "a.dset";
  io::save_dataset(path, sample(SampleKind::rf, 1));
  rewrite(path, [](json& m) {
    m["transmit"] = {{"kind", "circular"}, {"tilt_deg", 3.3}, {"beta_deg", 71.7}};
  });
  const auto ds = io::load_dataset(path);
  CHECK(ds.transmits[0].kind == TransmitKind::circular);
  CHECK(ds.transmits[0].t0 == 1.5e-6);
  CHECK(io::dataset_metadata(ds)["transmit"]["beta_deg"] == 71.7);

  rewrite(path, [](json& m) {
    m["transmit"] = {{"kind", "focused"}, {"source_x_m", 0.001},
                     {"source_z_m", 0.03}, {"t0", 2e-6}};
  });
  const auto f = io::load_dataset(path);
  CHECK(f.transmits[0].virtual_source == Point{0.001, 0.03});
  CHECK(f.transmits[0].t0 == 2e-6);
}

TEST_CASE("payload size is checked") {
  const auto dir = test::scratch("io-size");
  const auto path = dir / "a.dset";
  for (long trim : {4L, 8L, 1L}) {
    io::save_dataset(path, sample(SampleKind::iq, 1));
    rewrite(path, [](json&) {}, trim);
    CHECK(load_error(path) == ErrorCode::payload_size);
  }
  io::save_dataset(path, sample(SampleKind::iq, 1));
  std::string what;
  rewrite(path, [](json&) {}, 4);
  CHECK(load_error(path, &what) == ErrorCode::payload_size);
  CHECK(what.find("odd") != std::string::npos);

  io::save_dataset(path, sample(SampleKind::rf, 1));
  rewrite(path, [](json& m) { m["n_s"] = 31; });
  CHECK(load_error(path) == ErrorCode::payload_size);
}

TEST_CASE("schema violations name the field") {
  const auto dir = test::scratch("io-schema");
  const auto path = dir / "a.dset";
  const std::vector<std::pair<std::string, std::function<void(json&)>>> cases{
      {"fs", [](json& m) { m.erase("fs"); }},
      {"kind", [](json& m) { m["kind"] = "bmode"; }},
      {"n_s", [](json& m) { m["n_s"] = "many"; }},
      {"schema_version", [](json& m) { m["schema_version"] = 9; }},
      {"schema_version", [](json& m) { m.erase("schema_version"); }},
      {"transmit", [](json& m) { m.erase("transmit"); }},
      {"transmit.kind", [](json& m) { m["transmit"]["kind"] = "spiral"; }},
      {"tilt_deg", [](json& m) { m["transmit"].erase("tilt_deg"); }},
      {"pitch", [](json& m) { m["element_width"] = 1.0; }},
  };
  for (const auto& [field, edit] : cases) {
    io::save_dataset(path, sample(SampleKind::rf, 1));
    rewrite(path, edit);
    std::string what;
    CHECK(load_error(path, &what) == ErrorCode::schema);
    CHECK_MESSAGE(what.find(field) != std::string::npos, what);
  }
  std::ofstream(path, std::ios::binary | std::ios::trunc) << "DASRAW01";
  CHECK(load_error(path) == ErrorCode::schema);
  CHECK(load_error(dir / "missing.dset") == ErrorCode::io);
}

TEST_CASE("grid specifications") {
  const auto g = io::parse_grid("-0.02,0.02,0.005,0.045,81,161");
  CHECK(g == io::GridSpec{-0.02, 0.02, 0.005, 0.045, 81, 161});
  CHECK(g.grid().size() == 81 * 161);
  for (const char* bad : {"", "1,2,3", "-1,1,0.1,0.2,3,x", "-1,1,0.1,0.2,3,0",
                          "-1,1,0,0.2,3,3", "-1,1,0.1,0.2,3,3,4"}) {
    CHECK_THROWS_AS((void)io::parse_grid(bad), Error);
  }
}

TEST_CASE("raw beamformed output round trip") {
  const auto dir = test::scratch("io-raw");
  io::BeamformedImage img;
  img.grid = {-0.01, 0.01, 0.01, 0.02, 3, 4};
  img.frames = {std::vector<cplx>(12), std::vector<cplx>(12)};
  for (std::size_t k = 0; k < 12; ++k) {
    img.frames[0][k] = {1.0 / 3 + double(k), -std::sqrt(double(k))};
    img.frames[1][k] = {std::exp(double(k)), 1e-300};
  }
  img.metadata["f_number"] = 1.29;
  io::save_raw(dir / "r.bin", img);
  const auto back = io::load_raw(dir / "r.bin");
  CHECK(back.grid == img.grid);
  CHECK(back.frames == img.frames);
  CHECK(back.metadata["f_number"] == 1.29);
  CHECK(back.metadata["ordering"].get<std::string>().find("z") !=
        std::string::npos);

  img.frames[1].pop_back();
  CHECK_THROWS_AS(io::save_raw(dir / "s.bin", img), Error);
}

TEST_CASE("PGM output") {
  const auto dir = test::scratch("io-pgm");
  // Grid order is z fastest: columns of 2 samples.
  const std::vector<double> img{0, 0.5, 1, 0.25, 2, -1};
  CHECK(io::to_gray(img) == std::vector<std::uint8_t>{0, 128, 255, 64, 255, 0});
  io::write_pgm(dir / "a.pgm", img, 3, 2);
  const auto bytes = slurp(dir / "a.pgm");
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(bytes.size() == header.size() + 6);
  CHECK(bytes.substr(0, header.size()) == header);
  const std::string px = bytes.substr(header.size());
  // Row 0 holds iz = 0 across x.
  CHECK(px == std::string{'\0', '\xff', '\xff', '\x80', '\x40', '\0'});
  CHECK_THROWS_AS(io::write_pgm(dir / "b.pgm", img, 2, 2), Error);
}

TEST_CASE("targets table") {
  const auto dir = test::scratch("io-targets");
  std::ofstream(dir / "t.csv") << "kind,x_m,z_m,radius_m,outer_m\n"
                                  "cyst,0,0.02,0.003,0.006\n"
                                  "\n"
                                  "wire,-0.001,0.03,0.0005,0\n";
  const auto t = io::load_targets(dir / "t.csv");
  REQUIRE(t.size() == 2);
  CHECK(t[0].kind == io::TargetKind::cyst);
  CHECK(t[0].outer == 0.006);
  CHECK(t[1].center == Point{-0.001, 0.03});

  std::ofstream(dir / "u.csv") << "kind,x_m,z_m,radius_m,outer_m\n"
                                  "blob,0,0.02,0.003,0.006\n";
  CHECK_THROWS_AS((void)io::load_targets(dir / "u.csv"), Error);
  std::ofstream(dir / "v.csv") << "x,z\n";
  CHECK_THROWS_AS((void)io::load_targets(dir / "v.csv"), Error);
}

TEST_CASE("phantom description") {
  const json doc = {
      {"fs", 20e6},        {"fc", 5e6},         {"bandwidth", 3e6},
      {"n_s", 512},        {"N_e", 16},         {"pitch", 3e-4},
      {"element_width", 2.5e-4},
      {"transmit", json::array({{{"kind", "plane"}, {"tilt_deg", -4}},
                                {{"kind", "plane"}, {"tilt_deg", 4}}})},
      {"scatterers", {{0, 0.01, 1}, {0.001, 0.012, 0.5}}},
      {"background",
       {{"count", 50}, {"x_min", -0.002}, {"x_max", 0.002}, {"z_min", 0.005},
        {"z_max", 0.015}, {"anechoic", {{0, 0.01, 0.001}}}}},
      {"speed_of_sound", 1500}, {"seed", 3}, {"snr_db", 12}};
  const auto p = io::parse_phantom(doc);
  CHECK(p.phantom.scatterers.size() == 2);
  CHECK(p.phantom.background->anechoic.size() == 1);
  CHECK(p.acquisition.transmits.size() == 2);
  CHECK(p.acquisition.data.kind == SampleKind::rf);
  CHECK(p.speed_of_sound == 1500);
  CHECK(p.settings.seed == 3);
  CHECK(*p.settings.snr_db == 12);
  CHECK(p.settings.n_samples == 512);

  auto bad = doc;
  bad["scatterers"] = {{0, 0.01}};
  CHECK_THROWS_AS((void)io::parse_phantom(bad), Error);
  bad = doc;
  bad["scatterers"] = {{0, -0.01, 1}};
  CHECK_THROWS_AS((void)io::parse_phantom(bad), Error);
}

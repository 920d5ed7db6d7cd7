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

#include "das/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "das/aperture.hpp"
#include "das/error.hpp"
#include "das/io.hpp"
#include "das/soundspeed.hpp"

namespace das::cli {

namespace {

constexpr double kDeg = std::numbers::pi / 180;

// Error messages must stay on one line.
std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

double parse_number(const std::string& text, const std::string& flag) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == text.size() && !text.empty() && std::isfinite(v),
          flag + ": expected a number, got '" + text + "'");
  return v;
}

std::ofstream open_text(const std::string& path, bool append = false) {
  std::ofstream os(path, append ? std::ios::app : std::ios::trunc);
  if (!os) {
    throw Error(ErrorCode::io, "cannot write " + path);
  }
  os << std::setprecision(10);
  return os;
}

ChannelData as_iq(const ChannelData& data) {
  return data.kind == SampleKind::iq ? data : iq_demodulate(data);
}

ChannelData single_frame(const ChannelData& data, std::size_t f) {
  auto out = data;
  out.n_frames = 1;
  const auto block = data.frame(f);
  out.samples.assign(block.begin(), block.end());
  return out;
}

double resolve_fnumber(const std::string& text, const io::Dataset& ds,
                       double c) {
  if (text == "auto") {
    return directivity_fnumber(ds.geom.element_width, c, ds.data.fc,
                               ds.data.bandwidth)
        .f_number;
  }
  const double f = parse_number(text, "--fnumber");
  require(f >= 0, "--fnumber must be nonnegative or 'auto'");
  return f;
}

// ---------------------------------------------------------------- beamform

struct BeamformArgs {
  std::string in, grid, fnumber = "auto", out, raw, cache_dir;
  std::optional<double> c;
  double dr = 40;
  bool compound = false;
  std::size_t frame = 0;
};

int run_beamform(const BeamformArgs& a, std::ostream& out) {
  const auto ds = io::load_dataset(a.in);
  const auto spec = io::parse_grid(a.grid);
  const auto grid = spec.grid();
  const Medium medium{a.c.value_or(ds.c0)};
  medium.validate();
  require(a.dr > 0, "--dr must be positive");

  const auto iq = as_iq(ds.data);
  ApertureConfig aperture;
  aperture.f_number = resolve_fnumber(a.fnumber, ds, medium.speed_of_sound);
  const auto layout = SignalLayout::of(iq);

  auto matrix_for = [&](const TransmitScheme& scheme) {
    if (!a.cache_dir.empty()) {
      return cached_das_matrix(a.cache_dir, grid, ds.geom, scheme, medium,
                               layout, aperture);
    }
    return build_das_matrix(grid, ds.geom, scheme, medium, layout, aperture);
  };

  std::vector<BeamformedFrame> frames;
  if (ds.transmits.size() == 1) {
    frames = beamform(matrix_for(ds.transmits.front()), iq);
  } else {
    for (std::size_t f = 0; f < iq.n_frames; ++f) {
      auto one = beamform(matrix_for(ds.transmits[f]), single_frame(iq, f));
      frames.push_back(std::move(one.front()));
    }
  }

  std::vector<cplx> shown;
  if (a.compound) {
    frames = {compound(frames)};
    shown = frames.front().values;
  } else {
    require(a.frame < frames.size(), "--frame out of range");
    shown = frames[a.frame].values;
  }
  const auto img = log_compress(envelope(shown), a.dr);
  io::write_pgm(a.out, img, grid.nx, grid.nz);

  if (!a.raw.empty()) {
    io::BeamformedImage raw;
    raw.grid = spec;
    for (auto& fr : frames) {
      raw.frames.push_back(std::move(fr.values));
    }
    raw.metadata["speed_of_sound"] = medium.speed_of_sound;
    raw.metadata["f_number"] = aperture.f_number;
    raw.metadata["compound"] = a.compound;
    io::save_raw(a.raw, raw);
  }
  out << "f_number=" << fmt(aperture.f_number) << '\n'
      << "speed_of_sound=" << fmt(medium.speed_of_sound) << '\n';
  return 0;
}

// ----------------------------------------------------------------- fnumber

struct FnumberArgs {
  double width = 0, fc = 0, bw = 0, c = 1540;
  double steer_deg = 0, thresh = 0.71;
};

int run_fnumber(const FnumberArgs& a, std::ostream& out) {
  const auto r = directivity_fnumber(a.width, a.c, a.fc, a.bw, a.thresh,
                                     a.steer_deg * kDeg);
  out << "lambda_min=" << fmt(r.lambda_min) << '\n'
      << "alpha_deg=" << fmt(r.alpha / kDeg) << '\n'
      << "fnumber=" << fmt(r.f_number) << '\n';
  return 0;
}

// --------------------------------------------------------------------- sos

struct SosArgs {
  std::string in, grid, curve, fnumber = "0";
  std::vector<double> bounds{1200, 1700};
  double tolerance = 1;
};

int run_sos(const SosArgs& a, std::ostream& out, std::ostream& err) {
  const auto ds = io::load_dataset(a.in);
  const auto grid = io::parse_grid(a.grid).grid();
  require(a.bounds.size() == 2 && a.bounds[0] < a.bounds[1],
          "--bounds expects LO,HI with LO < HI");
  SosOptions opt;
  opt.c0 = ds.c0;
  opt.c_lo = a.bounds[0];
  opt.c_hi = a.bounds[1];
  opt.tolerance = a.tolerance;
  ApertureConfig aperture;
  aperture.f_number = resolve_fnumber(a.fnumber, ds, ds.c0);

  const auto est = estimate_sos(as_iq(ds.data), grid, ds.geom, ds.transmits,
                                aperture, opt);
  if (!a.curve.empty()) {
    auto os = open_text(a.curve);
    os << "c_m_per_s,Qp\n";
    for (const auto& [c, q] : est.qp_curve) {
      os << c << ',' << q << '\n';
    }
  }
  if (est.at_bound) {
    err << "warning: c_hat lies at a search bound; widen --bounds\n";
  }
  out << "c_hat=" << est.c_hat << " m/s\n";
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string phantom, out;
  std::optional<std::uint64_t> seed;
};

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  auto pf = io::load_phantom(a.phantom);
  if (a.seed) {
    pf.settings.seed = *a.seed;
  }
  auto& ds = pf.acquisition;
  const Medium medium{pf.speed_of_sound};
  const bool iq = ds.data.kind == SampleKind::iq;
  const std::size_t n_frames = ds.transmits.size();

  std::vector<cplx> samples;
  ChannelData first;
  for (std::size_t f = 0; f < n_frames; ++f) {
    auto acq = pf.settings;
    acq.noise_stream = f;
    auto frame = iq ? synth_iq(pf.phantom, ds.geom, ds.transmits[f], medium, acq)
                    : synth_channel_data(pf.phantom, ds.geom, ds.transmits[f],
                                         medium, acq);
    samples.insert(samples.end(), frame.samples.begin(), frame.samples.end());
    if (f == 0) {
      first = std::move(frame);
    }
  }
  first.n_frames = n_frames;
  first.samples = std::move(samples);
  ds.data = std::move(first);
  ds.metadata["seed"] = pf.settings.seed;
  io::save_dataset(a.out, ds);
  out << "frames=" << n_frames << '\n';
  return 0;
}

// ----------------------------------------------------------------- metrics

struct MetricsArgs {
  std::string in, grid, targets, out, param;
  std::size_t frame = 0;
  bool append = false;
};

int run_metrics(const MetricsArgs& a, std::ostream& out, std::ostream& err) {
  const auto raw = io::load_raw(a.in);
  if (!a.grid.empty()) {
    require(io::parse_grid(a.grid) == raw.grid,
            "--grid does not match the grid stored in " + a.in,
            ErrorCode::shape_mismatch);
  }
  require(a.frame < raw.frames.size(), "--frame out of range");
  const auto grid = raw.grid.grid();
  const auto& values = raw.frames[a.frame];
  const auto targets = io::load_targets(a.targets);

  const bool header = !a.append || !std::filesystem::exists(a.out) ||
                      std::filesystem::file_size(a.out) == 0;
  auto os = open_text(a.out, a.append);
  if (header) {
    os << "param,target,kind,x_m,z_m,cnr,fwhm_lateral_m,fwhm_axial_m\n";
  }

  // Unresolvable widths are reported as nan so one bad target does not
  // discard a whole sweep row.
  auto width = [&](const io::Target& t, Axis axis, std::size_t k) {
    try {
      return fmt(fwhm(values, grid, t.center, axis, t.radius));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::unresolvable) {
        throw;
      }
      err << "warning: target " << k << ": " << e.what() << '\n';
      return std::string("nan");
    }
  };

  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto& t = targets[k];
    os << a.param << ',' << k << ','
       << (t.kind == io::TargetKind::cyst ? "cyst" : "wire") << ','
       << fmt(t.center.x) << ',' << fmt(t.center.z) << ',';
    if (t.kind == io::TargetKind::cyst) {
      // Keep both regions clear of the blurred cyst boundary.
      const RegionSpec region{{t.center, 0.8 * t.radius},
                              Annulus{t.center, 1.2 * t.radius, t.outer}};
      os << fmt(cnr(values, grid, region)) << ",,\n";
    } else {
      os << ',' << width(t, Axis::lateral, k) << ','
         << width(t, Axis::axial, k) << '\n';
    }
  }
  out << "targets=" << targets.size() << '\n';
  return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Delay-and-sum beamforming toolkit", "dastool"};
  app.require_subcommand(1);

  BeamformArgs bf;
  auto* beam = app.add_subcommand("beamform", "Beamform a dataset to a PGM");
  beam->add_option("--in", bf.in, "Dataset file")->required();
  beam->add_option("--grid", bf.grid, "X0,X1,Z0,Z1,NX,NZ in meters")
      ->required();
  beam->add_option("--c", bf.c, "Speed of sound [m/s] (default: c0_nominal)");
  beam->add_option("--fnumber", bf.fnumber, "Receive f-number or 'auto'");
  beam->add_option("--out", bf.out, "PGM output")->required();
  beam->add_flag("--compound", bf.compound, "Coherently compound all frames");
  beam->add_option("--frame", bf.frame, "Frame shown when not compounding");
  beam->add_option("--dr", bf.dr, "Dynamic range [dB]");
  beam->add_option("--raw", bf.raw, "Raw complex output");
  beam->add_option("--cache-dir", bf.cache_dir, "DAS matrix cache directory");

  FnumberArgs fn;
  auto* fnum = app.add_subcommand("fnumber", "Directivity-derived f-number");
  fnum->add_option("--width", fn.width, "Element width [m]")->required();
  fnum->add_option("--fc", fn.fc, "Center frequency [Hz]")->required();
  fnum->add_option("--bw", fn.bw, "Bandwidth [Hz]")->required();
  fnum->add_option("--c", fn.c, "Speed of sound [m/s]");
  fnum->add_option("--steer", fn.steer_deg, "Receive steering [deg]");
  fnum->add_option("--thresh", fn.thresh, "Directivity threshold");

  SosArgs sa;
  auto* sos = app.add_subcommand("sos", "Estimate the speed of sound");
  sos->add_option("--in", sa.in, "Dataset file")->required();
  sos->add_option("--grid", sa.grid, "X0,X1,Z0,Z1,NX,NZ in meters")
      ->required();
  sos->add_option("--bounds", sa.bounds, "LO,HI [m/s]")->delimiter(',');
  sos->add_option("--curve", sa.curve, "Qp curve CSV output");
  sos->add_option("--fnumber", sa.fnumber, "Receive f-number or 'auto'");
  sos->add_option("--tol", sa.tolerance, "Search tolerance [m/s]");

  SimulateArgs sim;
  auto* simc = app.add_subcommand("simulate", "Synthesize a dataset");
  simc->add_option("--phantom", sim.phantom, "Phantom JSON")->required();
  simc->add_option("--out", sim.out, "Dataset output")->required();
  simc->add_option("--seed", sim.seed, "Override the phantom seed");

  MetricsArgs ma;
  auto* met = app.add_subcommand("metrics", "CNR / FWHM table");
  met->add_option("--in", ma.in, "Raw beamformed file")->required();
  met->add_option("--grid", ma.grid, "Expected grid (checked)");
  met->add_option("--targets", ma.targets, "Targets CSV")->required();
  met->add_option("--out", ma.out, "Metrics CSV output")->required();
  met->add_option("--param", ma.param, "Sweep parameter value for the rows");
  met->add_option("--frame", ma.frame, "Frame index");
  met->add_flag("--append", ma.append, "Append rows to an existing table");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (beam->parsed()) {
      return run_beamform(bf, out);
    }
    if (fnum->parsed()) {
      return run_fnumber(fn, out);
    }
    if (sos->parsed()) {
      return run_sos(sa, out, err);
    }
    if (simc->parsed()) {
      return run_simulate(sim, out);
    }
    return run_metrics(ma, out, err);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << one_line(e.what())
        << '\n';
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << '\n';
  }
  return 1;
}

} // namespace das::cli

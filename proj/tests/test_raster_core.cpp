/*
 * Copyright 2026 The staticcolor Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "staticcolor/csv.hpp"
#include "staticcolor/header.hpp"
#include "staticcolor/memory.hpp"
#include "staticcolor/raster.hpp"
#include "staticcolor/raster_io.hpp"
#include "staticcolor/streaming.hpp"
#include "support.hpp"

using namespace staticcolor;
using testing_support::TempDir;

namespace {

Plane single(double raw) { return Plane(1, 1, raw); }

std::vector<char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Grid, BoundsCheckedAccess) {
  Grid<int> g(2, 3, 7);
  EXPECT_EQ(g.at(1, 2), 7);
  EXPECT_THROW(g.at(2, 0), DimensionError);
  EXPECT_THROW(g.at(0, 3), DimensionError);
  EXPECT_EQ(g.row(1).size(), 3u);
}

TEST(Header, ParsesCommentsAndRejectsDuplicates) {
  const auto h = Header::parse("# comment\nwidth = 4\n  height=2  \n\nname = a b\n");
  EXPECT_EQ(h.count("width"), 4u);
  EXPECT_EQ(h.count("height"), 2u);
  EXPECT_EQ(h.at("name"), "a b");
  EXPECT_THROW(Header::parse("a = 1\na = 2\n"), FormatError);
  EXPECT_THROW(Header::parse("no equals sign\n"), FormatError);
}

TEST(Header, NumbersRoundTripExactly) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(parse_double(format_number(v)).value(), v);
  }
}

TEST(Calibration, ZeroAndFullScale) {
  const BandMetadata meta{1, 0.48, 1.0 / 255.0, 0.0, {}};
  EXPECT_EQ(apply_calibration(single(0), meta).values(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(apply_calibration(single(255), meta).values(0, 0), 1.0);
}

TEST(Calibration, MidScaleMatchesScalarArithmetic) {
  const BandMetadata meta{1, 0.48, 1.0 / 255.0, 0.0, {}};
  const double expected = 128.0 * (1.0 / 255.0) + 0.0;
  EXPECT_EQ(apply_calibration(single(128), meta).values(0, 0), expected);
  EXPECT_NEAR(expected, 0.50196, 1e-5);
}

TEST(Calibration, ClampsAndCounts) {
  const BandMetadata meta{1, 0.48, 0.01, -0.05, {}};
  Plane raw(1, 3, 0.0);
  raw(0, 0) = 0;    // -0.05 -> 0
  raw(0, 1) = 50;   // 0.45
  raw(0, 2) = 200;  // 1.95 -> 1
  const auto out = apply_calibration(raw, meta);
  EXPECT_EQ(out.values(0, 0), 0.0);
  EXPECT_NEAR(out.values(0, 1), 0.45, 1e-12);
  EXPECT_EQ(out.values(0, 2), 1.0);
  EXPECT_EQ(out.clamped, 2u);
}

TEST(Calibration, NodataMarksInvalid) {
  const BandMetadata meta{1, 0.48, 0.001, 0.0, 65535.0};
  Plane raw(1, 2, 100.0);
  raw(0, 1) = 65535;
  const auto out = apply_calibration(raw, meta);
  EXPECT_EQ(out.valid(0, 0), 1);
  EXPECT_EQ(out.valid(0, 1), 0);
  EXPECT_EQ(out.clamped, 0u);
}

TEST(Calibration, Errors) {
  EXPECT_THROW(apply_calibration(single(1), BandMetadata{1, 0.48, 0.0, 0.0, {}}), ConfigError);
  Plane raw(2, 3, 1.0);
  raw(1, 2) = std::nan("");
  try {
    apply_calibration(raw, BandMetadata{1, 0.48, 1.0, 0.0, {}});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
  }
}

TEST(BandMetadata, Invariants) {
  EXPECT_THROW((BandMetadata{1, 0.0}.validate()), ConfigError);
  EXPECT_THROW((BandMetadata{1, 0.5, 0.0}.validate()), ConfigError);
  EXPECT_NO_THROW((BandMetadata{1, 0.5}.validate()));
}

TEST(ImageIo, TwoByTwoByTwoBytePayload) {
  TempDir dir;
  const auto hdr = dir / "img.hdr";
  {
    std::ofstream h(hdr);
    h << "width = 2\nheight = 2\nbands = 2\ndtype = uint8\ninterleave = bsq\n"
         "calibration = apply\nband.1.wavelength = 0.66\nband.1.gain = 0.00392156862745098\n"
         "band.2.wavelength = 0.83\nband.2.gain = 0.00392156862745098\n";
  }
  {
    std::ofstream p(dir / "img.raw", std::ios::binary);
    const unsigned char bytes[8] = {0, 64, 128, 255, 255, 128, 64, 0};
    p.write(reinterpret_cast<const char*>(bytes), 8);
  }
  const auto img = io::read_image(hdr);
  ASSERT_EQ(img.band_count(), 2u);
  EXPECT_EQ(img.rows(), 2u);
  EXPECT_EQ(img.cols(), 2u);
  // Plane-wise oracle: calibration applied to the decoded plane directly.
  Plane raw(2, 2, 0.0);
  raw(0, 0) = 0;
  raw(0, 1) = 64;
  raw(1, 0) = 128;
  raw(1, 1) = 255;
  const auto expected = apply_calibration(raw, img.band(0));
  EXPECT_EQ(img.plane(0), expected.values);
  for (double v : img.plane(1).values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }

  // One byte short.
  std::filesystem::resize_file(dir / "img.raw", 7);
  EXPECT_THROW(io::read_image(hdr), TruncatedFileError);
}

TEST(ImageIo, UnknownSampleTypeIsFormatError) {
  TempDir dir;
  std::ofstream(dir / "x.hdr") << "width = 1\nheight = 1\nbands = 2\ndtype = complex64\n";
  EXPECT_THROW(io::read_image(dir / "x.hdr"), FormatError);
}

TEST(ImageIo, SingleBandImageRejected) {
  TempDir dir;
  std::ofstream(dir / "x.hdr") << "width = 1\nheight = 1\nbands = 1\ndtype = uint8\n"
                                   "band.1.wavelength = 0.5\n";
  std::ofstream(dir / "x.raw", std::ios::binary) << 'a';
  EXPECT_THROW(io::read_image(dir / "x.hdr"), FormatError);
}

TEST(ImageIo, WriteReadWriteIsByteIdentical) {
  TempDir dir;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dn(0, 10000);
  const std::vector<BandMetadata> bands = {{1, 0.48, 1e-4, 0.0, 65535.0}, {4, 0.83, 1e-4, 0.0, 65535.0},
                                           {5, 1.6, 1e-4, 0.0, 65535.0}};
  // Raw uint16 payload written by hand, then read and written back.
  Header h = io::base_header(5, 7, 3, SampleType::UInt16);
  h.set("calibration", "apply");
  for (std::size_t b = 0; b < 3; ++b) {
    const std::string k = "band." + std::to_string(b + 1) + ".";
    h.set(k + "id", bands[b].band_id);
    h.set(k + "wavelength", bands[b].center_wavelength);
    h.set(k + "gain", bands[b].gain);
    h.set(k + "offset", bands[b].offset);
    h.set(k + "nodata", *bands[b].nodata);
  }
  {
    io::RasterFileWriter w(dir / "a.hdr", h);
    for (std::size_t b = 0; b < 3; ++b) {
      std::vector<double> raw(35);
      for (auto& v : raw) v = dn(rng);
      raw[3] = 65535;
      w.write_rows(b, 0, raw);
    }
    w.close();
  }
  const auto img = io::read_image(dir / "a.hdr");
  EXPECT_EQ(img.valid_count(), 34u);
  EXPECT_EQ(img.find_band(4), 1u);
  io::write_image(dir / "b.hdr", img);
  EXPECT_EQ(slurp(dir / "a.raw"), slurp(dir / "b.raw"));
  EXPECT_EQ(io::read_image(dir / "b.hdr"), img);
}

TEST(CategoricalIo, RoundTripKeepsLegend) {
  TempDir dir;
  std::mt19937_64 rng(5);
  CategoricalMap map{testing_support::random_labels(rng, 9, 13, 4, 0.1),
                     testing_support::numbered_legend(4)};
  io::write_categorical_map(dir / "m.hdr", map);
  EXPECT_EQ(io::read_categorical_map(dir / "m.hdr"), map);
}

TEST(StripCursor, PartitionArithmetic) {
  StripCursor cursor(10, 4);
  std::vector<std::size_t> sizes;
  while (auto s = cursor.next()) sizes.push_back(s->core_rows());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{4, 4, 2}));

  StripCursor whole(10, 10);
  EXPECT_EQ(whole.next()->rows(), 10u);
  EXPECT_FALSE(whole.next());

  StripCursor taller(10, 25);
  EXPECT_EQ(taller.next()->rows(), 10u);

  EXPECT_THROW(StripCursor(10, 0), ConfigError);
}

TEST(StripCursor, OverlapCarriesContextRows) {
  StripCursor cursor(10, 4, 1);
  const auto a = *cursor.next();
  EXPECT_EQ(a, (StripBounds{0, 5, 0, 4}));
  const auto b = *cursor.next();
  EXPECT_EQ(b, (StripBounds{3, 9, 4, 8}));
  EXPECT_EQ(b.core_offset(), 1u);
  const auto c = *cursor.next();
  EXPECT_EQ(c, (StripBounds{7, 10, 8, 10}));
}

TEST(Streaming, ReassemblyEqualsWholeImageRead) {
  TempDir dir;
  std::mt19937_64 rng(17);
  auto img = testing_support::random_image(rng, 37, 11, 3);
  img.valid()(5, 5) = 0;
  io::write_image(dir / "s.hdr", img);
  const auto whole = io::read_image(dir / "s.hdr");
  for (std::size_t h : {1u, 4u, 10u, 37u, 50u}) {
    io::ImageFileSource source(dir / "s.hdr");
    MultiSpectralImage rebuilt(whole.rows(), whole.cols(), whole.bands());
    rebuilt.set_storage(whole.storage());
    stream_strips(source, h, 1, [&](ImageStrip&& strip) {
      const auto& s = strip.bounds;
      for (std::size_t r = 0; r < s.core_rows(); ++r) {
        const std::size_t local = s.core_offset() + r;
        for (std::size_t b = 0; b < whole.band_count(); ++b) {
          std::copy_n(strip.image.plane(b).row(local).data(), whole.cols(),
                      rebuilt.plane(b).row(s.core_first + r).data());
        }
        std::copy_n(strip.image.valid().row(local).data(), whole.cols(),
                    rebuilt.valid().row(s.core_first + r).data());
      }
    });
    EXPECT_EQ(rebuilt, whole) << "strip height " << h;
  }
}

TEST(Streaming, PeakMemoryIndependentOfHeight) {
  TempDir dir;
  std::mt19937_64 rng(23);
  std::size_t peaks[2] = {0, 0};
  const std::size_t heights[2] = {64, 1024};
  for (int i = 0; i < 2; ++i) {
    const auto img = testing_support::random_image(rng, heights[i], 32, 4);
    const auto hdr = dir / ("h" + std::to_string(i) + ".hdr");
    io::write_image(hdr, img);
    io::ImageFileSource source(hdr);
    CountingResource counter;
    stream_strips(source, 16, 0, [](ImageStrip&&) {}, &counter);
    peaks[i] = counter.peak_bytes();
  }
  EXPECT_EQ(peaks[0], peaks[1]);
  EXPECT_GT(peaks[0], 0u);
}

TEST(Csv, QuotingRoundTrip) {
  const csv::Row row = {"plain", "with,comma", "with \"quote\"", ""};
  const auto rows = csv::parse(csv::format_row(row) + "\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], row);
}

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

// staticcolor command-line tool. One subcommand per pipeline stage:
//
//   classify   multispectral image -> color-name map
//   aggregate  color-name map -> coarser color-name map
//   translate  categorical map -> map over another legend
//   segment    categorical map (+ image) -> segments, aura, superpixels,
//              reconstruction, RMSE
//   compare    two maps or a count table -> harmonized relation + CVPAI2
//   evidence   relation + per-object memberships -> class scores
//
// Every run validates its input paths before doing any work and writes a
// JSON manifest with the configuration and SHA-256 of every input and
// output file. Exit codes: 0 success, 1 processing error, 2 usage error or
// missing input, 3 invariant violation.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "staticcolor/ccl.hpp"
#include "staticcolor/classify.hpp"
#include "staticcolor/compare.hpp"
#include "staticcolor/evidence.hpp"
#include "staticcolor/parallel.hpp"
#include "staticcolor/pipeline.hpp"
#include "staticcolor/raster_io.hpp"
#include "staticcolor/reports.hpp"
#include "staticcolor/rule_parser.hpp"
#include "staticcolor/specl.hpp"
#include "staticcolor/streaming.hpp"
#include "staticcolor/superpixels.hpp"
#include "staticcolor/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace staticcolor;

namespace {

constexpr int kExitProcessing = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialisation failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

/// A raster header plus its payload, or just the file itself.
std::vector<fs::path> files_of(const fs::path& path) {
  std::vector<fs::path> out{path};
  if (path.extension() == ".hdr") out.push_back(io::payload_path(path, Header::load(path)));
  return out;
}

/// Fails with a usage error unless `path` (and, for a raster header, its
/// payload) exists.
void require_input(const fs::path& path, const char* what) {
  if (!fs::is_regular_file(path)) {
    throw UsageError(std::string(what) + " not found: " + path.string());
  }
  if (path.extension() == ".hdr") {
    fs::path payload;
    try {
      payload = io::payload_path(path, Header::load(path));
    } catch (const Error& e) {
      throw UsageError(std::string(what) + " " + path.string() + ": " + e.what());
    }
    if (!fs::is_regular_file(payload)) {
      throw UsageError(std::string(what) + " payload not found: " + payload.string());
    }
  }
}

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  if (!dir.empty()) fs::create_directories(dir, ec);
  if (ec || (!dir.empty() && !fs::is_directory(dir))) {
    throw UsageError("cannot create output directory " + dir.string());
  }
}

json file_entry(const fs::path& path) {
  return {{"path", path.string()}, {"bytes", fs::file_size(path)}, {"sha256", sha256_file(path)}};
}

/// Run record written next to the outputs.
class Manifest {
 public:
  Manifest(const std::string& command, const std::vector<std::string>& argv) {
    doc_["tool"] = "staticcolor";
    doc_["version"] = std::string(kVersion);
    doc_["command"] = command;
    doc_["argv"] = argv;
    doc_["config"] = json::object();
    doc_["inputs"] = json::array();
    doc_["outputs"] = json::array();
    doc_["invariants"] = json::object();
  }

  json& config() { return doc_["config"]; }

  void input(const fs::path& path) { inputs_.push_back(path); }
  void output(const fs::path& path) { outputs_.push_back(path); }

  /// Records a named check; a failed check makes the run exit with 3.
  void check(const std::string& name, bool ok) {
    doc_["invariants"][name] = ok;
    if (!ok) failed_.push_back(name);
  }

  void write(const fs::path& path) {
    for (const auto& p : inputs_) {
      for (const auto& f : files_of(p)) doc_["inputs"].push_back(file_entry(f));
    }
    for (const auto& p : outputs_) {
      for (const auto& f : files_of(p)) doc_["outputs"].push_back(file_entry(f));
    }
    std::ofstream out(path, std::ios::trunc);
    out << doc_.dump(2) << "\n";
    if (!out) throw IoError("cannot write manifest " + path.string());
    if (!failed_.empty()) {
      std::string names;
      for (const auto& n : failed_) names += (names.empty() ? "" : ", ") + n;
      throw InvariantError("invariant check failed: " + names);
    }
  }

 private:
  json doc_;
  std::vector<fs::path> inputs_;
  std::vector<fs::path> outputs_;
  std::vector<std::string> failed_;
};

fs::path manifest_beside(const fs::path& out) {
  return out.parent_path() / (out.stem().string() + ".manifest.json");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

json stats_json(const SummaryStats& s) {
  return {{"count", s.count()}, {"min", s.min()}, {"max", s.max()}, {"mean", s.mean()},
          {"stdev", s.stdev()}};
}

Adjacency adjacency_of(int n) { return parse_adjacency(n); }

// ---------------------------------------------------------------------------
// Options shared by subcommands

struct Common {
  std::size_t workers = 0;
  std::string manifest;
  std::vector<std::string> argv;

  std::size_t worker_count() const { return workers ? workers : default_workers(); }
};

// ---------------------------------------------------------------------------
// classify

struct ClassifyArgs {
  std::string in, out, rules, policy;
  std::size_t stream = 0;
};

int run_classify(const ClassifyArgs& a, const Common& common) {
  require_input(a.in, "input image");
  if (!a.rules.empty()) require_input(a.rules, "rule file");
  prepare_output_dir(fs::path(a.out).parent_path());

  RuleSet rules = a.rules.empty() ? specl_rules() : load_rules(a.rules);
  if (a.policy == "first-match") rules.policy = MatchPolicy::FirstMatch;
  if (a.policy == "last-match") rules.policy = MatchPolicy::LastMatch;

  Manifest manifest("classify", common.argv);
  manifest.input(a.in);
  if (!a.rules.empty()) manifest.input(a.rules);
  manifest.config() = {{"rules", a.rules.empty() ? "builtin:specl" : a.rules},
                       {"policy", std::string(to_string(rules.policy))},
                       {"stream_rows", a.stream},
                       {"workers", common.worker_count()}};

  io::ImageFileSource source(a.in);
  const BoundRules bound = bind_rules(rules, source.bands());
  const std::size_t workers = common.worker_count();
  std::vector<ClassifyStats> per_worker(workers);
  std::map<Label, std::size_t> histogram;
  auto classify_strip = [&](const MultiSpectralImage& strip, Grid<Label>& labels) {
    for_each_row_block(strip.rows(), workers, [&](std::size_t w, std::size_t first, std::size_t last) {
      classify_rows(strip, bound, first, last, labels, per_worker[w]);
    });
    for (Label l : labels.values()) ++histogram[l];
  };

  const std::size_t strip_rows = a.stream ? a.stream : source.rows();
  io::RasterFileWriter writer(a.out, io::categorical_header(source.rows(), source.cols(), bound.legend));
  stream_strips(source, strip_rows, 0, [&](ImageStrip&& s) {
    Grid<Label> labels(s.image.rows(), s.image.cols(), kNoDataLabel);
    classify_strip(s.image, labels);
    writer.write_grid_rows(0, s.bounds.first, labels);
  });
  writer.close();
  manifest.output(a.out);

  ClassifyStats total;
  for (const auto& s : per_worker) {
    total.pixel_visits += s.pixel_visits;
    total.nodata_pixels += s.nodata_pixels;
    total.fallback_pixels += s.fallback_pixels;
  }
  manifest.check("every_pixel_visited_once", total.pixel_visits == source.rows() * source.cols());

  json classes = json::array();
  for (const auto& [label, n] : histogram) {
    const auto at = bound.legend.index_of(label);
    classes.push_back({{"label", label}, {"name", at ? bound.legend[*at].name : "nodata"}, {"pixels", n}});
  }
  manifest.config()["classes"] = classes;
  for (const auto& c : classes) {
    std::cout << c["label"].get<int>() << "\t" << c["pixels"].get<std::size_t>() << "\t"
              << c["name"].get<std::string>() << "\n";
  }
  manifest.write(common.manifest.empty() ? manifest_beside(a.out) : fs::path(common.manifest));
  return 0;
}

// ---------------------------------------------------------------------------
// aggregate / translate

struct RelabelArgs {
  std::string in, out, mapping, resolutions;
};

int run_relabel(const RelabelArgs& a, const Common& common, bool aggregation) {
  require_input(a.in, "input map");
  require_input(a.mapping, "mapping file");
  if (!a.resolutions.empty()) require_input(a.resolutions, "resolution file");
  prepare_output_dir(fs::path(a.out).parent_path());

  Manifest manifest(aggregation ? "aggregate" : "translate", common.argv);
  manifest.input(a.in);
  manifest.input(a.mapping);
  if (!a.resolutions.empty()) manifest.input(a.resolutions);
  manifest.config() = {{"mapping", a.mapping}, {"resolutions", a.resolutions}};

  const CategoricalMap map = io::read_categorical_map(a.in);
  LegendMapping mapping = LegendMapping::load_csv(a.mapping);
  if (!a.resolutions.empty()) mapping = mapping.resolved(LegendMapping::load_resolutions(a.resolutions));
  const CategoricalMap out = aggregation ? aggregate(map, LegendAggregation(map.legend, mapping))
                                         : translate_legend(map, mapping);
  io::write_categorical_map(a.out, out);
  manifest.output(a.out);

  std::size_t nodata_in = 0, nodata_out = 0;
  for (Label l : map.labels.values()) nodata_in += l == kNoDataLabel;
  for (Label l : out.labels.values()) nodata_out += l == kNoDataLabel;
  manifest.check("nodata_preserved", nodata_in == nodata_out);
  manifest.write(common.manifest.empty() ? manifest_beside(a.out) : fs::path(common.manifest));
  return 0;
}

// ---------------------------------------------------------------------------
// segment

struct SegmentArgs {
  std::string in, image, out_dir;
  int adjacency = 8;
  std::size_t stream = 0;
  bool json = false;
};

Header segments_header(std::size_t rows, std::size_t cols, int adjacency) {
  Header h = io::grid_header<SegmentId>(rows, cols);
  h.set("kind", "segments");
  h.set("nodata", 0);
  h.set("adjacency", adjacency);
  return h;
}

Header aura_header(std::size_t rows, std::size_t cols, int adjacency) {
  Header h = io::grid_header<std::uint8_t>(rows, cols);
  h.set("kind", "cross_aura");
  h.set("adjacency", adjacency);
  return h;
}

Header rmse_header(std::size_t rows, std::size_t cols) {
  Header h = io::grid_header<double>(rows, cols);
  h.set("kind", "rmse");
  return h;
}

Header reconstruction_header(std::size_t rows, std::size_t cols,
                             const std::vector<BandMetadata>& bands) {
  MultiSpectralImage proto(1, cols, bands);
  proto.set_storage({SampleType::Float64, false});
  Header h = io::image_header(proto);
  h.set("height", rows);
  return h;
}

/// Outputs of one segmentation run, in whichever mode it ran.
struct SegmentSummary {
  SegmentId segments = 0;
  std::size_t valid_pixels = 0;
  std::size_t table_pixels = 0;
  std::uint64_t aura_sum = 0;
  std::size_t aura_visits = 0;
  bool has_image = false;
  SummaryStats rmse;
};

SegmentSummary segment_whole(const SegmentArgs& a, const fs::path& dir, const Common& common) {
  const CategoricalMap map = io::read_categorical_map(a.in);
  const Adjacency adj = adjacency_of(a.adjacency);
  SegmentSummary s;
  const auto seg = connected_components(map, adj);
  AuraStats aura_stats;
  const auto aura = cross_aura(map, adj, &aura_stats, common.worker_count());
  std::optional<MultiSpectralImage> image;
  if (!a.image.empty()) {
    image = io::read_image(a.image);
    if (image->rows() != map.rows() || image->cols() != map.cols()) {
      throw DimensionError("image and map differ in size");
    }
  }
  std::vector<SuperpixelRecord> table;
  if (image) {
    table = build_superpixel_table(map, seg, *image, aura);
  } else {
    SuperpixelAccumulator acc(seg.segment_count, 0);
    acc.add_rows(0, seg.ids, map.labels, aura, nullptr);
    table = acc.finish();
  }
  io::write_grid(dir / "segments.hdr", seg.ids, segments_header(map.rows(), map.cols(), a.adjacency));
  io::write_grid(dir / "aura.hdr", aura, aura_header(map.rows(), map.cols(), a.adjacency));
  csv::save(dir / "superpixels.csv",
            superpixel_rows(table, map.legend, image ? image->bands() : std::vector<BandMetadata>{}));
  if (image) {
    const auto rec = reconstruct(seg, table, *image);
    const auto rmse = rmse_map(*image, rec);
    io::write_image(dir / "reconstruction.hdr", rec);
    io::write_grid(dir / "rmse.hdr", rmse.values, rmse_header(map.rows(), map.cols()));
    s.rmse = rmse.stats;
    s.has_image = true;
  }
  s.segments = seg.segment_count;
  for (Label l : map.labels.values()) s.valid_pixels += l != kNoDataLabel;
  for (const auto& r : table) s.table_pixels += r.pixel_count;
  for (auto v : aura.values()) s.aura_sum += v;
  s.aura_visits = aura_stats.neighbor_visits;
  return s;
}

SegmentSummary segment_streamed(const SegmentArgs& a, const fs::path& dir) {
  io::GridFileSource<Label> labels(a.in);
  const Legend legend = Legend::read_from(labels.header());
  const std::size_t rows = labels.rows(), cols = labels.cols();
  std::optional<io::ImageFileSource> image;
  if (!a.image.empty()) {
    image.emplace(a.image);
    if (image->rows() != rows || image->cols() != cols) {
      throw DimensionError("image and map differ in size");
    }
  }
  SegmentSummary s;
  StreamOptions options;
  options.strip_height = a.stream;
  options.adjacency = adjacency_of(a.adjacency);
  options.aura_adjacency = options.adjacency;

  io::RasterFileWriter seg_out(dir / "segments.hdr", segments_header(rows, cols, a.adjacency));
  io::RasterFileWriter aura_out(dir / "aura.hdr", aura_header(rows, cols, a.adjacency));
  std::optional<io::RasterFileWriter> rec_out, rmse_out;
  if (image) {
    rec_out.emplace(dir / "reconstruction.hdr", reconstruction_header(rows, cols, image->bands()));
    rmse_out.emplace(dir / "rmse.hdr", rmse_header(rows, cols));
  }
  const auto positions = legend.position_table();
  StreamSinks sinks;
  sinks.labels = [&](std::size_t first, const Grid<Label>& g) {
    for (Label l : g.values()) {
      if (l != kNoDataLabel && positions[l] < 0) {
        throw MappingError("label " + std::to_string(l) + " in row " + std::to_string(first) +
                           ".. is outside the legend");
      }
      s.valid_pixels += l != kNoDataLabel;
    }
  };
  sinks.segments = [&](std::size_t first, const Grid<SegmentId>& g) { seg_out.write_grid_rows(0, first, g); };
  sinks.aura = [&](std::size_t first, const AuraMap& g) {
    aura_out.write_grid_rows(0, first, g);
    for (auto v : g.values()) s.aura_sum += v;
  };
  sinks.reconstruction = [&](std::size_t row, const MultiSpectralImage& r) {
    for (std::size_t b = 0; b < r.band_count(); ++b) rec_out->write_rows(b, row, io::encode_plane(r, b));
  };
  sinks.rmse = [&](std::size_t first, const RmseMap& m) { rmse_out->write_grid_rows(0, first, m.values); };
  auto next = [&](std::size_t first, std::size_t last, std::pmr::memory_resource* res) {
    return labels.read_rows(first, last, res);
  };
  const StreamResult result =
      image ? stream_segment(rows, cols, &*image, next, options, sinks)
            : stream_segment(rows, cols, static_cast<io::ImageFileSource*>(nullptr), next, options, sinks);
  seg_out.close();
  aura_out.close();
  if (image) {
    rec_out->close();
    rmse_out->close();
  }
  csv::save(dir / "superpixels.csv",
            superpixel_rows(result.table, legend, image ? image->bands() : std::vector<BandMetadata>{}));
  s.segments = result.segment_count;
  for (const auto& r : result.table) s.table_pixels += r.pixel_count;
  s.aura_visits = result.aura.neighbor_visits;
  s.has_image = image.has_value();
  s.rmse = result.rmse;
  return s;
}

int run_segment(const SegmentArgs& a, const Common& common) {
  require_input(a.in, "input map");
  if (!a.image.empty()) require_input(a.image, "input image");
  const fs::path dir = a.out_dir;
  prepare_output_dir(dir);

  Manifest manifest("segment", common.argv);
  manifest.input(a.in);
  if (!a.image.empty()) manifest.input(a.image);
  manifest.config() = {{"adjacency", a.adjacency},
                       {"stream_rows", a.stream},
                       {"workers", common.worker_count()}};

  const SegmentSummary s = a.stream ? segment_streamed(a, dir) : segment_whole(a, dir, common);

  json report = {{"segments", s.segments},
                 {"valid_pixels", s.valid_pixels},
                 {"adjacency", a.adjacency},
                 {"cross_aura_sum", s.aura_sum}};
  if (s.has_image) report["rmse"] = stats_json(s.rmse);
  write_text(dir / "report.json", report.dump(2) + "\n");

  for (const char* name : {"segments.hdr", "aura.hdr", "superpixels.csv", "report.json"}) {
    manifest.output(dir / name);
  }
  if (s.has_image) {
    manifest.output(dir / "reconstruction.hdr");
    manifest.output(dir / "rmse.hdr");
  }
  manifest.check("superpixels_cover_valid_pixels", s.table_pixels == s.valid_pixels);
  manifest.check("cross_aura_symmetric", s.aura_sum % 2 == 0);
  {
    io::GridFileSource<Label> probe(a.in);
    manifest.check("cross_aura_linear_visits",
                   s.aura_visits <= probe.rows() * probe.cols() * static_cast<std::size_t>(a.adjacency));
  }

  if (a.json) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << "segments: " << s.segments << "\n";
    std::cout << "valid pixels: " << s.valid_pixels << "\n";
    if (s.has_image) {
      std::cout << "rmse: min " << format_number(s.rmse.min()) << ", max "
                << format_number(s.rmse.max()) << ", mean " << format_number(s.rmse.mean())
                << ", stdev " << format_number(s.rmse.stdev()) << "\n";
    }
  }
  manifest.write(common.manifest.empty() ? dir / "manifest.json" : fs::path(common.manifest));
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string counts, test, reference, overrides, out_dir;
  double th1 = 0.09;
  double th2 = 0.06;
  bool json = false;
};

int run_compare(const CompareArgs& a, const Common& common) {
  const bool from_maps = a.counts.empty();
  if (from_maps && (a.test.empty() || a.reference.empty())) {
    throw UsageError("compare needs --counts, or both --test and --reference");
  }
  if (!from_maps && (!a.test.empty() || !a.reference.empty())) {
    throw UsageError("--counts cannot be combined with --test/--reference");
  }
  if (from_maps) {
    require_input(a.test, "test map");
    require_input(a.reference, "reference map");
  } else {
    require_input(a.counts, "count table");
  }
  if (!a.overrides.empty()) require_input(a.overrides, "override file");
  try {
    check_thresholds(a.th1, a.th2);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = a.out_dir;
  prepare_output_dir(dir);

  Manifest manifest("compare", common.argv);
  for (const auto& p : {a.counts, a.test, a.reference, a.overrides}) {
    if (!p.empty()) manifest.input(p);
  }
  manifest.config() = {{"th1", a.th1}, {"th2", a.th2}, {"workers", common.worker_count()}};

  const ContingencyTable table =
      from_maps ? build_contingency(io::read_categorical_map(a.test),
                                    io::read_categorical_map(a.reference), common.worker_count())
                : load_counts_csv(a.counts);
  const HarmonizationTrace tr = harmonize(table, a.th1, a.th2);
  const std::vector<Override> overrides =
      a.overrides.empty() ? std::vector<Override>{}
                          : load_overrides(a.overrides, table.test, table.reference);
  const OverrideResult result = apply_overrides(tr, overrides);
  const double index = cvpai2(result.relation);

  const std::vector<std::pair<std::string, std::string>> files = {
      {"step1_counts.csv", to_csv(table)},
      {"step2_joint.csv", matrix_csv(table.test, table.reference, tr.joint)},
      {"step3_reference_given_test.csv", matrix_csv(table.test, table.reference, tr.given_test)},
      {"step4_reference_given_test_cut.csv", matrix_csv(table.test, table.reference, tr.given_test_cut)},
      {"step5_test_given_reference.csv", matrix_csv(table.test, table.reference, tr.given_ref)},
      {"step6_test_given_reference_cut.csv", matrix_csv(table.test, table.reference, tr.given_ref_cut)},
      {"step7_candidate.csv", matrix_csv(table.test, table.reference, tr.candidate)},
      {"step8_relation.csv", to_csv(result.relation)},
  };
  for (const auto& [name, text] : files) {
    write_text(dir / name, text);
    manifest.output(dir / name);
  }

  json audit = json::array();
  for (const auto& e : result.audit) {
    audit.push_back({{"test", e.test_name},
                     {"reference", e.reference_name},
                     {"before", e.before},
                     {"after", e.after},
                     {"note", e.note}});
  }
  const json report = {{"total", table.total()},
                       {"test_classes", table.test.size()},
                       {"reference_classes", table.reference.size()},
                       {"th1", a.th1},
                       {"th2", a.th2},
                       {"correct_pairs", result.relation.correct_count()},
                       {"cvpai2", index},
                       {"audit", audit}};
  write_text(dir / "report.json", report.dump(2) + "\n");
  manifest.output(dir / "report.json");

  double joint = 0.0;
  for (double v : tr.joint.values()) joint += v;
  manifest.check("joint_sums_to_one", std::abs(joint - 1.0) <= 1e-12);
  manifest.check("cvpai2_in_unit_interval", index >= 0.0 && index <= 1.0);
  manifest.check("audit_covers_overrides", result.audit.size() == overrides.size());

  if (a.json) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << "pixels/total: " << table.total() << "\n"
              << "TH1 = " << format_number(a.th1) << ", TH2 = " << format_number(a.th2) << "\n"
              << "correct pairs: " << result.relation.correct_count() << " of "
              << table.test.size() * table.reference.size() << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", index);
    std::cout << "CVPAI2 = " << buf << "\n";
    for (const auto& e : result.audit) {
      std::cout << "override (" << e.test_name << ", " << e.reference_name << "): "
                << int(e.before) << " -> " << int(e.after) << ": " << e.note << "\n";
    }
  }
  manifest.write(common.manifest.empty() ? dir / "manifest.json" : fs::path(common.manifest));
  return 0;
}

// ---------------------------------------------------------------------------
// evidence

struct EvidenceArgs {
  std::string relation, evidence, out;
  bool json = false;
};

int run_evidence(const EvidenceArgs& a, const Common& common) {
  require_input(a.relation, "relation file");
  require_input(a.evidence, "evidence file");
  prepare_output_dir(fs::path(a.out).parent_path());

  Manifest manifest("evidence", common.argv);
  manifest.input(a.relation);
  manifest.input(a.evidence);

  const LegendRelation rel = load_relation_csv(a.relation);
  const auto records = evidence_from_rows(csv::load(a.evidence), rel.reference);
  std::vector<csv::Row> rows = {{"object", "color_name", "class", "score"}};
  json out = json::array();
  bool in_range = true;
  for (const auto& rec : records) {
    const ClassScores scores = combine(rec.evidence, rel);
    json per_class = json::object();
    for (std::size_t c = 0; c < scores.score.size(); ++c) {
      const double v = scores.score[c];
      in_range = in_range && v >= 0.0 && v <= 1.0;
      rows.push_back({rec.object, rec.evidence.color_name, scores.classes[c].name, format_number(v)});
      per_class[scores.classes[c].name] = v;
    }
    out.push_back({{"object", rec.object}, {"color_name", rec.evidence.color_name}, {"scores", per_class}});
  }
  csv::save(a.out, rows);
  manifest.output(a.out);
  manifest.check("scores_in_unit_interval", in_range);

  if (a.json) {
    std::cout << out.dump(2) << "\n";
  } else {
    for (std::size_t i = 1; i < rows.size(); ++i) std::cout << csv::format_row(rows[i]);
  }
  manifest.write(common.manifest.empty() ? manifest_beside(a.out) : fs::path(common.manifest));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"staticcolor: prior-knowledge color naming, segmentation and map comparison"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  common.argv.assign(argv, argv + argc);
  app.add_option("-j,--workers", common.workers,
                 "worker threads (default: STATICCOLOR_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--manifest", common.manifest, "manifest path (default: next to the outputs)");

  ClassifyArgs ca;
  auto* classify_cmd = app.add_subcommand("classify", "label every pixel with a color name");
  classify_cmd->add_option("-i,--in", ca.in, "input image header")->required();
  classify_cmd->add_option("-o,--out", ca.out, "output map header")->required();
  classify_cmd->add_option("-r,--rules", ca.rules, "rule file (default: built-in SPECL)");
  classify_cmd->add_option("--policy", ca.policy, "override the rule file's match policy")
      ->check(CLI::IsMember({"last-match", "first-match"}));
  classify_cmd->add_option("--stream", ca.stream, "process strips of N rows (0: whole image)");

  RelabelArgs ag;
  auto* aggregate_cmd = app.add_subcommand("aggregate", "merge color names into coarser ones");
  aggregate_cmd->add_option("-i,--in", ag.in, "input map header")->required();
  aggregate_cmd->add_option("-m,--mapping", ag.mapping, "child,parent[,name] CSV")->required();
  aggregate_cmd->add_option("-o,--out", ag.out, "output map header")->required();

  RelabelArgs tl;
  auto* translate_cmd = app.add_subcommand("translate", "translate a map into another legend");
  translate_cmd->add_option("-i,--in", tl.in, "input map header")->required();
  translate_cmd->add_option("-m,--mapping", tl.mapping, "child,parent[|parent...][,name] CSV")->required();
  translate_cmd->add_option("--resolutions", tl.resolutions, "child,parent CSV for ambiguous codes");
  translate_cmd->add_option("-o,--out", tl.out, "output map header")->required();

  SegmentArgs sa;
  auto* segment_cmd = app.add_subcommand("segment", "segments, cross-aura, superpixels, RMSE");
  segment_cmd->add_option("-i,--in", sa.in, "categorical map header")->required();
  segment_cmd->add_option("--image", sa.image, "image header for reconstruction and RMSE");
  segment_cmd->add_option("-o,--out-dir", sa.out_dir, "output directory")->required();
  segment_cmd->add_option("--adjacency", sa.adjacency, "4 or 8")->check(CLI::IsMember({4, 8}));
  segment_cmd->add_option("--stream", sa.stream, "process strips of N rows (0: whole image)");
  segment_cmd->add_flag("--json", sa.json, "print the report as JSON");

  CompareArgs co;
  auto* compare_cmd = app.add_subcommand("compare", "harmonize two legends and score them");
  compare_cmd->add_option("--counts", co.counts, "count table CSV");
  compare_cmd->add_option("--test", co.test, "test map header");
  compare_cmd->add_option("--reference", co.reference, "reference map header");
  compare_cmd->add_option("--th1", co.th1, "threshold on p(reference | test)");
  compare_cmd->add_option("--th2", co.th2, "threshold on p(test | reference)");
  compare_cmd->add_option("--overrides", co.overrides, "test_label,reference_label,value,note CSV");
  compare_cmd->add_option("-o,--out-dir", co.out_dir, "output directory")->required();
  compare_cmd->add_flag("--json", co.json, "print the report as JSON");

  EvidenceArgs ev;
  auto* evidence_cmd = app.add_subcommand("evidence", "combine color evidence with other memberships");
  evidence_cmd->add_option("--relation", ev.relation, "color-name to class relation CSV")->required();
  evidence_cmd->add_option("--evidence", ev.evidence, "object,color_name,class,shape,texture,spatial CSV")
      ->required();
  evidence_cmd->add_option("-o,--out", ev.out, "output scores CSV")->required();
  evidence_cmd->add_flag("--json", ev.json, "print scores as JSON");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*classify_cmd) return run_classify(ca, common);
    if (*aggregate_cmd) return run_relabel(ag, common, true);
    if (*translate_cmd) return run_relabel(tl, common, false);
    if (*segment_cmd) return run_segment(sa, common);
    if (*compare_cmd) return run_compare(co, common);
    if (*evidence_cmd) return run_evidence(ev, common);
  } catch (const UsageError& e) {
    std::cerr << "staticcolor: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvariantError& e) {
    std::cerr << "staticcolor: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const ParseError& e) {
    std::cerr << "staticcolor: " << e.what() << "\n";
    return kExitProcessing;
  } catch (const std::exception& e) {
    std::cerr << "staticcolor: " << e.what() << "\n";
    return kExitProcessing;
  }
  return kExitUsage;
}

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

// End-to-end runs of the staticcolor executable. Outputs are compared with
// the library called directly, manifests with the system sha256sum.

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "staticcolor/ccl.hpp"
#include "staticcolor/classify.hpp"
#include "staticcolor/compare.hpp"
#include "staticcolor/raster_io.hpp"
#include "staticcolor/specl.hpp"
#include "support.hpp"

namespace {

using namespace staticcolor;
using namespace staticcolor::io;
using testing_support::TempDir;
using json = nlohmann::json;

const fs::path kData = STATICCOLOR_DATA_DIR;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run(const std::string& args, const TempDir& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + STATICCOLOR_CLI + "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

template <typename T>
std::vector<T> vec(const Grid<T>& g) {
  return {g.values().begin(), g.values().end()};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string sha256sum(const fs::path& p) {
  const std::string cmd = "sha256sum " + q(p);
  std::FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return {};
  char buf[128] = {};
  const std::size_t n = std::fread(buf, 1, 64, pipe);
  ::pclose(pipe);
  return std::string(buf, n);
}

TEST(CliClassify, MatchesLibrary) {
  TempDir dir;
  const fs::path scene = kData / "scenes" / "nine_segments.hdr";
  const CliResult r = run("classify --in " + q(scene) + " --out " + q(dir / "map.hdr"), dir);
  ASSERT_EQ(r.code, 0) << r.err;

  const CategoricalMap got = read_categorical_map(dir / "map.hdr");
  const CategoricalMap want = classify(read_image(scene), specl_rules());
  EXPECT_EQ(vec(got.labels), vec(want.labels));
  EXPECT_TRUE(got.legend == want.legend);
}

TEST(CliClassify, StreamedOutputIsIdentical) {
  TempDir dir;
  const fs::path scene = kData / "scenes" / "nine_segments.hdr";
  ASSERT_EQ(run("classify --in " + q(scene) + " --out " + q(dir / "a.hdr"), dir).code, 0);
  for (int h : {1, 3, 5, 64}) {
    ASSERT_EQ(run("classify --stream " + std::to_string(h) + " --in " + q(scene) + " --out " +
                      q(dir / "b.hdr"),
                  dir)
                  .code,
              0);
    EXPECT_EQ(file_bytes(dir / "a.raw"), file_bytes(dir / "b.raw")) << "strip height " << h;
    EXPECT_EQ(file_bytes(dir / "a.hdr"), file_bytes(dir / "b.hdr"));
  }
}

TEST(CliClassify, PolicyChangesClearWater) {
  TempDir dir;
  const fs::path scene = kData / "scenes" / "clear_water.hdr";
  ASSERT_EQ(run("classify --in " + q(scene) + " --out " + q(dir / "last.hdr"), dir).code, 0);
  ASSERT_EQ(run("classify --policy first-match --in " + q(scene) + " --out " + q(dir / "first.hdr"), dir)
                .code,
            0);
  const auto last = read_categorical_map(dir / "last.hdr");
  const auto first = read_categorical_map(dir / "first.hdr");
  RuleSet rules = specl_rules();
  const auto image = read_image(scene);
  EXPECT_EQ(vec(last.labels), vec(classify(image, rules).labels));
  rules.policy = MatchPolicy::FirstMatch;
  EXPECT_EQ(vec(first.labels), vec(classify(image, rules).labels));
  EXPECT_NE(vec(first.labels), vec(last.labels));
}

TEST(CliClassify, MissingRuleFileIsUsageError) {
  TempDir dir;
  const fs::path missing = dir / "absent.rules";
  const CliResult r = run("classify --in " + q(kData / "scenes" / "nine_segments.hdr") + " --rules " +
                        q(missing) + " --out " + q(dir / "map.hdr"),
                    dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(missing.string()), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "map.hdr"));
}

TEST(CliClassify, MissingImageAndBadOptions) {
  TempDir dir;
  EXPECT_EQ(run("classify --in " + q(dir / "nope.hdr") + " --out " + q(dir / "m.hdr"), dir).code, 2);
  EXPECT_EQ(run("classify --in " + q(kData / "scenes" / "nine_segments.hdr") + " --policy sometimes --out " +
                    q(dir / "m.hdr"),
                dir)
                .code,
            2);
  EXPECT_EQ(run("frobnicate", dir).code, 2);
  EXPECT_EQ(run("", dir).code, 2);
}

TEST(CliClassify, RuleSyntaxErrorIsProcessingError) {
  TempDir dir;
  std::ofstream(dir / "bad.rules") << "this is not a rule file\n";
  const CliResult r = run("classify --in " + q(kData / "scenes" / "nine_segments.hdr") + " --rules " +
                        q(dir / "bad.rules") + " --out " + q(dir / "m.hdr"),
                    dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.rules"), std::string::npos) << r.err;
}

TEST(CliClassify, ManifestHashesMatchSha256sum) {
  TempDir dir;
  const fs::path scene = kData / "scenes" / "nine_segments.hdr";
  ASSERT_EQ(run("classify --in " + q(scene) + " --out " + q(dir / "map.hdr"), dir).code, 0);
  const json m = load_json(dir / "map.manifest.json");
  EXPECT_EQ(m["command"], "classify");
  EXPECT_EQ(m["config"]["rules"], "builtin:specl");
  ASSERT_EQ(m["inputs"].size(), 2u);   // header + payload
  ASSERT_EQ(m["outputs"].size(), 2u);
  for (const auto* section : {"inputs", "outputs"}) {
    for (const auto& f : m[section]) {
      EXPECT_EQ(f["sha256"].get<std::string>(), sha256sum(f["path"].get<std::string>()))
          << f["path"];
      EXPECT_EQ(f["bytes"].get<std::uintmax_t>(), fs::file_size(f["path"].get<std::string>()));
    }
  }
  for (const auto& [name, ok] : m["invariants"].items()) EXPECT_TRUE(ok.get<bool>()) << name;
}

TEST(CliTranslate, MatchesLibrary) {
  TempDir dir;
  const fs::path map = kData / "maps" / "nlcd_sample.hdr";
  const fs::path mapping = kData / "legends" / "nlcd_to_lccs_dp.csv";
  const fs::path res = kData / "legends" / "nlcd_resolutions.csv";

  const CliResult unresolved = run("translate --in " + q(map) + " --mapping " + q(mapping) + " --out " +
                                 q(dir / "t.hdr"),
                             dir);
  EXPECT_EQ(unresolved.code, 1);
  EXPECT_NE(unresolved.err.find("21"), std::string::npos) << unresolved.err;

  const CliResult r = run("translate --in " + q(map) + " --mapping " + q(mapping) + " --resolutions " + q(res) +
                        " --out " + q(dir / "t.hdr"),
                    dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto want = translate_legend(read_categorical_map(map),
                                     LegendMapping::load_csv(mapping).resolved(
                                         LegendMapping::load_resolutions(res)));
  const auto got = read_categorical_map(dir / "t.hdr");
  EXPECT_EQ(vec(got.labels), vec(want.labels));
  EXPECT_TRUE(got.legend == want.legend);
}

TEST(CliAggregate, MergesColorNames) {
  TempDir dir;
  const fs::path scene = kData / "scenes" / "nine_segments.hdr";
  ASSERT_EQ(run("classify --in " + q(scene) + " --out " + q(dir / "fine.hdr"), dir).code, 0);
  const Legend fine = specl_rules().legend();
  {
    // vegetation-like names (label < 10) -> 1, everything else -> 2
    std::ofstream csv(dir / "agg.csv");
    csv << "child,parent,name\n";
    for (const auto& e : fine.entries()) {
      csv << e.label << "," << (e.label < 10 ? "1,Green" : "2,Other") << "\n";
    }
  }
  const CliResult r = run("aggregate --in " + q(dir / "fine.hdr") + " --mapping " + q(dir / "agg.csv") +
                        " --out " + q(dir / "coarse.hdr"),
                    dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto f = read_categorical_map(dir / "fine.hdr");
  const auto c = read_categorical_map(dir / "coarse.hdr");
  ASSERT_EQ(c.labels.size(), f.labels.size());
  for (std::size_t i = 0; i < f.labels.size(); ++i) {
    const Label l = f.labels.values()[i];
    EXPECT_EQ(c.labels.values()[i], l == kNoDataLabel ? kNoDataLabel : (l < 10 ? 1 : 2));
  }
}

TEST(CliSegment, NineSegments) {
  TempDir dir;
  const CliResult r = run("segment --json --in " + q(kData / "maps" / "nine_segments.hdr") + " --out-dir " +
                        q(dir / "seg"),
                    dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const json report = json::parse(r.out);
  EXPECT_EQ(report["segments"], 9);
  EXPECT_EQ(report["valid_pixels"], 96);
  EXPECT_EQ(load_json(dir / "seg" / "report.json"), report);

  const auto map = read_categorical_map(kData / "maps" / "nine_segments.hdr");
  const auto ids = read_grid<SegmentId>(dir / "seg" / "segments.hdr");
  EXPECT_EQ(vec(ids.second), vec(connected_components(map, Adjacency::Eight).ids));

  const auto rows = csv::load(dir / "seg" / "superpixels.csv");
  EXPECT_EQ(rows.size(), 10u);  // header + 9 segments
}

TEST(CliSegment, StreamedRunIsByteIdentical) {
  TempDir dir;
  const std::string common = "--in " + q(kData / "maps" / "nine_segments.hdr") + " --image " +
                             q(kData / "scenes" / "nine_segments.hdr");
  for (int adj : {4, 8}) {
    const std::string a = " --adjacency " + std::to_string(adj);
    ASSERT_EQ(run("segment " + common + a + " --out-dir " + q(dir / "whole"), dir).code, 0);
    for (int h : {1, 2, 5, 64}) {
      const fs::path out = dir / ("s" + std::to_string(h));
      const CliResult r = run("segment " + common + a + " --stream " + std::to_string(h) + " --out-dir " + q(out),
                        dir);
      ASSERT_EQ(r.code, 0) << r.err;
      for (const auto& entry : fs::directory_iterator(dir / "whole")) {
        const auto name = entry.path().filename();
        if (name == "manifest.json") continue;
        EXPECT_EQ(file_bytes(entry.path()), file_bytes(out / name))
            << name << " adjacency " << adj << " strip " << h;
      }
    }
  }
}

TEST(CliSegment, ImageSizeMismatch) {
  TempDir dir;
  const CliResult r = run("segment --in " + q(kData / "maps" / "nlcd_sample.hdr") + " --image " +
                        q(kData / "scenes" / "nine_segments.hdr") + " --out-dir " + q(dir / "o"),
                    dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("size"), std::string::npos) << r.err;
}

TEST(CliCompare, ForestCounts) {
  TempDir dir;
  const CliResult r = run("compare --counts " + q(kData / "compare" / "forest_counts.csv") + " --overrides " +
                        q(kData / "compare" / "forest_overrides.csv") + " --out-dir " + q(dir / "c"),
                    dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("CVPAI2 = 0.8558"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("cloud cover"), std::string::npos) << r.out;

  const json report = load_json(dir / "c" / "report.json");
  EXPECT_NEAR(report["cvpai2"].get<double>(), (5.0 + std::exp(-2.0)) / 6.0, 1e-15);
  EXPECT_EQ(report["total"], 217);
  ASSERT_EQ(report["audit"].size(), 2u);
  for (const auto& e : report["audit"]) {
    EXPECT_EQ(e["before"], 1);
    EXPECT_EQ(e["after"], 0);
    EXPECT_FALSE(e["note"].get<std::string>().empty());
  }
  const auto relation = load_relation_csv(dir / "c" / "step8_relation.csv");
  const auto table = load_counts_csv(kData / "compare" / "forest_counts.csv");
  const auto want = apply_overrides(harmonize(table, 0.09, 0.06),
                                    load_overrides(kData / "compare" / "forest_overrides.csv",
                                                   table.test, table.reference));
  EXPECT_EQ(to_csv(relation), to_csv(want.relation));
  EXPECT_EQ(report["correct_pairs"], want.relation.correct_count());
  EXPECT_EQ(file_bytes(dir / "c" / "step1_counts.csv"),
            to_csv(load_counts_csv(kData / "compare" / "forest_counts.csv")));
}

TEST(CliCompare, IdenticalMapsGiveDiagonal) {
  TempDir dir;
  const fs::path map = kData / "maps" / "nine_segments.hdr";
  const CliResult r = run("compare --json --test " + q(map) + " --reference " + q(map) + " --out-dir " +
                        q(dir / "c"),
                    dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const json report = json::parse(r.out);
  EXPECT_EQ(report["cvpai2"].get<double>(), 1.0);
  const auto counts = load_counts_csv(dir / "c" / "step1_counts.csv");
  for (std::size_t i = 0; i < counts.test.size(); ++i) {
    for (std::size_t j = 0; j < counts.reference.size(); ++j) {
      if (i != j) {
        EXPECT_EQ(counts.counts(i, j), 0u);
      }
    }
  }
  const auto relation = load_relation_csv(dir / "c" / "step8_relation.csv");
  EXPECT_EQ(relation.correct_count(), counts.test.size());
}

TEST(CliCompare, UsageErrors) {
  TempDir dir;
  const std::string counts = q(kData / "compare" / "forest_counts.csv");
  EXPECT_EQ(run("compare --out-dir " + q(dir / "c"), dir).code, 2);
  EXPECT_EQ(run("compare --counts " + counts + " --th1 1.5 --out-dir " + q(dir / "c"), dir).code, 2);
  EXPECT_EQ(run("compare --counts " + q(dir / "none.csv") + " --out-dir " + q(dir / "c"), dir).code, 2);
  EXPECT_EQ(run("compare --counts " + counts + " --test " + counts + " --out-dir " + q(dir / "c"), dir).code,
            2);
  EXPECT_FALSE(fs::exists(dir / "c" / "report.json"));
}

TEST(CliEvidence, ScoresObjects) {
  TempDir dir;
  const CliResult r = run("evidence --json --relation " + q(kData / "evidence" / "color_to_class.csv") +
                        " --evidence " + q(kData / "evidence" / "objects.csv") + " --out " +
                        q(dir / "scores.csv"),
                    dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const json out = json::parse(r.out);
  ASSERT_GE(out.size(), 2u);
  EXPECT_EQ(out[0]["object"], "pond");
  EXPECT_NEAR(out[0]["scores"]["Water body"].get<double>(), 0.8, 1e-12);
  EXPECT_NEAR(out[0]["scores"]["Tulip flower"].get<double>(), 0.1, 1e-12);
  EXPECT_NEAR(out[0]["scores"]["Italian tile roof"].get<double>(), 0.1, 1e-12);
  EXPECT_EQ(out[1]["object"], "bloom");
  EXPECT_EQ(out[1]["scores"]["Water body"].get<double>(), 0.0);
  const auto rows = csv::load(dir / "scores.csv");
  EXPECT_EQ(rows.size(), 1 + 3 * out.size());
}

}  // namespace

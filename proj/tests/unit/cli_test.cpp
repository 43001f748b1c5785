#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ini.hpp"
#include "stlfd/ground_truth.hpp"
#include "stlfd/image_io.hpp"
#include "test_util.hpp"

namespace stlfd::cli {
namespace {

using stlfd::testing::TempDir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::string summary_value(const std::filesystem::path& p, const std::string& key) {
  for (const auto& row : read_csv(p))
    if (row.size() == 2 && row[0] == key) return row[1];
  return {};
}

// Small moving-target scene: 64x64, 24 frames.
void small_synth(const std::filesystem::path& out) {
  const Outcome o = run_cli({"synth", "--out", out.string(), "--width", "64", "--height", "64", "--frames", "24",
                             "--start", "20,30"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
}

TEST(CliTest, DetectDefaultPathWritesMasksDetectionsManifest) {
  TempDir dir;
  small_synth(dir / "seq");
  const Outcome o = run_cli({"detect", "--input", (dir / "seq").string(), "--out", (dir / "run1").string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "run1/masks/mask_000010.png"));
  EXPECT_TRUE(std::filesystem::exists(dir / "run1/detections.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "run1/timing.csv"));
  ASSERT_TRUE(std::filesystem::exists(dir / "run1/manifest.ini"));
  const IniFile m = IniFile::load(dir / "run1/manifest.ini");
  EXPECT_EQ(m.get("detect", "gap"), "5");
  EXPECT_EQ(m.get("detect", "abs-kernel"), "15");
  EXPECT_EQ(m.get("detect", "k-sigma"), "10");
  EXPECT_EQ(m.get("run", "width"), "64");
  EXPECT_FALSE(m.get("run", "tool_version").empty());
}

TEST(CliTest, UsageErrorsExitTwo) {
  TempDir dir;
  small_synth(dir / "seq");
  const std::string in = (dir / "seq").string();
  EXPECT_EQ(run_cli({"detect", "--input", in, "--abs-kernel", "14"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"detect", "--input", in, "--gap", "0"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"detect", "--input", in, "--k-sigma", "-1"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"detect", "--input", in, "--bogus"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"detect"}).code, kExitUsage);
  EXPECT_EQ(run_cli({}).code, kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"eval", "--run", in}).code, kExitUsage);
  EXPECT_EQ(run_cli({"synth", "--out", (dir / "x").string(), "--preset", "windy"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"synth", "--out", (dir / "x").string(), "--drift", "1"}).code, kExitUsage);
  // Trajectory leaving the frame is a configuration error.
  EXPECT_EQ(run_cli({"synth", "--out", (dir / "x").string(), "--velocity", "5,0"}).code, kExitUsage);
  // The gap belongs to detect only.
  EXPECT_EQ(run_cli({"synth", "--out", (dir / "x").string(), "--frames", "20", "--gap", "3"}).code, kExitUsage);
}

TEST(CliTest, RuntimeErrorsExitOne) {
  TempDir dir;
  std::filesystem::create_directories(dir / "empty");
  EXPECT_EQ(run_cli({"detect", "--input", (dir / "empty").string(), "--out", (dir / "r").string()}).code, kExitFailure);
  EXPECT_EQ(run_cli({"detect", "--input", (dir / "missing").string(), "--out", (dir / "r").string()}).code, kExitFailure);
  EXPECT_EQ(run_cli({"eval", "--run", (dir / "missing").string(), "--gt", (dir / "gt.csv").string()}).code, kExitFailure);
}

TEST(CliTest, NoAbsGivesMoreFalsePixelsAtLowKSigma) {
  TempDir dir;
  ASSERT_EQ(run_cli({"synth", "--out", (dir / "seq").string(), "--frames", "40"}).code, kExitOk);
  const std::string in = (dir / "seq").string(), gt = (dir / "seq/ground_truth.csv").string();
  for (const char* name : {"abs", "noabs"}) {
    std::vector<std::string> args{"detect", "--input", in, "--out", (dir / name).string(), "--k-sigma", "4"};
    if (std::string(name) == "noabs") args.push_back("--no-abs");
    ASSERT_EQ(run_cli(args).code, kExitOk);
    ASSERT_EQ(run_cli({"eval", "--run", (dir / name).string(), "--gt", gt}).code, kExitOk);
  }
  const double pf_abs = std::stod(summary_value(dir / "abs/summary.csv", "pf"));
  const double pf_noabs = std::stod(summary_value(dir / "noabs/summary.csv", "pf"));
  EXPECT_GT(pf_noabs, pf_abs);
}

TEST(CliTest, EvalPerfectRunAucNearOne) {
  TempDir dir;
  small_synth(dir / "seq");
  const std::string run_dir = (dir / "run").string();
  ASSERT_EQ(run_cli({"detect", "--input", (dir / "seq").string(), "--out", run_dir}).code, kExitOk);
  // Replace the detector output with maps that are nonzero only inside the truth boxes.
  const auto gt = load_ground_truth(dir / "seq/ground_truth.csv");
  for (const auto& g : gt) {
    if (g.frame_index < 10) continue;
    FeatureMap map(64, 64, 0.0);
    BinaryMask mask(64, 64);
    const PixelRect r = pixel_rect(g);
    for (int y = r.y0; y <= r.y1; ++y)
      for (int x = r.x0; x <= r.x1; ++x) map.at(x, y) = 0.75, mask.set(x, y);
    write_map_f32(dir / ("run/maps/" + indexed_name("stlfd", g.frame_index, "f32")), map);
    write_mask_png(dir / ("run/masks/" + indexed_name("mask", g.frame_index, "png")), mask);
  }
  for (int steps : {2, 16, 256}) {
    const Outcome o = run_cli({"eval", "--run", run_dir, "--gt", (dir / "seq/ground_truth.csv").string(),
                               "--roc-steps", std::to_string(steps)});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const double auc = std::stod(summary_value(dir / "run/summary.csv", "auc"));
    EXPECT_NEAR(auc, 1.0, 1.0 / steps);
    EXPECT_EQ(summary_value(dir / "run/summary.csv", "pd"), "1");
    EXPECT_EQ(summary_value(dir / "run/summary.csv", "pf"), "0");
  }
}

TEST(CliTest, EvalZeroTargetsReportsNa) {
  TempDir dir;
  small_synth(dir / "seq");
  ASSERT_EQ(run_cli({"detect", "--input", (dir / "seq").string(), "--out", (dir / "run").string()}).code, kExitOk);
  stlfd::testing::write_text(dir / "empty_gt.csv", "frame,cx,cy,w,h\n");
  const Outcome o = run_cli({"eval", "--run", (dir / "run").string(), "--gt", (dir / "empty_gt.csv").string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(summary_value(dir / "run/summary.csv", "pd"), "NA");
  const auto roc = read_csv(dir / "run/roc.csv");
  ASSERT_GT(roc.size(), 1u);
  EXPECT_EQ(roc[1][1], "NA");
}

TEST(CliTest, EvalTwoStepCurveIsMonotone) {
  TempDir dir;
  small_synth(dir / "seq");
  ASSERT_EQ(run_cli({"detect", "--input", (dir / "seq").string(), "--out", (dir / "run").string()}).code, kExitOk);
  const Outcome o = run_cli({"eval", "--run", (dir / "run").string(), "--gt", (dir / "seq/ground_truth.csv").string(),
                             "--roc-steps", "2", "--out", (dir / "ev").string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto roc = read_csv(dir / "ev/roc.csv");
  ASSERT_EQ(roc.size(), 3u);
  EXPECT_EQ(roc[0], (std::vector<std::string>{"threshold", "pd", "pf"}));
  EXPECT_EQ(std::stod(roc[1][0]), 1.0);
  EXPECT_EQ(std::stod(roc[2][0]), 0.0);
  EXPECT_LE(std::stod(roc[1][1]), std::stod(roc[2][1]));
  EXPECT_LE(std::stod(roc[1][2]), std::stod(roc[2][2]));
  EXPECT_EQ(run_cli({"eval", "--run", (dir / "run").string(), "--gt", (dir / "seq/ground_truth.csv").string(),
                     "--roc-steps", "1"})
                .code,
            kExitUsage);
}

TEST(CliTest, EvalRejectsGroundTruthOutsideFrame) {
  TempDir dir;
  small_synth(dir / "seq");
  ASSERT_EQ(run_cli({"detect", "--input", (dir / "seq").string(), "--out", (dir / "run").string()}).code, kExitOk);
  stlfd::testing::write_text(dir / "bad_gt.csv", "frame,cx,cy,w,h\n12,200,20,6,6\n");
  EXPECT_EQ(run_cli({"eval", "--run", (dir / "run").string(), "--gt", (dir / "bad_gt.csv").string()}).code, kExitFailure);
}

TEST(CliTest, SynthStaticTwiceIsIdentical) {
  TempDir dir;
  for (const char* name : {"a", "b"}) {
    ASSERT_EQ(run_cli({"synth", "--preset", "static", "--seed", "7", "--frames", "15", "--out", (dir / name).string()}).code,
              kExitOk);
  }
  EXPECT_EQ(stlfd::testing::snapshot_dir(dir / "a"), stlfd::testing::snapshot_dir(dir / "b"));
}

TEST(CliTest, SynthManifestRecordsResolvedPreset) {
  TempDir dir;
  ASSERT_EQ(run_cli({"synth", "--preset", "drift", "--frames", "12", "--out", (dir / "d").string()}).code, kExitOk);
  const IniFile m = IniFile::load(dir / "d/manifest.ini");
  EXPECT_EQ(m.get("synth", "preset"), "drift");
  EXPECT_NE(m.get("synth", "drift"), "0,0");
  EXPECT_FALSE(m.get("synth", "drift").empty());
  EXPECT_EQ(m.get("synth", "seed"), "1");
  EXPECT_EQ(m.get("synth", "frames"), "12");

  ASSERT_EQ(run_cli({"synth", "--preset", "static", "--frames", "12", "--out", (dir / "s").string()}).code, kExitOk);
  EXPECT_EQ(IniFile::load(dir / "s/manifest.ini").get("synth", "drift"), "0,0");
}

TEST(CliTest, ConfigFileFillsUnsetFlagsAndFlagsWin) {
  TempDir dir;
  small_synth(dir / "seq");
  stlfd::testing::write_text(dir / "cfg.ini", "[detect]\ngap = 3\nk-sigma = 6\n");
  const Outcome o = run_cli({"detect", "--config", (dir / "cfg.ini").string(), "--input", (dir / "seq").string(), "--out",
                             (dir / "run").string(), "--k-sigma", "8"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const IniFile m = IniFile::load(dir / "run/manifest.ini");
  EXPECT_EQ(m.get("detect", "gap"), "3");
  EXPECT_EQ(m.get("detect", "k-sigma"), "8");

  stlfd::testing::write_text(dir / "bad.ini", "[detect]\nabs-kernel = 14\n");
  EXPECT_EQ(run_cli({"detect", "--config", (dir / "bad.ini").string(), "--input", (dir / "seq").string()}).code, kExitUsage);
  EXPECT_EQ(run_cli({"detect", "--config", (dir / "nope.ini").string(), "--input", (dir / "seq").string()}).code,
            kExitUsage);
}

TEST(CliTest, ManifestReproducesRunsByteForByte) {
  TempDir dir;
  small_synth(dir / "seq");
  ASSERT_EQ(run_cli({"synth", "--config", (dir / "seq/manifest.ini").string(), "--out", (dir / "seq2").string()}).code,
            kExitOk);
  EXPECT_EQ(stlfd::testing::snapshot_dir(dir / "seq"), stlfd::testing::snapshot_dir(dir / "seq2"));

  ASSERT_EQ(run_cli({"detect", "--input", (dir / "seq").string(), "--out", (dir / "r1").string(), "--no-timing",
                     "--emit-intermediate", "--gap", "4"})
                .code,
            kExitOk);
  ASSERT_EQ(run_cli({"detect", "--config", (dir / "r1/manifest.ini").string(), "--out", (dir / "r2").string()}).code,
            kExitOk);
  EXPECT_FALSE(std::filesystem::exists(dir / "r2/timing.csv"));
  EXPECT_EQ(stlfd::testing::snapshot_dir(dir / "r1"), stlfd::testing::snapshot_dir(dir / "r2"));
}

TEST(IniTest, ParsesSectionsCommentsAndQuotes) {
  const IniFile f = IniFile::parse("top = 1\n# comment\n; other\n[a]\nkey = \"quoted value\"\n x=2 \n[b]\nkey=3\n");
  EXPECT_EQ(f.get("", "top"), "1");
  EXPECT_EQ(f.get("a", "key"), "quoted value");
  EXPECT_EQ(f.get("a", "x"), "2");
  EXPECT_EQ(f.get("b", "key"), "3");
  EXPECT_EQ(f.get("b", "missing", "fb"), "fb");
  EXPECT_EQ(f.section("c"), nullptr);
}

TEST(FormatTest, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(10), "10");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace stlfd::cli

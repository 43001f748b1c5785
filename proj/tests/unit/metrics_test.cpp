#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "stlfd/fusion.hpp"
#include "stlfd/ground_truth.hpp"
#include "stlfd/metrics.hpp"
#include "test_util.hpp"

namespace stlfd {
namespace {

bool in_box(const GroundTruthRecord& gt, int x, int y) {
  return x >= gt.cx - gt.w / 2 && x < gt.cx + gt.w / 2 && y >= gt.cy - gt.h / 2 && y < gt.cy + gt.h / 2;
}

bool oracle_accepts(const MatchRule& rule, const GroundTruthRecord& gt, double x, double y) {
  if (rule.mode == MatchMode::kContainment) {
    return x >= gt.cx - gt.w / 2 && x < gt.cx + gt.w / 2 && y >= gt.cy - gt.h / 2 && y < gt.cy + gt.h / 2;
  }
  return std::hypot(x - gt.cx, y - gt.cy) <= rule.radius + 1e-12;
}

std::int64_t oracle_false_pixels(const BinaryMask& m, const std::vector<GroundTruthRecord>& gts) {
  std::int64_t n = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.test(x, y) && std::none_of(gts.begin(), gts.end(), [&](const auto& g) { return in_box(g, x, y); })) ++n;
  return n;
}

FrameTally oracle_pixel_match(const BinaryMask& m, const std::vector<GroundTruthRecord>& gts, const MatchRule& rule) {
  FrameTally t{0, static_cast<std::int64_t>(gts.size()), oracle_false_pixels(m, gts)};
  for (const auto& g : gts) {
    bool hit = false;
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) hit = hit || (m.test(x, y) && oracle_accepts(rule, g, x, y));
    t.hits += hit;
  }
  return t;
}

FrameTally oracle_component_match(std::vector<Detection> dets, const BinaryMask& m,
                                  const std::vector<GroundTruthRecord>& gts, const MatchRule& rule) {
  std::stable_sort(dets.begin(), dets.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  std::vector<bool> used(gts.size(), false);
  FrameTally t{0, static_cast<std::int64_t>(gts.size()), oracle_false_pixels(m, gts)};
  for (const auto& d : dets) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < gts.size(); ++i) {
      if (used[i] || !oracle_accepts(rule, gts[i], d.centroid.x, d.centroid.y)) continue;
      const double dist = std::hypot(d.centroid.x - gts[i].cx, d.centroid.y - gts[i].cy);
      if (dist < bd) bd = dist, best = static_cast<int>(i);
    }
    if (best >= 0) used[best] = true, ++t.hits;
  }
  return t;
}

// ---------------------------------------------------------------------------
// match_frame

TEST(MatchTest, Examples) {
  const std::vector<GroundTruthRecord> gt{{0, 10.0, 10.0, 3, 3}};
  BinaryMask mask(20, 20);
  mask.set(12, 10);
  Detection d{0, {12.0, 10.0}, {12, 10, 12, 10}, 0.9, 1};
  EXPECT_EQ(match_frame(std::span(&d, 1), mask, gt, {}).hits, 1);  // 2 px away, radius 4

  const BinaryMask empty(20, 20);
  EXPECT_EQ(match_frame(std::span<const Detection>{}, empty, gt, {}), (FrameTally{0, 1, 0}));
  EXPECT_EQ(match_frame(empty, gt, {}), (FrameTally{0, 1, 0}));
  EXPECT_THROW(MatchRule({MatchMode::kDistance, 0.0}).validate(), InvalidArgument);
}

TEST(MatchTest, FalsePixelsExcludeInBoxPixelsOfHitComponent) {
  // 13 pixels outside any box plus a 2x2 component straddling the GT box.
  const std::vector<GroundTruthRecord> gt{{0, 10.0, 10.0, 2, 2}};  // pixels 9..10
  BinaryMask mask(32, 32);
  for (int i = 0; i < 13; ++i) mask.set(20 + i % 5, 25 + i / 5);
  mask.set(10, 10);
  mask.set(11, 10);
  mask.set(10, 11);
  mask.set(11, 11);
  const FeatureMap score(32, 32, 0.5);
  const auto dets = extract_detections(mask, score, 0);
  const FrameTally t = match_frame(dets, mask, gt, {});
  EXPECT_EQ(t.hits, 1);
  EXPECT_EQ(t.false_pixels, 13 + 4 - 1);
  EXPECT_EQ(t.false_pixels, oracle_false_pixels(mask, gt));
}

TEST(MatchTest, AgreesWithBruteForceOracleOnToyFrames) {
  std::mt19937_64 rng(314);
  std::uniform_int_distribution<std::uint32_t> bits(0, 0xFFFF);
  std::uniform_real_distribution<double> coord(0.0, 8.0);
  std::uniform_int_distribution<int> side(1, 4), ntargets(0, 3);
  std::uniform_real_distribution<double> radius(0.5, 4.0);
  int cases = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    // A random 16-bit pattern tiled over the 8x8 frame, thinned by a second draw.
    const std::uint32_t pattern = bits(rng), thin = bits(rng);
    BinaryMask mask(8, 8);
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) {
        const int b = (y % 4) * 4 + (x % 4);
        mask.set(x, y, ((pattern >> b) & 1u) && ((thin >> ((b + y) % 16)) & 1u));
      }
    std::vector<GroundTruthRecord> gts;
    for (int i = ntargets(rng); i > 0; --i) gts.push_back({0, coord(rng), coord(rng), double(side(rng)), double(side(rng))});
    const MatchRule rule{trial % 3 == 0 ? MatchMode::kContainment : MatchMode::kDistance, radius(rng)};
    const FeatureMap score = testing::random_map(8, 8, rng);
    const auto dets = extract_detections(mask, score, 0);

    ASSERT_EQ(match_frame(mask, gts, rule), oracle_pixel_match(mask, gts, rule)) << "trial " << trial;
    ASSERT_EQ(match_frame(dets, mask, gts, rule), oracle_component_match(dets, mask, gts, rule)) << "trial " << trial;
    ++cases;
  }
  EXPECT_GE(cases, 1000);
}

// ---------------------------------------------------------------------------
// aggregate

TEST(AggregateTest, Examples) {
  std::vector<FrameTally> t(100, FrameTally{0, 1, 0});
  for (int i = 0; i < 87; ++i) t[i].hits = 1;
  t[5].false_pixels = 13;
  const auto r = aggregate_pd_pf(t, 256, 256, 100);
  EXPECT_DOUBLE_EQ(r.pd, 0.87);
  EXPECT_DOUBLE_EQ(r.pf, 13.0 / 6553600.0);
  EXPECT_NEAR(r.pf, 1.983e-6, 1e-9);

  const std::vector<FrameTally> none(10, FrameTally{0, 0, 4});
  EXPECT_TRUE(std::isnan(aggregate_pd_pf(none, 9, 9, 10).pd));
  EXPECT_THROW(aggregate_pd_pf(none, 9, 9, 0), InvalidArgument);
}

// ---------------------------------------------------------------------------
// ROC

struct Scene {
  std::vector<FeatureMap> maps;
  std::vector<std::int64_t> frames;
  std::vector<GroundTruthRecord> gt;
};

Scene random_scene(std::mt19937_64& rng, int n_frames, int w, int h) {
  Scene s;
  std::uniform_real_distribution<double> c(6.0, w - 6.0);
  std::uniform_int_distribution<int> nt(0, 2);
  for (int f = 0; f < n_frames; ++f) {
    FeatureMap m = testing::random_map(w, h, rng);
    for (double& v : m.values()) v = v * v * v;
    if (f % 4 == 0) m.values()[3] = 1.0;  // include exact extremes
    s.maps.push_back(std::move(m));
    s.frames.push_back(f + 7);
    for (int i = nt(rng); i > 0; --i) s.gt.push_back({f + 7, c(rng), c(rng), 3, 3});
  }
  return s;
}

TEST(RocTest, SweepMatchesLiteralSegmentAndMatch) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const Scene s = random_scene(rng, 6, 24, 20);
    const MatchRule rule{trial % 2 ? MatchMode::kContainment : MatchMode::kDistance, 2.5};
    const int steps = 33;
    const RocCurve c = roc_sweep(s.maps, s.frames, s.gt, rule, steps);
    ASSERT_EQ(c.points.size(), static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
      const double t = static_cast<double>(steps - 1 - i) / (steps - 1);
      std::vector<FrameTally> tallies;
      for (std::size_t f = 0; f < s.maps.size(); ++f) {
        tallies.push_back(match_frame(threshold_mask(s.maps[f], t), records_for_frame(s.gt, s.frames[f]), rule));
      }
      const auto r = aggregate_pd_pf(tallies, 24, 20, s.maps.size());
      EXPECT_EQ(c.points[i].threshold, t);
      EXPECT_EQ(c.points[i].pf, r.pf) << t;
      if (std::isnan(r.pd)) EXPECT_TRUE(std::isnan(c.points[i].pd));
      else EXPECT_EQ(c.points[i].pd, r.pd) << t;
    }
  }
}

TEST(RocTest, MonotoneAndBounded) {
  std::mt19937_64 rng(56);
  for (int trial = 0; trial < 20; ++trial) {
    const Scene s = random_scene(rng, 5, 20, 20);
    if (s.gt.empty()) continue;
    const RocCurve c = roc_sweep(s.maps, s.frames, s.gt, {}, 64);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      EXPECT_LT(c.points[i].threshold, c.points[i - 1].threshold);
      EXPECT_GE(c.points[i].pd, c.points[i - 1].pd);
      EXPECT_GE(c.points[i].pf, c.points[i - 1].pf);
    }
    for (const auto& p : c.points) {
      EXPECT_GE(p.pf, 0.0);
      EXPECT_LE(p.pf, 1.0);
      EXPECT_GE(p.pd, 0.0);
      EXPECT_LE(p.pd, 1.0);
    }
    EXPECT_GE(c.auc, 0.0);
    EXPECT_LE(c.auc, 1.0);
  }
}

TEST(RocTest, EndpointsAndNoTargets) {
  FeatureMap m(16, 16, 0.0);
  m.at(8, 8) = 0.2;
  m.at(1, 1) = 0.9;
  const std::vector<FeatureMap> maps{m};
  const std::vector<std::int64_t> frames{0};
  const std::vector<GroundTruthRecord> gt{{0, 8.5, 8.5, 3, 3}};
  const RocCurve c = roc_sweep(maps, frames, gt, {}, 11);
  EXPECT_EQ(c.points.front().threshold, 1.0);
  EXPECT_EQ(c.points.front().pd, 0.0);
  EXPECT_EQ(c.points.front().pf, 0.0);
  EXPECT_EQ(c.points.back().threshold, 0.0);
  EXPECT_EQ(c.points.back().pd, 1.0);

  const RocCurve none = roc_sweep(maps, frames, {}, {}, 11);
  EXPECT_TRUE(std::isnan(none.points.front().pd));
  EXPECT_TRUE(std::isnan(none.auc));
  EXPECT_THROW(roc_sweep({}, {}, gt, {}, 11), InvalidArgument);
  EXPECT_THROW(roc_sweep(maps, frames, gt, {}, 1), InvalidArgument);
}

TEST(RocTest, PerfectDetectorAucIsOne) {
  std::mt19937_64 rng(57);
  std::uniform_real_distribution<double> c(8.0, 56.0), peak(0.05, 1.0);
  for (int steps : {2, 16, 256}) {
    std::vector<FeatureMap> maps;
    std::vector<std::int64_t> frames;
    std::vector<GroundTruthRecord> gt;
    for (int f = 0; f < 20; ++f) {
      const GroundTruthRecord g{f, c(rng), c(rng), 6, 6};
      FeatureMap m(64, 64, 0.0);
      const PixelRect r = pixel_rect(g);
      for (int y = r.y0; y <= r.y1; ++y)
        for (int x = r.x0; x <= r.x1; ++x) m.at(x, y) = peak(rng);
      maps.push_back(std::move(m));
      frames.push_back(f);
      gt.push_back(g);
    }
    const RocCurve curve = roc_sweep(maps, frames, gt, {}, steps);
    EXPECT_NEAR(curve.auc, 1.0, 1.0 / steps) << steps;
  }
}

TEST(RocTest, AucTrapezoidsAndCut) {
  const std::vector<RocPoint> pts{{1.0, 0.0, 0.0}, {0.5, 0.5, 0.5}, {0.0, 1.0, 1.0}};
  EXPECT_DOUBLE_EQ(roc_auc(pts, 1.0), 0.5);
  // Limit at 0.5: area of the first segment only, scaled to [0,1].
  EXPECT_DOUBLE_EQ(roc_auc(pts, 0.5), 0.25);
  // Curve held flat to the right edge.
  EXPECT_DOUBLE_EQ(roc_auc(pts, 2.0), 0.25 * 0.25 + 0.25 * 0.75 + 0.5 * 1.0);
  const std::vector<RocPoint> flat{{1.0, 1.0, 0.0}, {0.0, 1.0, 0.0}};
  EXPECT_DOUBLE_EQ(roc_auc(flat, 0.0), 1.0);
}

// ---------------------------------------------------------------------------
// SCR family

TEST(ScrTest, Examples) {
  RegionStats s;
  s.mu_t = 0.8, s.mu_b = 0.2, s.sigma_b = 0.1;
  EXPECT_NEAR(scr(s), 6.0, 1e-9);
  s.mu_t = s.mu_b = 0.3;
  EXPECT_EQ(scr(s), 0.0);
  s.mu_t = 0.5, s.sigma_b = 0.0;
  EXPECT_NEAR(scr(s), 0.2 / kMetricEpsilon, 1e-3);
  EXPECT_TRUE(std::isfinite(scr(s)));
  EXPECT_NEAR(scr_gain_db(2.0, 20.0), 10.0, 1e-9);
  EXPECT_NEAR(background_suppression_db(0.1, 0.001), 20.0, 1e-9);
  EXPECT_TRUE(std::isfinite(scr_gain_db(0.0, 0.0)));
  EXPECT_TRUE(std::isfinite(background_suppression_db(0.0, 0.0)));
}

TEST(ScrTest, RegionStatsMatchesBruteForce) {
  std::mt19937_64 rng(60);
  const Grid<double> img = testing::uniform_grid(40, 30, rng);
  const GroundTruthRecord gt{0, 12.0, 20.0, 4, 2};
  const int ring = default_ring_width(gt);
  EXPECT_EQ(ring, 4);
  const RegionStats s = region_stats(img, gt, ring);
  double st = 0, sb = 0, sbb = 0;
  std::size_t nt = 0, nb = 0;
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) {
      const bool target = x >= 10 && x <= 13 && y >= 19 && y <= 20;
      const bool outer = x >= 6 && x <= 17 && y >= 15 && y <= 24;
      if (target) st += img.at(x, y), ++nt;
      else if (outer) sb += img.at(x, y), sbb += img.at(x, y) * img.at(x, y), ++nb;
    }
  }
  EXPECT_EQ(s.target_pixels, nt);
  EXPECT_EQ(s.ring_pixels, nb);
  EXPECT_NEAR(s.mu_t, st / nt, 1e-12);
  EXPECT_NEAR(s.mu_b, sb / nb, 1e-12);
  EXPECT_NEAR(s.sigma_b, std::sqrt(sbb / nb - (sb / nb) * (sb / nb)), 1e-9);
}

TEST(ScrTest, IdentityAndZeroVarianceRings) {
  std::mt19937_64 rng(61);
  const Grid<double> img = testing::uniform_grid(32, 32, rng);
  const GroundTruthRecord gt{0, 16, 16, 3, 3};
  const ScrgBsf same = scrg_bsf(img, img, gt, 3);
  EXPECT_EQ(same.scrg, 0.0);
  EXPECT_EQ(same.bsf, 0.0);

  const Grid<double> flat(32, 32, 0.25);
  Grid<double> peak = flat;
  peak.at(16, 16) = 1.0;
  for (const auto& [in, out] : {std::pair{flat, flat}, std::pair{flat, peak}, std::pair{peak, flat},
                                std::pair{Grid<double>(32, 32, 0.0), peak}}) {
    const ScrgBsf r = scrg_bsf(in, out, gt, 3);
    EXPECT_TRUE(std::isfinite(r.scrg));
    EXPECT_TRUE(std::isfinite(r.bsf));
    EXPECT_TRUE(std::isfinite(r.scr_in));
    EXPECT_TRUE(std::isfinite(r.scr_out));
  }
}

TEST(ScrTest, DegenerateGeometry) {
  const Grid<double> img(16, 16, 0.5);
  EXPECT_THROW(region_stats(img, {0, 1, 8, 6, 6}, 2), InvalidArgument);     // box leaves the image
  EXPECT_THROW(region_stats(img, {0, 8, 8, 16, 16}, 2), InvalidArgument);   // no room for a ring
  EXPECT_THROW(region_stats(img, {0, 8, 8, 2, 2}, 0), InvalidArgument);
  EXPECT_THROW(scrg_bsf(img, Grid<double>(15, 16, 0.0), {0, 8, 8, 2, 2}, 2), InvalidArgument);
}

}  // namespace
}  // namespace stlfd

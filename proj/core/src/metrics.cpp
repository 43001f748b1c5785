#include "stlfd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stlfd/ground_truth.hpp"

namespace stlfd {
namespace {

std::int64_t pixels_outside_targets(const BinaryMask& mask, std::span<const GroundTruthRecord> targets) {
  std::vector<PixelRect> boxes;
  boxes.reserve(targets.size());
  for (const auto& gt : targets) boxes.push_back(pixel_rect(gt));
  std::int64_t count = 0;
  for (int y = 0; y < mask.height(); ++y) {
    const auto bits = mask.row(y);
    for (int x = 0; x < mask.width(); ++x) {
      if (!bits[x]) continue;
      const bool inside = std::any_of(boxes.begin(), boxes.end(), [&](const PixelRect& b) { return b.contains(x, y); });
      if (!inside) ++count;
    }
  }
  return count;
}

// Pixel rectangle that bounds a target's acceptance region, clipped to the image.
PixelRect acceptance_bounds(const MatchRule& rule, const GroundTruthRecord& gt, int width, int height) {
  PixelRect r;
  if (rule.mode == MatchMode::kDistance) {
    r = {static_cast<int>(std::floor(gt.cx - rule.radius)), static_cast<int>(std::floor(gt.cy - rule.radius)),
         static_cast<int>(std::ceil(gt.cx + rule.radius)), static_cast<int>(std::ceil(gt.cy + rule.radius))};
  } else {
    r = pixel_rect(gt);
  }
  r.x0 = std::max(r.x0, 0);
  r.y0 = std::max(r.y0, 0);
  r.x1 = std::min(r.x1, width - 1);
  r.y1 = std::min(r.y1, height - 1);
  return r;
}

double squared_distance(const GroundTruthRecord& gt, double x, double y) noexcept {
  return (x - gt.cx) * (x - gt.cx) + (y - gt.cy) * (y - gt.cy);
}

}  // namespace

void MatchRule::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("match radius must be > 0");
}

bool MatchRule::accepts_pixel(const GroundTruthRecord& gt, int x, int y) const noexcept {
  if (mode == MatchMode::kContainment) return box_contains(gt, x, y);
  return squared_distance(gt, x, y) <= radius * radius;
}

bool MatchRule::accepts(const GroundTruthRecord& gt, const Point2& p) const noexcept {
  if (mode == MatchMode::kContainment) {
    return p.x >= gt.cx - gt.w / 2.0 && p.x < gt.cx + gt.w / 2.0 && p.y >= gt.cy - gt.h / 2.0 &&
           p.y < gt.cy + gt.h / 2.0;
  }
  return squared_distance(gt, p.x, p.y) <= radius * radius;
}

FrameTally match_frame(std::span<const Detection> detections, const BinaryMask& mask,
                       std::span<const GroundTruthRecord> targets, const MatchRule& rule) {
  rule.validate();
  std::vector<const Detection*> order;
  order.reserve(detections.size());
  for (const auto& d : detections) order.push_back(&d);
  std::stable_sort(order.begin(), order.end(), [](const Detection* a, const Detection* b) { return a->score > b->score; });

  std::vector<bool> claimed(targets.size(), false);
  FrameTally tally;
  tally.total_targets = static_cast<std::int64_t>(targets.size());
  for (const Detection* d : order) {
    std::size_t best = targets.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (claimed[t] || !rule.accepts(targets[t], d->centroid)) continue;
      const double dist = squared_distance(targets[t], d->centroid.x, d->centroid.y);
      if (dist < best_dist) {
        best_dist = dist;
        best = t;
      }
    }
    if (best < targets.size()) {
      claimed[best] = true;
      ++tally.hits;
    }
  }
  tally.false_pixels = pixels_outside_targets(mask, targets);
  return tally;
}

FrameTally match_frame(const BinaryMask& mask, std::span<const GroundTruthRecord> targets, const MatchRule& rule) {
  rule.validate();
  FrameTally tally;
  tally.total_targets = static_cast<std::int64_t>(targets.size());
  for (const auto& gt : targets) {
    const PixelRect r = acceptance_bounds(rule, gt, mask.width(), mask.height());
    bool hit = false;
    for (int y = r.y0; y <= r.y1 && !hit; ++y) {
      for (int x = r.x0; x <= r.x1 && !hit; ++x) hit = mask.test(x, y) && rule.accepts_pixel(gt, x, y);
    }
    if (hit) ++tally.hits;
  }
  tally.false_pixels = pixels_outside_targets(mask, targets);
  return tally;
}

DetectionRates aggregate_pd_pf(std::span<const FrameTally> tallies, int width, int height, std::size_t frame_count) {
  if (frame_count == 0) throw InvalidArgument("aggregate_pd_pf: need at least one frame");
  if (width <= 0 || height <= 0) throw InvalidArgument("aggregate_pd_pf: bad frame dimensions");
  FrameTally sum;
  for (const auto& t : tallies) sum += t;
  DetectionRates rates;
  rates.pd = sum.total_targets > 0 ? static_cast<double>(sum.hits) / static_cast<double>(sum.total_targets)
                                   : std::numeric_limits<double>::quiet_NaN();
  rates.pf = static_cast<double>(sum.false_pixels) /
             (static_cast<double>(width) * static_cast<double>(height) * static_cast<double>(frame_count));
  return rates;
}

std::vector<double> roc_thresholds(int steps) {
  if (steps < 2) throw InvalidArgument("ROC needs at least 2 steps");
  std::vector<double> t(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) t[i] = static_cast<double>(steps - 1 - i) / static_cast<double>(steps - 1);
  return t;
}

RocCurve roc_sweep(std::span<const FeatureMap> maps, std::span<const std::int64_t> frame_indices,
                   std::span<const GroundTruthRecord> targets, const MatchRule& rule, int steps) {
  rule.validate();
  const std::vector<double> thresholds = roc_thresholds(steps);
  if (maps.empty()) throw InvalidArgument("roc_sweep: no maps");
  if (maps.size() != frame_indices.size()) throw InvalidArgument("roc_sweep: one frame index per map required");
  const int w = maps.front().width();
  const int h = maps.front().height();

  // A target is hit at threshold t iff the largest value in its acceptance
  // region exceeds t; a pixel outside every box is false iff it exceeds t.
  std::vector<double> hit_levels;
  std::vector<double> false_values;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const FeatureMap& map = maps[i];
    if (!map.same_shape(w, h)) throw InvalidArgument("roc_sweep: maps differ in size");
    const auto frame_targets = records_for_frame(targets, frame_indices[i]);
    for (const auto& gt : frame_targets) {
      const PixelRect r = acceptance_bounds(rule, gt, w, h);
      double level = -std::numeric_limits<double>::infinity();
      for (int y = r.y0; y <= r.y1; ++y) {
        for (int x = r.x0; x <= r.x1; ++x) {
          if (rule.accepts_pixel(gt, x, y)) level = std::max(level, map.at(x, y));
        }
      }
      hit_levels.push_back(level);
    }
    std::vector<PixelRect> boxes;
    for (const auto& gt : frame_targets) boxes.push_back(pixel_rect(gt));
    for (int y = 0; y < h; ++y) {
      const auto row = map.row(y);
      for (int x = 0; x < w; ++x) {
        if (!(row[x] > 0.0)) continue;
        if (std::none_of(boxes.begin(), boxes.end(), [&](const PixelRect& b) { return b.contains(x, y); })) {
          false_values.push_back(row[x]);
        }
      }
    }
  }
  std::sort(hit_levels.begin(), hit_levels.end());
  std::sort(false_values.begin(), false_values.end());

  auto count_above = [](const std::vector<double>& sorted, double t) {
    return static_cast<double>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t));
  };
  const double total_pixels = static_cast<double>(w) * h * static_cast<double>(maps.size());
  const double total_targets = static_cast<double>(hit_levels.size());

  RocCurve curve;
  curve.points.reserve(thresholds.size());
  for (double t : thresholds) {
    RocPoint p;
    p.threshold = t;
    p.pd = total_targets > 0 ? count_above(hit_levels, t) / total_targets : std::numeric_limits<double>::quiet_NaN();
    p.pf = count_above(false_values, t) / total_pixels;
    curve.points.push_back(p);
  }
  curve.pf_limit = 0.0;
  for (const auto& p : curve.points) curve.pf_limit = std::max(curve.pf_limit, p.pf);
  curve.auc = roc_auc(curve.points, curve.pf_limit);
  return curve;
}

double roc_auc(std::span<const RocPoint> points, double pf_limit) noexcept {
  if (points.empty()) return std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : points) {
    if (std::isnan(p.pd)) return std::numeric_limits<double>::quiet_NaN();
  }
  auto x_of = [pf_limit](double pf) { return pf_limit > 0.0 ? pf / pf_limit : 0.0; };

  double area = 0.0;
  double x_prev = std::min(x_of(points[0].pf), 1.0);
  double y_prev = points[0].pd;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double x = x_of(points[i].pf);
    const double y = points[i].pd;
    if (x > 1.0) {
      // Cut the segment at the right edge.
      const double frac = x > x_prev ? (1.0 - x_prev) / (x - x_prev) : 0.0;
      const double y_edge = y_prev + frac * (y - y_prev);
      area += (1.0 - x_prev) * (y_prev + y_edge) / 2.0;
      return area;
    }
    area += (x - x_prev) * (y_prev + y) / 2.0;
    x_prev = x;
    y_prev = y;
  }
  area += (1.0 - x_prev) * y_prev;
  return area;
}

int default_ring_width(const GroundTruthRecord& gt) noexcept {
  return static_cast<int>(std::ceil(std::max(gt.w, gt.h)));
}

RegionStats region_stats(const Grid<double>& image, const GroundTruthRecord& gt, int ring_width) {
  if (ring_width < 1) throw InvalidArgument("ring width must be >= 1");
  if (!box_inside(gt, image.width(), image.height())) {
    throw InvalidArgument("target box at frame " + std::to_string(gt.frame_index) + " is not inside the image");
  }
  RegionStats s;
  s.target = pixel_rect(gt);
  s.outer = {std::max(s.target.x0 - ring_width, 0), std::max(s.target.y0 - ring_width, 0),
             std::min(s.target.x1 + ring_width, image.width() - 1),
             std::min(s.target.y1 + ring_width, image.height() - 1)};

  double t_sum = 0.0;
  double b_sum = 0.0;
  for (int y = s.outer.y0; y <= s.outer.y1; ++y) {
    for (int x = s.outer.x0; x <= s.outer.x1; ++x) {
      if (s.target.contains(x, y)) {
        t_sum += image.at(x, y);
        ++s.target_pixels;
      } else {
        b_sum += image.at(x, y);
        ++s.ring_pixels;
      }
    }
  }
  if (s.ring_pixels == 0) throw InvalidArgument("background ring is empty");
  s.mu_t = t_sum / static_cast<double>(s.target_pixels);
  s.mu_b = b_sum / static_cast<double>(s.ring_pixels);
  double sq = 0.0;
  for (int y = s.outer.y0; y <= s.outer.y1; ++y) {
    for (int x = s.outer.x0; x <= s.outer.x1; ++x) {
      if (!s.target.contains(x, y)) sq += (image.at(x, y) - s.mu_b) * (image.at(x, y) - s.mu_b);
    }
  }
  s.sigma_b = std::sqrt(sq / static_cast<double>(s.ring_pixels));
  return s;
}

double scr(const RegionStats& stats) noexcept {
  return std::abs(stats.mu_t - stats.mu_b) / std::max(stats.sigma_b, kMetricEpsilon);
}

double scr_gain_db(double scr_in, double scr_out) noexcept {
  return 10.0 * std::log10(std::max(scr_out, kMetricEpsilon) / std::max(scr_in, kMetricEpsilon));
}

double background_suppression_db(double sigma_in, double sigma_out) noexcept {
  return 10.0 * std::log10(std::max(sigma_in, kMetricEpsilon) / std::max(sigma_out, kMetricEpsilon));
}

ScrgBsf scrg_bsf(const Grid<double>& input, const Grid<double>& output, const GroundTruthRecord& gt, int ring_width) {
  if (!input.same_shape(output)) throw InvalidArgument("scrg_bsf: input and output differ in size");
  const RegionStats in = region_stats(input, gt, ring_width);
  const RegionStats out = region_stats(output, gt, ring_width);
  ScrgBsf r;
  r.scr_in = scr(in);
  r.scr_out = scr(out);
  r.scrg = scr_gain_db(r.scr_in, r.scr_out);
  r.bsf = background_suppression_db(in.sigma_b, out.sigma_b);
  return r;
}

}  // namespace stlfd

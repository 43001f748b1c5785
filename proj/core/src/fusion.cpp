#include "stlfd/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "stlfd/window.hpp"

namespace stlfd {

void AbsConfig::validate() const {
  if (kernel < 1 || kernel % 2 == 0) {
    throw InvalidArgument("ABS kernel must be odd and >= 1, got " + std::to_string(kernel));
  }
}

void ThresholdConfig::validate() const {
  if (!std::isfinite(k_sigma) || k_sigma < 0.0) {
    throw InvalidArgument("k_sigma must be finite and >= 0");
  }
}

FeatureMap fuse(const FeatureMap& smap, const FeatureMap& tmap) {
  if (!smap.same_shape(tmap)) throw InvalidArgument("fuse: spatial and temporal maps differ in size");
  FeatureMap out(smap.width(), smap.height());
  const auto a = smap.values();
  const auto b = tmap.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = a[i] * b[i];
  return out;
}

FeatureMap abs_suppress(const FeatureMap& stmap, const AbsConfig& cfg) {
  cfg.validate();
  if (!cfg.enabled) return stmap;
  const Grid<double> local_max = window::max_filter(stmap, cfg.kernel);
  FeatureMap out(stmap.width(), stmap.height());
  const auto in = stmap.values();
  const auto m = local_max.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = in[i] == m[i] ? in[i] : in[i] * m[i];
  return out;
}

MapStats map_stats(const FeatureMap& map) noexcept {
  const auto v = map.values();
  if (v.empty()) return {};
  double sum = 0.0;
  double lo = v[0];
  double hi = v[0];
  for (double x : v) {
    sum += x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double mean = std::clamp(sum / static_cast<double>(v.size()), lo, hi);
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(v.size()))};
}

double segmentation_threshold(const FeatureMap& map, const ThresholdConfig& cfg) {
  cfg.validate();
  const MapStats s = map_stats(map);
  return s.mean + cfg.k_sigma * s.stddev;
}

BinaryMask threshold_mask(const FeatureMap& map, double threshold) {
  BinaryMask mask(map.width(), map.height());
  const auto in = map.values();
  auto bits = mask.values();
  for (std::size_t i = 0; i < in.size(); ++i) bits[i] = in[i] > threshold ? 1 : 0;
  return mask;
}

BinaryMask segment(const FeatureMap& map, const ThresholdConfig& cfg) {
  return threshold_mask(map, segmentation_threshold(map, cfg));
}

std::vector<Detection> extract_detections(const BinaryMask& mask, const FeatureMap& score_map,
                                          std::int64_t frame_index) {
  if (!mask.same_shape(score_map)) throw InvalidArgument("extract_detections: mask and map differ in size");
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<int> stack;
  std::vector<Detection> out;

  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const std::size_t start = static_cast<std::size_t>(y0) * w + x0;
      if (!mask.test(x0, y0) || seen[start]) continue;

      Detection d;
      d.frame_index = frame_index;
      d.bbox = {x0, y0, x0, y0};
      d.score = score_map.at(x0, y0);
      double sw = 0.0, swx = 0.0, swy = 0.0, sx = 0.0, sy = 0.0;

      seen[start] = 1;
      stack.assign(1, static_cast<int>(start));
      while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const int x = i % w;
        const int y = i / w;
        const double v = score_map.at(x, y);
        ++d.area;
        d.score = std::max(d.score, v);
        // Offsets from the seed pixel keep single-pixel centroids exact.
        sw += v;
        swx += v * (x - x0);
        swy += v * (y - y0);
        sx += x - x0;
        sy += y - y0;
        d.bbox.x0 = std::min(d.bbox.x0, x);
        d.bbox.x1 = std::max(d.bbox.x1, x);
        d.bbox.y0 = std::min(d.bbox.y0, y);
        d.bbox.y1 = std::max(d.bbox.y1, y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
            if (seen[j] || !mask.test(nx, ny)) continue;
            seen[j] = 1;
            stack.push_back(static_cast<int>(j));
          }
        }
      }
      if (sw > 0.0) {
        d.centroid = {x0 + swx / sw, y0 + swy / sw};
      } else {
        const double n = static_cast<double>(d.area);
        d.centroid = {x0 + sx / n, y0 + sy / n};
      }
      out.push_back(d);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) { return a.score > b.score; });
  return out;
}

}  // namespace stlfd

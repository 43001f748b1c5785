#include "stlfd/spatial.hpp"

#include <algorithm>
#include <array>

#include "stlfd/window.hpp"

namespace stlfd {
namespace {

// Patch offsets in units of one patch, clockwise from the top. Entry n and
// entry n + 4 are diametrically opposite.
constexpr std::array<std::array<int, 2>, 8> kNeighbors{{
    {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1},
}};

void check_fits(const Frame& frame, const SpatialConfig& cfg) {
  cfg.validate();
  const int side = cfg.kernel_side();
  if (frame.width() < side || frame.height() < side) {
    throw InvalidArgument("frame " + std::to_string(frame.width()) + "x" + std::to_string(frame.height()) +
                          " is smaller than the " + std::to_string(side) + "x" + std::to_string(side) +
                          " spatial kernel");
  }
}

double contrast_product(double target_max, const std::array<double, 8>& means) noexcept {
  double hi = 0.0;
  double lo = 0.0;
  for (int n = 0; n < 4; ++n) {
    const double d = std::max(2.0 * target_max - means[n] - means[n + 4], 0.0);
    if (n == 0) {
      hi = lo = d;
    } else {
      hi = std::max(hi, d);
      lo = std::min(lo, d);
    }
  }
  return hi * lo;
}

}  // namespace

void SpatialConfig::validate() const {
  if (patch < 3 || patch % 2 == 0) {
    throw InvalidArgument("spatial patch must be odd and >= 3, got " + std::to_string(patch));
  }
}

FeatureMap normalize_by_max(FeatureMap map) noexcept {
  const double peak = map.max_value();
  if (peak > 0.0) {
    for (double& v : map.values()) v /= peak;
  }
  return map;
}

FeatureMap compute_smap_raw(const Frame& frame, const SpatialConfig& cfg) {
  check_fits(frame, cfg);
  const int w = frame.width();
  const int h = frame.height();
  const int p = cfg.patch;
  const int border = cfg.border();

  const Grid<double> patch_max = window::max_filter(frame.pixels(), p);
  const Grid<double> patch_min = window::min_filter(frame.pixels(), p);
  Grid<double> patch_mean = window::box_mean(frame.pixels(), p);
  // A mean lies within its patch's range; clamping removes summation error so
  // that flat patches give their exact value (and zero contrast).
  for (std::size_t i = 0; i < patch_mean.size(); ++i) {
    patch_mean.values()[i] = std::clamp(patch_mean.values()[i], patch_min.values()[i], patch_max.values()[i]);
  }

  std::array<std::ptrdiff_t, 8> offsets{};
  for (std::size_t n = 0; n < kNeighbors.size(); ++n) {
    offsets[n] = static_cast<std::ptrdiff_t>(kNeighbors[n][1]) * p * w + static_cast<std::ptrdiff_t>(kNeighbors[n][0]) * p;
  }

  FeatureMap out(w, h);
  const double* mean = patch_mean.values().data();
  for (int y = border; y < h - border; ++y) {
    const auto tmax = patch_max.row(y);
    auto dst = out.row(y);
    for (int x = border; x < w - border; ++x) {
      const double* center = mean + static_cast<std::ptrdiff_t>(y) * w + x;
      std::array<double, 8> means;
      for (std::size_t n = 0; n < 8; ++n) means[n] = center[offsets[n]];
      dst[x] = contrast_product(tmax[x], means);
    }
  }
  return out;
}

FeatureMap compute_smap(const Frame& frame, const SpatialConfig& cfg) {
  return normalize_by_max(compute_smap_raw(frame, cfg));
}

FeatureMap compute_smap_reference_raw(const Frame& frame, const SpatialConfig& cfg) {
  check_fits(frame, cfg);
  const int w = frame.width();
  const int h = frame.height();
  const int p = cfg.patch;
  const int half = p / 2;
  const int border = cfg.border();

  // Mean of the patch centered at (cx, cy), kept inside the patch's range.
  auto patch_mean = [&](int cx, int cy) {
    double sum = 0.0;
    double lo = frame.at(cx, cy);
    double hi = lo;
    for (int v = -half; v <= half; ++v) {
      for (int u = -half; u <= half; ++u) {
        const double px = frame.at(cx + u, cy + v);
        sum += px;
        lo = std::min(lo, px);
        hi = std::max(hi, px);
      }
    }
    return std::clamp(sum / (static_cast<double>(p) * p), lo, hi);
  };

  FeatureMap out(w, h);
  for (int y = border; y < h - border; ++y) {
    for (int x = border; x < w - border; ++x) {
      double target_max = 0.0;
      for (int v = -half; v <= half; ++v) {
        for (int u = -half; u <= half; ++u) target_max = std::max(target_max, frame.at(x + u, y + v));
      }
      const double top = patch_mean(x, y - p);
      const double top_right = patch_mean(x + p, y - p);
      const double right = patch_mean(x + p, y);
      const double bottom_right = patch_mean(x + p, y + p);
      const double bottom = patch_mean(x, y + p);
      const double bottom_left = patch_mean(x - p, y + p);
      const double left = patch_mean(x - p, y);
      const double top_left = patch_mean(x - p, y - p);

      const double d[4] = {
          std::max(2.0 * target_max - top - bottom, 0.0),
          std::max(2.0 * target_max - top_right - bottom_left, 0.0),
          std::max(2.0 * target_max - right - left, 0.0),
          std::max(2.0 * target_max - bottom_right - top_left, 0.0),
      };
      out.at(x, y) = *std::max_element(d, d + 4) * *std::min_element(d, d + 4);
    }
  }
  return out;
}

FeatureMap compute_smap_reference(const Frame& frame, const SpatialConfig& cfg) {
  return normalize_by_max(compute_smap_reference_raw(frame, cfg));
}

}  // namespace stlfd

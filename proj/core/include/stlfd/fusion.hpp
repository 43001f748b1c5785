#pragma once

#include <cstdint>
#include <vector>

#include "stlfd/types.hpp"

namespace stlfd {

/// Pixel-level adaptive background suppression.
struct AbsConfig {
  int kernel = 15;  // odd side of the local-max window
  bool enabled = true;

  void validate() const;
};

/// Dynamic threshold: mean + k_sigma * stddev of the map.
struct ThresholdConfig {
  double k_sigma = 10.0;

  void validate() const;
};

/// Element-wise product of the spatial and temporal maps.
FeatureMap fuse(const FeatureMap& smap, const FeatureMap& tmap);

/// Each pixel that equals the max of its kernel x kernel neighbourhood (window
/// clipped at borders) is kept; every other pixel is multiplied by that max.
/// With cfg.enabled == false the input is returned as is.
FeatureMap abs_suppress(const FeatureMap& stmap, const AbsConfig& cfg);

struct MapStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

/// Mean is clamped to [min, max] of the map so a constant map yields exactly
/// its value and zero deviation.
MapStats map_stats(const FeatureMap& map) noexcept;

double segmentation_threshold(const FeatureMap& map, const ThresholdConfig& cfg);

/// Bit set iff value > threshold.
BinaryMask threshold_mask(const FeatureMap& map, double threshold);

/// threshold_mask(map, segmentation_threshold(map, cfg)).
BinaryMask segment(const FeatureMap& map, const ThresholdConfig& cfg);

/// 8-connected components of `mask`. Centroids are weighted by `score_map`
/// (plain pixel mean when every weight is zero). Sorted by descending score,
/// ties broken top-to-bottom then left-to-right.
std::vector<Detection> extract_detections(const BinaryMask& mask, const FeatureMap& score_map,
                                          std::int64_t frame_index);

}  // namespace stlfd

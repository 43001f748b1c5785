#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stlfd/types.hpp"

namespace stlfd {

/// Floor applied to every denominator in the SCR family.
inline constexpr double kMetricEpsilon = 1e-6;

enum class MatchMode {
  kDistance,     // within `radius` pixels of the target center
  kContainment,  // inside the target box
};

struct MatchRule {
  MatchMode mode = MatchMode::kDistance;
  double radius = 4.0;

  void validate() const;
  /// Whether pixel (x, y) lies in the target's acceptance region.
  bool accepts_pixel(const GroundTruthRecord& gt, int x, int y) const noexcept;
  /// Whether a detection centroid lies in the target's acceptance region.
  bool accepts(const GroundTruthRecord& gt, const Point2& p) const noexcept;
};

/// Per-frame counts that sum across frames.
struct FrameTally {
  std::int64_t hits = 0;
  std::int64_t total_targets = 0;
  std::int64_t false_pixels = 0;  // mask pixels outside every target box

  FrameTally& operator+=(const FrameTally& o) noexcept {
    hits += o.hits;
    total_targets += o.total_targets;
    false_pixels += o.false_pixels;
    return *this;
  }
  friend bool operator==(const FrameTally&, const FrameTally&) = default;
};

/// Component-level matching. Detections are taken in descending score order;
/// each claims the nearest still-unclaimed target it matches, if any.
FrameTally match_frame(std::span<const Detection> detections, const BinaryMask& mask,
                       std::span<const GroundTruthRecord> targets, const MatchRule& rule);

/// Pixel-level matching: a target is hit when any set pixel lies in its
/// acceptance region. Hits can only grow as the mask grows.
FrameTally match_frame(const BinaryMask& mask, std::span<const GroundTruthRecord> targets, const MatchRule& rule);

struct DetectionRates {
  double pd = 0.0;  // NaN when there are no targets at all
  double pf = 0.0;
};

/// pd = sum(hits) / sum(targets); pf = sum(false pixels) / (width * height * frames).
DetectionRates aggregate_pd_pf(std::span<const FrameTally> tallies, int width, int height, std::size_t frame_count);

struct RocPoint {
  double threshold = 0.0;
  double pd = 0.0;
  double pf = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // thresholds strictly decreasing
  double auc = 0.0;
  double pf_limit = 0.0;  // pf value mapped to the right edge of the AUC axis
};

/// Thresholds used by roc_sweep: 1, ..., 0 in `steps` uniform steps.
std::vector<double> roc_thresholds(int steps);

/// Sweeps a uniform descending threshold grid over [0, 1]. At each threshold
/// every map is segmented with a strict > and scored with pixel-level
/// matching. `maps[i]` belongs to frame `frame_indices[i]`; `targets` must be
/// sorted by frame index. AUC is computed with pf_limit = largest pf seen.
RocCurve roc_sweep(std::span<const FeatureMap> maps, std::span<const std::int64_t> frame_indices,
                   std::span<const GroundTruthRecord> targets, const MatchRule& rule, int steps = 256);

/// Area under pd(pf) on [0, pf_limit], normalized to [0, 1]. The curve starts
/// at the first point, is cut at pf_limit, and holds its last pd up to the
/// right edge. pf_limit == 0 puts every point on the left edge.
double roc_auc(std::span<const RocPoint> points, double pf_limit) noexcept;

/// Target box statistics plus a ring around it.
struct RegionStats {
  double mu_t = 0.0;
  double mu_b = 0.0;
  double sigma_b = 0.0;  // population std of the ring
  PixelRect target;
  PixelRect outer;  // target dilated by the ring width, clipped to the image
  std::size_t target_pixels = 0;
  std::size_t ring_pixels = 0;
};

/// Ring width used when none is given: ceil(max(w, h)).
int default_ring_width(const GroundTruthRecord& gt) noexcept;

/// Throws InvalidArgument when the box is not inside the image or the ring is empty.
RegionStats region_stats(const Grid<double>& image, const GroundTruthRecord& gt, int ring_width);

/// |mu_t - mu_b| / max(sigma_b, eps).
double scr(const RegionStats& stats) noexcept;

/// 10 log10(max(out, eps) / max(in, eps)).
double scr_gain_db(double scr_in, double scr_out) noexcept;
/// 10 log10(max(sigma_in, eps) / max(sigma_out, eps)).
double background_suppression_db(double sigma_in, double sigma_out) noexcept;

struct ScrgBsf {
  double scrg = 0.0;
  double bsf = 0.0;
  double scr_in = 0.0;
  double scr_out = 0.0;
};

ScrgBsf scrg_bsf(const Grid<double>& input, const Grid<double>& output, const GroundTruthRecord& gt, int ring_width);

}  // namespace stlfd

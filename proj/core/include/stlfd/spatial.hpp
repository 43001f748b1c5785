#pragma once

#include "stlfd/types.hpp"

namespace stlfd {

/// Geometry of the 3x3-patch local contrast kernel.
struct SpatialConfig {
  int patch = 3;  // side of each of the nine patches; kernel side is 3 * patch

  int kernel_side() const noexcept { return 3 * patch; }
  /// Pixels within this distance of an edge have no full kernel and stay 0.
  int border() const noexcept { return (3 * patch - 1) / 2; }
  /// Throws InvalidArgument unless patch is odd and >= 3.
  void validate() const;
};

/// Divides every value by the map's maximum. An all-zero map is returned
/// unchanged.
FeatureMap normalize_by_max(FeatureMap map) noexcept;

/// Unnormalized spatial response. For each pixel whose kernel fits:
///   D_n = max(2 * max(T) - mean(B_n) - mean(B_{n+4}), 0) for the four opposite
///   neighbor pairs, and the response is max(D) * min(D).
/// Neighbors are numbered clockwise from the top: B1 top, B2 top-right, B3
/// right, B4 bottom-right, B5 bottom, B6 bottom-left, B7 left, B8 top-left.
/// Pixels nearer than border() to an edge are 0.
FeatureMap compute_smap_raw(const Frame& frame, const SpatialConfig& cfg);

/// normalize_by_max(compute_smap_raw(frame, cfg)).
FeatureMap compute_smap(const Frame& frame, const SpatialConfig& cfg);

/// Literal per-pixel evaluation with no shared work between pixels. Slow; it
/// exists to check compute_smap_raw.
FeatureMap compute_smap_reference_raw(const Frame& frame, const SpatialConfig& cfg);
FeatureMap compute_smap_reference(const Frame& frame, const SpatialConfig& cfg);

}  // namespace stlfd

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "stlfd/types.hpp"

namespace stlfd {

/// Parses a `frame,cx,cy,w,h` CSV. Records come back sorted by frame index
/// (stable, so per-frame order follows the file).
std::vector<GroundTruthRecord> load_ground_truth(const std::filesystem::path& path);
std::vector<GroundTruthRecord> parse_ground_truth(std::string_view text);

void write_ground_truth(const std::filesystem::path& path, std::span<const GroundTruthRecord> records);

/// Pixels whose centers fall in [cx - w/2, cx + w/2) x [cy - h/2, cy + h/2).
PixelRect pixel_rect(const GroundTruthRecord& gt) noexcept;

bool box_contains(const GroundTruthRecord& gt, int x, int y) noexcept;

/// True when the box covers at least one pixel and lies inside a width x height frame.
bool box_inside(const GroundTruthRecord& gt, int width, int height) noexcept;

/// Records belonging to one frame (input must be sorted by frame index).
std::span<const GroundTruthRecord> records_for_frame(std::span<const GroundTruthRecord> sorted,
                                                     std::int64_t frame_index) noexcept;

}  // namespace stlfd

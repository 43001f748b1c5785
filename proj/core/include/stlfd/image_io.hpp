#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "stlfd/types.hpp"

namespace stlfd {

/// Decoded single-channel image before unit normalization.
struct RawImage {
  int width = 0;
  int height = 0;
  int bit_depth = 8;        // 8 or 16
  std::uint32_t maxval = 255;
  std::vector<std::uint16_t> samples;
};

struct ImageHeader {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
};

/// Dimensions only; does not decode pixel data.
ImageHeader read_image_header(const std::filesystem::path& path);

/// Reads a P5 PGM (maxval <= 65535) or a grayscale PNG (8 or 16 bit).
/// Format is chosen by magic bytes, not by extension.
RawImage read_image(const std::filesystem::path& path);

/// Loads an image as a Frame; samples are divided by the format's full-scale
/// value (255, 65535, or the PGM maxval).
Frame load_frame(const std::filesystem::path& path, std::int64_t index);

// Writers. All throw IoError on failure.
void write_png8(const std::filesystem::path& path, const Grid<std::uint8_t>& image);
void write_png16(const std::filesystem::path& path, const Grid<std::uint16_t>& image);
void write_pgm16(const std::filesystem::path& path, const Grid<std::uint16_t>& image);

/// Mask bit set -> 255, clear -> 0, as 8-bit PNG.
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

/// Quantizes a unit-range value to 16 bits: round-half-up of v*65535, clamped.
std::uint16_t quantize16(double v) noexcept;

/// Map as 16-bit PGM, value = quantize16(v).
void write_map_pgm16(const std::filesystem::path& path, const FeatureMap& map);

/// Frame pixels as a 16-bit PNG (quantize16 per pixel).
void write_frame_png16(const std::filesystem::path& path, const Grid<double>& pixels);

/// Raw little-endian IEEE float32 dump, row-major, no header.
void write_map_f32(const std::filesystem::path& path, const FeatureMap& map);
FeatureMap read_map_f32(const std::filesystem::path& path, int width, int height);

/// Reads a 16-bit (or 8-bit) PGM feature map back into unit range.
FeatureMap read_map_pgm(const std::filesystem::path& path);

/// Filename for per-frame artifacts: "<stem>_<index zero-padded to 6>.<ext>".
std::string indexed_name(std::string_view stem, std::int64_t index, std::string_view ext);

}  // namespace stlfd

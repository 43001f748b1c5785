#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "stlfd/types.hpp"

namespace stlfd {

/// Persists per-frame masks and feature maps under one run directory:
///   <root>/masks/mask_<index>.png        8-bit, {0,255}
///   <root>/maps/<kind>_<index>.pgm       16-bit, round(v * 65535)
///   <root>/maps/<kind>_<index>.f32       raw little-endian float32
class OutputWriter {
 public:
  /// Creates the directory tree. Throws IoError if it cannot.
  explicit OutputWriter(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  std::filesystem::path mask_path(std::int64_t index) const;
  std::filesystem::path map_path(std::string_view kind, std::int64_t index, std::string_view ext) const;

  void write_mask(std::int64_t index, const BinaryMask& mask);
  void write_map_pgm(std::string_view kind, std::int64_t index, const FeatureMap& map);
  void write_map_raw(std::string_view kind, std::int64_t index, const FeatureMap& map);

  /// Every file written so far, in write order.
  const std::vector<std::filesystem::path>& written() const noexcept { return written_; }

 private:
  std::filesystem::path root_;
  std::vector<std::filesystem::path> written_;
};

}  // namespace stlfd

#include "stlfd/output_writer.hpp"

#include "stlfd/image_io.hpp"

namespace stlfd {

namespace fs = std::filesystem;

OutputWriter::OutputWriter(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "masks", ec);
  if (!ec) fs::create_directories(root_ / "maps", ec);
  if (ec) throw IoError("cannot create output directory " + root_.string() + ": " + ec.message());
}

fs::path OutputWriter::mask_path(std::int64_t index) const { return root_ / "masks" / indexed_name("mask", index, "png"); }

fs::path OutputWriter::map_path(std::string_view kind, std::int64_t index, std::string_view ext) const {
  return root_ / "maps" / indexed_name(kind, index, ext);
}

void OutputWriter::write_mask(std::int64_t index, const BinaryMask& mask) {
  auto path = mask_path(index);
  write_mask_png(path, mask);
  written_.push_back(std::move(path));
}

void OutputWriter::write_map_pgm(std::string_view kind, std::int64_t index, const FeatureMap& map) {
  auto path = map_path(kind, index, "pgm");
  write_map_pgm16(path, map);
  written_.push_back(std::move(path));
}

void OutputWriter::write_map_raw(std::string_view kind, std::int64_t index, const FeatureMap& map) {
  auto path = map_path(kind, index, "f32");
  write_map_f32(path, map);
  written_.push_back(std::move(path));
}

}  // namespace stlfd

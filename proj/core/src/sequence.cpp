#include "stlfd/sequence.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cctype>

#include "stlfd/image_io.hpp"

namespace stlfd {

namespace fs = std::filesystem;

SequenceSource::SequenceSource(std::vector<SequenceEntry> entries, int width, int height,
                               std::vector<std::string> warnings)
    : entries_(std::move(entries)), width_(width), height_(height), warnings_(std::move(warnings)) {}

std::optional<Frame> SequenceSource::next() {
  if (cursor_ >= entries_.size()) return std::nullopt;
  const SequenceEntry& e = entries_[cursor_++];
  if (observer_) observer_(e.index, e.path);
  Frame f = load_frame(e.path, e.index);
  if (f.width() != width_ || f.height() != height_) {
    throw IoError(e.path.string() + ": dimensions changed since the sequence was opened");
  }
  return f;
}

std::optional<Frame> MemorySource::next() {
  if (cursor_ >= frames_.size()) return std::nullopt;
  return frames_[cursor_++];
}

std::optional<std::int64_t> filename_index(const fs::path& path) {
  const std::string stem = path.stem().string();
  auto end = stem.size();
  while (end > 0 && !std::isdigit(static_cast<unsigned char>(stem[end - 1]))) --end;
  if (end == 0) return std::nullopt;
  auto begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  // 18 digits always fit in int64.
  if (end - begin > 18) return std::nullopt;
  return std::stoll(stem.substr(begin, end - begin));
}

SequenceSource open_sequence(const fs::path& dir, const std::string& pattern) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());

  std::vector<SequenceEntry> entries;
  for (const auto& de : fs::directory_iterator(dir)) {
    if (!de.is_regular_file()) continue;
    const std::string name = de.path().filename().string();
    if (fnmatch(pattern.c_str(), name.c_str(), 0) != 0) continue;
    const auto idx = filename_index(de.path());
    if (!idx) throw IoError("no frame index in filename: " + name);
    entries.push_back({*idx, de.path()});
  }
  if (entries.empty()) {
    throw IoError("no files matching '" + pattern + "' in " + dir.string());
  }
  std::sort(entries.begin(), entries.end(), [](const SequenceEntry& a, const SequenceEntry& b) {
    return a.index != b.index ? a.index < b.index : a.path < b.path;
  });

  std::vector<std::string> warnings;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].index == entries[i - 1].index) {
      throw IoError("duplicate frame index " + std::to_string(entries[i].index) + ": " +
                    entries[i - 1].path.filename().string() + ", " + entries[i].path.filename().string());
    }
    if (entries[i].index != entries[i - 1].index + 1) {
      warnings.push_back("frame indices jump from " + std::to_string(entries[i - 1].index) + " to " +
                         std::to_string(entries[i].index));
    }
  }

  const ImageHeader first = read_image_header(entries.front().path);
  for (const auto& e : entries) {
    const ImageHeader h = read_image_header(e.path);
    if (h.width != first.width || h.height != first.height) {
      throw IoError("mixed frame dimensions: " + entries.front().path.filename().string() + " is " +
                    std::to_string(first.width) + "x" + std::to_string(first.height) + ", " +
                    e.path.filename().string() + " is " + std::to_string(h.width) + "x" + std::to_string(h.height));
    }
  }
  return SequenceSource(std::move(entries), first.width, first.height, std::move(warnings));
}

}  // namespace stlfd

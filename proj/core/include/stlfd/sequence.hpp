#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stlfd/types.hpp"

namespace stlfd {

/// Pull-based stream of frames in ascending index order.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  /// Next frame, or nullopt at end of stream.
  virtual std::optional<Frame> next() = 0;
};

struct SequenceEntry {
  std::int64_t index = 0;
  std::filesystem::path path;
};

/// Frames read lazily from files in a directory. A frame's file is opened only
/// when next() reaches it.
class SequenceSource : public FrameSource {
 public:
  using LoadObserver = std::function<void(std::int64_t index, const std::filesystem::path&)>;

  SequenceSource(std::vector<SequenceEntry> entries, int width, int height, std::vector<std::string> warnings);

  std::optional<Frame> next() override;

  const std::vector<SequenceEntry>& entries() const noexcept { return entries_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  /// Called just before each file is read.
  void set_load_observer(LoadObserver observer) { observer_ = std::move(observer); }
  void rewind() noexcept { cursor_ = 0; }

 private:
  std::vector<SequenceEntry> entries_;
  int width_;
  int height_;
  std::vector<std::string> warnings_;
  std::size_t cursor_ = 0;
  LoadObserver observer_;
};

/// In-memory frames, yielded in the order given.
class MemorySource : public FrameSource {
 public:
  explicit MemorySource(std::vector<Frame> frames) : frames_(std::move(frames)) {}
  std::optional<Frame> next() override;

 private:
  std::vector<Frame> frames_;
  std::size_t cursor_ = 0;
};

/// Index embedded in a filename: the last run of decimal digits in the stem.
std::optional<std::int64_t> filename_index(const std::filesystem::path& path);

/// Lists files in `dir` whose names match the shell glob `pattern`, sorted by
/// embedded numeric index. Every matching file's header is read to check that
/// all frames share dimensions. Index gaps are reported through warnings().
SequenceSource open_sequence(const std::filesystem::path& dir, const std::string& pattern = "*");

}  // namespace stlfd

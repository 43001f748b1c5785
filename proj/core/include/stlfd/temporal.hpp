#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stlfd/types.hpp"

namespace stlfd {

struct TemporalConfig {
  int gap = 5;  // frames between the three compared spatial maps

  /// Slots needed to reach back 2 * gap frames.
  int span() const noexcept { return 2 * gap + 1; }
  void validate() const;
};

/// Ring of the most recent 2n+1 spatial maps, keyed by consecutive frame index.
/// Single writer.
class SmapBuffer {
 public:
  explicit SmapBuffer(int gap);

  /// Stores `smap` as frame `index`, evicting the oldest map once full. The
  /// first push may use any index; later ones must be exactly newest + 1.
  /// Throws InvalidArgument on a duplicate, backward or skipped index, or a
  /// map whose shape differs from the ones already held.
  void push(FeatureMap smap, std::int64_t index);

  /// True once frames k, k - n and k - 2n are all held, k being the newest.
  bool ready() const noexcept;

  int gap() const noexcept { return gap_; }
  std::size_t capacity() const noexcept { return slots_.size(); }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  std::optional<std::int64_t> newest_index() const noexcept;
  std::optional<std::int64_t> oldest_index() const noexcept;

  /// Map for frame `index`, or nullptr if it is not (or no longer) held.
  const FeatureMap* find(std::int64_t index) const noexcept;

  void clear() noexcept;

 private:
  std::size_t slot_of(std::int64_t index) const noexcept;

  int gap_;
  std::vector<FeatureMap> slots_;
  std::size_t count_ = 0;
  std::int64_t newest_ = -1;
};

/// Per-pixel max - min over the maps of frames k, k - n, k - 2n, unnormalized.
/// nullopt while the buffer is still warming up.
std::optional<FeatureMap> compute_tmap_raw(const SmapBuffer& buffer, const TemporalConfig& cfg);

/// Per-pixel range of three equally sized maps (order does not matter).
FeatureMap temporal_range(const FeatureMap& a, const FeatureMap& b, const FeatureMap& c);

/// compute_tmap_raw followed by division by the global maximum.
std::optional<FeatureMap> compute_tmap(const SmapBuffer& buffer, const TemporalConfig& cfg);

}  // namespace stlfd

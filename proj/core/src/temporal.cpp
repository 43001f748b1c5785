#include "stlfd/temporal.hpp"

#include <algorithm>

#include "stlfd/spatial.hpp"

namespace stlfd {

void TemporalConfig::validate() const {
  if (gap < 1) throw InvalidArgument("temporal gap must be >= 1, got " + std::to_string(gap));
}

SmapBuffer::SmapBuffer(int gap) : gap_(gap) {
  TemporalConfig{gap}.validate();
  slots_.resize(static_cast<std::size_t>(2 * gap + 1));
}

std::size_t SmapBuffer::slot_of(std::int64_t index) const noexcept {
  return static_cast<std::size_t>(index % static_cast<std::int64_t>(slots_.size()));
}

void SmapBuffer::push(FeatureMap smap, std::int64_t index) {
  if (index < 0) throw InvalidArgument("frame index must be non-negative");
  if (count_ > 0) {
    if (index != newest_ + 1) {
      throw InvalidArgument("spatial map for frame " + std::to_string(index) + " pushed after frame " +
                            std::to_string(newest_) + "; indices must be consecutive");
    }
    const FeatureMap& last = slots_[slot_of(newest_)];
    if (!smap.same_shape(last)) throw InvalidArgument("spatial map dimensions changed mid-stream");
  }
  slots_[slot_of(index)] = std::move(smap);
  newest_ = index;
  count_ = std::min(count_ + 1, slots_.size());
}

bool SmapBuffer::ready() const noexcept { return count_ == slots_.size(); }

std::optional<std::int64_t> SmapBuffer::newest_index() const noexcept {
  if (count_ == 0) return std::nullopt;
  return newest_;
}

std::optional<std::int64_t> SmapBuffer::oldest_index() const noexcept {
  if (count_ == 0) return std::nullopt;
  return newest_ - static_cast<std::int64_t>(count_) + 1;
}

const FeatureMap* SmapBuffer::find(std::int64_t index) const noexcept {
  if (count_ == 0 || index > newest_ || index < newest_ - static_cast<std::int64_t>(count_) + 1 || index < 0) {
    return nullptr;
  }
  return &slots_[slot_of(index)];
}

void SmapBuffer::clear() noexcept {
  for (auto& s : slots_) s = FeatureMap{};
  count_ = 0;
  newest_ = -1;
}

std::optional<FeatureMap> compute_tmap_raw(const SmapBuffer& buffer, const TemporalConfig& cfg) {
  cfg.validate();
  if (cfg.gap != buffer.gap()) {
    throw InvalidArgument("temporal gap " + std::to_string(cfg.gap) + " does not match buffer gap " +
                          std::to_string(buffer.gap()));
  }
  if (!buffer.ready()) return std::nullopt;
  const std::int64_t k = *buffer.newest_index();
  const FeatureMap* now = buffer.find(k);
  const FeatureMap* mid = buffer.find(k - cfg.gap);
  const FeatureMap* old = buffer.find(k - 2 * cfg.gap);

  return temporal_range(*now, *mid, *old);
}

FeatureMap temporal_range(const FeatureMap& a_map, const FeatureMap& b_map, const FeatureMap& c_map) {
  if (!a_map.same_shape(b_map) || !a_map.same_shape(c_map)) {
    throw InvalidArgument("temporal_range: maps differ in size");
  }
  FeatureMap out(a_map.width(), a_map.height());
  const auto a = a_map.values();
  const auto b = b_map.values();
  const auto c = c_map.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double hi = std::max({a[i], b[i], c[i]});
    const double lo = std::min({a[i], b[i], c[i]});
    dst[i] = hi - lo;
  }
  return out;
}

std::optional<FeatureMap> compute_tmap(const SmapBuffer& buffer, const TemporalConfig& cfg) {
  auto raw = compute_tmap_raw(buffer, cfg);
  if (!raw) return std::nullopt;
  return normalize_by_max(std::move(*raw));
}

}  // namespace stlfd

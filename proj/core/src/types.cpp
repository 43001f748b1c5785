#include "stlfd/types.hpp"

#include <algorithm>
#include <numeric>

namespace stlfd {

double FeatureMap::max_value() const noexcept {
  const auto v = values();
  if (v.empty()) return 0.0;
  return *std::max_element(v.begin(), v.end());
}

std::size_t BinaryMask::count() const noexcept {
  const auto v = values();
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](std::uint8_t b) { return b != 0; }));
}

Frame::Frame(std::int64_t index, Grid<double> pixels) : index_(index), pixels_(std::move(pixels)) {
  if (index_ < 0) throw InvalidArgument("frame index must be non-negative");
  if (pixels_.width() < kMinFrameSide || pixels_.height() < kMinFrameSide) {
    throw InvalidArgument("frame " + std::to_string(index_) + " is " + std::to_string(pixels_.width()) + "x" +
                          std::to_string(pixels_.height()) + ", smaller than 9x9");
  }
  for (double v : pixels_.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("frame " + std::to_string(index_) + " has a pixel outside [0,1]");
    }
  }
}

}  // namespace stlfd

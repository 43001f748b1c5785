#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stlfd {

/// Base error for everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by file ingestion and result persistence.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Raised when an argument violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Smallest frame side that admits one 9x9 spatial kernel placement.
inline constexpr int kMinFrameSide = 9;

/// Dense row-major 2-D array. x is the column, y the row.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(checked_size(width, height), fill) {}
  Grid(int width, int height, std::vector<T> data) : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_size(width, height)) {
      throw InvalidArgument("grid data size does not match " + std::to_string(width) + "x" +
                            std::to_string(height));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& at(int x, int y) noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<T> row(int y) noexcept { return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int y) const noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool same_shape(int w, int h) const noexcept { return width_ == w && height_ == h; }
  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 0 || height < 0) throw InvalidArgument("negative grid dimensions");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Per-pixel real response (spatial, temporal, fused or final output map).
class FeatureMap : public Grid<double> {
 public:
  using Grid<double>::Grid;
  double max_value() const noexcept;
};

/// Segmentation result; one byte per pixel, 0 or 1.
class BinaryMask : public Grid<std::uint8_t> {
 public:
  using Grid<std::uint8_t>::Grid;
  bool test(int x, int y) const noexcept { return at(x, y) != 0; }
  void set(int x, int y, bool on = true) noexcept { at(x, y) = on ? 1 : 0; }
  std::size_t count() const noexcept;
};

/// One grayscale image of a sequence with intensities in [0,1].
class Frame {
 public:
  /// Throws InvalidArgument when the image is smaller than 9x9, a value lies
  /// outside [0,1], or the index is negative.
  Frame(std::int64_t index, Grid<double> pixels);

  std::int64_t index() const noexcept { return index_; }
  int width() const noexcept { return pixels_.width(); }
  int height() const noexcept { return pixels_.height(); }
  const Grid<double>& pixels() const noexcept { return pixels_; }
  double at(int x, int y) const noexcept { return pixels_.at(x, y); }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::int64_t index_;
  Grid<double> pixels_;
};

/// Annotated target: center plus box extent, in pixel units.
struct GroundTruthRecord {
  std::int64_t frame_index = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 1.0;
  double h = 1.0;

  friend bool operator==(const GroundTruthRecord&, const GroundTruthRecord&) = default;
};

/// Inclusive integer pixel rectangle.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = -1;
  int y1 = -1;

  bool empty() const noexcept { return x1 < x0 || y1 < y0; }
  int width() const noexcept { return empty() ? 0 : x1 - x0 + 1; }
  int height() const noexcept { return empty() ? 0 : y1 - y0 + 1; }
  bool contains(int x, int y) const noexcept { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// A connected component of a segmented map.
struct Detection {
  std::int64_t frame_index = 0;
  Point2 centroid;
  PixelRect bbox;
  double score = 0.0;    // peak map value over the component
  std::size_t area = 0;  // number of pixels

  friend bool operator==(const Detection&, const Detection&) = default;
};

}  // namespace stlfd

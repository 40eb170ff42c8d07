#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <vector>

namespace photostyle {

using Triple = std::array<double, 3>;

struct PixelLoc {
  int row = 0;
  int col = 0;
  friend bool operator==(const PixelLoc&, const PixelLoc&) = default;
};

struct Dims {
  int height = 0;
  int width = 0;
  bool contains(PixelLoc p) const { return p.row >= 0 && p.col >= 0 && p.row < height && p.col < width; }
  std::size_t area() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Row-major 2D grid.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  Dims dims() const { return {height_, width_}; }
  std::size_t size() const { return data_.size(); }

  T& at(int row, int col) {
    assert(row >= 0 && row < height_ && col >= 0 && col < width_);
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  const T& at(int row, int col) const {
    assert(row >= 0 && row < height_ && col >= 0 && col < width_);
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  T& at(PixelLoc p) { return at(p.row, p.col); }
  const T& at(PixelLoc p) const { return at(p.row, p.col); }

  /// Replicate-padded access.
  const T& clamped(int row, int col) const {
    row = row < 0 ? 0 : (row >= height_ ? height_ - 1 : row);
    col = col < 0 ? 0 : (col >= width_ ? width_ - 1 : col);
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ScalarPlane = Raster<double>;

/// RGB image, every channel in [0,1].
class ImagePlane : public Raster<Triple> {
 public:
  using Raster::Raster;
  /// Throws ValidationError on empty dims or channels outside [0,1].
  void validate() const;
};

/// Decorrelated log-LMS (l, alpha, beta) image.
class LabPlane : public Raster<Triple> {
 public:
  using Raster::Raster;
};

}  // namespace photostyle

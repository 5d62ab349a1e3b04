#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "starseg/error.hpp"

namespace starseg {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 2-D pixel grid. Dimensions are always at least 1x1.
///
/// Instantiated as GrayImage (double, finite values), BinaryMask (0/1 bytes)
/// and RgbImage.
template <typename T>
class Plane {
 public:
  using value_type = T;

  Plane(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
    check_values();
  }

  Plane(int width, int height, std::vector<T> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dims(width, height);
    if (pixels_.size() != static_cast<std::size_t>(width) * height) {
      throw Error(Errc::kInvalidArgument, "pixel count does not match width*height");
    }
    check_values();
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  T& operator()(int x, int y) { return pixels_[index(x, y)]; }
  const T& operator()(int x, int y) const { return pixels_[index(x, y)]; }

  std::span<T> row(int y) {
    return {pixels_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const T> row(int y) const {
    return {pixels_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<T> pixels() noexcept { return pixels_; }
  std::span<const T> pixels() const noexcept { return pixels_; }

  bool same_shape(const Plane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  static void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
      throw Error(Errc::kInvalidArgument, "image dimensions must be at least 1x1");
    }
  }

  void check_values() const {
    if constexpr (std::is_floating_point_v<T>) {
      for (T v : pixels_) {
        if (!std::isfinite(v)) throw Error(Errc::kInvalidArgument, "non-finite pixel value");
      }
    } else if constexpr (std::is_same_v<T, std::uint8_t>) {
      for (T v : pixels_) {
        if (v > 1) throw Error(Errc::kInvalidArgument, "mask values must be 0 or 1");
      }
    }
  }

  int width_;
  int height_;
  std::vector<T> pixels_;
};

using GrayImage = Plane<double>;
using BinaryMask = Plane<std::uint8_t>;
using RgbImage = Plane<Rgb>;

/// Rec. 601 luma, Y = 0.299 R + 0.587 G + 0.114 B.
GrayImage to_grayscale(const RgbImage& img);

/// Half-sample symmetric reflection of an index into [0, n): ... b a | a b c | c b ...
/// Repeats with period 2n, so any integer maps to a valid index.
int reflect_index(int i, int n) noexcept;

/// Pads every side by `pad` pixels using half-sample symmetric reflection.
/// Throws PadTooLarge when pad > min(width, height).
GrayImage mirror_pad(const GrayImage& img, int pad);

/// Removes `pad` pixels from every side. Inverse of mirror_pad.
/// Throws CropTooLarge unless width > 2*pad and height > 2*pad.
GrayImage crop_center(const GrayImage& img, int pad);

}  // namespace starseg

#pragma once

#include <array>
#include <span>
#include <vector>

#include "starseg/image.hpp"

namespace starseg::starlet {

/// B3-spline scaling filter [1 4 6 4 1] / 16.
inline constexpr std::array<double, 5> kB3Taps = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

struct Tap {
  int dx = 0;
  int dy = 0;
  double weight = 0.0;
};

/// Square, odd-sided, unit-mass kernel that is symmetric under horizontal
/// flip, vertical flip and transpose. The constructors enforce all of it.
///
/// Only nonzero taps are stored: a dilated level-j filter has side
/// 2^(j+1) + 1 but just 25 nonzero entries.
class Filter2D {
 public:
  /// From a dense row-major side x side array.
  Filter2D(int side, std::span<const double> dense_taps);
  /// From nonzero taps at offsets in [-side/2, side/2]; duplicates are rejected.
  Filter2D(int side, std::vector<Tap> nonzero);

  int side() const noexcept { return side_; }
  int half_width() const noexcept { return side_ / 2; }

  /// Tap at offset (dx, dy) from the center; zero outside the support.
  double at(int dx, int dy) const noexcept;

  /// Nonzero taps in raster order (dy, then dx).
  std::span<const Tap> nonzero_taps() const noexcept { return taps_; }

  std::vector<double> dense() const;

 private:
  void validate() const;

  int side_;
  std::vector<Tap> taps_;
};

/// 1-D à trous filter for `level` (>= 1): kB3Taps with taps spaced 2^(level-1)
/// apart, length 4 * 2^(level-1) + 1. Throws InvalidLevel when level < 1.
std::vector<double> dilated_taps(int level);

/// 2-D filter for `level`: outer product of dilated_taps(level) with itself,
/// divided by its total so the taps sum to 1.
Filter2D hgen(int level);

/// Same-size correlation with half-sample symmetric boundaries (the filter is
/// symmetric, so this is also the convolution). Taps that share a 90-degree
/// rotation orbit are accumulated as (a + c) + (b + d) over opposite pairs, so
/// the result commutes bit-exactly with rotating the input by 90 degrees.
GrayImage convolve_same(const GrayImage& img, const Filter2D& filter);

/// Row pass then column pass with a symmetric odd-length 1-D kernel.
/// Matches convolve_same(img, outer(taps, taps)) up to rounding.
GrayImage convolve_separable(const GrayImage& img, std::span<const double> taps);

enum class Strategy { kDirect, kSeparable };

struct Decomposition {
  std::vector<GrayImage> details;  // w_1 .. w_L
  GrayImage smooth;                // c_L

  int levels() const noexcept { return static_cast<int>(details.size()); }

  /// smooth + sum of details, which telescopes back to the input.
  GrayImage reconstruct() const;
};

/// Starlet transform: c_j = c_{j-1} (*) hgen(j), w_j = c_{j-1} - c_j, j = 1..levels.
/// Any image size is accepted; boundaries fold by repeated reflection when a
/// dilated filter is wider than the image.
Decomposition decompose(const GrayImage& img, int levels, Strategy strategy = Strategy::kDirect);

/// Smallest image side for which the tap spacing of the coarsest level,
/// 2^(levels-1), fits inside the image.
int min_side_for_levels(int levels);

/// Throws ImageTooSmall (naming the minimum size) when min(width, height) is
/// below min_side_for_levels(levels).
void require_decomposable(int width, int height, int levels);

}  // namespace starseg::starlet

#pragma once

#include <vector>

#include "starseg/image.hpp"
#include "starseg/starlet.hpp"

namespace starseg {

enum class Polarity { kDarkFeatures, kBrightFeatures };

struct SegmentationConfig {
  /// Detail levels 1 and 2 are always discarded; sums start at level 3.
  static constexpr int kMinLevel = 3;

  int max_level = 9;
  Polarity polarity = Polarity::kDarkFeatures;
  double threshold = 0.0;

  /// Throws InvalidArgument unless max_level >= 3 and threshold is finite.
  void validate() const;
};

/// R_i = w_3 + ... + w_i.
struct DetailSum {
  int level;
  GrayImage plane;
};

struct LevelMask {
  int level;
  BinaryMask mask;
};

/// R_3 .. R_{cfg.max_level} by running accumulation over the detail planes.
/// Throws TooFewLevels when the decomposition has fewer than 3 levels and
/// InvalidLevel when cfg.max_level exceeds it.
std::vector<DetailSum> detail_sums(const starlet::Decomposition& dec, const SegmentationConfig& cfg);

/// Dark features: value < -threshold. Bright features: value > threshold.
BinaryMask binarize(const GrayImage& plane, const SegmentationConfig& cfg);
inline BinaryMask binarize(const DetailSum& sum, const SegmentationConfig& cfg) {
  return binarize(sum.plane, cfg);
}

/// Decomposes `img` to cfg.max_level and binarizes every R_i, i = 3..max_level.
std::vector<LevelMask> segment_sweep(const GrayImage& img, const SegmentationConfig& cfg);

}  // namespace starseg

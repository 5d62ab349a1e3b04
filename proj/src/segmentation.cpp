#include "starseg/segmentation.hpp"

#include <cmath>
#include <string>

namespace starseg {

void SegmentationConfig::validate() const {
  if (max_level < kMinLevel) {
    throw Error(Errc::kInvalidArgument, "max_level must be at least " + std::to_string(kMinLevel));
  }
  if (!std::isfinite(threshold)) throw Error(Errc::kInvalidArgument, "threshold must be finite");
}

std::vector<DetailSum> detail_sums(const starlet::Decomposition& dec, const SegmentationConfig& cfg) {
  cfg.validate();
  if (dec.levels() < SegmentationConfig::kMinLevel) {
    throw Error(Errc::kTooFewLevels, "detail sums need at least 3 decomposition levels, got " +
                                         std::to_string(dec.levels()));
  }
  if (cfg.max_level > dec.levels()) {
    throw Error(Errc::kInvalidLevel, "max_level " + std::to_string(cfg.max_level) +
                                         " exceeds decomposition depth " + std::to_string(dec.levels()));
  }

  std::vector<DetailSum> sums;
  sums.reserve(static_cast<std::size_t>(cfg.max_level - SegmentationConfig::kMinLevel + 1));
  GrayImage running = dec.details[SegmentationConfig::kMinLevel - 1];
  sums.push_back({SegmentationConfig::kMinLevel, running});
  for (int i = SegmentationConfig::kMinLevel + 1; i <= cfg.max_level; ++i) {
    auto acc = running.pixels();
    const auto w = dec.details[static_cast<std::size_t>(i - 1)].pixels();
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w[k];
    sums.push_back({i, running});
  }
  return sums;
}

BinaryMask binarize(const GrayImage& plane, const SegmentationConfig& cfg) {
  BinaryMask mask(plane.width(), plane.height());
  const auto src = plane.pixels();
  auto dst = mask.pixels();
  if (cfg.polarity == Polarity::kDarkFeatures) {
    const double cut = -cfg.threshold;
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] < cut ? 1 : 0;
  } else {
    const double cut = cfg.threshold;
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > cut ? 1 : 0;
  }
  return mask;
}

std::vector<LevelMask> segment_sweep(const GrayImage& img, const SegmentationConfig& cfg) {
  cfg.validate();
  const starlet::Decomposition dec = starlet::decompose(img, cfg.max_level);
  std::vector<LevelMask> masks;
  for (const DetailSum& sum : detail_sums(dec, cfg)) masks.push_back({sum.level, binarize(sum, cfg)});
  return masks;
}

}  // namespace starseg

#include <gtest/gtest.h>

#include "starseg/segmentation.hpp"
#include "starseg/starlet.hpp"
#include "test_support.hpp"

namespace starseg {
namespace {

using testing::max_abs_diff;

GrayImage phantom_image(int size, std::uint64_t seed) {
  testing::PhantomParams p;
  p.size = size;
  p.margin = 8;
  p.min_tracks = 3;
  p.max_tracks = 6;
  return testing::make_phantom(seed, p).image;
}

SegmentationConfig config(int max_level, Polarity polarity = Polarity::kDarkFeatures, double threshold = 0.0) {
  SegmentationConfig cfg;
  cfg.max_level = max_level;
  cfg.polarity = polarity;
  cfg.threshold = threshold;
  return cfg;
}

GrayImage add(const GrayImage& a, const GrayImage& b) {
  GrayImage out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.pixels()[i] += b.pixels()[i];
  return out;
}

TEST(SegmentationConfig, Validation) {
  EXPECT_NO_THROW(config(3).validate());
  EXPECT_THROW(config(2).validate(), Error);
  EXPECT_THROW(config(9, Polarity::kDarkFeatures, std::nan("")).validate(), Error);
  EXPECT_THROW(config(9, Polarity::kDarkFeatures, INFINITY).validate(), Error);
}

TEST(DetailSums, ZeroDetailsGiveZeroSums) {
  starlet::Decomposition dec{std::vector<GrayImage>(6, GrayImage(5, 4, 0.0)), GrayImage(5, 4, 3.0)};
  const auto sums = detail_sums(dec, config(6));
  ASSERT_EQ(sums.size(), 4u);
  for (const DetailSum& s : sums) {
    for (double v : s.plane.pixels()) EXPECT_EQ(v, 0.0);
  }
}

TEST(DetailSums, SingleLevel) {
  const starlet::Decomposition dec = starlet::decompose(phantom_image(32, 1), 3);
  const auto sums = detail_sums(dec, config(3));
  ASSERT_EQ(sums.size(), 1u);
  EXPECT_EQ(sums[0].level, 3);
  EXPECT_EQ(sums[0].plane, dec.details[2]);
}

TEST(DetailSums, MatchesSeparateRecomputation) {
  const starlet::Decomposition dec = starlet::decompose(phantom_image(64, 2), 6);
  const auto sums = detail_sums(dec, config(6));
  ASSERT_EQ(sums.size(), 4u);
  GrayImage expected = add(add(add(dec.details[2], dec.details[3]), dec.details[4]), dec.details[5]);
  EXPECT_EQ(sums.back().level, 6);
  EXPECT_LE(max_abs_diff(sums.back().plane, expected), 1e-9);
}

TEST(DetailSums, DifferenceOfConsecutiveSumsIsTheDetail) {
  const starlet::Decomposition dec = starlet::decompose(phantom_image(64, 3), 8);
  const auto sums = detail_sums(dec, config(8));
  for (std::size_t k = 1; k < sums.size(); ++k) {
    GrayImage diff = sums[k].plane;
    for (std::size_t i = 0; i < diff.size(); ++i) diff.pixels()[i] -= sums[k - 1].plane.pixels()[i];
    EXPECT_LE(max_abs_diff(diff, dec.details[static_cast<std::size_t>(sums[k].level - 1)]), 1e-12);
  }
}

TEST(DetailSums, LevelErrors) {
  const starlet::Decomposition shallow = starlet::decompose(GrayImage(16, 16, 1.0), 2);
  const starlet::Decomposition deep = starlet::decompose(GrayImage(16, 16, 1.0), 5);
  try {
    detail_sums(shallow, config(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTooFewLevels);
  }
  try {
    detail_sums(deep, config(6));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInvalidLevel);
  }
}

TEST(Binarize, SignRule) {
  const GrayImage plane(4, 1, std::vector<double>{-3.0, 0.5, -0.1, 0.0});
  EXPECT_EQ(binarize(plane, config(9)), BinaryMask(4, 1, std::vector<std::uint8_t>{1, 0, 1, 0}));
  EXPECT_EQ(binarize(plane, config(9, Polarity::kBrightFeatures)),
            BinaryMask(4, 1, std::vector<std::uint8_t>{0, 1, 0, 0}));
}

TEST(Binarize, ZeroPlaneIsBackground) {
  const GrayImage zero(6, 2, 0.0);
  EXPECT_EQ(binarize(zero, config(9)), BinaryMask(6, 2));
  EXPECT_EQ(binarize(zero, config(9, Polarity::kBrightFeatures)), BinaryMask(6, 2));
}

TEST(Binarize, Threshold) {
  const GrayImage plane(3, 1, std::vector<double>{-3.0, 0.5, -0.1});
  EXPECT_EQ(binarize(plane, config(9, Polarity::kDarkFeatures, 0.2)),
            BinaryMask(3, 1, std::vector<std::uint8_t>{1, 0, 0}));
  EXPECT_EQ(binarize(plane, config(9, Polarity::kBrightFeatures, 0.2)),
            BinaryMask(3, 1, std::vector<std::uint8_t>{0, 1, 0}));
  // Strictness at the threshold itself.
  EXPECT_EQ(binarize(GrayImage(1, 1, -0.2), config(9, Polarity::kDarkFeatures, 0.2)), BinaryMask(1, 1));
}

TEST(SegmentSweep, MaskCountAndLevels) {
  const auto masks = segment_sweep(phantom_image(256, 4), config(9));
  ASSERT_EQ(masks.size(), 7u);
  for (std::size_t k = 0; k < masks.size(); ++k) EXPECT_EQ(masks[k].level, static_cast<int>(k) + 3);
  EXPECT_EQ(segment_sweep(phantom_image(32, 4), config(3)).size(), 1u);
}

TEST(SegmentSweep, ConstantImageGivesEmptyMasks) {
  for (Polarity p : {Polarity::kDarkFeatures, Polarity::kBrightFeatures}) {
    for (const LevelMask& m : segment_sweep(GrayImage(64, 64, 200.0), config(6, p))) {
      EXPECT_EQ(m.mask, BinaryMask(64, 64)) << "level " << m.level;
    }
  }
}

TEST(SegmentSweep, ElevenByElevenDarkLineTrace) {
  // Column 5 is 80 on a 200 background. An independent separable evaluation
  // with iterated reflection gives, on every row, R_i < 0 exactly on columns
  // 3..7 for i = 3..6 (closest values to zero: +1.44 at columns 2/8 and -3.55
  // at columns 3/7), so the mask is frozen as that band.
  GrayImage img(11, 11, 200.0);
  for (int y = 0; y < 11; ++y) img(5, y) = 80.0;
  const auto masks = segment_sweep(img, config(6));
  ASSERT_EQ(masks.size(), 4u);
  for (const LevelMask& m : masks) {
    for (int y = 0; y < 11; ++y) {
      for (int x = 0; x < 11; ++x) {
        EXPECT_EQ(m.mask(x, y), (x >= 3 && x <= 7) ? 1 : 0) << "level " << m.level << " at " << x << "," << y;
      }
    }
    if (m.level >= 4) {
      for (int y = 0; y < 11; ++y) EXPECT_EQ(m.mask(5, y), 1);
    }
  }
}

TEST(SegmentSweep, PolarityDuality) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const GrayImage img = testing::random_integer_image(48, 40, seed);
    GrayImage inverted = img;
    for (double& v : inverted.pixels()) v = 255.0 - v;
    const auto dark = segment_sweep(img, config(6, Polarity::kDarkFeatures));
    const auto bright = segment_sweep(inverted, config(6, Polarity::kBrightFeatures));
    ASSERT_EQ(dark.size(), bright.size());
    for (std::size_t k = 0; k < dark.size(); ++k) EXPECT_EQ(dark[k].mask, bright[k].mask) << "level " << dark[k].level;
  }
}

TEST(SegmentSweep, DarkLinesAreFound) {
  const testing::Phantom p = testing::make_phantom(12);
  const auto masks = segment_sweep(p.image, config(9));
  std::size_t hits = 0, truth = 0;
  for (std::size_t i = 0; i < p.truth.size(); ++i) {
    truth += p.truth.pixels()[i];
    hits += p.truth.pixels()[i] & masks[4].mask.pixels()[i];
  }
  EXPECT_GT(static_cast<double>(hits), 0.9 * static_cast<double>(truth));
}

TEST(SegmentSweep, IsDeterministic) {
  const GrayImage img = phantom_image(128, 6);
  const auto a = segment_sweep(img, config(7));
  const auto b = segment_sweep(img, config(7));
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].mask, b[k].mask);
}

}  // namespace
}  // namespace starseg

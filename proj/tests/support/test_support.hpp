#pragma once

// Helpers shared by the unit and acceptance suites. The oracles here are
// written independently of the library code paths they check.

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "starseg/image.hpp"
#include "starseg/metrics.hpp"

namespace starseg::testing {

GrayImage random_image(int width, int height, std::uint64_t seed, double lo = 0.0, double hi = 255.0);
GrayImage random_integer_image(int width, int height, std::uint64_t seed);
BinaryMask random_mask(int width, int height, std::uint64_t seed, double p_foreground = 0.5);

double max_abs_diff(const GrayImage& a, const GrayImage& b);

/// Rotates 90 degrees clockwise: out(x, y) = in(y, H - 1 - x), out is H x W.
template <typename T>
Plane<T> rot90(const Plane<T>& in) {
  Plane<T> out(in.height(), in.width());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out(x, y) = in(y, in.height() - 1 - x);
  }
  return out;
}

GrayImage window(const GrayImage& img, int x0, int y0, int width, int height);

/// Reflection written as repeated folding, independent of reflect_index.
int fold_index(int i, int n);

/// Full dense correlation of a mirror-padded image, cropped back to the
/// input size: for every pixel, every tap of the side x side kernel.
GrayImage brute_force_convolve(const GrayImage& img, const std::vector<double>& dense_kernel, int side);

/// Confusion counts of two 3x3 masks given as 9-bit patterns, by popcount.
ConfusionCounts bit_confusion(unsigned pred_bits, unsigned gt_bits);

struct OracleScores {
  double precision, recall, accuracy, mcc;
};

/// Precision, recall and accuracy as exact integer ratios rounded once;
/// MCC with an exact 64-bit integer numerator and radicand.
OracleScores oracle_scores(const ConfusionCounts& c);

BinaryMask mask_from_bits(unsigned bits);

/// The 5x5 B3-spline smoothing kernel written out entry by entry.
inline const std::vector<double> kH2D = {
    1.0 / 256, 1.0 / 64, 3.0 / 128, 1.0 / 64, 1.0 / 256,  //
    1.0 / 64,  1.0 / 16, 3.0 / 32,  1.0 / 16, 1.0 / 64,   //
    3.0 / 128, 3.0 / 32, 9.0 / 64,  3.0 / 32, 3.0 / 128,  //
    1.0 / 64,  1.0 / 16, 3.0 / 32,  1.0 / 16, 1.0 / 64,   //
    1.0 / 256, 1.0 / 64, 3.0 / 128, 1.0 / 64, 1.0 / 256,
};

/// Reference per-level MCC percentages (levels 3..9) for six sample images;
/// level 7 is the reported optimum for every row.
inline constexpr std::array<std::array<double, 7>, 6> kTable1Mcc{{
    {19.32996, 25.30251, 35.37489, 49.55525, 57.85511, 56.06013, 52.62559},
    {24.22276, 32.30995, 45.43835, 61.52304, 66.14956, 55.69191, 43.78881},
    {29.07748, 40.25502, 56.84173, 74.15157, 79.22872, 71.01649, 49.15956},
    {16.09310, 20.57131, 27.80563, 36.43833, 41.70653, 39.22664, 30.58268},
    {24.60903, 32.38622, 45.38681, 63.17591, 67.75544, 60.42723, 41.72874},
    {22.82558, 28.93141, 40.72572, 62.05960, 69.84571, 64.87040, 60.59735},
}};

struct PhantomParams {
  int size = 256;
  double background = 200.0;
  double track_intensity = 80.0;
  double noise_sigma = 10.0;
  int min_tracks = 10;
  int max_tracks = 30;
  double min_width = 2.0;
  double max_width = 4.0;
  double min_length = 10.0;
  double max_length = 40.0;
  int margin = 24;  // segment centers stay this far from the border
};

struct Phantom {
  GrayImage image;  // 8-bit quantized intensities
  BinaryMask truth;
  int tracks = 0;
};

/// Bright noisy background with dark straight segments. A pixel belongs to a
/// track when its center lies within width/2 of the segment.
Phantom make_phantom(std::uint64_t seed, const PhantomParams& params = {});

/// Writes `<stem>.png` and `<stem>_gt.png` into `dir`.
void write_phantom_pair(const Phantom& p, const std::filesystem::path& dir, const std::string& stem);

/// Fresh, empty directory under the system temp dir.
std::filesystem::path make_temp_dir(const std::string& tag);

std::string read_file_bytes(const std::filesystem::path& path);

}  // namespace starseg::testing

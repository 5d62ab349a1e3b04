#include "test_support.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <stdexcept>

#include <unistd.h>

#include "starseg/image_io.hpp"

namespace starseg::testing {

GrayImage random_image(int width, int height, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  GrayImage img(width, height);
  for (double& v : img.pixels()) v = dist(rng);
  return img;
}

GrayImage random_integer_image(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  GrayImage img(width, height);
  for (double& v : img.pixels()) v = dist(rng);
  return img;
}

BinaryMask random_mask(int width, int height, std::uint64_t seed, double p_foreground) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution dist(p_foreground);
  BinaryMask mask(width, height);
  for (auto& v : mask.pixels()) v = dist(rng) ? 1 : 0;
  return mask;
}

double max_abs_diff(const GrayImage& a, const GrayImage& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.pixels()[i] - b.pixels()[i]));
  return worst;
}

GrayImage window(const GrayImage& img, int x0, int y0, int width, int height) {
  GrayImage out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out(x, y) = img(x0 + x, y0 + y);
  }
  return out;
}

int fold_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -1 - i;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

GrayImage brute_force_convolve(const GrayImage& img, const std::vector<double>& dense_kernel, int side) {
  const int hw = side / 2;
  const int pw = img.width() + 2 * hw;
  const int ph = img.height() + 2 * hw;
  std::vector<double> padded(static_cast<std::size_t>(pw) * ph);
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) {
      padded[static_cast<std::size_t>(y) * pw + x] = img(fold_index(x - hw, img.width()), fold_index(y - hw, img.height()));
    }
  }
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double acc = 0.0;
      for (int ky = 0; ky < side; ++ky) {
        for (int kx = 0; kx < side; ++kx) {
          acc += dense_kernel[static_cast<std::size_t>(ky) * side + kx] *
                 padded[static_cast<std::size_t>(y + ky) * pw + x + kx];
        }
      }
      out(x, y) = acc;
    }
  }
  return out;
}

ConfusionCounts bit_confusion(unsigned pred_bits, unsigned gt_bits) {
  constexpr unsigned kAll = 0x1FF;
  ConfusionCounts c;
  c.tp = static_cast<std::uint64_t>(std::popcount(pred_bits & gt_bits));
  c.fp = static_cast<std::uint64_t>(std::popcount(pred_bits & ~gt_bits & kAll));
  c.fn = static_cast<std::uint64_t>(std::popcount(~pred_bits & gt_bits & kAll));
  c.tn = static_cast<std::uint64_t>(std::popcount(~pred_bits & ~gt_bits & kAll));
  return c;
}

OracleScores oracle_scores(const ConfusionCounts& c) {
  const auto tp = static_cast<std::int64_t>(c.tp);
  const auto tn = static_cast<std::int64_t>(c.tn);
  const auto fp = static_cast<std::int64_t>(c.fp);
  const auto fn = static_cast<std::int64_t>(c.fn);
  auto frac = [](std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  const std::int64_t numerator = tp * tn - fp * fn;
  const std::int64_t radicand = (tp + fn) * (tp + fp) * (tn + fp) * (tn + fn);
  const double m = radicand == 0 ? 0.0
                                 : static_cast<double>(static_cast<long double>(numerator) /
                                                       std::sqrt(static_cast<long double>(radicand)));
  return {frac(tp, tp + fp), frac(tp, tp + fn), frac(tp + tn, tp + tn + fp + fn), m};
}

BinaryMask mask_from_bits(unsigned bits) {
  BinaryMask m(3, 3);
  for (int i = 0; i < 9; ++i) m.pixels()[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
  return m;
}

Phantom make_phantom(std::uint64_t seed, const PhantomParams& prm) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count_dist(prm.min_tracks, prm.max_tracks);
  std::uniform_real_distribution<double> center_dist(prm.margin, prm.size - prm.margin);
  std::uniform_real_distribution<double> angle_dist(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> width_dist(prm.min_width, prm.max_width);
  std::uniform_real_distribution<double> length_dist(prm.min_length, prm.max_length);
  std::normal_distribution<double> noise(0.0, prm.noise_sigma);

  const int n = prm.size;
  BinaryMask truth(n, n);
  const int tracks = count_dist(rng);
  for (int t = 0; t < tracks; ++t) {
    const double cx = center_dist(rng);
    const double cy = center_dist(rng);
    const double angle = angle_dist(rng);
    const double half_width = width_dist(rng) / 2.0;
    const double half_length = length_dist(rng) / 2.0;
    const double ux = std::cos(angle);
    const double uy = std::sin(angle);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double px = x + 0.5 - cx;
        const double py = y + 0.5 - cy;
        const double along = std::clamp(px * ux + py * uy, -half_length, half_length);
        if (std::hypot(px - along * ux, py - along * uy) <= half_width) truth(x, y) = 1;
      }
    }
  }

  GrayImage image(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double base = truth(x, y) ? prm.track_intensity : prm.background;
      image(x, y) = std::clamp(std::round(base + noise(rng)), 0.0, 255.0);
    }
  }
  return {std::move(image), std::move(truth), tracks};
}

void write_phantom_pair(const Phantom& p, const std::filesystem::path& dir, const std::string& stem) {
  save_image(p.image, dir / (stem + ".png"));
  save_mask(p.truth, dir / (stem + "_gt.png"));
}

std::filesystem::path make_temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("starseg_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace starseg::testing

#include "starseg/starlet.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace starseg::starlet {
namespace {

// Keeps the 1-D filter length (4 * 2^(level-1) + 1) addressable as int.
constexpr int kMaxLevel = 20;

void check_level(int level) {
  if (level < 1 || level > kMaxLevel) {
    throw Error(Errc::kInvalidLevel,
                "level must be in [1, " + std::to_string(kMaxLevel) + "], got " + std::to_string(level));
  }
}

bool raster_less(const Tap& a, const Tap& b) {
  return std::tie(a.dy, a.dx) < std::tie(b.dy, b.dx);
}

// Reflected index for every position along an axis at a fixed offset.
std::vector<int> shifted_indices(int n, int offset) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[i] = reflect_index(i + offset, n);
  return idx;
}

class OffsetTables {
 public:
  explicit OffsetTables(int n) : n_(n) {}

  const std::vector<int>& get(int offset) {
    for (const auto& [o, idx] : tables_) {
      if (o == offset) return idx;
    }
    tables_.emplace_back(offset, shifted_indices(n_, offset));
    return tables_.back().second;
  }

 private:
  int n_;
  std::vector<std::pair<int, std::vector<int>>> tables_;
};

}  // namespace

Filter2D::Filter2D(int side, std::span<const double> dense_taps) : side_(side) {
  if (side < 1 || side % 2 == 0) throw Error(Errc::kInvalidArgument, "filter side must be odd and positive");
  if (dense_taps.size() != static_cast<std::size_t>(side) * side) {
    throw Error(Errc::kInvalidArgument, "filter tap count must be side*side");
  }
  const int hw = side / 2;
  for (int dy = -hw; dy <= hw; ++dy) {
    for (int dx = -hw; dx <= hw; ++dx) {
      const double w = dense_taps[static_cast<std::size_t>(dy + hw) * side + dx + hw];
      if (w != 0.0) taps_.push_back({dx, dy, w});
    }
  }
  validate();
}

Filter2D::Filter2D(int side, std::vector<Tap> nonzero) : side_(side), taps_(std::move(nonzero)) {
  if (side < 1 || side % 2 == 0) throw Error(Errc::kInvalidArgument, "filter side must be odd and positive");
  std::erase_if(taps_, [](const Tap& t) { return t.weight == 0.0; });
  std::sort(taps_.begin(), taps_.end(), raster_less);
  const int hw = side / 2;
  for (std::size_t i = 0; i < taps_.size(); ++i) {
    const Tap& t = taps_[i];
    if (std::abs(t.dx) > hw || std::abs(t.dy) > hw) throw Error(Errc::kInvalidArgument, "tap outside filter support");
    if (i > 0 && !raster_less(taps_[i - 1], t)) throw Error(Errc::kInvalidArgument, "duplicate filter tap");
  }
  validate();
}

void Filter2D::validate() const {
  double total = 0.0;
  for (const Tap& t : taps_) {
    if (!std::isfinite(t.weight)) throw Error(Errc::kInvalidArgument, "non-finite filter tap");
    total += t.weight;
    if (at(-t.dx, t.dy) != t.weight || at(t.dx, -t.dy) != t.weight || at(t.dy, t.dx) != t.weight) {
      throw Error(Errc::kInvalidArgument, "filter must be symmetric under flips and transpose");
    }
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(Errc::kInvalidArgument, "filter taps must sum to 1");
}

double Filter2D::at(int dx, int dy) const noexcept {
  const Tap key{dx, dy, 0.0};
  auto it = std::lower_bound(taps_.begin(), taps_.end(), key, raster_less);
  return (it != taps_.end() && it->dx == dx && it->dy == dy) ? it->weight : 0.0;
}

std::vector<double> Filter2D::dense() const {
  std::vector<double> out(static_cast<std::size_t>(side_) * side_, 0.0);
  const int hw = half_width();
  for (const Tap& t : taps_) out[static_cast<std::size_t>(t.dy + hw) * side_ + t.dx + hw] = t.weight;
  return out;
}

std::vector<double> dilated_taps(int level) {
  check_level(level);
  const int step = 1 << (level - 1);
  std::vector<double> taps(static_cast<std::size_t>(4 * step + 1), 0.0);
  for (std::size_t k = 0; k < kB3Taps.size(); ++k) taps[k * step] = kB3Taps[k];
  return taps;
}

Filter2D hgen(int level) {
  check_level(level);
  const int step = 1 << (level - 1);
  std::vector<Tap> taps;
  taps.reserve(kB3Taps.size() * kB3Taps.size());
  double total = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int k = 0; k < 5; ++k) {
      const double w = kB3Taps[i] * kB3Taps[k];
      taps.push_back({(k - 2) * step, (i - 2) * step, w});
      total += w;
    }
  }
  for (Tap& t : taps) t.weight /= total;
  return Filter2D(4 * step + 1, std::move(taps));
}

GrayImage convolve_same(const GrayImage& img, const Filter2D& filter) {
  const int width = img.width();
  const int height = img.height();

  // Orbit representatives under 90-degree rotation: dx > 0, dy >= 0.
  double center = 0.0;
  std::vector<Tap> reps;
  for (const Tap& t : filter.nonzero_taps()) {
    if (t.dx == 0 && t.dy == 0) {
      center = t.weight;
    } else if (t.dx > 0 && t.dy >= 0) {
      reps.push_back(t);
    }
  }

  OffsetTables cols(width);
  OffsetTables rows(height);
  for (const Tap& t : reps) {
    for (int o : {t.dx, -t.dx, t.dy, -t.dy}) {
      cols.get(o);
      rows.get(o);
    }
  }

  // Opposite pairs of the orbit of (dx, dy):
  //   a: (dx, dy) and (-dx, -dy)    b: (-dy, dx) and (dy, -dx)
  struct Orbit {
    double weight;
    const int *col_a1, *col_a2, *col_b1, *col_b2;
    const int *row_a1, *row_a2, *row_b1, *row_b2;
  };
  std::vector<Orbit> orbits;
  orbits.reserve(reps.size());
  for (const Tap& t : reps) {
    orbits.push_back({t.weight, cols.get(t.dx).data(), cols.get(-t.dx).data(), cols.get(-t.dy).data(),
                      cols.get(t.dy).data(), rows.get(t.dy).data(), rows.get(-t.dy).data(),
                      rows.get(t.dx).data(), rows.get(-t.dx).data()});
  }

  GrayImage out(width, height);
  for (int y = 0; y < height; ++y) {
    auto acc = out.row(y);
    const auto src = img.row(y);
    for (int x = 0; x < width; ++x) acc[x] = center * src[x];

    for (const Orbit& o : orbits) {
      const double* ra1 = img.row(o.row_a1[y]).data();
      const double* ra2 = img.row(o.row_a2[y]).data();
      const double* rb1 = img.row(o.row_b1[y]).data();
      const double* rb2 = img.row(o.row_b2[y]).data();
      for (int x = 0; x < width; ++x) {
        const double pair_a = ra1[o.col_a1[x]] + ra2[o.col_a2[x]];
        const double pair_b = rb1[o.col_b1[x]] + rb2[o.col_b2[x]];
        acc[x] += o.weight * (pair_a + pair_b);
      }
    }
  }
  return out;
}

GrayImage convolve_separable(const GrayImage& img, std::span<const double> taps) {
  if (taps.empty() || taps.size() % 2 == 0) {
    throw Error(Errc::kInvalidArgument, "separable kernel length must be odd");
  }
  const int hw = static_cast<int>(taps.size() / 2);
  const int width = img.width();
  const int height = img.height();

  std::vector<std::pair<int, double>> nonzero;
  for (int k = -hw; k <= hw; ++k) {
    if (taps[k + hw] != 0.0) nonzero.emplace_back(k, taps[k + hw]);
  }

  GrayImage tmp(width, height);
  OffsetTables cols(width);
  for (int y = 0; y < height; ++y) {
    const auto src = img.row(y);
    auto dst = tmp.row(y);
    for (const auto& [k, w] : nonzero) {
      const auto& idx = cols.get(k);
      for (int x = 0; x < width; ++x) dst[x] += w * src[idx[x]];
    }
  }

  GrayImage out(width, height);
  OffsetTables rows(height);
  for (int y = 0; y < height; ++y) {
    auto dst = out.row(y);
    for (const auto& [k, w] : nonzero) {
      const auto src = tmp.row(rows.get(k)[y]);
      for (int x = 0; x < width; ++x) dst[x] += w * src[x];
    }
  }
  return out;
}

GrayImage Decomposition::reconstruct() const {
  GrayImage out = smooth;
  auto dst = out.pixels();
  for (auto it = details.rbegin(); it != details.rend(); ++it) {
    const auto src = it->pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  return out;
}

Decomposition decompose(const GrayImage& img, int levels, Strategy strategy) {
  check_level(levels);
  std::vector<GrayImage> details;
  details.reserve(static_cast<std::size_t>(levels));
  GrayImage current = img;
  for (int j = 1; j <= levels; ++j) {
    GrayImage next = strategy == Strategy::kDirect ? convolve_same(current, hgen(j))
                                                   : convolve_separable(current, dilated_taps(j));
    // Reuse `current` as w_j = c_{j-1} - c_j.
    auto w = current.pixels();
    const auto c = next.pixels();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c[i];
    details.push_back(std::move(current));
    current = std::move(next);
  }
  return {std::move(details), std::move(current)};
}

int min_side_for_levels(int levels) {
  check_level(levels);
  return 1 << (levels - 1);
}

void require_decomposable(int width, int height, int levels) {
  const int needed = min_side_for_levels(levels);
  if (std::min(width, height) < needed) {
    throw Error(Errc::kImageTooSmall,
                "image is " + std::to_string(width) + "x" + std::to_string(height) + "; " +
                    std::to_string(levels) + " levels need at least " + std::to_string(needed) + "x" +
                    std::to_string(needed));
  }
}

}  // namespace starseg::starlet

#include "starseg/image.hpp"

#include <algorithm>
#include <string>

namespace starseg {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kPadTooLarge: return "PadTooLarge";
    case Errc::kCropTooLarge: return "CropTooLarge";
    case Errc::kIoError: return "IoError";
    case Errc::kUnsupportedFormat: return "UnsupportedFormat";
    case Errc::kCorruptFile: return "CorruptFile";
    case Errc::kInvalidLevel: return "InvalidLevel";
    case Errc::kImageTooSmall: return "ImageTooSmall";
    case Errc::kTooFewLevels: return "TooFewLevels";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kEmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

GrayImage to_grayscale(const RgbImage& img) {
  GrayImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = 0.299 * src[i].r + 0.587 * src[i].g + 0.114 * src[i].b;
  }
  return out;
}

int reflect_index(int i, int n) noexcept {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

GrayImage mirror_pad(const GrayImage& img, int pad) {
  if (pad < 0) throw Error(Errc::kInvalidArgument, "pad must be non-negative");
  if (pad > std::min(img.width(), img.height())) {
    throw Error(Errc::kPadTooLarge,
                "pad " + std::to_string(pad) + " exceeds smallest image side " +
                    std::to_string(std::min(img.width(), img.height())));
  }
  const int w = img.width() + 2 * pad;
  const int h = img.height() + 2 * pad;
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const auto src = img.row(reflect_index(y - pad, img.height()));
    auto dst = out.row(y);
    for (int x = 0; x < w; ++x) dst[x] = src[reflect_index(x - pad, img.width())];
  }
  return out;
}

GrayImage crop_center(const GrayImage& img, int pad) {
  if (pad < 0) throw Error(Errc::kInvalidArgument, "pad must be non-negative");
  if (img.width() <= 2 * pad || img.height() <= 2 * pad) {
    throw Error(Errc::kCropTooLarge, "crop of " + std::to_string(pad) +
                                         " px per side leaves no pixels");
  }
  const int w = img.width() - 2 * pad;
  const int h = img.height() - 2 * pad;
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const auto src = img.row(y + pad);
    std::copy_n(src.begin() + pad, w, out.row(y).begin());
  }
  return out;
}

}  // namespace starseg

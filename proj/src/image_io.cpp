#include "starseg/image_io.hpp"

#include <png.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace starseg {
namespace {

namespace fs = std::filesystem;
using Bytes = std::vector<unsigned char>;

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::kIoError, "read failed for " + path.string());
  return data;
}

void write_bytes_atomic(const fs::path& path, const void* data, std::size_t size) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::kIoError, "cannot create " + tmp.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error(Errc::kIoError, "write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw Error(Errc::kIoError, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// ---------------------------------------------------------------------------
// PNG via the libpng simplified API

AnyImage decode_png(const Bytes& bytes, const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(Errc::kCorruptFile, path.string() + ": " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw Error(Errc::kUnsupportedFormat, path.string() + ": 16-bit PNG is not supported");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    throw Error(Errc::kCorruptFile, path.string() + ": " + image.message);
  }
  if (color) {
    std::vector<Rgb> px(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < px.size(); ++i) {
      px[i] = {buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
    }
    return RgbImage(width, height, std::move(px));
  }
  return GrayImage(width, height, std::vector<double>(buffer.begin(), buffer.end()));
}

void write_png(const fs::path& path, int width, int height, png_uint_32 format,
               const std::vector<png_byte>& buffer) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;

  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(image, size, 0, buffer.data(), 0, nullptr)) {
    throw Error(Errc::kIoError, path.string() + ": " + image.message);
  }
  std::vector<png_byte> encoded(size);
  if (!png_image_write_to_memory(&image, encoded.data(), &size, 0, buffer.data(), 0, nullptr)) {
    throw Error(Errc::kIoError, path.string() + ": " + image.message);
  }
  write_bytes_atomic(path, encoded.data(), size);
}

// ---------------------------------------------------------------------------
// Binary PGM (P5) / PPM (P6)

class PnmHeaderReader {
 public:
  PnmHeaderReader(const Bytes& bytes, const fs::path& path) : bytes_(bytes), path_(path) {}

  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(Errc::kCorruptFile, path_.string() + ": malformed PNM header");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (1L << 24)) throw Error(Errc::kCorruptFile, path_.string() + ": header value too large");
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(Errc::kCorruptFile, path_.string() + ": malformed PNM header");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const Bytes& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 2;
};

AnyImage decode_pnm(const Bytes& bytes, const fs::path& path) {
  const bool color = bytes[1] == '6';
  PnmHeaderReader header(bytes, path);
  const int width = header.next_int();
  const int height = header.next_int();
  const int maxval = header.next_int();
  const std::size_t offset = header.raster_offset();
  if (width < 1 || height < 1) throw Error(Errc::kCorruptFile, path.string() + ": zero-sized image");
  if (maxval < 1) throw Error(Errc::kCorruptFile, path.string() + ": invalid maxval");
  if (maxval > 255) throw Error(Errc::kUnsupportedFormat, path.string() + ": 16-bit PNM is not supported");

  const std::size_t channels = color ? 3 : 1;
  const std::size_t needed = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() < offset + needed) throw Error(Errc::kCorruptFile, path.string() + ": truncated raster");

  auto sample = [&](std::size_t i) -> std::uint8_t {
    const unsigned v = bytes[offset + i];
    if (v > static_cast<unsigned>(maxval)) throw Error(Errc::kCorruptFile, path.string() + ": sample exceeds maxval");
    if (maxval == 255) return static_cast<std::uint8_t>(v);
    return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  };

  if (color) {
    std::vector<Rgb> px(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = {sample(3 * i), sample(3 * i + 1), sample(3 * i + 2)};
    return RgbImage(width, height, std::move(px));
  }
  std::vector<double> px(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = sample(i);
  return GrayImage(width, height, std::move(px));
}

void write_pnm(const fs::path& path, int width, int height, bool color, const std::vector<png_byte>& raster) {
  const std::string header =
      std::string(color ? "P6" : "P5") + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), raster.begin(), raster.end());
  write_bytes_atomic(path, out.data(), out.size());
}

void write_gray8(const fs::path& path, int width, int height, const std::vector<png_byte>& raster) {
  if (lower_extension(path) == ".pgm") {
    write_pnm(path, width, height, false, raster);
  } else {
    write_png(path, width, height, PNG_FORMAT_GRAY, raster);
  }
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  write_bytes_atomic(path, bytes.data(), bytes.size());
}

AnyImage load_image(const fs::path& path) {
  const Bytes bytes = read_file(path);
  static constexpr unsigned char kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(std::begin(kPngMagic), std::end(kPngMagic), bytes.begin())) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(bytes, path);
  }
  throw Error(Errc::kUnsupportedFormat, path.string() + ": not a PNG or binary PGM/PPM file");
}

GrayImage load_gray(const fs::path& path) {
  AnyImage img = load_image(path);
  if (auto* rgb = std::get_if<RgbImage>(&img)) return to_grayscale(*rgb);
  return std::get<GrayImage>(std::move(img));
}

BinaryMask load_mask(const fs::path& path) {
  const GrayImage gray = load_gray(path);
  BinaryMask mask(gray.width(), gray.height());
  auto src = gray.pixels();
  auto dst = mask.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] >= 128.0 ? 1 : 0;
  return mask;
}

void save_image(const GrayImage& img, const fs::path& path) {
  std::vector<png_byte> raster(img.size());
  std::transform(img.pixels().begin(), img.pixels().end(), raster.begin(), quantize);
  write_gray8(path, img.width(), img.height(), raster);
}

void save_image(const RgbImage& img, const fs::path& path) {
  std::vector<png_byte> raster;
  raster.reserve(img.size() * 3);
  for (const Rgb& p : img.pixels()) {
    raster.push_back(p.r);
    raster.push_back(p.g);
    raster.push_back(p.b);
  }
  if (lower_extension(path) == ".ppm") {
    write_pnm(path, img.width(), img.height(), true, raster);
  } else {
    write_png(path, img.width(), img.height(), PNG_FORMAT_RGB, raster);
  }
}

void save_mask(const BinaryMask& mask, const fs::path& path) {
  std::vector<png_byte> raster(mask.size());
  std::transform(mask.pixels().begin(), mask.pixels().end(), raster.begin(),
                 [](std::uint8_t b) { return static_cast<png_byte>(b ? 255 : 0); });
  write_gray8(path, mask.width(), mask.height(), raster);
}

void save_pfm(const GrayImage& img, const fs::path& path) {
  static_assert(std::endian::native == std::endian::little, "PFM writer assumes a little-endian host");
  const std::string header = "Pf\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n-1.0\n";
  Bytes out(header.begin(), header.end());
  out.reserve(header.size() + img.size() * sizeof(float));
  for (int y = img.height() - 1; y >= 0; --y) {
    for (double v : img.row(y)) {
      const float f = static_cast<float>(v);
      const auto* p = reinterpret_cast<const unsigned char*>(&f);
      out.insert(out.end(), p, p + sizeof f);
    }
  }
  write_bytes_atomic(path, out.data(), out.size());
}

GrayImage load_pfm(const fs::path& path) {
  const Bytes bytes = read_file(path);
  if (bytes.size() < 3 || bytes[0] != 'P' || bytes[1] != 'f') {
    throw Error(Errc::kUnsupportedFormat, path.string() + ": not a single-channel PFM file");
  }
  // Header is three whitespace-separated tokens after the magic.
  std::size_t pos = 2;
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
    return t;
  };
  int width = 0;
  int height = 0;
  double scale = 0.0;
  try {
    width = std::stoi(token());
    height = std::stoi(token());
    scale = std::stod(token());
  } catch (const std::exception&) {
    throw Error(Errc::kCorruptFile, path.string() + ": malformed PFM header");
  }
  if (scale >= 0.0) throw Error(Errc::kUnsupportedFormat, path.string() + ": big-endian PFM is not supported");
  if (width < 1 || height < 1) throw Error(Errc::kCorruptFile, path.string() + ": zero-sized image");
  ++pos;
  const std::size_t needed = static_cast<std::size_t>(width) * height * sizeof(float);
  if (bytes.size() < pos + needed) throw Error(Errc::kCorruptFile, path.string() + ": truncated raster");

  std::vector<double> px(static_cast<std::size_t>(width) * height);
  std::size_t src = pos;
  for (int y = height - 1; y >= 0; --y) {
    for (int x = 0; x < width; ++x, src += sizeof(float)) {
      float f;
      std::memcpy(&f, bytes.data() + src, sizeof f);
      px[static_cast<std::size_t>(y) * width + x] = f;
    }
  }
  return GrayImage(width, height, std::move(px));
}

}  // namespace starseg

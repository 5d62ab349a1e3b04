#pragma once

#include <filesystem>
#include <string_view>
#include <variant>

#include "starseg/image.hpp"

namespace starseg {

using AnyImage = std::variant<GrayImage, RgbImage>;

/// Reads 8-bit PNG (gray, gray+alpha, RGB, RGBA, palette) or binary PGM/PPM.
/// The format is detected from the file's magic bytes. Alpha is discarded.
AnyImage load_image(const std::filesystem::path& path);

/// load_image followed by Rec. 601 conversion when the file is color.
GrayImage load_gray(const std::filesystem::path& path);

/// Ground-truth masks: gray value >= 128 is foreground (white tracks on black).
BinaryMask load_mask(const std::filesystem::path& path);

/// Writes an 8-bit gray image; values are rounded and clamped to [0, 255].
/// `.pgm` selects binary PGM, anything else PNG.
void save_image(const GrayImage& img, const std::filesystem::path& path);

/// `.ppm` selects binary PPM, anything else PNG.
void save_image(const RgbImage& img, const std::filesystem::path& path);

/// Single-channel PNG (or PGM), foreground 255 and background 0.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// Little-endian single-channel PFM ("Pf"), rows stored bottom-to-top.
void save_pfm(const GrayImage& img, const std::filesystem::path& path);
GrayImage load_pfm(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace starseg

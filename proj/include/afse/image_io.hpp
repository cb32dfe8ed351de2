#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "afse/raster.hpp"

namespace afse {

enum class ImageFormat { kPng, kJpeg };

// Decodes 8-bit PNG or JPEG bytes. Gray sources stay 1-channel; color
// sources (with any alpha dropped) become 3-channel RGB. `name` is only used
// in error messages.
Raster decode_image(std::span<const std::uint8_t> bytes, const std::string& name);

Raster load_image(const std::filesystem::path& path);

// Loads an image and binarizes it with the gray > 127 rule.
Mask load_mask(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const Raster& img);
std::vector<std::uint8_t> encode_jpeg(const Raster& img, int quality = 95);

// Format chosen from the extension (.png, .jpg, .jpeg).
void save_image(const Raster& img, const std::filesystem::path& path);
void save_mask(const Mask& mask, const std::filesystem::path& path);

// Case-insensitive check for .png / .jpg / .jpeg.
bool is_supported_image(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

// Box-filter downscale so the long side is at most max_side (no upscaling).
Raster downscale_to_fit(const Raster& img, int max_side);

}  // namespace afse

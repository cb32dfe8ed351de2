#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace afse {

// 8-bit interleaved pixel grid, row-major, origin top-left.
// channels is 1 (gray) or 3 (RGB).
class Raster {
 public:
  Raster(int width, int height, int channels);
  Raster(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  std::uint8_t at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  bool operator==(const Raster&) const = default;

 private:
  int width_;
  int height_;
  int channels_;
  std::vector<std::uint8_t> data_;
};

// Binary foreground/background grid; stored as 0/1 bytes.
class Mask {
 public:
  Mask(int width, int height);
  Mask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  bool at(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool fg) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = fg ? 1 : 0;
  }
  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::size_t foreground_count() const;
  std::span<const std::uint8_t> bits() const { return bits_; }

  bool operator==(const Mask&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

// Canny output; every value is 0 or 255.
struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

struct Hsv {
  double h;  // degrees, [0, 360)
  double s;  // [0, 1]
  double v;  // [0, 1]
};

// BT.601 luma with round-half-up. 1-channel input is returned unchanged.
Raster to_grayscale(const Raster& img);

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);
// Inverse of rgb_to_hsv, channels in [0, 1].
void hsv_to_rgb(const Hsv& hsv, double& r, double& g, double& b);

// Per-pixel hexcone HSV. Gray input is treated as R=G=B.
std::vector<Hsv> to_hsv(const Raster& img);

// Thresholds a 1- or 3-channel raster (gray > 127) into a mask.
Mask binarize(const Raster& img);

// 0/255 single-channel rendering of a mask.
Raster mask_to_raster(const Mask& mask);

}  // namespace afse

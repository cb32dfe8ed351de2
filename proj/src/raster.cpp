#include "afse/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afse/error.hpp"

namespace afse {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("raster dimensions must be positive, got " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

Raster::Raster(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height);
  if (channels != 1 && channels != 3) {
    throw InvalidArgument("raster must have 1 or 3 channels, got " +
                          std::to_string(channels));
  }
  data_.assign(pixel_count() * channels, 0);
}

Raster::Raster(int width, int height, int channels, std::vector<std::uint8_t> data)
    : Raster(width, height, channels) {
  if (data.size() != data_.size()) {
    throw InvalidArgument("raster data length " + std::to_string(data.size()) +
                          " does not match " + std::to_string(data_.size()));
  }
  data_ = std::move(data);
}

Mask::Mask(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(pixel_count(), 0);
}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits) : Mask(width, height) {
  if (bits.size() != bits_.size()) {
    throw InvalidArgument("mask data length does not match dimensions");
  }
  for (std::size_t i = 0; i < bits.size(); ++i) bits_[i] = bits[i] ? 1 : 0;
}

std::size_t Mask::foreground_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

Raster to_grayscale(const Raster& img) {
  if (img.channels() == 1) return img;
  Raster out(img.width(), img.height(), 1);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    // Integer form of round(0.299 R + 0.587 G + 0.114 B), halves rounded up.
    const unsigned weighted =
        299u * src[3 * i] + 587u * src[3 * i + 1] + 114u * src[3 * i + 2];
    dst[i] = static_cast<std::uint8_t>(std::min(255u, (weighted + 500u) / 1000u));
  }
  return out;
}

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const int hi = std::max({r, g, b});
  const int lo = std::min({r, g, b});
  const double delta = hi - lo;
  Hsv out{0.0, 0.0, hi / 255.0};
  if (hi == 0 || delta == 0) return out;
  out.s = delta / hi;
  double h;
  if (hi == r) {
    h = 60.0 * ((g - b) / delta);
  } else if (hi == g) {
    h = 60.0 * ((b - r) / delta + 2.0);
  } else {
    h = 60.0 * ((r - g) / delta + 4.0);
  }
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

void hsv_to_rgb(const Hsv& hsv, double& r, double& g, double& b) {
  const double c = hsv.v * hsv.s;
  const double hp = std::fmod(hsv.h, 360.0) / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r1 = 0, g1 = 0, b1 = 0;
  switch (static_cast<int>(hp)) {
    case 0: r1 = c; g1 = x; break;
    case 1: r1 = x; g1 = c; break;
    case 2: g1 = c; b1 = x; break;
    case 3: g1 = x; b1 = c; break;
    case 4: r1 = x; b1 = c; break;
    default: r1 = c; b1 = x; break;
  }
  const double m = hsv.v - c;
  r = r1 + m;
  g = g1 + m;
  b = b1 + m;
}

std::vector<Hsv> to_hsv(const Raster& img) {
  std::vector<Hsv> out;
  out.reserve(img.pixel_count());
  auto src = img.data();
  if (img.channels() == 1) {
    for (auto p : src) out.push_back(rgb_to_hsv(p, p, p));
  } else {
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      out.push_back(rgb_to_hsv(src[3 * i], src[3 * i + 1], src[3 * i + 2]));
    }
  }
  return out;
}

Mask binarize(const Raster& img) {
  const Raster gray = to_grayscale(img);
  std::vector<std::uint8_t> bits(gray.pixel_count());
  auto src = gray.data();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = src[i] > 127 ? 1 : 0;
  return Mask(gray.width(), gray.height(), std::move(bits));
}

Raster mask_to_raster(const Mask& mask) {
  std::vector<std::uint8_t> data(mask.pixel_count());
  auto bits = mask.bits();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = bits[i] ? 255 : 0;
  return Raster(mask.width(), mask.height(), 1, std::move(data));
}

}  // namespace afse

// Canny edge detection in fixed point.
//
// The blur uses integer taps (sum close to 1 << 10) so that every quantity up
// to the squared gradient magnitude is an exact int64. Thresholds are compared
// against the squared magnitude scaled back into 8-bit intensity units, which
// makes the output independent of floating-point evaluation order.

#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <string>

#include "afse/error.hpp"
#include "afse/features.hpp"

namespace afse {

namespace {

constexpr int kRadius = 2;
constexpr double kTapScale = 1024.0;

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

}  // namespace

std::array<long long, 5> gaussian_taps(double sigma) {
  std::array<double, 5> w{};
  double total = 0.0;
  for (int i = -kRadius; i <= kRadius; ++i) {
    w[i + kRadius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    total += w[i + kRadius];
  }
  std::array<long long, 5> taps{};
  for (int i = 0; i < 5; ++i) taps[i] = std::llround(kTapScale * w[i] / total);
  return taps;
}

EdgeMap canny(const Raster& gray, const FeatureParams& params) {
  if (gray.channels() != 1) throw InvalidArgument("canny expects a 1-channel image");
  const int w = gray.width();
  const int h = gray.height();
  if (w < 5 || h < 5) {
    throw InvalidArgument("canny needs at least 5x5 pixels, got " + std::to_string(w) +
                          "x" + std::to_string(h));
  }
  const auto n = static_cast<std::size_t>(w) * h;
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

  // Separable blur, replicate border.
  const auto taps = gaussian_taps(params.gaussian_sigma);
  const long long tap_sum = std::accumulate(taps.begin(), taps.end(), 0LL);
  std::vector<long long> horiz(n), blur(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      long long acc = 0;
      for (int i = -kRadius; i <= kRadius; ++i)
        acc += taps[i + kRadius] * gray.at(clamp_index(x + i, w), y);
      horiz[idx(x, y)] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      long long acc = 0;
      for (int j = -kRadius; j <= kRadius; ++j)
        acc += taps[j + kRadius] * horiz[idx(x, clamp_index(y + j, h))];
      blur[idx(x, y)] = acc;
    }
  }

  // 3x3 Sobel on the blurred image, replicate border.
  std::vector<long long> gx(n), gy(n), mag2(n);
  auto b = [&](int x, int y) { return blur[idx(clamp_index(x, w), clamp_index(y, h))]; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const long long dx = (b(x + 1, y - 1) + 2 * b(x + 1, y) + b(x + 1, y + 1)) -
                           (b(x - 1, y - 1) + 2 * b(x - 1, y) + b(x - 1, y + 1));
      const long long dy = (b(x - 1, y + 1) + 2 * b(x, y + 1) + b(x + 1, y + 1)) -
                           (b(x - 1, y - 1) + 2 * b(x, y - 1) + b(x + 1, y - 1));
      gx[idx(x, y)] = dx;
      gy[idx(x, y)] = dy;
      mag2[idx(x, y)] = dx * dx + dy * dy;
    }
  }

  const long double scale = static_cast<long double>(tap_sum) * tap_sum;
  const long double low2 = (params.canny_low * scale) * (params.canny_low * scale);
  const long double high2 = (params.canny_high * scale) * (params.canny_high * scale);
  const long double tan22 = std::sqrt(2.0L) - 1.0L;
  const long double tan67 = std::sqrt(2.0L) + 1.0L;

  auto mag_at = [&](int x, int y) -> long long {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0;
    return mag2[idx(x, y)];
  };

  // Non-maximum suppression: strict against the neighbour on the negative
  // side, non-strict on the positive side, so a symmetric ridge keeps exactly
  // one pixel.
  enum : std::uint8_t { kNone = 0, kWeak = 1, kStrong = 2 };
  std::vector<std::uint8_t> cls(n, kNone);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const long long m = mag2[idx(x, y)];
      if (static_cast<long double>(m) <= low2) continue;
      const long double ax = std::llabs(gx[idx(x, y)]);
      const long double ay = std::llabs(gy[idx(x, y)]);
      int dx, dy;
      if (ay <= tan22 * ax) {
        dx = 1; dy = 0;
      } else if (ay >= tan67 * ax) {
        dx = 0; dy = 1;
      } else if ((gx[idx(x, y)] > 0) == (gy[idx(x, y)] > 0)) {
        dx = 1; dy = 1;
      } else {
        dx = 1; dy = -1;
      }
      if (m > mag_at(x - dx, y - dy) && m >= mag_at(x + dx, y + dy)) {
        cls[idx(x, y)] = static_cast<long double>(m) > high2 ? kStrong : kWeak;
      }
    }
  }

  // Hysteresis, 8-connected flood from strong pixels through weak ones.
  EdgeMap edges{w, h, std::vector<std::uint8_t>(n, 0)};
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (cls[i] == kStrong) {
      edges.data[i] = 255;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    for (int oy = -1; oy <= 1; ++oy) {
      for (int ox = -1; ox <= 1; ++ox) {
        const int nx = x + ox, ny = y + oy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t j = idx(nx, ny);
        if (cls[j] == kWeak && edges.data[j] == 0) {
          edges.data[j] = 255;
          queue.push_back(j);
        }
      }
    }
  }
  return edges;
}

double edge_density(const EdgeMap& edges) {
  if (edges.data.empty()) return 0.0;
  std::uint64_t sum = 0;
  for (auto v : edges.data) sum += v;
  return static_cast<double>(sum) / static_cast<double>(edges.data.size()) / 255.0;
}

}  // namespace afse

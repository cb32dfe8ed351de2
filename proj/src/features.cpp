#include "afse/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "afse/error.hpp"

namespace afse {

void FeatureParams::validate() const {
  if (!(canny_low >= 0.0 && canny_low < canny_high && canny_high <= 255.0 * 4.0)) {
    throw InvalidArgument("canny thresholds must satisfy 0 <= low < high <= 1020");
  }
  if (!(gaussian_sigma > 0.0) || !std::isfinite(gaussian_sigma)) {
    throw InvalidArgument("gaussian_sigma must be positive");
  }
  if (hist_bins_h < 2 || hist_bins_s < 2) {
    throw InvalidArgument("histogram bin counts must be >= 2");
  }
  if (!(hu_epsilon > 0.0) || !std::isfinite(hu_epsilon)) {
    throw InvalidArgument("hu_epsilon must be positive");
  }
}

namespace {

void require_gray(const Raster& img, const char* what) {
  if (img.channels() != 1) {
    throw InvalidArgument(std::string(what) + " expects a 1-channel image");
  }
}

}  // namespace

double brightness(const Raster& gray) {
  require_gray(gray, "brightness");
  std::uint64_t sum = 0;
  for (auto p : gray.data()) sum += p;
  // sum / (255 N) rounded half-to-even onto the 2^-53 grid. Every grid value
  // is a double and the rounding is symmetric about 1/2, so inverting the
  // image gives exactly 1 - B.
  const unsigned __int128 num = static_cast<unsigned __int128>(sum) << 53;
  const unsigned __int128 den = static_cast<unsigned __int128>(255) * gray.pixel_count();
  auto q = static_cast<std::uint64_t>(num / den);
  const unsigned __int128 rem2 = 2 * (num % den);
  if (rem2 > den || (rem2 == den && (q & 1))) ++q;
  return std::ldexp(static_cast<double>(q), -53);
}

double contrast(const Raster& gray) {
  require_gray(gray, "contrast");
  // N * sum(p^2) - sum(p)^2 is exact in 128 bits, so the variance carries no
  // cancellation error.
  std::uint64_t s1 = 0, s2 = 0;
  for (auto p : gray.data()) {
    s1 += p;
    s2 += static_cast<std::uint64_t>(p) * p;
  }
  const auto n = static_cast<unsigned __int128>(gray.pixel_count());
  const unsigned __int128 num = n * s2 - static_cast<unsigned __int128>(s1) * s1;
  return std::sqrt(static_cast<double>(num)) / (255.0 * static_cast<double>(n));
}

Histogram2D hsv_histogram(const Raster& img, const FeatureParams& params) {
  Histogram2D hist{params.hist_bins_h, params.hist_bins_s,
                   std::vector<double>(static_cast<std::size_t>(params.hist_bins_h) *
                                           params.hist_bins_s,
                                       0.0)};
  for (const Hsv& px : to_hsv(img)) {
    const int hb = std::min(static_cast<int>(px.h / 360.0 * hist.bins_h), hist.bins_h - 1);
    const int sb = std::min(static_cast<int>(px.s * hist.bins_s), hist.bins_s - 1);
    hist.counts[static_cast<std::size_t>(hb) * hist.bins_s + sb] += 1.0;
  }
  return hist;
}

double hist_correlation(const Histogram2D& a, const Histogram2D& b) {
  if (a.bins_h != b.bins_h || a.bins_s != b.bins_s || a.counts.size() != b.counts.size()) {
    throw InvalidArgument("histogram shapes differ");
  }
  const auto n = static_cast<double>(a.counts.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    mean_a += a.counts[i];
    mean_b += b.counts[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    const double da = a.counts[i] - mean_a;
    const double db = b.counts[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 && var_b == 0.0) return a.counts == b.counts ? 1.0 : 0.0;
  if (var_a == 0.0 || var_b == 0.0) return 0.0;
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

HuMoments hu_moments(const Raster& gray) {
  require_gray(gray, "hu_moments");
  double m00 = 0.0, m10 = 0.0, m01 = 0.0;
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      const double v = gray.at(x, y);
      m00 += v;
      m10 += x * v;
      m01 += y * v;
    }
  }
  if (m00 <= 0.0) throw InvalidArgument("hu_moments undefined for an all-zero image");
  const double cx = m10 / m00;
  const double cy = m01 / m00;

  double mu20 = 0, mu02 = 0, mu11 = 0, mu30 = 0, mu03 = 0, mu21 = 0, mu12 = 0;
  for (int y = 0; y < gray.height(); ++y) {
    const double dy = y - cy;
    for (int x = 0; x < gray.width(); ++x) {
      const double v = gray.at(x, y);
      if (v == 0.0) continue;
      const double dx = x - cx;
      mu20 += dx * dx * v;
      mu02 += dy * dy * v;
      mu11 += dx * dy * v;
      mu30 += dx * dx * dx * v;
      mu03 += dy * dy * dy * v;
      mu21 += dx * dx * dy * v;
      mu12 += dx * dy * dy * v;
    }
  }

  // eta_pq = mu_pq / m00^(1 + (p+q)/2)
  const double s2 = m00 * m00;
  const double s3 = std::pow(m00, 2.5);
  const double n20 = mu20 / s2, n02 = mu02 / s2, n11 = mu11 / s2;
  const double n30 = mu30 / s3, n03 = mu03 / s3, n21 = mu21 / s3, n12 = mu12 / s3;

  const double a = n30 + n12;
  const double b = n21 + n03;
  const double c = n30 - 3.0 * n12;
  const double d = 3.0 * n21 - n03;

  HuMoments hu;
  hu[0] = n20 + n02;
  hu[1] = (n20 - n02) * (n20 - n02) + 4.0 * n11 * n11;
  hu[2] = c * c + d * d;
  hu[3] = a * a + b * b;
  hu[4] = c * a * (a * a - 3.0 * b * b) + d * b * (3.0 * a * a - b * b);
  hu[5] = (n20 - n02) * (a * a - b * b) + 4.0 * n11 * a * b;
  hu[6] = d * a * (a * a - 3.0 * b * b) - c * b * (3.0 * a * a - b * b);
  return hu;
}

double shape_similarity(const HuMoments& img, const HuMoments& ref, double hu_epsilon) {
  double diff = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) diff += std::fabs(ref[i] - img[i]);
  return -std::log(diff + hu_epsilon);
}

double shape_similarity(const Raster& img, const Raster& ref, const FeatureParams& params) {
  return shape_similarity(hu_moments(to_grayscale(img)), hu_moments(to_grayscale(ref)),
                          params.hu_epsilon);
}

ReferenceProfile make_reference_profile(const Raster& ref, const FeatureParams& params) {
  return ReferenceProfile{hsv_histogram(ref, params), hu_moments(to_grayscale(ref))};
}

FeatureVector extract_features(const Raster& img, const ReferenceProfile& ref,
                               const FeatureParams& params) {
  const Raster gray = to_grayscale(img);
  FeatureVector fv;
  fv.brightness = brightness(gray);
  fv.contrast = contrast(gray);
  fv.edge_density = edge_density(canny(gray, params));
  fv.hist_corr = hist_correlation(hsv_histogram(img, params), ref.histogram);
  fv.shape_sim = shape_similarity(hu_moments(gray), ref.hu, params.hu_epsilon);
  return fv;
}

}  // namespace afse

#pragma once

#include <array>
#include <vector>

#include "afse/raster.hpp"

namespace afse {

struct FeatureParams {
  double canny_low = 50.0;
  double canny_high = 150.0;
  double gaussian_sigma = 1.4;  // 5x5 kernel
  int hist_bins_h = 32;
  int hist_bins_s = 32;
  double hu_epsilon = 1e-10;

  // Throws InvalidArgument on the first violated constraint.
  void validate() const;
  bool operator==(const FeatureParams&) const = default;
};

// Per-frame scores relative to a reference frame.
struct FeatureVector {
  double brightness = 0.0;   // B
  double contrast = 0.0;     // C
  double edge_density = 0.0; // E
  double hist_corr = 0.0;    // H
  double shape_sim = 0.0;    // S

  std::array<double, 5> as_array() const {
    return {brightness, contrast, edge_density, hist_corr, shape_sim};
  }
  bool operator==(const FeatureVector&) const = default;
};

using HuMoments = std::array<double, 7>;

// Hue x saturation counts, row-major with hue as the slow axis.
struct Histogram2D {
  int bins_h = 0;
  int bins_s = 0;
  std::vector<double> counts;

  double at(int h, int s) const { return counts[static_cast<std::size_t>(h) * bins_s + s]; }
};

// What H and S need from the reference frame, computed once per reference.
struct ReferenceProfile {
  Histogram2D histogram;
  HuMoments hu{};
};

double brightness(const Raster& gray);
double contrast(const Raster& gray);

// Full Canny pipeline; see canny.cpp for the fixed-point conventions.
EdgeMap canny(const Raster& gray, const FeatureParams& params);

// The 5-tap blur kernel in fixed point (taps sum to roughly 1 << 10).
std::array<long long, 5> gaussian_taps(double sigma);

double edge_density(const EdgeMap& edges);

Histogram2D hsv_histogram(const Raster& img, const FeatureParams& params);

// Pearson correlation of the flattened bins. Two constant vectors give 1 when
// equal and 0 otherwise; one constant vector against a varying one gives 0.
double hist_correlation(const Histogram2D& a, const Histogram2D& b);

// Seven Hu invariants of the raw grayscale intensity distribution.
HuMoments hu_moments(const Raster& gray);

double shape_similarity(const HuMoments& img, const HuMoments& ref, double hu_epsilon);
double shape_similarity(const Raster& img, const Raster& ref, const FeatureParams& params);

ReferenceProfile make_reference_profile(const Raster& ref, const FeatureParams& params);

FeatureVector extract_features(const Raster& img, const ReferenceProfile& ref,
                               const FeatureParams& params);

}  // namespace afse

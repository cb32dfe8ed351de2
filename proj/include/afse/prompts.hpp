#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "afse/raster.hpp"

namespace afse {

enum class PromptStrategy {
  kStandardPos,
  kRandomPos,
  kSingleNeg,
  kSinglePosNeg,
  kFourPos,
  kFourNeg,
  kSinglePosTwoNeg,
  kTwoPosFourNeg,
  kBBox,
  // Clinician-placed prompts; never derived automatically.
  kCustom,
};

inline constexpr PromptStrategy kAllPromptStrategies[] = {
    PromptStrategy::kStandardPos,  PromptStrategy::kRandomPos,
    PromptStrategy::kSingleNeg,    PromptStrategy::kSinglePosNeg,
    PromptStrategy::kFourPos,      PromptStrategy::kFourNeg,
    PromptStrategy::kSinglePosTwoNeg, PromptStrategy::kTwoPosFourNeg,
    PromptStrategy::kBBox,
};

// Snake-case names: "standard_pos", "four_neg", "bbox", ...
std::string_view to_string(PromptStrategy s);
PromptStrategy parse_prompt_strategy(std::string_view name);

struct PointCounts {
  int positive = 0;
  int negative = 0;
};
// Exact number of points each strategy emits.
PointCounts point_counts(PromptStrategy s);

struct PromptPoint {
  int x = 0;
  int y = 0;
  bool positive = true;
  bool operator==(const PromptPoint&) const = default;
};

// Inclusive pixel coordinates.
struct BBox {
  int xmin = 0;
  int ymin = 0;
  int xmax = 0;
  int ymax = 0;
  bool operator==(const BBox&) const = default;
};

struct PromptSpec {
  std::string frame_id;
  PromptStrategy strategy = PromptStrategy::kBBox;
  std::vector<PromptPoint> points;
  std::optional<BBox> bbox;
  bool operator==(const PromptSpec&) const = default;
};

// Tight box over every foreground pixel. Throws InvalidArgument when empty.
BBox derive_bbox(const Mask& mask);

// Largest 8-connected foreground component; ties go to the component met
// first in raster order.
Mask largest_component(const Mask& mask);

// Most interior pixel of the largest component: argmax of the city-block
// distance to the nearest pixel outside that component (the area beyond the
// image border counts as outside). Ties go to the lowest (y, x).
PromptPoint standard_pos(const Mask& mask);

// Negatives must lie at chessboard distance >= this from every foreground
// pixel when enough such pixels exist.
inline constexpr int kNegativeMargin = 5;

// Seeded sampling without replacement. Positives come from the largest
// component (all foreground if it is too small); negatives from background
// pixels at least kNegativeMargin away from the mask, falling back to any
// background pixel. Positives are listed first.
std::vector<PromptPoint> sample_points(const Mask& mask, int n_pos, int n_neg,
                                       std::uint64_t seed);

PromptSpec derive_prompts(const Mask& mask, PromptStrategy strategy, std::uint64_t seed,
                          std::string frame_id = {});

}  // namespace afse

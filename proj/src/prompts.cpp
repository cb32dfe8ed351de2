#include "afse/prompts.hpp"

#include <algorithm>
#include <limits>
#include <span>

#include "afse/error.hpp"
#include "afse/random.hpp"

namespace afse {

std::string_view to_string(PromptStrategy s) {
  switch (s) {
    case PromptStrategy::kStandardPos: return "standard_pos";
    case PromptStrategy::kRandomPos: return "random_pos";
    case PromptStrategy::kSingleNeg: return "single_neg";
    case PromptStrategy::kSinglePosNeg: return "single_pos_neg";
    case PromptStrategy::kFourPos: return "four_pos";
    case PromptStrategy::kFourNeg: return "four_neg";
    case PromptStrategy::kSinglePosTwoNeg: return "single_pos_two_neg";
    case PromptStrategy::kTwoPosFourNeg: return "two_pos_four_neg";
    case PromptStrategy::kBBox: return "bbox";
    case PromptStrategy::kCustom: return "custom";
  }
  return "bbox";
}

PromptStrategy parse_prompt_strategy(std::string_view name) {
  for (auto s : kAllPromptStrategies) {
    if (to_string(s) == name) return s;
  }
  if (name == "custom") return PromptStrategy::kCustom;
  throw InvalidArgument("unknown prompt strategy '" + std::string(name) + "'");
}

PointCounts point_counts(PromptStrategy s) {
  switch (s) {
    case PromptStrategy::kStandardPos: return {1, 0};
    case PromptStrategy::kRandomPos: return {1, 0};
    case PromptStrategy::kSingleNeg: return {0, 1};
    case PromptStrategy::kSinglePosNeg: return {1, 1};
    case PromptStrategy::kFourPos: return {4, 0};
    case PromptStrategy::kFourNeg: return {0, 4};
    case PromptStrategy::kSinglePosTwoNeg: return {1, 2};
    case PromptStrategy::kTwoPosFourNeg: return {2, 4};
    case PromptStrategy::kBBox: return {0, 0};
    case PromptStrategy::kCustom: return {0, 0};
  }
  return {0, 0};
}

BBox derive_bbox(const Mask& mask) {
  BBox box{mask.width(), mask.height(), -1, -1};
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      box.xmin = std::min(box.xmin, x);
      box.ymin = std::min(box.ymin, y);
      box.xmax = std::max(box.xmax, x);
      box.ymax = std::max(box.ymax, y);
    }
  }
  if (box.xmax < 0) throw InvalidArgument("cannot derive a bounding box from an empty mask");
  return box;
}

Mask largest_component(const Mask& mask) {
  const int w = mask.width(), h = mask.height();
  std::vector<int> label(mask.pixel_count(), -1);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < label.size(); ++start) {
    if (!mask.bits()[start] || label[start] >= 0) continue;
    const int id = static_cast<int>(sizes.size());
    std::size_t size = 0;
    label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      ++size;
      const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (!mask.contains(nx, ny)) continue;
          const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
          if (mask.bits()[j] && label[j] < 0) {
            label[j] = id;
            stack.push_back(j);
          }
        }
      }
    }
    sizes.push_back(size);
  }
  Mask out(w, h);
  if (sizes.empty()) return out;
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] == best) out.set(static_cast<int>(i % w), static_cast<int>(i / w), true);
  }
  return out;
}

namespace {

// Two-pass city-block distance from each foreground pixel to the nearest
// non-foreground pixel, with everything beyond the border treated as
// background.
std::vector<int> city_block_interior_distance(const Mask& mask) {
  const int w = mask.width(), h = mask.height();
  std::vector<int> d(mask.pixel_count(), 0);
  auto at = [&](int x, int y) -> int& { return d[static_cast<std::size_t>(y) * w + x]; };
  auto get = [&](int x, int y) { return mask.contains(x, y) ? at(x, y) : 0; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      at(x, y) = std::min(get(x - 1, y), get(x, y - 1)) + 1;
    }
  }
  for (int y = h - 1; y >= 0; --y) {
    for (int x = w - 1; x >= 0; --x) {
      if (!mask.at(x, y)) continue;
      at(x, y) = std::min(at(x, y), std::min(get(x + 1, y), get(x, y + 1)) + 1);
    }
  }
  return d;
}

// Chessboard distance from each pixel to the nearest foreground pixel
// (0 on foreground, "infinite" if the mask is empty).
std::vector<int> chessboard_distance_to_foreground(const Mask& mask) {
  const int w = mask.width(), h = mask.height();
  const int inf = std::numeric_limits<int>::max() / 2;
  std::vector<int> d(mask.pixel_count(), inf);
  auto at = [&](int x, int y) -> int& { return d[static_cast<std::size_t>(y) * w + x]; };
  auto get = [&](int x, int y) { return mask.contains(x, y) ? at(x, y) : inf; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y)) {
        at(x, y) = 0;
        continue;
      }
      const int m = std::min({get(x - 1, y), get(x - 1, y - 1), get(x, y - 1), get(x + 1, y - 1)});
      at(x, y) = std::min(at(x, y), m + 1);
    }
  }
  for (int y = h - 1; y >= 0; --y) {
    for (int x = w - 1; x >= 0; --x) {
      const int m = std::min({get(x + 1, y), get(x + 1, y + 1), get(x, y + 1), get(x - 1, y + 1)});
      at(x, y) = std::min(at(x, y), m + 1);
    }
  }
  return d;
}

// Draws `count` distinct entries via a partial Fisher-Yates shuffle.
std::vector<std::size_t> draw(std::vector<std::size_t> pool, std::size_t count, SplitMix64& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.bounded(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

PromptPoint standard_pos(const Mask& mask) {
  const Mask component = largest_component(mask);
  if (component.foreground_count() == 0) {
    throw InvalidArgument("cannot place a positive point on an empty mask");
  }
  const auto dist = city_block_interior_distance(component);
  std::size_t best = 0;
  for (std::size_t i = 1; i < dist.size(); ++i) {
    if (dist[i] > dist[best]) best = i;
  }
  return {static_cast<int>(best % mask.width()), static_cast<int>(best / mask.width()), true};
}

std::vector<PromptPoint> sample_points(const Mask& mask, int n_pos, int n_neg,
                                       std::uint64_t seed) {
  if (n_pos < 0 || n_neg < 0) throw InvalidArgument("point counts must be non-negative");
  const int w = mask.width();
  SplitMix64 rng(seed);
  std::vector<PromptPoint> points;

  if (n_pos > 0) {
    const Mask component = largest_component(mask);
    const Mask& source =
        component.foreground_count() >= static_cast<std::size_t>(n_pos) ? component : mask;
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < source.pixel_count(); ++i) {
      if (source.bits()[i]) pool.push_back(i);
    }
    if (pool.size() < static_cast<std::size_t>(n_pos)) {
      throw InvalidArgument("mask has " + std::to_string(pool.size()) +
                            " foreground pixels, need " + std::to_string(n_pos));
    }
    for (auto i : draw(std::move(pool), n_pos, rng)) {
      points.push_back({static_cast<int>(i % w), static_cast<int>(i / w), true});
    }
  }

  if (n_neg > 0) {
    const auto dist = chessboard_distance_to_foreground(mask);
    std::vector<std::size_t> far, any;
    for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
      if (mask.bits()[i]) continue;
      any.push_back(i);
      if (dist[i] >= kNegativeMargin) far.push_back(i);
    }
    if (any.size() < static_cast<std::size_t>(n_neg)) {
      throw InvalidArgument("mask has " + std::to_string(any.size()) +
                            " background pixels, need " + std::to_string(n_neg));
    }
    auto& pool = far.size() >= static_cast<std::size_t>(n_neg) ? far : any;
    for (auto i : draw(std::move(pool), n_neg, rng)) {
      points.push_back({static_cast<int>(i % w), static_cast<int>(i / w), false});
    }
  }
  return points;
}

PromptSpec derive_prompts(const Mask& mask, PromptStrategy strategy, std::uint64_t seed,
                          std::string frame_id) {
  PromptSpec spec;
  spec.frame_id = std::move(frame_id);
  spec.strategy = strategy;
  const PointCounts counts = point_counts(strategy);
  switch (strategy) {
    case PromptStrategy::kBBox:
      spec.bbox = derive_bbox(mask);
      break;
    case PromptStrategy::kCustom:
      throw InvalidArgument("custom prompts are placed by hand, not derived");
    case PromptStrategy::kStandardPos:
      spec.points.push_back(standard_pos(mask));
      break;
    case PromptStrategy::kSinglePosNeg:
    case PromptStrategy::kSinglePosTwoNeg: {
      spec.points.push_back(standard_pos(mask));
      auto negatives = sample_points(mask, 0, counts.negative, seed);
      spec.points.insert(spec.points.end(), negatives.begin(), negatives.end());
      break;
    }
    default:
      spec.points = sample_points(mask, counts.positive, counts.negative, seed);
      break;
  }
  return spec;
}

}  // namespace afse

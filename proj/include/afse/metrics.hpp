#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "afse/raster.hpp"

namespace afse {

// Both return 1.0 when the two masks are empty. Throw on size mismatch.
double dice(const Mask& a, const Mask& b);
double iou(const Mask& a, const Mask& b);

struct FrameEval {
  std::string frame_id;
  double dice = 0.0;
  double iou = 0.0;
};

struct EvalReport {
  std::vector<FrameEval> frames;        // sorted by frame id
  double mean_dice = 0.0;
  double mean_iou = 0.0;
  std::vector<std::string> missing_prediction;    // gt without a prediction
  std::vector<std::string> missing_ground_truth;  // prediction without gt

  std::size_t frame_count() const { return frames.size(); }
};

// Pairs masks across the two directories by filename stem and scores each
// pair. Unpaired files are reported and excluded. Throws InvalidArgument when
// nothing pairs, IoError on unreadable masks.
EvalReport evaluate_run(const std::filesystem::path& pred_dir,
                        const std::filesystem::path& gt_dir, int jobs = 1);

}  // namespace afse

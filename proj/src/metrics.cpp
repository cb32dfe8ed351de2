#include "afse/metrics.hpp"

#include <map>

#include "afse/dataset.hpp"
#include "afse/error.hpp"
#include "afse/image_io.hpp"
#include "afse/parallel.hpp"

namespace afse {

namespace {

struct Overlap {
  std::size_t a = 0, b = 0, both = 0;
};

Overlap count_overlap(const Mask& a, const Mask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw InvalidArgument("mask sizes differ: " + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                          "x" + std::to_string(b.height()));
  }
  Overlap o;
  auto pa = a.bits(), pb = b.bits();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    o.a += pa[i];
    o.b += pb[i];
    o.both += pa[i] & pb[i];
  }
  return o;
}

}  // namespace

double dice(const Mask& a, const Mask& b) {
  const Overlap o = count_overlap(a, b);
  if (o.a + o.b == 0) return 1.0;
  return 2.0 * static_cast<double>(o.both) / static_cast<double>(o.a + o.b);
}

double iou(const Mask& a, const Mask& b) {
  const Overlap o = count_overlap(a, b);
  const std::size_t uni = o.a + o.b - o.both;
  if (uni == 0) return 1.0;
  return static_cast<double>(o.both) / static_cast<double>(uni);
}

EvalReport evaluate_run(const std::filesystem::path& pred_dir,
                        const std::filesystem::path& gt_dir, int jobs) {
  const auto preds = list_images_by_stem(pred_dir);
  const auto gts = list_images_by_stem(gt_dir);

  EvalReport report;
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> pairs;
  for (const auto& [stem, path] : gts) {
    auto it = preds.find(stem);
    if (it == preds.end()) {
      report.missing_prediction.push_back(stem);
      continue;
    }
    report.frames.push_back({stem, 0.0, 0.0});
    pairs.emplace_back(it->second, path);
  }
  for (const auto& [stem, path] : preds) {
    if (!gts.count(stem)) report.missing_ground_truth.push_back(stem);
  }
  if (pairs.empty()) {
    throw InvalidArgument("no prediction/ground-truth pairs between " + pred_dir.string() +
                          " and " + gt_dir.string());
  }

  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    const Mask pred = load_mask(pairs[i].first);
    const Mask gt = load_mask(pairs[i].second);
    report.frames[i].dice = dice(pred, gt);
    report.frames[i].iou = iou(pred, gt);
  });

  double sd = 0.0, si = 0.0;
  for (const auto& f : report.frames) {
    sd += f.dice;
    si += f.iou;
  }
  report.mean_dice = sd / static_cast<double>(report.frames.size());
  report.mean_iou = si / static_cast<double>(report.frames.size());
  return report;
}

}  // namespace afse

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afse/dataset.hpp"
#include "afse/features.hpp"
#include "afse/manifest.hpp"
#include "afse/prompts.hpp"
#include "afse/raster.hpp"
#include "afse/selection.hpp"

namespace afse {

// Called after each frame finishes (done, total). May run on worker threads.
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

// Features of every image against images[reference_index]. Frames are decoded
// inside the workers and released right after scoring, so memory stays
// bounded by `jobs` frames regardless of sequence length.
std::vector<FeatureVector> compute_features(std::span<const std::filesystem::path> images,
                                            std::size_t reference_index,
                                            const FeatureParams& params, int jobs = 1,
                                            const ProgressFn& progress = {});

// In-memory variant over decoded frames.
std::vector<FeatureVector> compute_features(std::span<const Raster> frames,
                                            std::size_t reference_index,
                                            const FeatureParams& params, int jobs = 1);

struct AfseRun {
  std::vector<FeatureVector> features;
  SelectionOutcome outcome;
};

// extract -> composite score -> k-means -> representatives, for any strategy
// in `options`. A pure function of its inputs.
AfseRun run_afse(std::span<const Raster> frames, std::size_t reference_index,
                 const FeatureParams& params, const SelectOptions& options, int jobs = 1);

// Score-only document (strategy "none").
SelectionManifest make_score_manifest(std::span<const std::string> ids,
                                      std::span<const FeatureVector> features,
                                      const std::string& reference_id,
                                      const FeatureParams& params, const SelectOptions& options);

SelectionManifest make_selection_manifest(std::span<const std::string> ids,
                                          std::span<const FeatureVector> features,
                                          const std::string& reference_id,
                                          const FeatureParams& params,
                                          const SelectOptions& options,
                                          const SelectionOutcome& outcome);

// Representative frame ids of a selection manifest, in cluster order.
std::vector<std::string> representative_ids(const SelectionManifest& m);

// Derives prompts for `frame_ids` (each needs a mask). Per-frame failures are
// listed in `skipped`. `overrides` replace derived prompts verbatim and add
// frames that were not selected. Output is ordered by position in `order`.
PromptExport make_prompt_export(const DatasetManifest& dataset,
                                std::span<const std::string> frame_ids,
                                PromptStrategy strategy, std::uint64_t seed,
                                const std::map<std::string, PromptSpec>& overrides = {},
                                int jobs = 1);

// Everything a batch run needs; validated before any pixel is touched.
struct RunConfig {
  std::filesystem::path input_dir;
  std::optional<std::filesystem::path> mask_dir;
  std::optional<std::string> reference_id;
  FeatureParams params;
  SelectOptions select;
  SplitSelection split = SplitSelection::kAll;
  double split_ratio = kDefaultSplitRatio;
  std::uint64_t split_seed = kDefaultSplitSeed;
  PromptStrategy prompt_strategy = PromptStrategy::kBBox;
  int jobs = 1;
  std::filesystem::path out_dir = ".";

  // Every problem found, empty when the config is usable.
  std::vector<std::string> problems() const;
};

// The frames a run operates on after ingest and split filtering.
struct PreparedRun {
  DatasetManifest dataset;
  std::vector<FrameEntry> frames;
  std::vector<std::string> ids;
  std::size_t reference_index = 0;
  std::vector<std::string> warnings;
};

// Ingests, splits, filters and resolves the reference (defaulting to the
// first frame). Throws InvalidArgument / NotFound on configuration problems.
PreparedRun prepare_run(const RunConfig& config);

}  // namespace afse

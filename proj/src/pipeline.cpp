#include "afse/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <set>

#include "afse/error.hpp"
#include "afse/image_io.hpp"
#include "afse/parallel.hpp"
#include "afse/random.hpp"

namespace afse {

namespace fs = std::filesystem;

std::vector<FeatureVector> compute_features(std::span<const fs::path> images,
                                            std::size_t reference_index,
                                            const FeatureParams& params, int jobs,
                                            const ProgressFn& progress) {
  params.validate();
  if (reference_index >= images.size()) throw InvalidArgument("reference index out of range");
  const ReferenceProfile ref = make_reference_profile(load_image(images[reference_index]), params);
  std::vector<FeatureVector> out(images.size());
  std::atomic<std::size_t> done{0};
  parallel_for(images.size(), jobs, [&](std::size_t i) {
    out[i] = extract_features(load_image(images[i]), ref, params);
    const std::size_t d = ++done;
    if (progress) progress(d, images.size());
  });
  return out;
}

std::vector<FeatureVector> compute_features(std::span<const Raster> frames,
                                            std::size_t reference_index,
                                            const FeatureParams& params, int jobs) {
  params.validate();
  if (reference_index >= frames.size()) throw InvalidArgument("reference index out of range");
  const ReferenceProfile ref = make_reference_profile(frames[reference_index], params);
  std::vector<FeatureVector> out(frames.size());
  parallel_for(frames.size(), jobs,
               [&](std::size_t i) { out[i] = extract_features(frames[i], ref, params); });
  return out;
}

AfseRun run_afse(std::span<const Raster> frames, std::size_t reference_index,
                 const FeatureParams& params, const SelectOptions& options, int jobs) {
  AfseRun run;
  run.features = compute_features(frames, reference_index, params, jobs);
  run.outcome = select_frames(run.features, options);
  return run;
}

namespace {

SelectionManifest manifest_header(const std::string& reference_id, const FeatureParams& params,
                                  const SelectOptions& options) {
  SelectionManifest m;
  m.reference_id = reference_id;
  m.weights = options.weights;
  m.params = params;
  m.seed = options.seed;
  m.normalize_features = options.normalize_features;
  m.cluster_features = options.cluster_features;
  return m;
}

void check_lengths(std::span<const std::string> ids, std::span<const FeatureVector> features) {
  if (ids.size() != features.size()) {
    throw InvalidArgument("frame id count does not match feature count");
  }
}

}  // namespace

SelectionManifest make_score_manifest(std::span<const std::string> ids,
                                      std::span<const FeatureVector> features,
                                      const std::string& reference_id,
                                      const FeatureParams& params, const SelectOptions& options) {
  check_lengths(ids, features);
  SelectionManifest m = manifest_header(reference_id, params, options);
  const auto scores = composite_scores(features, options.weights, options.normalize_features);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    FrameRecord r;
    r.id = ids[i];
    r.features = features[i];
    r.score = scores[i];
    m.frames.push_back(std::move(r));
  }
  return m;
}

SelectionManifest make_selection_manifest(std::span<const std::string> ids,
                                          std::span<const FeatureVector> features,
                                          const std::string& reference_id,
                                          const FeatureParams& params,
                                          const SelectOptions& options,
                                          const SelectionOutcome& outcome) {
  check_lengths(ids, features);
  SelectionManifest m = manifest_header(reference_id, params, options);
  m.strategy = std::string(to_string(outcome.strategy));
  m.k = static_cast<int>(outcome.selection.representatives.size());
  const auto& sel = outcome.selection;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    FrameRecord r;
    r.id = ids[i];
    r.features = features[i];
    r.score = outcome.scores[i];
    if (outcome.model) {
      r.cluster = outcome.model->assignment[i];
      r.distance = sel.distance[i];
    }
    m.frames.push_back(std::move(r));
  }
  for (auto i : sel.representatives) m.frames[i].is_representative = true;
  for (std::size_t pos = 0; pos < sel.ranking.size(); ++pos) {
    m.frames[sel.ranking[pos]].rank = static_cast<int>(pos + 1);
  }
  if (outcome.model) {
    const auto& model = *outcome.model;
    for (int c = 0; c < model.k; ++c) {
      std::vector<double> centroid;
      for (int d = 0; d < model.dims; ++d) centroid.push_back(model.centroid(c, d));
      m.centroids.push_back(std::move(centroid));
    }
  }
  return m;
}

std::vector<std::string> representative_ids(const SelectionManifest& m) {
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < m.frames.size(); ++i) {
    if (m.frames[i].is_representative) reps.push_back(i);
  }
  std::stable_sort(reps.begin(), reps.end(), [&](std::size_t a, std::size_t b) {
    return m.frames[a].cluster.value_or(0) < m.frames[b].cluster.value_or(0);
  });
  std::vector<std::string> out;
  for (auto i : reps) out.push_back(m.frames[i].id);
  return out;
}

PromptExport make_prompt_export(const DatasetManifest& dataset,
                                std::span<const std::string> frame_ids,
                                PromptStrategy strategy, std::uint64_t seed,
                                const std::map<std::string, PromptSpec>& overrides, int jobs) {
  std::set<std::string> wanted(frame_ids.begin(), frame_ids.end());
  for (const auto& [id, spec] : overrides) wanted.insert(id);

  std::vector<const FrameEntry*> frames;
  for (const auto& f : dataset.frames) {
    if (wanted.erase(f.id)) frames.push_back(&f);
  }
  if (!wanted.empty()) throw NotFound("unknown frame id '" + *wanted.begin() + "'");

  struct Slot {
    std::optional<PromptSpec> spec;
    std::string error;
  };
  std::vector<Slot> slots(frames.size());
  parallel_for(frames.size(), jobs, [&](std::size_t i) {
    const FrameEntry& f = *frames[i];
    if (auto it = overrides.find(f.id); it != overrides.end()) {
      slots[i].spec = it->second;
      slots[i].spec->frame_id = f.id;
      return;
    }
    if (!f.mask_path) {
      slots[i].error = "no mask";
      return;
    }
    try {
      slots[i].spec = derive_prompts(load_mask(*f.mask_path), strategy,
                                     derive_seed(seed, f.id), f.id);
    } catch (const Error& e) {
      slots[i].error = e.what();
    }
  });

  PromptExport out;
  out.strategy = std::string(to_string(strategy));
  out.seed = seed;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (slots[i].spec) {
      out.prompts.push_back(std::move(*slots[i].spec));
    } else {
      out.skipped.emplace_back(frames[i]->id, slots[i].error);
    }
  }
  return out;
}

std::vector<std::string> RunConfig::problems() const {
  std::vector<std::string> out;
  auto check = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      out.emplace_back(e.what());
    }
  };
  if (input_dir.empty()) out.emplace_back("--input is required");
  check([&] { params.validate(); });
  check([&] { select.weights.validate(); });
  if (select.k < 1) out.emplace_back("--k must be >= 1");
  if (jobs < 1) out.emplace_back("--jobs must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    out.emplace_back("--split-ratio must lie strictly between 0 and 1");
  }
  if (select.cluster_features && select.strategy != Strategy::kAfse) {
    out.emplace_back("--cluster-features only applies to --strategy afse");
  }
  return out;
}

PreparedRun prepare_run(const RunConfig& config) {
  PreparedRun run;
  IngestResult ingested = ingest(config.input_dir, config.mask_dir);
  run.warnings = std::move(ingested.warnings);
  run.dataset = std::move(ingested.manifest);
  split(run.dataset, config.split_ratio, config.split_seed);
  run.frames = frames_in(run.dataset, config.split);
  if (run.frames.empty()) throw InvalidArgument("the selected split contains no frames");
  for (const auto& f : run.frames) run.ids.push_back(f.id);

  if (config.reference_id) {
    auto it = std::find(run.ids.begin(), run.ids.end(), *config.reference_id);
    if (it == run.ids.end()) {
      throw NotFound("reference frame '" + *config.reference_id +
                     "' is not among the selected frames");
    }
    run.reference_index = static_cast<std::size_t>(it - run.ids.begin());
  } else {
    run.reference_index = 0;
    run.warnings.push_back("no --reference given; using first frame '" + run.ids.front() + "'");
  }
  return run;
}

}  // namespace afse

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "afse/dataset.hpp"
#include "afse/features.hpp"
#include "afse/metrics.hpp"
#include "afse/prompts.hpp"
#include "afse/selection.hpp"

namespace afse {

// Schema version written into every document; loaders reject anything else.
inline constexpr const char* kSchemaVersion = "1";

struct FrameRecord {
  std::string id;
  FeatureVector features;
  double score = 0.0;  // composite F
  std::optional<int> cluster;
  std::optional<double> distance;
  bool is_representative = false;
  std::optional<int> rank;  // 1-based among non-representatives
  bool operator==(const FrameRecord&) const = default;
};

// Per-frame scores and, once a strategy has run, the selection. A score-only
// document has strategy "none" and no k / clustering fields.
struct SelectionManifest {
  std::string strategy = "none";
  std::string reference_id;
  WeightConfig weights;
  FeatureParams params;
  std::optional<int> k;
  std::uint64_t seed = 2024;
  bool normalize_features = false;
  bool cluster_features = false;
  std::vector<std::vector<double>> centroids;  // per cluster, model dims each
  std::vector<FrameRecord> frames;
  nlohmann::json extra = nlohmann::json::object();
  bool operator==(const SelectionManifest&) const = default;
};

struct PromptExport {
  std::string strategy;
  std::uint64_t seed = 0;
  std::vector<PromptSpec> prompts;
  // Frames for which no prompt could be derived, with the reason.
  std::vector<std::pair<std::string, std::string>> skipped;
};

nlohmann::json to_json(const DatasetManifest& m);
nlohmann::json to_json(const SelectionManifest& m);
nlohmann::json to_json(const PromptSpec& p);
nlohmann::json to_json(const PromptExport& e);
nlohmann::json to_json(const EvalReport& r);

// Throw SchemaError naming the offending field, VersionError on a version
// other than kSchemaVersion.
DatasetManifest dataset_manifest_from_json(const nlohmann::json& j);
SelectionManifest selection_manifest_from_json(const nlohmann::json& j);
PromptSpec prompt_spec_from_json(const nlohmann::json& j);

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);
void save_manifest(const SelectionManifest& m, const std::filesystem::path& path);
DatasetManifest load_dataset_manifest(const std::filesystem::path& path);
SelectionManifest load_selection_manifest(const std::filesystem::path& path);

// id,B,C,E,H,S,F,cluster,distance,rank with shortest round-trip numbers;
// unset fields are left empty.
std::string scores_csv(const SelectionManifest& m);
// frame_id,dice,iou
std::string eval_csv(const EvalReport& r);

// Pretty-printed JSON with a trailing newline.
std::string dump(const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace afse

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace afse {

inline constexpr std::uint64_t kDefaultSplitSeed = 2024;
inline constexpr double kDefaultSplitRatio = 0.7;

struct FrameEntry {
  std::string id;  // filename stem
  std::filesystem::path image_path;
  std::optional<std::filesystem::path> mask_path;
  bool operator==(const FrameEntry&) const = default;
};

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> val;
  bool operator==(const Split&) const = default;
};

struct DatasetManifest {
  std::string modality;  // Der, Endo, Fundus, OCT, US, XRay, MG or free-form
  std::vector<FrameEntry> frames;
  Split split;
  std::uint64_t split_seed = kDefaultSplitSeed;
  double split_ratio = kDefaultSplitRatio;
  // Fields from newer writers, carried through load/save untouched.
  nlohmann::json extra = nlohmann::json::object();

  const FrameEntry* find(const std::string& id) const;
  std::optional<std::size_t> index_of(const std::string& id) const;
  bool operator==(const DatasetManifest&) const = default;
};

// Supported images in `dir`, sorted by filename. Throws on duplicate stems
// (a.png next to a.jpg) and on a missing directory.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);
std::map<std::string, std::filesystem::path> list_images_by_stem(const std::filesystem::path& dir);

struct IngestResult {
  DatasetManifest manifest;
  std::vector<std::string> warnings;  // unmatched masks / images without masks
};

// Builds a manifest from an image directory and an optional mask directory
// (paired by stem). The split is filled with the default ratio and seed.
IngestResult ingest(const std::filesystem::path& dir,
                    const std::optional<std::filesystem::path>& mask_dir = std::nullopt,
                    std::string modality = {});

// Deterministic split: sort ids, Fisher-Yates with splitmix64(seed), first
// ceil(ratio * N) ids go to train. Throws unless 0 < ratio < 1.
Split split_ids(std::vector<std::string> ids, double ratio = kDefaultSplitRatio,
                std::uint64_t seed = kDefaultSplitSeed);

// Re-splits a manifest in place.
void split(DatasetManifest& manifest, double ratio = kDefaultSplitRatio,
           std::uint64_t seed = kDefaultSplitSeed);

enum class SplitSelection { kAll, kTrain, kVal };
SplitSelection parse_split_selection(const std::string& name);

// Frames of the requested split, in manifest order.
std::vector<FrameEntry> frames_in(const DatasetManifest& manifest, SplitSelection which);

}  // namespace afse

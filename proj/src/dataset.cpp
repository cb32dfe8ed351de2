#include "afse/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "afse/error.hpp"
#include "afse/image_io.hpp"
#include "afse/random.hpp"

namespace afse {

namespace fs = std::filesystem;

const FrameEntry* DatasetManifest::find(const std::string& id) const {
  auto it = std::find_if(frames.begin(), frames.end(),
                         [&](const FrameEntry& f) { return f.id == id; });
  return it == frames.end() ? nullptr : &*it;
}

std::optional<std::size_t> DatasetManifest::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_supported_image(entry.path())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  std::set<std::string> stems;
  for (const auto& f : files) {
    if (!stems.insert(f.stem().string()).second) {
      throw InvalidArgument("duplicate frame id '" + f.stem().string() + "' in " + dir.string());
    }
  }
  return files;
}

std::map<std::string, fs::path> list_images_by_stem(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  for (auto& f : list_images(dir)) out.emplace(f.stem().string(), f);
  return out;
}

IngestResult ingest(const fs::path& dir, const std::optional<fs::path>& mask_dir,
                    std::string modality) {
  const auto images = list_images(dir);
  if (images.empty()) throw InvalidArgument("no PNG/JPEG images in " + dir.string());

  IngestResult result;
  result.manifest.modality = std::move(modality);
  std::map<std::string, fs::path> masks;
  if (mask_dir) masks = list_images_by_stem(*mask_dir);

  std::set<std::string> used;
  for (const auto& img : images) {
    FrameEntry entry{img.stem().string(), img, std::nullopt};
    if (mask_dir) {
      auto it = masks.find(entry.id);
      if (it != masks.end()) {
        entry.mask_path = it->second;
        used.insert(entry.id);
      } else {
        result.warnings.push_back("frame '" + entry.id + "' has no mask");
      }
    }
    result.manifest.frames.push_back(std::move(entry));
  }
  for (const auto& [stem, path] : masks) {
    if (!used.count(stem)) {
      result.warnings.push_back("mask '" + path.filename().string() + "' matches no frame");
    }
  }
  split(result.manifest);
  return result;
}

Split split_ids(std::vector<std::string> ids, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidArgument("split ratio must lie strictly between 0 and 1");
  }
  std::sort(ids.begin(), ids.end());
  SplitMix64 rng(seed);
  shuffle(std::span<std::string>(ids), rng);
  // The small slack keeps 0.7 * 10 at 7 despite binary rounding of the ratio.
  const auto n_train = static_cast<std::size_t>(
      std::ceil(ratio * static_cast<double>(ids.size()) - 1e-9));
  Split s;
  s.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  return s;
}

void split(DatasetManifest& manifest, double ratio, std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& f : manifest.frames) ids.push_back(f.id);
  manifest.split = split_ids(std::move(ids), ratio, seed);
  manifest.split_ratio = ratio;
  manifest.split_seed = seed;
}

SplitSelection parse_split_selection(const std::string& name) {
  if (name == "all") return SplitSelection::kAll;
  if (name == "train") return SplitSelection::kTrain;
  if (name == "val") return SplitSelection::kVal;
  throw InvalidArgument("unknown split '" + name + "' (expected all, train or val)");
}

std::vector<FrameEntry> frames_in(const DatasetManifest& manifest, SplitSelection which) {
  if (which == SplitSelection::kAll) return manifest.frames;
  const auto& ids = which == SplitSelection::kTrain ? manifest.split.train : manifest.split.val;
  const std::set<std::string> keep(ids.begin(), ids.end());
  std::vector<FrameEntry> out;
  for (const auto& f : manifest.frames) {
    if (keep.count(f.id)) out.push_back(f);
  }
  return out;
}

}  // namespace afse

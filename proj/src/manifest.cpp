#include "afse/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "afse/error.hpp"

namespace afse {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json& require(const json& j, const char* field) {
  if (!j.is_object() || !j.contains(field)) {
    throw SchemaError(std::string("missing required field '") + field + "'");
  }
  return j.at(field);
}

template <typename T>
T get_field(const json& j, const char* field) {
  const json& v = require(j, field);
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("field '") + field + "' has the wrong type: " + e.what());
  }
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  return get_field<T>(j, field);
}

void check_header(const json& j, const char* kind) {
  if (!j.is_object()) throw SchemaError("document is not a JSON object");
  const json& version = require(j, "version");
  if (!version.is_string() || version.get<std::string>() != kSchemaVersion) {
    throw VersionError("unsupported schema version " + version.dump() + " (expected \"" +
                       kSchemaVersion + "\")");
  }
  if (j.contains("kind") && j.at("kind") != kind) {
    throw SchemaError(std::string("expected a '") + kind + "' document, got " +
                      j.at("kind").dump());
  }
}

json collect_extra(const json& j, std::initializer_list<const char*> known) {
  std::set<std::string> names(known.begin(), known.end());
  json extra = json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!names.count(it.key())) extra[it.key()] = it.value();
  }
  return extra;
}

void merge_extra(json& j, const json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    if (!j.contains(it.key())) j[it.key()] = it.value();
  }
}

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

json parse_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": malformed JSON: " + e.what());
  }
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

json to_json(const DatasetManifest& m) {
  json frames = json::array();
  for (const auto& f : m.frames) {
    frames.push_back({{"id", f.id},
                      {"image_path", f.image_path.string()},
                      {"mask_path", f.mask_path ? json(f.mask_path->string()) : json(nullptr)}});
  }
  json j = {{"version", kSchemaVersion},
            {"kind", "dataset"},
            {"modality", m.modality},
            {"frames", frames},
            {"split", {{"train", m.split.train}, {"val", m.split.val}}},
            {"split_seed", m.split_seed},
            {"split_ratio", m.split_ratio}};
  merge_extra(j, m.extra);
  return j;
}

DatasetManifest dataset_manifest_from_json(const json& j) {
  check_header(j, "dataset");
  DatasetManifest m;
  m.modality = get_optional<std::string>(j, "modality").value_or("");
  const json& frames = require(j, "frames");
  if (!frames.is_array()) throw SchemaError("field 'frames' must be an array");
  std::set<std::string> ids;
  for (const auto& f : frames) {
    FrameEntry e;
    e.id = get_field<std::string>(f, "id");
    e.image_path = get_field<std::string>(f, "image_path");
    if (auto mp = get_optional<std::string>(f, "mask_path")) e.mask_path = *mp;
    if (!ids.insert(e.id).second) throw SchemaError("duplicate frame id '" + e.id + "'");
    m.frames.push_back(std::move(e));
  }
  const json& split = require(j, "split");
  m.split.train = get_field<std::vector<std::string>>(split, "train");
  m.split.val = get_field<std::vector<std::string>>(split, "val");
  m.split_seed = get_field<std::uint64_t>(j, "split_seed");
  m.split_ratio = get_field<double>(j, "split_ratio");
  m.extra = collect_extra(j, {"version", "kind", "modality", "frames", "split", "split_seed",
                              "split_ratio"});
  return m;
}

json to_json(const SelectionManifest& m) {
  json frames = json::array();
  for (const auto& f : m.frames) {
    frames.push_back({{"id", f.id},
                      {"B", f.features.brightness},
                      {"C", f.features.contrast},
                      {"E", f.features.edge_density},
                      {"H", f.features.hist_corr},
                      {"S", f.features.shape_sim},
                      {"F", f.score},
                      {"cluster", optional_json(f.cluster)},
                      {"distance", optional_json(f.distance)},
                      {"is_representative", f.is_representative},
                      {"rank", optional_json(f.rank)}});
  }
  const auto& p = m.params;
  json j = {{"version", kSchemaVersion},
            {"kind", "selection"},
            {"strategy", m.strategy},
            {"reference_id", m.reference_id},
            {"weights",
             {{"alpha", m.weights.alpha},
              {"beta", m.weights.beta},
              {"gamma", m.weights.gamma},
              {"delta", m.weights.delta},
              {"eps_weight", m.weights.eps_weight}}},
            {"feature_params",
             {{"canny_low", p.canny_low},
              {"canny_high", p.canny_high},
              {"gaussian_sigma", p.gaussian_sigma},
              {"hist_bins_h", p.hist_bins_h},
              {"hist_bins_s", p.hist_bins_s},
              {"hu_epsilon", p.hu_epsilon}}},
            {"k", optional_json(m.k)},
            {"seed", m.seed},
            {"normalize_features", m.normalize_features},
            {"cluster_features", m.cluster_features},
            {"centroids", m.centroids},
            {"frames", frames}};
  merge_extra(j, m.extra);
  return j;
}

SelectionManifest selection_manifest_from_json(const json& j) {
  check_header(j, "selection");
  SelectionManifest m;
  m.strategy = get_field<std::string>(j, "strategy");
  m.reference_id = get_field<std::string>(j, "reference_id");
  const json& w = require(j, "weights");
  m.weights = WeightConfig{get_field<double>(w, "alpha"), get_field<double>(w, "beta"),
                           get_field<double>(w, "gamma"), get_field<double>(w, "delta"),
                           get_field<double>(w, "eps_weight")};
  const json& p = require(j, "feature_params");
  m.params.canny_low = get_field<double>(p, "canny_low");
  m.params.canny_high = get_field<double>(p, "canny_high");
  m.params.gaussian_sigma = get_field<double>(p, "gaussian_sigma");
  m.params.hist_bins_h = get_field<int>(p, "hist_bins_h");
  m.params.hist_bins_s = get_field<int>(p, "hist_bins_s");
  m.params.hu_epsilon = get_field<double>(p, "hu_epsilon");
  m.k = get_optional<int>(j, "k");
  m.seed = get_field<std::uint64_t>(j, "seed");
  m.normalize_features = get_optional<bool>(j, "normalize_features").value_or(false);
  m.cluster_features = get_optional<bool>(j, "cluster_features").value_or(false);
  m.centroids = get_optional<std::vector<std::vector<double>>>(j, "centroids").value_or(
      std::vector<std::vector<double>>{});
  const json& frames = require(j, "frames");
  if (!frames.is_array()) throw SchemaError("field 'frames' must be an array");
  for (const auto& f : frames) {
    FrameRecord r;
    r.id = get_field<std::string>(f, "id");
    r.features.brightness = get_field<double>(f, "B");
    r.features.contrast = get_field<double>(f, "C");
    r.features.edge_density = get_field<double>(f, "E");
    r.features.hist_corr = get_field<double>(f, "H");
    r.features.shape_sim = get_field<double>(f, "S");
    r.score = get_field<double>(f, "F");
    r.cluster = get_optional<int>(f, "cluster");
    r.distance = get_optional<double>(f, "distance");
    r.is_representative = get_optional<bool>(f, "is_representative").value_or(false);
    r.rank = get_optional<int>(f, "rank");
    m.frames.push_back(std::move(r));
  }
  m.extra = collect_extra(j, {"version", "kind", "strategy", "reference_id", "weights",
                              "feature_params", "k", "seed", "normalize_features",
                              "cluster_features", "centroids", "frames"});
  return m;
}

json to_json(const PromptSpec& p) {
  json points = json::array();
  for (const auto& pt : p.points) {
    points.push_back({{"x", pt.x}, {"y", pt.y}, {"label", pt.positive ? "positive" : "negative"}});
  }
  json bbox = p.bbox ? json::array({p.bbox->xmin, p.bbox->ymin, p.bbox->xmax, p.bbox->ymax})
                     : json(nullptr);
  return {{"frame_id", p.frame_id},
          {"strategy", std::string(to_string(p.strategy))},
          {"points", points},
          {"bbox", bbox}};
}

PromptSpec prompt_spec_from_json(const json& j) {
  PromptSpec p;
  p.frame_id = get_optional<std::string>(j, "frame_id").value_or("");
  if (auto s = get_optional<std::string>(j, "strategy")) {
    try {
      p.strategy = parse_prompt_strategy(*s);
    } catch (const InvalidArgument& e) {
      throw SchemaError(e.what());
    }
  }
  if (j.contains("points") && !j.at("points").is_null()) {
    const json& points = j.at("points");
    if (!points.is_array()) throw SchemaError("field 'points' must be an array");
    for (const auto& pt : points) {
      PromptPoint q;
      q.x = get_field<int>(pt, "x");
      q.y = get_field<int>(pt, "y");
      const json& label = require(pt, "label");
      if (label == "positive" || label == 1) {
        q.positive = true;
      } else if (label == "negative" || label == 0) {
        q.positive = false;
      } else {
        throw SchemaError("field 'label' must be \"positive\" or \"negative\"");
      }
      p.points.push_back(q);
    }
  }
  if (auto b = get_optional<std::vector<int>>(j, "bbox")) {
    if (b->size() != 4) throw SchemaError("field 'bbox' must hold 4 integers");
    p.bbox = BBox{(*b)[0], (*b)[1], (*b)[2], (*b)[3]};
  }
  return p;
}

json to_json(const PromptExport& e) {
  json prompts = json::array();
  for (const auto& p : e.prompts) prompts.push_back(to_json(p));
  json skipped = json::array();
  for (const auto& [id, reason] : e.skipped) skipped.push_back({{"frame_id", id}, {"error", reason}});
  return {{"version", kSchemaVersion},
          {"strategy", e.strategy},
          {"seed", e.seed},
          {"prompts", prompts},
          {"skipped", skipped}};
}

json to_json(const EvalReport& r) {
  json frames = json::array();
  for (const auto& f : r.frames) {
    frames.push_back({{"frame_id", f.frame_id}, {"dice", f.dice}, {"iou", f.iou}});
  }
  return {{"version", kSchemaVersion},
          {"frame_count", r.frame_count()},
          {"mean_dice", r.mean_dice},
          {"mean_iou", r.mean_iou},
          {"frames", frames},
          {"missing_prediction", r.missing_prediction},
          {"missing_ground_truth", r.missing_ground_truth}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void save_manifest(const DatasetManifest& m, const fs::path& path) {
  write_text(path, dump(to_json(m)));
}

void save_manifest(const SelectionManifest& m, const fs::path& path) {
  write_text(path, dump(to_json(m)));
}

DatasetManifest load_dataset_manifest(const fs::path& path) {
  return dataset_manifest_from_json(parse_file(path));
}

SelectionManifest load_selection_manifest(const fs::path& path) {
  return selection_manifest_from_json(parse_file(path));
}

std::string scores_csv(const SelectionManifest& m) {
  std::ostringstream out;
  out << "id,B,C,E,H,S,F,cluster,distance,rank\n";
  for (const auto& f : m.frames) {
    out << f.id << ',' << num(f.features.brightness) << ',' << num(f.features.contrast) << ','
        << num(f.features.edge_density) << ',' << num(f.features.hist_corr) << ','
        << num(f.features.shape_sim) << ',' << num(f.score) << ','
        << (f.cluster ? std::to_string(*f.cluster) : "") << ','
        << (f.distance ? num(*f.distance) : "") << ','
        << (f.rank ? std::to_string(*f.rank) : "") << '\n';
  }
  return out.str();
}

std::string eval_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "frame_id,dice,iou\n";
  for (const auto& f : r.frames) out << f.frame_id << ',' << num(f.dice) << ',' << num(f.iou) << '\n';
  return out.str();
}

}  // namespace afse

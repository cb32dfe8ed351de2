#include "afse/service.hpp"

#include <iostream>
#include <thread>

#include "afse/error.hpp"
#include "afse/image_io.hpp"
#include "afse/parallel.hpp"
#include "afse/pipeline.hpp"
#include "httplib.h"

namespace afse {

using nlohmann::json;
namespace fs = std::filesystem;

struct ReviewService::State {
  std::optional<std::string> reference_id;
  std::vector<FeatureVector> features;  // against reference_id
  SelectOptions current;                // last weights / k / seed / strategy used
  std::optional<SelectionManifest> selection;
  std::string selection_key;
  std::map<std::string, PromptSpec> annotations;
};

namespace {

HttpResult json_result(int status, const json& body) { return {status, body.dump(), "application/json"}; }

HttpResult error_result(int status, const std::string& message) {
  return json_result(status, json{{"error", message}});
}

std::string content_type_for(const fs::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".png" ? "image/png" : "image/jpeg";
}

std::optional<json> parse_body(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

std::string selection_key(const std::string& reference, const FeatureParams& p,
                          const SelectOptions& o) {
  json key = {{"reference", reference},
              {"params", {p.canny_low, p.canny_high, p.gaussian_sigma, p.hist_bins_h,
                          p.hist_bins_s, p.hu_epsilon}},
              {"weights", o.weights.as_array()},
              {"k", o.k},
              {"seed", o.seed},
              {"strategy", std::string(to_string(o.strategy))},
              {"normalize", o.normalize_features},
              {"cluster_features", o.cluster_features}};
  return key.dump();
}

}  // namespace

ReviewService::ReviewService(ServiceConfig config)
    : config_(std::move(config)), state_(std::make_shared<State>()) {
  auto initial = std::make_shared<State>();
  initial->current = config_.defaults;
  state_ = initial;
}

ReviewService::~ReviewService() = default;

std::shared_ptr<const ReviewService::State> ReviewService::snapshot() const {
  std::lock_guard lock(state_mutex_);
  return state_;
}

void ReviewService::publish(std::shared_ptr<const State> next) {
  std::lock_guard lock(state_mutex_);
  state_ = std::move(next);
}

std::optional<std::size_t> ReviewService::frame_index(const std::string& id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return i;
  }
  return std::nullopt;
}

void ReviewService::initialize() {
  config_.params.validate();
  IngestResult ingested = ingest(config_.dataset_dir, config_.mask_dir);
  for (const auto& w : ingested.warnings) std::cerr << "warning: " << w << "\n";
  dataset_ = std::move(ingested.manifest);
  split(dataset_, config_.split_ratio, config_.split_seed);
  frames_ = frames_in(dataset_, config_.split);
  if (frames_.empty()) throw InvalidArgument("the selected split contains no frames");
  for (const auto& f : frames_) ids_.push_back(f.id);

  sizes_.resize(frames_.size());
  parallel_for(frames_.size(), config_.jobs, [&](std::size_t i) {
    const Raster img = load_image(frames_[i].image_path);
    sizes_[i] = {img.width(), img.height()};
  });

  initialized_ = true;
  if (config_.reference_id) {
    const HttpResult r = set_reference(json{{"frame_id", *config_.reference_id}}.dump());
    if (r.status != 200) throw NotFound("reference frame '" + *config_.reference_id + "' not found");
  }
}

HttpResult ReviewService::frames() const {
  json list = json::array();
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    list.push_back({{"id", ids_[i]},
                    {"width", sizes_[i].first},
                    {"height", sizes_[i].second},
                    {"thumbnail_url", "/api/frames/" + ids_[i] + "/thumbnail"},
                    {"image_url", "/api/frames/" + ids_[i] + "/image"}});
  }
  return json_result(200, json{{"frames", list}});
}

HttpResult ReviewService::frame_image(const std::string& id) const {
  const auto idx = frame_index(id);
  if (!idx) return error_result(404, "unknown frame '" + id + "'");
  const auto bytes = read_file_bytes(frames_[*idx].image_path);
  return {200, std::string(bytes.begin(), bytes.end()), content_type_for(frames_[*idx].image_path)};
}

HttpResult ReviewService::frame_thumbnail(const std::string& id) const {
  const auto idx = frame_index(id);
  if (!idx) return error_result(404, "unknown frame '" + id + "'");
  const Raster thumb = downscale_to_fit(load_image(frames_[*idx].image_path), config_.thumbnail_side);
  const auto png = encode_png(thumb);
  return {200, std::string(png.begin(), png.end()), "image/png"};
}

HttpResult ReviewService::set_reference(const std::string& body) {
  const auto req = parse_body(body);
  if (!req || !req->contains("frame_id") || !(*req)["frame_id"].is_string()) {
    return error_result(400, "body must be {\"frame_id\": string}");
  }
  const std::string id = (*req)["frame_id"].get<std::string>();
  const auto idx = frame_index(id);
  if (!idx) return error_result(404, "unknown frame '" + id + "'");

  std::lock_guard writer(writer_mutex_);
  auto current = snapshot();
  if (current->reference_id != id) {
    std::vector<fs::path> paths;
    for (const auto& f : frames_) paths.push_back(f.image_path);
    busy_ = true;
    progress_done_ = 0;
    progress_total_ = paths.size();
    std::vector<FeatureVector> features;
    try {
      features = compute_features(paths, *idx, config_.params, config_.jobs,
                                  [this](std::size_t done, std::size_t) { progress_done_ = done; });
    } catch (...) {
      busy_ = false;
      throw;
    }
    busy_ = false;
    auto next = std::make_shared<State>(*current);
    next->reference_id = id;
    next->features = std::move(features);
    next->selection.reset();
    next->selection_key.clear();
    publish(next);
  }
  return scores();
}

HttpResult ReviewService::scores() const {
  const auto s = snapshot();
  if (!s->reference_id) return error_result(409, "no reference frame set");
  const auto m = make_score_manifest(ids_, s->features, *s->reference_id, config_.params, s->current);
  return json_result(200, to_json(m));
}

HttpResult ReviewService::select(const std::string& body) {
  const auto req = parse_body(body.empty() ? "{}" : body);
  if (!req) return error_result(400, "body must be a JSON object");

  std::lock_guard writer(writer_mutex_);
  auto current = snapshot();
  SelectOptions options = current->current;
  try {
    if (req->contains("k")) {
      const json& k = (*req)["k"];
      if (!k.is_number_integer()) return error_result(400, "k must be an integer");
      options.k = k.get<int>();
    }
    if (req->contains("seed")) {
      const json& seed = (*req)["seed"];
      if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
        return error_result(400, "seed must be a non-negative integer");
      }
      options.seed = seed.get<std::uint64_t>();
    }
    if (req->contains("strategy")) options.strategy = parse_strategy((*req)["strategy"].get<std::string>());
    if (req->contains("weights")) {
      const json& w = (*req)["weights"];
      if (w.is_string()) {
        options.weights = WeightConfig::parse(w.get<std::string>());
      } else if (w.is_array() && w.size() == 5) {
        options.weights = WeightConfig::from_array(w.get<std::array<double, 5>>());
      } else if (w.is_object()) {
        options.weights = WeightConfig{w.value("alpha", 0.0), w.value("beta", 0.0), w.value("gamma", 0.0),
                                       w.value("delta", 0.0), w.value("eps_weight", 0.0)};
      } else {
        return error_result(400, "weights must be \"a,b,c,d,e\", a 5-array or an object");
      }
      options.weights.validate();
    }
    if (req->contains("normalize_features")) options.normalize_features = (*req)["normalize_features"].get<bool>();
    if (req->contains("cluster_features")) options.cluster_features = (*req)["cluster_features"].get<bool>();
  } catch (const json::exception& e) {
    return error_result(400, std::string("malformed request: ") + e.what());
  } catch (const InvalidArgument& e) {
    return error_result(400, e.what());
  }
  if (options.k < 1 || static_cast<std::size_t>(options.k) > ids_.size()) {
    return error_result(400, "k must lie in [1, " + std::to_string(ids_.size()) + "]");
  }
  if (options.cluster_features && options.strategy != Strategy::kAfse) {
    return error_result(400, "cluster_features only applies to the afse strategy");
  }
  if (!current->reference_id) return error_result(409, "no reference frame set");

  const std::string key = selection_key(*current->reference_id, config_.params, options);
  if (current->selection && current->selection_key == key) {
    return json_result(200, to_json(*current->selection));
  }
  busy_ = true;
  SelectionManifest manifest;
  try {
    const auto outcome = select_frames(current->features, options);
    manifest = make_selection_manifest(ids_, current->features, *current->reference_id,
                                       config_.params, options, outcome);
  } catch (...) {
    busy_ = false;
    throw;
  }
  busy_ = false;
  auto next = std::make_shared<State>(*current);
  next->current = options;
  next->selection = manifest;
  next->selection_key = key;
  publish(next);
  return json_result(200, to_json(manifest));
}

HttpResult ReviewService::put_prompt(const std::string& body) {
  const auto req = parse_body(body);
  if (!req) return error_result(400, "body must be a JSON object");
  PromptSpec spec;
  try {
    spec = prompt_spec_from_json(*req);
  } catch (const SchemaError& e) {
    return error_result(400, e.what());
  }
  const auto idx = frame_index(spec.frame_id);
  if (!idx) return error_result(404, "unknown frame '" + spec.frame_id + "'");
  const auto [w, h] = sizes_[*idx];
  for (const auto& p : spec.points) {
    if (p.x < 0 || p.y < 0 || p.x >= w || p.y >= h) {
      return error_result(400, "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                   ") lies outside the " + std::to_string(w) + "x" +
                                   std::to_string(h) + " image");
    }
  }
  if (spec.bbox) {
    const BBox& b = *spec.bbox;
    if (b.xmin < 0 || b.ymin < 0 || b.xmax >= w || b.ymax >= h || b.xmin > b.xmax ||
        b.ymin > b.ymax) {
      return error_result(400, "bbox lies outside the image or is inverted");
    }
  }
  if (spec.points.empty() && !spec.bbox) return error_result(400, "no points or bbox given");
  if (!req->contains("strategy")) {
    spec.strategy = spec.points.empty() ? PromptStrategy::kBBox : PromptStrategy::kCustom;
  }

  std::lock_guard writer(writer_mutex_);
  auto next = std::make_shared<State>(*snapshot());
  next->annotations[spec.frame_id] = spec;
  publish(next);
  return json_result(200, to_json(spec));
}

HttpResult ReviewService::export_prompts(const std::map<std::string, std::string>& query) const {
  const auto s = snapshot();
  PromptStrategy strategy = config_.prompt_strategy;
  std::uint64_t seed = s->selection ? s->selection->seed : s->current.seed;
  try {
    if (auto it = query.find("strategy"); it != query.end()) strategy = parse_prompt_strategy(it->second);
    if (auto it = query.find("seed"); it != query.end()) seed = std::stoull(it->second);
  } catch (const std::exception& e) {
    return error_result(400, std::string("bad query: ") + e.what());
  }
  if (strategy == PromptStrategy::kCustom) return error_result(400, "custom prompts cannot be derived");
  std::vector<std::string> reps;
  if (s->selection) reps = representative_ids(*s->selection);
  const PromptExport doc = make_prompt_export(dataset_, reps, strategy, seed, s->annotations, config_.jobs);
  return json_result(200, to_json(doc));
}

HttpResult ReviewService::status() const {
  const auto s = snapshot();
  return json_result(200, json{{"initialized", initialized()},
                               {"busy", busy_.load()},
                               {"progress", {{"done", progress_done_.load()}, {"total", progress_total_.load()}}},
                               {"reference_id", s->reference_id ? json(*s->reference_id) : json(nullptr)},
                               {"has_selection", s->selection.has_value()},
                               {"frame_count", initialized() ? ids_.size() : 0},
                               {"annotations", s->annotations.size()}});
}

void ReviewService::mount(httplib::Server& server) {
  auto send = [](httplib::Response& res, const HttpResult& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  // Wraps a handler with the initialization guard and error mapping.
  auto guarded = [this, send](auto handler) {
    return [this, send, handler](const httplib::Request& req, httplib::Response& res) {
      if (!initialized()) {
        send(res, error_result(503, "dataset is still loading"));
        return;
      }
      try {
        send(res, handler(req));
      } catch (const NotFound& e) {
        send(res, error_result(404, e.what()));
      } catch (const InvalidArgument& e) {
        send(res, error_result(400, e.what()));
      } catch (const std::exception& e) {
        send(res, error_result(500, e.what()));
      }
    };
  };

  server.Get("/api/status", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, status());
  });
  server.Get("/api/frames", guarded([this](const httplib::Request&) { return frames(); }));
  server.Get(R"(/api/frames/([^/]+)/thumbnail)", guarded([this](const httplib::Request& req) {
               return frame_thumbnail(req.matches[1]);
             }));
  server.Get(R"(/api/frames/([^/]+)/image)", guarded([this](const httplib::Request& req) {
               return frame_image(req.matches[1]);
             }));
  server.Post("/api/reference", guarded([this](const httplib::Request& req) { return set_reference(req.body); }));
  server.Get("/api/scores", guarded([this](const httplib::Request&) { return scores(); }));
  server.Post("/api/select", guarded([this](const httplib::Request& req) { return select(req.body); }));
  server.Post("/api/prompts", guarded([this](const httplib::Request& req) { return put_prompt(req.body); }));
  server.Get("/api/export", guarded([this](const httplib::Request& req) {
               std::map<std::string, std::string> query;
               for (const auto& [k, v] : req.params) query[k] = v;
               return export_prompts(query);
             }));
  if (config_.ui_dir) server.set_mount_point("/", config_.ui_dir->string());
}

int serve(const ServiceConfig& config) {
  ReviewService service(config);
  httplib::Server server;
  service.mount(server);
  int rc = 0;
  std::thread init([&] {
    try {
      service.initialize();
      std::cerr << "dataset ready: " << config.dataset_dir.string() << "\n";
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      rc = 1;
      server.stop();
    }
  });
  std::cerr << "listening on http://" << config.host << ":" << config.port << "\n";
  if (!server.listen(config.host, config.port)) {
    if (rc == 0) {
      std::cerr << "error: cannot listen on " << config.host << ":" << config.port << "\n";
      rc = 1;
    }
  }
  init.join();
  return rc;
}

}  // namespace afse

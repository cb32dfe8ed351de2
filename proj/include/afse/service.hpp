#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "afse/dataset.hpp"
#include "afse/features.hpp"
#include "afse/manifest.hpp"
#include "afse/prompts.hpp"
#include "afse/selection.hpp"

namespace httplib {
class Server;
}

namespace afse {

struct ServiceConfig {
  std::filesystem::path dataset_dir;
  std::optional<std::filesystem::path> mask_dir;
  std::optional<std::filesystem::path> ui_dir;
  std::optional<std::string> reference_id;  // preset reference, else none
  std::string host = "127.0.0.1";
  int port = 8080;
  FeatureParams params;
  SelectOptions defaults;  // k, seed, strategy, weights used when a request omits them
  PromptStrategy prompt_strategy = PromptStrategy::kBBox;
  SplitSelection split = SplitSelection::kAll;
  double split_ratio = kDefaultSplitRatio;
  std::uint64_t split_seed = kDefaultSplitSeed;
  int jobs = 1;
  int thumbnail_side = 256;
};

struct HttpResult {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Single-session backend for the clinician review loop. Every number it
// serves comes from the same library calls as the batch CLI.
//
// Mutations (reference change, selection, annotations) are serialized by one
// writer lock and publish a complete new state snapshot when done; readers
// only ever see whole snapshots.
class ReviewService {
 public:
  explicit ReviewService(ServiceConfig config);
  ~ReviewService();

  ReviewService(const ReviewService&) = delete;
  ReviewService& operator=(const ReviewService&) = delete;

  // Ingests the dataset and probes frame sizes. Endpoints answer 503 until
  // this has completed.
  void initialize();
  bool initialized() const { return initialized_.load(); }

  HttpResult frames() const;
  HttpResult frame_image(const std::string& id) const;
  HttpResult frame_thumbnail(const std::string& id) const;
  HttpResult set_reference(const std::string& body);
  HttpResult scores() const;
  HttpResult select(const std::string& body);
  HttpResult put_prompt(const std::string& body);
  HttpResult export_prompts(const std::map<std::string, std::string>& query) const;
  HttpResult status() const;

  // Registers the /api routes (and the UI bundle, if configured).
  void mount(httplib::Server& server);

 private:
  struct State;
  std::shared_ptr<const State> snapshot() const;
  void publish(std::shared_ptr<const State> next);
  std::optional<std::size_t> frame_index(const std::string& id) const;

  ServiceConfig config_;
  std::atomic<bool> initialized_{false};

  // Immutable after initialize().
  DatasetManifest dataset_;
  std::vector<FrameEntry> frames_;
  std::vector<std::string> ids_;
  std::vector<std::pair<int, int>> sizes_;

  mutable std::mutex state_mutex_;  // guards state_ pointer swaps only
  std::shared_ptr<const State> state_;
  std::mutex writer_mutex_;         // serializes mutations

  std::atomic<bool> busy_{false};
  std::atomic<std::size_t> progress_done_{0};
  std::atomic<std::size_t> progress_total_{0};
};

// Starts the HTTP server and blocks. Initialization runs in the background so
// the server answers (503) while the dataset loads.
int serve(const ServiceConfig& config);

}  // namespace afse

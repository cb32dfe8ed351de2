#include "afse/cli.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "afse/error.hpp"
#include "afse/manifest.hpp"
#include "afse/metrics.hpp"
#include "afse/pipeline.hpp"
#include "afse/service.hpp"

namespace afse {

namespace fs = std::filesystem;

namespace {

// Raw flag values; converted into a RunConfig after parsing so that all
// problems can be reported together.
struct Flags {
  std::string input;
  std::string masks;
  std::string reference;
  int k = 5;
  std::uint64_t seed = 2024;
  std::string strategy = "afse";
  std::string weights = "0.2,0.2,0.2,0.2,0.2";
  double canny_low = 50.0;
  double canny_high = 150.0;
  double sigma = 1.4;
  int bins_h = 32;
  int bins_s = 32;
  double hu_epsilon = 1e-10;
  bool normalize = false;
  bool cluster_features = false;
  std::string split = "all";
  double split_ratio = kDefaultSplitRatio;
  std::uint64_t split_seed = kDefaultSplitSeed;
  int jobs = 1;
  std::string out = ".";
  std::string prompt_strategy = "bbox";
};

class UsageError : public Error {
 public:
  using Error::Error;
};

void add_input_flags(CLI::App* cmd, Flags& f, const std::string& input_name = "--input") {
  cmd->add_option(input_name, f.input, "Directory of frames (PNG/JPEG)")->required();
  cmd->add_option("--masks", f.masks, "Directory of masks paired with frames by filename stem");
  cmd->add_option("--reference", f.reference, "Reference frame id (default: first frame)");
  cmd->add_option("--split", f.split, "Frames to use: all, train or val")
      ->check(CLI::IsMember({"all", "train", "val"}))
      ->capture_default_str();
  cmd->add_option("--split-ratio", f.split_ratio, "Train fraction of the split")
      ->capture_default_str();
  cmd->add_option("--split-seed", f.split_seed, "Seed of the train/val split")
      ->capture_default_str();
  cmd->add_option("--jobs", f.jobs, "Worker threads for per-frame work")->capture_default_str();
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
}

void add_feature_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--weights", f.weights, "Weights for B,C,E,H,S as a,b,c,d,e")
      ->capture_default_str();
  cmd->add_option("--canny-low", f.canny_low, "Canny low threshold")->capture_default_str();
  cmd->add_option("--canny-high", f.canny_high, "Canny high threshold")->capture_default_str();
  cmd->add_option("--sigma", f.sigma, "Gaussian blur sigma (5x5 kernel)")->capture_default_str();
  cmd->add_option("--bins-h", f.bins_h, "Hue histogram bins")->capture_default_str();
  cmd->add_option("--bins-s", f.bins_s, "Saturation histogram bins")->capture_default_str();
  cmd->add_option("--hu-epsilon", f.hu_epsilon, "Smoothing constant of the shape score")
      ->capture_default_str();
  cmd->add_flag("--normalize-features", f.normalize,
                "Min-max scale each feature over the frames before weighting");
}

void add_select_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--k", f.k, "Number of representative frames")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for k-means++ seeding, random selection and prompt sampling")
      ->capture_default_str();
  cmd->add_option("--strategy", f.strategy, "afse, random, uniform or afse-wo-scorer")
      ->check(CLI::IsMember({"afse", "random", "uniform", "afse-wo-scorer"}))
      ->capture_default_str();
  cmd->add_flag("--cluster-features", f.cluster_features,
                "Cluster the 5-D feature vectors instead of the composite score");
}

RunConfig to_config(const Flags& f) {
  std::vector<std::string> problems;
  RunConfig c;
  c.input_dir = f.input;
  if (!f.masks.empty()) c.mask_dir = fs::path(f.masks);
  if (!f.reference.empty()) c.reference_id = f.reference;
  c.params.canny_low = f.canny_low;
  c.params.canny_high = f.canny_high;
  c.params.gaussian_sigma = f.sigma;
  c.params.hist_bins_h = f.bins_h;
  c.params.hist_bins_s = f.bins_s;
  c.params.hu_epsilon = f.hu_epsilon;
  try {
    c.select.weights = WeightConfig::parse(f.weights);
  } catch (const Error& e) {
    problems.emplace_back(e.what());
  }
  c.select.k = f.k;
  c.select.seed = f.seed;
  c.select.strategy = parse_strategy(f.strategy);
  c.select.normalize_features = f.normalize;
  c.select.cluster_features = f.cluster_features;
  c.split = parse_split_selection(f.split);
  c.split_ratio = f.split_ratio;
  c.split_seed = f.split_seed;
  c.jobs = f.jobs;
  c.out_dir = f.out;
  try {
    c.prompt_strategy = parse_prompt_strategy(f.prompt_strategy);
    if (c.prompt_strategy == PromptStrategy::kCustom) {
      problems.emplace_back("--prompt-strategy custom cannot be derived from masks");
    }
  } catch (const Error& e) {
    problems.emplace_back(e.what());
  }
  for (auto& p : c.problems()) problems.push_back(std::move(p));
  if (!problems.empty()) {
    std::string joined = "invalid configuration:";
    for (const auto& p : problems) joined += "\n  - " + p;
    throw UsageError(joined);
  }
  return c;
}

std::string weights_text(const WeightConfig& w) {
  return fmt::format("{},{},{},{},{}", w.alpha, w.beta, w.gamma, w.delta, w.eps_weight);
}

// Values the method leaves open are printed so every run records them.
void print_header(std::ostream& err, const char* command, const RunConfig& c,
                  const PreparedRun& run) {
  const auto& p = c.params;
  err << fmt::format(
      "# afse {}: frames={} reference={} weights={} canny={}/{} sigma={} bins={}x{} "
      "hu_epsilon={} normalize={} split={} split_ratio={} split_seed={} jobs={}\n",
      command, run.ids.size(), run.ids[run.reference_index], weights_text(c.select.weights),
      p.canny_low, p.canny_high, p.gaussian_sigma, p.hist_bins_h, p.hist_bins_s, p.hu_epsilon,
      c.select.normalize_features ? "on" : "off",
      c.split == SplitSelection::kAll ? "all" : (c.split == SplitSelection::kTrain ? "train" : "val"),
      c.split_ratio, c.split_seed, c.jobs);
  for (const auto& w : run.warnings) err << "warning: " << w << "\n";
}

PreparedRun prepare_or_usage(const RunConfig& c) {
  try {
    return prepare_run(c);
  } catch (const NotFound& e) {
    throw UsageError(e.what());
  }
}

void check_k(const RunConfig& c, const PreparedRun& run) {
  if (static_cast<std::size_t>(c.select.k) > run.ids.size()) {
    throw UsageError(fmt::format("--k {} exceeds the number of frames ({})", c.select.k,
                                 run.ids.size()));
  }
}

std::vector<fs::path> image_paths(const PreparedRun& run) {
  std::vector<fs::path> out;
  for (const auto& f : run.frames) out.push_back(f.image_path);
  return out;
}

SelectionManifest run_selection(const RunConfig& c, const PreparedRun& run) {
  const auto paths = image_paths(run);
  const auto features = compute_features(paths, run.reference_index, c.params, c.jobs);
  const auto outcome = select_frames(features, c.select);
  return make_selection_manifest(run.ids, features, run.ids[run.reference_index], c.params,
                                 c.select, outcome);
}

int cmd_score(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig c = to_config(f);
  const PreparedRun run = prepare_or_usage(c);
  print_header(err, "score", c, run);
  const auto paths = image_paths(run);
  const auto features = compute_features(paths, run.reference_index, c.params, c.jobs);
  const auto manifest =
      make_score_manifest(run.ids, features, run.ids[run.reference_index], c.params, c.select);
  write_text(c.out_dir / "scores.csv", scores_csv(manifest));
  save_manifest(manifest, c.out_dir / "scores.json");
  out << "scored " << manifest.frames.size() << " frames -> " << (c.out_dir / "scores.csv").string()
      << "\n";
  return kExitOk;
}

int cmd_select(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig c = to_config(f);
  const PreparedRun run = prepare_or_usage(c);
  check_k(c, run);
  print_header(err, "select", c, run);
  const auto manifest = run_selection(c, run);
  write_text(c.out_dir / "selection.csv", scores_csv(manifest));
  save_manifest(manifest, c.out_dir / "selection.json");
  out << "strategy " << manifest.strategy << ": representatives";
  for (const auto& id : representative_ids(manifest)) out << ' ' << id;
  out << "\n";
  return kExitOk;
}

int cmd_prompts(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig c = to_config(f);
  const PreparedRun run = prepare_or_usage(c);
  check_k(c, run);
  print_header(err, "prompts", c, run);
  const auto manifest = run_selection(c, run);
  const auto reps = representative_ids(manifest);
  const PromptExport doc =
      make_prompt_export(run.dataset, reps, c.prompt_strategy, c.select.seed, {}, c.jobs);
  write_text(c.out_dir / "prompts.json", dump(to_json(doc)));
  for (const auto& [id, reason] : doc.skipped) err << "skipped " << id << ": " << reason << "\n";
  out << "prompts for " << doc.prompts.size() << " of " << reps.size() << " frames ("
      << doc.strategy << ")\n";
  return doc.prompts.empty() ? kExitRuntime : kExitOk;
}

int cmd_eval(const std::string& pred, const std::string& gt, const std::string& out_dir, int jobs,
             std::ostream& out, std::ostream& err) {
  if (jobs < 1) throw UsageError("--jobs must be >= 1");
  const EvalReport report = evaluate_run(pred, gt, jobs);
  write_text(fs::path(out_dir) / "eval.csv", eval_csv(report));
  write_text(fs::path(out_dir) / "eval.json", dump(to_json(report)));
  for (const auto& id : report.missing_prediction) err << "skipped " << id << ": no prediction\n";
  for (const auto& id : report.missing_ground_truth) err << "skipped " << id << ": no ground truth\n";
  out << fmt::format("frames {} mean_dice {} mean_iou {} skipped {}\n", report.frame_count(),
                     report.mean_dice, report.mean_iou,
                     report.missing_prediction.size() + report.missing_ground_truth.size());
  return kExitOk;
}

int cmd_ingest(const Flags& f, const std::string& modality, std::ostream& out, std::ostream& err) {
  if (!(f.split_ratio > 0.0 && f.split_ratio < 1.0)) {
    throw UsageError("--split-ratio must lie strictly between 0 and 1");
  }
  std::optional<fs::path> masks;
  if (!f.masks.empty()) masks = fs::path(f.masks);
  IngestResult result = ingest(f.input, masks, modality);
  split(result.manifest, f.split_ratio, f.split_seed);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  save_manifest(result.manifest, fs::path(f.out) / "dataset.json");
  out << fmt::format("{} frames, train {} / val {}\n", result.manifest.frames.size(),
                     result.manifest.split.train.size(), result.manifest.split.val.size());
  return kExitOk;
}

int cmd_serve(const Flags& f, const std::string& host, int port, const std::string& ui) {
  const RunConfig c = to_config(f);
  ServiceConfig s;
  s.dataset_dir = c.input_dir;
  s.mask_dir = c.mask_dir;
  if (!ui.empty()) s.ui_dir = fs::path(ui);
  s.reference_id = c.reference_id;
  s.host = host;
  s.port = port;
  s.params = c.params;
  s.defaults = c.select;
  s.prompt_strategy = c.prompt_strategy;
  s.split = c.split;
  s.split_ratio = c.split_ratio;
  s.split_seed = c.split_seed;
  s.jobs = c.jobs;
  return serve(s);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reference-frame scoring, representative frame selection and prompt tooling"};
  app.name("afse");
  app.require_subcommand(1);

  Flags score_f, select_f, prompts_f, serve_f, ingest_f;
  auto* score = app.add_subcommand("score", "Score every frame against the reference");
  add_input_flags(score, score_f);
  add_feature_flags(score, score_f);

  auto* select = app.add_subcommand("select", "Score, cluster and pick representative frames");
  add_input_flags(select, select_f);
  add_feature_flags(select, select_f);
  add_select_flags(select, select_f);

  auto* prompts = app.add_subcommand("prompts", "Derive prompts for the representative frames");
  add_input_flags(prompts, prompts_f);
  add_feature_flags(prompts, prompts_f);
  add_select_flags(prompts, prompts_f);
  prompts->add_option("--prompt-strategy", prompts_f.prompt_strategy,
                      "standard_pos, random_pos, single_neg, single_pos_neg, four_pos, four_neg, "
                      "single_pos_two_neg, two_pos_four_neg or bbox")
      ->capture_default_str();

  std::string pred, gt, eval_out = ".";
  int eval_jobs = 1;
  auto* eval = app.add_subcommand("eval", "Dice / IoU of predicted masks against ground truth");
  eval->add_option("--pred", pred, "Directory of predicted masks")->required();
  eval->add_option("--gt", gt, "Directory of ground-truth masks")->required();
  eval->add_option("--out", eval_out, "Output directory")->capture_default_str();
  eval->add_option("--jobs", eval_jobs, "Worker threads")->capture_default_str();

  std::string modality;
  auto* ingest_cmd = app.add_subcommand("ingest", "Write a dataset manifest with its train/val split");
  ingest_cmd->add_option("--input", ingest_f.input, "Directory of frames")->required();
  ingest_cmd->add_option("--masks", ingest_f.masks, "Directory of masks");
  ingest_cmd->add_option("--modality", modality, "Modality tag (Der, Endo, Fundus, OCT, US, XRay, MG, ...)");
  ingest_cmd->add_option("--split-ratio", ingest_f.split_ratio, "Train fraction")->capture_default_str();
  ingest_cmd->add_option("--split-seed", ingest_f.split_seed, "Split seed")->capture_default_str();
  ingest_cmd->add_option("--out", ingest_f.out, "Output directory")->capture_default_str();

  std::string host = "127.0.0.1", ui;
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Run the review service for one dataset");
  add_input_flags(serve_cmd, serve_f, "--dataset,--input");
  add_feature_flags(serve_cmd, serve_f);
  add_select_flags(serve_cmd, serve_f);
  serve_cmd->add_option("--prompt-strategy", serve_f.prompt_strategy, "Default export strategy")
      ->capture_default_str();
  serve_cmd->add_option("--port", port, "Listen port")->capture_default_str();
  serve_cmd->add_option("--host", host, "Listen address")->capture_default_str();
  serve_cmd->add_option("--ui", ui, "Directory of the built UI bundle to serve statically");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*score) return cmd_score(score_f, out, err);
    if (*select) return cmd_select(select_f, out, err);
    if (*prompts) return cmd_prompts(prompts_f, out, err);
    if (*eval) return cmd_eval(pred, gt, eval_out, eval_jobs, out, err);
    if (*ingest_cmd) return cmd_ingest(ingest_f, modality, out, err);
    if (*serve_cmd) return cmd_serve(serve_f, host, port, ui);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace afse

// Release gate: one check per acceptance criterion, each printing a single
// PASS/FAIL line. Exit status is nonzero if any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "afse/cli.hpp"
#include "afse/dataset.hpp"
#include "afse/features.hpp"
#include "afse/kmeans.hpp"
#include "afse/manifest.hpp"
#include "afse/metrics.hpp"
#include "afse/pipeline.hpp"
#include "afse/prompts.hpp"
#include "afse/selection.hpp"
#include "afse/service.hpp"
#include "httplib.h"
#include "oracles/oracles.hpp"
#include "support/synth.hpp"

using namespace afse;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Collects failures of one criterion; the first few are reported.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) {
      ++failures_;
      if (messages_.size() < 5) messages_.push_back(what);
    }
  }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    if (ok()) return fmt::format("{} checks", checks_);
    std::string s = fmt::format("{} of {} checks failed", failures_, checks_);
    for (const auto& m : messages_) s += "; " + m;
    return s;
  }
  std::string note;

 private:
  int checks_ = 0;
  int failures_ = 0;
  std::vector<std::string> messages_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

// Hu invariant i scales like phi1^p for p = 1, 2, 3, 3, 6, 4, 6, so
// differences are measured relative to the larger of the value itself and
// that natural magnitude. Invariants that vanish by symmetry are compared at
// the scale they would have for a generic shape.
bool hu_close(const HuMoments& a, const HuMoments& b, double rel) {
  static constexpr int kOrder[7] = {1, 2, 3, 3, 6, 4, 6};
  const double phi1 = std::max(std::fabs(a[0]), std::fabs(b[0]));
  for (int i = 0; i < 7; ++i) {
    const double scale = std::max({std::fabs(a[i]), std::fabs(b[i]), std::pow(phi1, kOrder[i])});
    if (std::fabs(a[i] - b[i]) > rel * scale) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Check feature_formula_suite() {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  const FeatureParams p;

  std::vector<Raster> corpus;
  for (std::uint8_t v : {0, 1, 77, 128, 255}) corpus.push_back(synth::constant(24, 20, v, 3));
  corpus.push_back(synth::checkerboard(32, 32, 1, 0, 255));
  corpus.push_back(synth::checkerboard(32, 32, 4, 30, 220));
  corpus.push_back(synth::checkerboard(40, 24, 7, 200, 10));
  corpus.push_back(synth::step(16, 16, 8, 0, 255));
  corpus.push_back(synth::step(32, 20, 11, 200, 40));
  corpus.push_back(synth::ramp(48, 16));
  corpus.push_back(synth::disk(40, 40, 19.5, 20.3, 11.0, {255, 255, 255}, {0, 0, 0}));
  corpus.push_back(synth::disk(64, 48, 20, 25, 9, {220, 70, 40}, {15, 20, 35}));
  corpus.push_back(synth::disk(64, 48, 41, 20, 14, {40, 200, 90}, {90, 30, 120}));
  corpus.push_back(synth::noise(48, 40, 3, 1));
  corpus.push_back(synth::noise(48, 40, 1, 2));
  const Raster shape = synth::asymmetric_shape(96, 80, 8, 6);
  const Raster shifted = synth::asymmetric_shape(96, 80, 50, 44);
  const Raster turned = synth::rotate90(shape);
  const Raster flipped = synth::rotate90(turned);
  const Raster scaled = synth::upscale(shape, 2);
  for (const Raster* r : {&shape, &shifted, &turned, &flipped, &scaled}) corpus.push_back(*r);
  Raster square = synth::constant(32, 32, 0);
  for (int y = 11; y < 21; ++y)
    for (int x = 11; x < 21; ++x) square.at(x, y) = 255;
  corpus.push_back(square);
  c.expect(corpus.size() >= 20, "corpus has fewer than 20 images");

  const Raster& ref = corpus[12];  // colored disk
  const Histogram2D ref_hist = hsv_histogram(ref, p);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Raster& img = corpus[i];
    const Raster gray = to_grayscale(img);
    c.expect(gray == oracle::gray(img), fmt::format("image {}: grayscale", i));
    c.expect(brightness(gray) == oracle::brightness(gray), fmt::format("image {}: B", i));
    c.expect(contrast(gray) == oracle::contrast(gray), fmt::format("image {}: C", i));
    const auto edges = oracle::canny(gray, gaussian_taps(p.gaussian_sigma), std::llround(p.canny_low),
                                     std::llround(p.canny_high));
    c.expect(canny(gray, p).data == edges, fmt::format("image {}: Canny edge map", i));
    std::size_t marked = 0;
    for (auto v : edges) marked += v ? 1 : 0;
    c.expect(edge_density(canny(gray, p)) == static_cast<double>(marked) / static_cast<double>(edges.size()),
             fmt::format("image {}: E", i));
    const Histogram2D h = hsv_histogram(img, p);
    double total = 0;
    for (double v : h.counts) total += v;
    c.expect(total == static_cast<double>(img.pixel_count()), fmt::format("image {}: histogram mass", i));
    const double hc = hist_correlation(h, ref_hist);
    bool flat = std::all_of(h.counts.begin(), h.counts.end(), [&](double v) { return v == h.counts[0]; });
    if (!flat) c.expect(std::fabs(hc - oracle::pearson(h.counts, ref_hist.counts)) <= 1e-12, fmt::format("image {}: H", i));
    c.expect(hist_correlation(ref_hist, h) == hc, fmt::format("image {}: H symmetry", i));
    if (brightness(gray) > 0) {
      const HuMoments hu = hu_moments(gray);
      const auto o = oracle::hu(gray);
      HuMoments ho;
      for (int k = 0; k < 7; ++k) ho[k] = static_cast<double>(o[k]);
      c.expect(hu_close(hu, ho, 1e-9), fmt::format("image {}: Hu vs raw-moment oracle", i));
    }
  }

  const HuMoments base = hu_moments(shape);
  c.expect(hu_close(base, hu_moments(shifted), 1e-6), "Hu under translation");
  c.expect(hu_close(base, hu_moments(turned), 1e-3), "Hu under 90 degree rotation");
  c.expect(hu_close(base, hu_moments(flipped), 1e-3), "Hu under 180 degree rotation");
  const Raster disk_small = to_grayscale(synth::disk(64, 64, 31.5, 31.5, 20, {255, 255, 255}, {0, 0, 0}));
  const Raster disk_large = to_grayscale(synth::disk(128, 128, 63.5, 63.5, 40, {255, 255, 255}, {0, 0, 0}));
  c.expect(hu_close(hu_moments(disk_small), hu_moments(disk_large), 1e-3), "Hu under x2 scale (disk)");
  c.expect(hu_close(base, hu_moments(scaled), 1e-3), "Hu under x2 pixel-replication scale");

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 10.0, fmt::format("runtime {:.2f}s exceeds 10s", secs));
  c.note = fmt::format("{} images, {:.2f}s", corpus.size(), secs);
  return c;
}

Check composite_linearity_and_anchor() {
  Check c;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1), s(0, 23.1);
  for (int t = 0; t < 1000; ++t) {
    const FeatureVector fv{std::fabs(u(rng)), std::fabs(u(rng)) / 2, std::fabs(u(rng)), u(rng), s(rng)};
    const WeightConfig w{u(rng), u(rng), u(rng), u(rng), u(rng)};
    long double hand = 0;
    hand += static_cast<long double>(w.alpha) * fv.brightness;
    hand += static_cast<long double>(w.beta) * fv.contrast;
    hand += static_cast<long double>(w.gamma) * fv.edge_density;
    hand += static_cast<long double>(w.delta) * fv.hist_corr;
    hand += static_cast<long double>(w.eps_weight) * fv.shape_sim;
    c.expect(std::fabs(composite_score(fv, w) - static_cast<double>(hand)) <= 1e-12, fmt::format("hand sum {}", t));
  }
  const FeatureParams p;
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    const Raster img = synth::disk(48, 40, 20 + seed, 18, 8 + seed, {200, 90, 40}, {10, 20, 30});
    const FeatureVector fv = extract_features(img, make_reference_profile(img, p), p);
    c.expect(std::fabs(fv.shape_sim - (-std::log(1e-10))) <= 1e-9, "S anchor");
    c.expect(fv.hist_corr == 1.0, "H of reference against itself");
  }
  return c;
}

Check kmeans_optimality() {
  Check c;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-5.0, 25.0);
  int runs = 0;
  for (int instance = 0; instance < 100; ++instance) {
    const int n = 2 + static_cast<int>(rng() % 7);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    if (n > 3 && instance % 5 == 0) v[2] = v[1];
    for (int k = 2; k <= std::min(3, n); ++k) {
      const ClusterModel m = kmeans_fit(v, k, instance);
      ++runs;
      const long double best = oracle::best_contiguous_split(v, k);
      if (k == 2) {
        c.expect(oracle::labelled_cost(v, m.assignment, k) == best,
                 fmt::format("instance {} k=2: objective not optimal", instance));
        c.expect(std::fabs(m.objective - static_cast<double>(best)) <= 1e-12 * (1 + static_cast<double>(best)),
                 fmt::format("instance {} k=2: reported objective", instance));
      } else {
        c.expect(std::fabs(m.objective - static_cast<double>(best)) <= 1e-9,
                 fmt::format("instance {} k=3: {} vs {}", instance, m.objective, static_cast<double>(best)));
      }
      for (std::size_t t = 1; t < m.objective_trace.size(); ++t) {
        c.expect(m.objective_trace[t] <= m.objective_trace[t - 1],
                 fmt::format("instance {} k={}: objective rose at iteration {}", instance, k, t));
      }
      // Both starting points must descend monotonically, not only the winner.
      const ClusterModel from_pp = lloyd(v, 1, kmeanspp_init(v, 1, k, instance));
      for (std::size_t t = 1; t < from_pp.objective_trace.size(); ++t) {
        c.expect(from_pp.objective_trace[t] <= from_pp.objective_trace[t - 1],
                 fmt::format("instance {} k={}: k-means++ run rose", instance, k));
      }
    }
  }
  c.note = fmt::format("{} fits", runs);
  return c;
}

Check selection_contracts() {
  Check c;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0, 1), s(2, 23);
  for (int instance = 0; instance < 200; ++instance) {
    const int n = 5 + static_cast<int>(rng() % 60);
    const int k = 1 + static_cast<int>(rng() % std::min(n, 10));
    std::vector<FeatureVector> f(n);
    for (auto& fv : f) fv = {u(rng), u(rng) / 2, u(rng), 2 * u(rng) - 1, std::round(s(rng))};
    if (instance % 3 == 0)
      for (auto& fv : f) fv = {0.5, 0.25, 0.1, 1.0, std::round(s(rng) / 4)};  // heavy ties
    SelectOptions o;
    o.k = k;
    o.seed = instance;
    const SelectionOutcome out = select_frames(f, o);
    const ClusterModel& m = *out.model;
    const auto& sel = out.selection;
    c.expect(sel.representatives.size() == static_cast<std::size_t>(k), fmt::format("instance {}: count", instance));
    std::set<int> clusters;
    for (int cl = 0; cl < k && cl < static_cast<int>(sel.representatives.size()); ++cl) {
      const std::size_t rep = sel.representatives[cl];
      clusters.insert(m.assignment[rep]);
      std::size_t best = static_cast<std::size_t>(n);
      double best_d = 0;
      for (int i = 0; i < n; ++i) {
        if (m.assignment[i] != cl) continue;
        const double d = std::fabs(out.scores[i] - m.centroid(cl));
        if (best == static_cast<std::size_t>(n) || d < best_d) {
          best = i;
          best_d = d;
        }
      }
      c.expect(rep == best, fmt::format("instance {} cluster {}: rep {} vs rescan {}", instance, cl, rep, best));
    }
    c.expect(clusters.size() == static_cast<std::size_t>(k), fmt::format("instance {}: one per cluster", instance));
    c.expect(sel.ranking.size() == static_cast<std::size_t>(n - k), fmt::format("instance {}: ranking size", instance));
    for (std::size_t pos = 1; pos < sel.ranking.size(); ++pos) {
      const auto a = sel.ranking[pos - 1], b = sel.ranking[pos];
      c.expect(sel.distance[a] < sel.distance[b] || (sel.distance[a] == sel.distance[b] && a < b),
               fmt::format("instance {}: ranking order at {}", instance, pos));
    }
  }
  return c;
}

Check determinism(const synth::Sequence& seq, const fs::path& scratch) {
  Check c;
  const std::string in = seq.images.string(), masks = seq.masks.string();
  struct Cmd {
    std::string name;
    std::vector<std::string> args;
    std::vector<std::string> files;
  };
  const std::vector<Cmd> cmds = {
      {"score", {"score", "--input", in, "--reference", seq.ids[3]}, {"scores.csv", "scores.json"}},
      {"select", {"select", "--input", in, "--k", "5", "--seed", "11"}, {"selection.csv", "selection.json"}},
      {"select-normalized", {"select", "--input", in, "--k", "4", "--normalize-features", "--strategy", "afse-wo-scorer"},
       {"selection.csv", "selection.json"}},
      {"prompts", {"prompts", "--input", in, "--masks", masks, "--k", "5", "--prompt-strategy", "two_pos_four_neg"},
       {"prompts.json"}},
  };
  for (const auto& cmd : cmds) {
    std::vector<std::string> outputs;
    for (const auto& [tag, jobs] : std::vector<std::pair<std::string, std::string>>{{"a", "1"}, {"b", "1"}, {"c", "8"}}) {
      const fs::path out = scratch / (cmd.name + "-" + tag);
      auto args = cmd.args;
      args.insert(args.end(), {"--jobs", jobs, "--out", out.string()});
      c.expect(cli(args) == 0, cmd.name + " exited nonzero");
      std::string all;
      for (const auto& f : cmd.files) all += slurp(out / f) + '\x1f';
      outputs.push_back(all);
    }
    c.expect(outputs[0] == outputs[1], cmd.name + ": two runs differ");
    c.expect(outputs[0] == outputs[2], cmd.name + ": --jobs 1 and --jobs 8 differ");
    c.expect(outputs[0].size() > 100, cmd.name + ": empty output");
  }
  return c;
}

Check table2_scaffolding(const fs::path& scratch) {
  Check c;
  const auto seq = synth::drifting_disk(scratch / "seq100", 100, 96, 64);
  std::vector<fs::path> paths;
  for (const auto& id : seq.ids) paths.push_back(seq.images / (id + ".png"));
  const FeatureParams params;
  const auto features = compute_features(paths, 0, params, 2);
  constexpr int kR = 5;

  std::map<Strategy, SelectionOutcome> results;
  for (auto s : {Strategy::kRandom, Strategy::kUniform, Strategy::kAfseWoScorer, Strategy::kAfse}) {
    SelectOptions o;
    o.strategy = s;
    o.k = kR;
    const auto out = select_frames(features, o);
    const auto& reps = out.selection.representatives;
    std::set<std::size_t> uniq(reps.begin(), reps.end());
    c.expect(reps.size() == kR && uniq.size() == kR && *uniq.rbegin() < 100,
             fmt::format("{}: not a valid {}-frame subset", to_string(s), kR));
    results.emplace(s, out);
  }

  const SelectionOutcome& afse = results.at(Strategy::kAfse);
  const ClusterModel& model = *afse.model;
  auto mean_distance = [&](const std::vector<std::size_t>& frames) {
    double total = 0;
    for (auto i : frames) total += std::fabs(afse.scores[i] - model.centroid(model.assignment[i]));
    return total / static_cast<double>(frames.size());
  };
  const double d_afse = mean_distance(afse.selection.representatives);
  const double d_random = mean_distance(results.at(Strategy::kRandom).selection.representatives);
  c.expect(d_afse < d_random, fmt::format("afse {} not below random {}", d_afse, d_random));
  c.note = fmt::format("mean within-cluster distance afse {:.4g} vs random {:.4g}", d_afse, d_random);
  return c;
}

Check prompt_suite() {
  Check c;
  std::mt19937 rng(99);
  int masks = 0;
  for (int t = 0; t < 100; ++t) {
    const int w = 24 + static_cast<int>(rng() % 40), h = 24 + static_cast<int>(rng() % 40);
    Mask m = synth::random_blob_mask(w, h, rng);
    if (t % 10 == 0) m = synth::random_noise_mask(w, h, 0.3, rng);
    if (m.foreground_count() < 4) continue;
    ++masks;
    // Minimal enclosing box by brute force over every candidate box edge.
    int xmin = w, ymin = h, xmax = -1, ymax = -1;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (m.at(x, y)) {
          xmin = std::min(xmin, x);
          ymin = std::min(ymin, y);
          xmax = std::max(xmax, x);
          ymax = std::max(ymax, y);
        }
    const BBox box = derive_bbox(m);
    c.expect(box == (BBox{xmin, ymin, xmax, ymax}), fmt::format("mask {}: bbox", t));
    for (auto s : kAllPromptStrategies) {
      const PromptSpec spec = derive_prompts(m, s, static_cast<std::uint64_t>(t), "f");
      c.expect(spec == derive_prompts(m, s, static_cast<std::uint64_t>(t), "f"),
               fmt::format("mask {} {}: not deterministic", t, to_string(s)));
      if (s == PromptStrategy::kBBox) {
        c.expect(spec.bbox && *spec.bbox == box && spec.points.empty(), fmt::format("mask {}: bbox prompt", t));
        continue;
      }
      int pos = 0, neg = 0;
      for (const auto& p : spec.points) {
        (p.positive ? pos : neg)++;
        c.expect(m.contains(p.x, p.y) && m.at(p.x, p.y) == p.positive,
                 fmt::format("mask {} {}: point ({}, {}) on wrong side", t, to_string(s), p.x, p.y));
      }
      const PointCounts want = point_counts(s);
      c.expect(pos == want.positive && neg == want.negative,
               fmt::format("mask {} {}: {} pos / {} neg", t, to_string(s), pos, neg));
    }
  }
  c.expect(masks >= 90, "too few usable masks");
  c.note = fmt::format("{} masks x {} strategies", masks, std::size(kAllPromptStrategies));
  return c;
}

Check metrics_suite(const synth::Sequence& seq) {
  Check c;
  std::mt19937 rng(5);
  for (int t = 0; t < 100; ++t) {
    const int w = 8 + static_cast<int>(rng() % 30), h = 8 + static_cast<int>(rng() % 30);
    const Mask a = t % 2 ? synth::random_blob_mask(w, h, rng) : synth::random_noise_mask(w, h, 0.01 * t, rng);
    const Mask b = synth::random_noise_mask(w, h, 0.5 * (t % 3), rng);
    const double d = dice(a, b), j = iou(a, b);
    c.expect(std::fabs(d - oracle::dice(a, b)) <= 1e-12, fmt::format("pair {}: dice", t));
    c.expect(std::fabs(j - oracle::iou(a, b)) <= 1e-12, fmt::format("pair {}: iou", t));
    c.expect(std::fabs(d - 2 * j / (1 + j)) <= 1e-12, fmt::format("pair {}: dice/iou identity", t));
  }
  const EvalReport r = evaluate_run(seq.masks, seq.masks, 4);
  c.expect(r.mean_dice == 1.0 && r.mean_iou == 1.0, "pred == gt means are not 1");
  c.expect(r.frame_count() == seq.ids.size(), "pred == gt pairing incomplete");
  return c;
}

Check split_reproducibility() {
  Check c;
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) ids.push_back(fmt::format("frame_{:02d}", i));
  const Split a = split_ids(ids, 0.7, 2024);
  const Split b = split_ids(ids, 0.7, 2024);
  c.expect(a.train.size() == 7 && a.val.size() == 3, "sizes are not 7/3");
  c.expect(a == b, "two runs differ");
  // Pinned (cross-checked by an independent splitmix64 + Fisher-Yates
  // script) so any platform or library drift shows up.
  const Split pinned{{"frame_09", "frame_00", "frame_06", "frame_03", "frame_04", "frame_02", "frame_05"},
                     {"frame_07", "frame_08", "frame_01"}};
  c.expect(a == pinned, fmt::format("split changed: val {}", fmt::join(a.val, ",")));
  return c;
}

Check service_cli_equivalence(const synth::Sequence& seq, const fs::path& scratch) {
  Check c;
  ServiceConfig config;
  config.dataset_dir = seq.images;
  config.mask_dir = seq.masks;
  ReviewService service(config);
  httplib::Server server;
  service.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  service.initialize();
  httplib::Client client("127.0.0.1", port);

  const std::string in = seq.images.string(), masks = seq.masks.string();
  const std::string ref = seq.ids[7];
  auto fetch = [&](httplib::Result res) -> json {
    if (!res || res->status != 200) return json();
    return json::parse(res->body);
  };
  auto cli_doc = [&](std::vector<std::string> args, const std::string& file) -> json {
    const fs::path out = scratch / ("equiv-" + args[0]);
    args.insert(args.end(), {"--out", out.string()});
    if (cli(args) != 0) return json();
    return json::parse(slurp(out / file));
  };

  fetch(client.Post("/api/reference", json{{"frame_id", ref}}.dump(), "application/json"));
  const json scores = fetch(client.Get("/api/scores"));
  c.expect(!scores.is_null() && scores == cli_doc({"score", "--input", in, "--reference", ref}, "scores.json"),
           "/api/scores differs from score");

  for (const auto& [k, seed, strategy] :
       std::vector<std::tuple<int, int, std::string>>{{5, 2024, "afse"}, {3, 9, "random"}, {5, 1, "afse-wo-scorer"}}) {
    const json sel = fetch(client.Post("/api/select", json{{"k", k}, {"seed", seed}, {"strategy", strategy}}.dump(),
                                       "application/json"));
    c.expect(!sel.is_null() && sel == cli_doc({"select", "--input", in, "--reference", ref, "--k", std::to_string(k),
                                               "--seed", std::to_string(seed), "--strategy", strategy},
                                              "selection.json"),
             "/api/select differs from select (" + strategy + ")");
    for (const std::string prompt : {"bbox", "single_pos_two_neg", "four_pos"}) {
      const json exp = fetch(client.Get(("/api/export?strategy=" + prompt).c_str()));
      c.expect(!exp.is_null() &&
                   exp == cli_doc({"prompts", "--input", in, "--masks", masks, "--reference", ref, "--k",
                                   std::to_string(k), "--seed", std::to_string(seed), "--strategy", strategy,
                                   "--prompt-strategy", prompt},
                                  "prompts.json"),
               "/api/export differs from prompts (" + strategy + ", " + prompt + ")");
    }
  }
  server.stop();
  listener.join();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::string only = argc > 1 ? argv[1] : "";
  synth::TempDir scratch("afse-acceptance");
  const auto fixture = synth::drifting_disk(scratch / "fixture20", 20);

  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"feature-formula-suite", feature_formula_suite},
      {"composite-linearity-and-anchor", composite_linearity_and_anchor},
      {"kmeans-optimality-oracle", kmeans_optimality},
      {"selection-contracts", selection_contracts},
      {"determinism", [&] { return determinism(fixture, scratch.path()); }},
      {"strategy-scaffolding-100-frames", [&] { return table2_scaffolding(scratch.path()); }},
      {"prompt-suite", prompt_suite},
      {"metrics-suite", [&] { return metrics_suite(fixture); }},
      {"split-reproducibility", split_reproducibility},
      {"service-cli-equivalence", [&] { return service_cli_equivalence(fixture, scratch.path()); }},
  };

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && name != only) continue;
    Check c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    if (!c.ok()) ++failed;
    std::cout << fmt::format("{} {} ({}{})", c.ok() ? "PASS" : "FAIL", name, c.summary(),
                             c.note.empty() ? "" : "; " + c.note)
              << std::endl;
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : fmt::format("{} criteria failed", failed))
            << std::endl;
  return failed == 0 ? 0 : 1;
}

// Python bindings for the core operations. Images cross the boundary as
// uint8 numpy arrays (H x W or H x W x 3); manifests as JSON strings that the
// package wrapper decodes.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "afse/cli.hpp"
#include "afse/error.hpp"
#include "afse/features.hpp"
#include "afse/image_io.hpp"
#include "afse/kmeans.hpp"
#include "afse/manifest.hpp"
#include "afse/metrics.hpp"
#include "afse/pipeline.hpp"
#include "afse/prompts.hpp"
#include "afse/selection.hpp"

namespace py = pybind11;
using namespace afse;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Raster to_raster(const U8Array& a) {
  if (a.ndim() == 2) {
    const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
    return Raster(w, h, 1, std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
  }
  if (a.ndim() == 3 && (a.shape(2) == 3 || a.shape(2) == 1)) {
    const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
    return Raster(w, h, static_cast<int>(a.shape(2)),
                  std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
  }
  throw InvalidArgument("expected an H x W or H x W x 3 uint8 array");
}

U8Array from_raster(const Raster& r) {
  std::vector<py::ssize_t> shape = {r.height(), r.width()};
  if (r.channels() > 1) shape.push_back(r.channels());
  U8Array out(shape);
  std::copy(r.data().begin(), r.data().end(), out.mutable_data());
  return out;
}

Mask to_mask(const py::array& a) {
  const auto arr = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(a);
  if (!arr || arr.ndim() != 2) throw InvalidArgument("expected an H x W mask array");
  const int h = static_cast<int>(arr.shape(0)), w = static_cast<int>(arr.shape(1));
  Mask m(w, h);
  const auto* p = arr.data();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, p[static_cast<std::size_t>(y) * w + x] != 0);
  return m;
}

FeatureParams make_params(double canny_low, double canny_high, double sigma, int bins_h, int bins_s,
                          double hu_epsilon) {
  FeatureParams p;
  p.canny_low = canny_low;
  p.canny_high = canny_high;
  p.gaussian_sigma = sigma;
  p.hist_bins_h = bins_h;
  p.hist_bins_s = bins_s;
  p.hu_epsilon = hu_epsilon;
  p.validate();
  return p;
}

py::dict feature_dict(const FeatureVector& f) {
  py::dict d;
  d["B"] = f.brightness;
  d["C"] = f.contrast;
  d["E"] = f.edge_density;
  d["H"] = f.hist_corr;
  d["S"] = f.shape_sim;
  return d;
}

FeatureVector feature_from(const py::dict& d) {
  return {d["B"].cast<double>(), d["C"].cast<double>(), d["E"].cast<double>(), d["H"].cast<double>(),
          d["S"].cast<double>()};
}

WeightConfig weights_from(const std::array<double, 5>& w) {
  WeightConfig c = WeightConfig::from_array(w);
  c.validate();
  return c;
}

RunConfig run_config(const std::filesystem::path& input, const std::optional<std::string>& reference,
                     const std::optional<std::filesystem::path>& masks, int jobs) {
  RunConfig c;
  c.input_dir = input;
  c.reference_id = reference;
  c.mask_dir = masks;
  c.jobs = jobs;
  return c;
}

std::string score_dir(const std::filesystem::path& input, const std::optional<std::string>& reference,
                      int jobs) {
  RunConfig c = run_config(input, reference, std::nullopt, jobs);
  const PreparedRun run = prepare_run(c);
  std::vector<std::filesystem::path> paths;
  for (const auto& f : run.frames) paths.push_back(f.image_path);
  const auto features = compute_features(paths, run.reference_index, c.params, jobs);
  return to_json(make_score_manifest(run.ids, features, run.ids[run.reference_index], c.params, c.select))
      .dump();
}

std::string select_dir(const std::filesystem::path& input, int k, std::uint64_t seed, const std::string& strategy,
                       const std::optional<std::string>& reference, const std::array<double, 5>& weights,
                       bool normalize_features, bool cluster_features, int jobs) {
  RunConfig c = run_config(input, reference, std::nullopt, jobs);
  c.select.k = k;
  c.select.seed = seed;
  c.select.strategy = parse_strategy(strategy);
  c.select.weights = weights_from(weights);
  c.select.normalize_features = normalize_features;
  c.select.cluster_features = cluster_features;
  const PreparedRun run = prepare_run(c);
  std::vector<std::filesystem::path> paths;
  for (const auto& f : run.frames) paths.push_back(f.image_path);
  const auto features = compute_features(paths, run.reference_index, c.params, jobs);
  const auto outcome = select_frames(features, c.select);
  return to_json(make_selection_manifest(run.ids, features, run.ids[run.reference_index], c.params, c.select,
                                         outcome))
      .dump();
}

}  // namespace

PYBIND11_MODULE(_afse, m) {
  m.doc() = "Adaptive frame selection: features, clustering, prompts and metrics";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NotFound>(m, "NotFound", PyExc_KeyError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

  m.def("load_image", [](const std::filesystem::path& p) { return from_raster(load_image(p)); }, py::arg("path"));
  m.def("load_mask", [](const std::filesystem::path& p) {
    const Mask mask = load_mask(p);
    py::array_t<bool> out({mask.height(), mask.width()});
    auto* o = out.mutable_data();
    for (int y = 0; y < mask.height(); ++y)
      for (int x = 0; x < mask.width(); ++x) o[static_cast<std::size_t>(y) * mask.width() + x] = mask.at(x, y);
    return out;
  }, py::arg("path"));
  m.def("to_grayscale", [](const U8Array& img) { return from_raster(to_grayscale(to_raster(img))); },
        py::arg("image"));

  m.def("brightness", [](const U8Array& img) { return brightness(to_grayscale(to_raster(img))); },
        py::arg("image"));
  m.def("contrast", [](const U8Array& img) { return contrast(to_grayscale(to_raster(img))); }, py::arg("image"));
  m.def("edge_map", [](const U8Array& img, double low, double high, double sigma) {
    FeatureParams p;
    p.canny_low = low;
    p.canny_high = high;
    p.gaussian_sigma = sigma;
    p.validate();
    const EdgeMap e = canny(to_grayscale(to_raster(img)), p);
    return from_raster(Raster(e.width, e.height, 1, e.data));
  }, py::arg("image"), py::arg("canny_low") = 50.0, py::arg("canny_high") = 150.0, py::arg("sigma") = 1.4);
  m.def("hu_moments", [](const U8Array& img) { return hu_moments(to_grayscale(to_raster(img))); },
        py::arg("image"));

  m.def("features", [](const U8Array& img, const U8Array& ref, double canny_low, double canny_high, double sigma,
                       int bins_h, int bins_s, double hu_epsilon) {
    const FeatureParams p = make_params(canny_low, canny_high, sigma, bins_h, bins_s, hu_epsilon);
    return feature_dict(extract_features(to_raster(img), make_reference_profile(to_raster(ref), p), p));
  }, py::arg("image"), py::arg("reference"), py::arg("canny_low") = 50.0, py::arg("canny_high") = 150.0,
        py::arg("sigma") = 1.4, py::arg("bins_h") = 32, py::arg("bins_s") = 32, py::arg("hu_epsilon") = 1e-10,
        "B, C, E, H, S of an image against a reference image.");

  m.def("composite_score", [](const py::dict& f, const std::array<double, 5>& w) {
    return composite_score(feature_from(f), weights_from(w));
  }, py::arg("features"), py::arg("weights") = std::array<double, 5>{0.2, 0.2, 0.2, 0.2, 0.2});

  m.def("kmeans", [](const std::vector<double>& scores, int k, std::uint64_t seed) {
    const ClusterModel model = kmeans_fit(scores, k, seed);
    py::dict d;
    d["centroids"] = model.centroids;
    d["assignment"] = model.assignment;
    d["objective"] = model.objective;
    d["objective_trace"] = model.objective_trace;
    d["init"] = model.init;
    return d;
  }, py::arg("scores"), py::arg("k"), py::arg("seed") = 2024, "Scalar k-means with ascending cluster labels.");

  m.def("select_representatives", [](const std::vector<double>& scores, int k, std::uint64_t seed) {
    const ClusterModel model = kmeans_fit(scores, k, seed);
    const SelectionResult r = select_representatives(model, scores);
    return py::make_tuple(r.representatives, r.ranking);
  }, py::arg("scores"), py::arg("k"), py::arg("seed") = 2024,
        "Representative indices (one per cluster) and the ranking of the rest.");

  m.def("_score_dir", &score_dir, py::arg("input"), py::arg("reference") = py::none(), py::arg("jobs") = 1);
  m.def("_select_dir", &select_dir, py::arg("input"), py::arg("k") = 5, py::arg("seed") = 2024,
        py::arg("strategy") = "afse", py::arg("reference") = py::none(),
        py::arg("weights") = std::array<double, 5>{0.2, 0.2, 0.2, 0.2, 0.2}, py::arg("normalize_features") = false,
        py::arg("cluster_features") = false, py::arg("jobs") = 1);

  m.def("_derive_prompts", [](const py::array& mask, const std::string& strategy, std::uint64_t seed,
                              const std::string& frame_id) {
    return to_json(derive_prompts(to_mask(mask), parse_prompt_strategy(strategy), seed, frame_id)).dump();
  }, py::arg("mask"), py::arg("strategy") = "bbox", py::arg("seed") = 2024, py::arg("frame_id") = "");

  m.def("dice", [](const py::array& a, const py::array& b) { return dice(to_mask(a), to_mask(b)); });
  m.def("iou", [](const py::array& a, const py::array& b) { return iou(to_mask(a), to_mask(b)); });

  m.def("split_ids", [](std::vector<std::string> ids, double ratio, std::uint64_t seed) {
    const Split s = split_ids(std::move(ids), ratio, seed);
    return py::make_tuple(s.train, s.val);
  }, py::arg("ids"), py::arg("ratio") = kDefaultSplitRatio, py::arg("seed") = kDefaultSplitSeed);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the afse command line in-process; returns (exit_code, stdout, stderr).");
}

#include "afse/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "afse/error.hpp"
#include "afse/random.hpp"

namespace afse {

void WeightConfig::validate() const {
  bool any_nonzero = false;
  for (double w : as_array()) {
    if (!std::isfinite(w)) throw InvalidArgument("weights must be finite");
    any_nonzero = any_nonzero || w != 0.0;
  }
  if (!any_nonzero) throw InvalidArgument("at least one weight must be nonzero");
}

WeightConfig WeightConfig::from_array(const std::array<double, 5>& w) {
  return WeightConfig{w[0], w[1], w[2], w[3], w[4]};
}

WeightConfig WeightConfig::parse(std::string_view text) {
  std::array<double, 5> w{};
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string token(text.substr(pos, comma - pos));
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t") + 1);
    if (count == 5) throw InvalidArgument("--weights takes exactly 5 values");
    std::size_t used = 0;
    try {
      w[count] = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (token.empty() || used != token.size()) {
      throw InvalidArgument("invalid weight value '" + token + "'");
    }
    ++count;
    pos = comma + 1;
  }
  if (count != 5) throw InvalidArgument("--weights takes exactly 5 values");
  WeightConfig cfg = from_array(w);
  cfg.validate();
  return cfg;
}

double composite_score(const FeatureVector& fv, const WeightConfig& w) {
  return w.alpha * fv.brightness + w.beta * fv.contrast + w.gamma * fv.edge_density +
         w.delta * fv.hist_corr + w.eps_weight * fv.shape_sim;
}

std::vector<FeatureVector> normalize_features(std::span<const FeatureVector> features) {
  std::vector<FeatureVector> out(features.begin(), features.end());
  if (features.empty()) return out;
  for (int f = 0; f < 5; ++f) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& fv : features) {
      lo = std::min(lo, fv.as_array()[f]);
      hi = std::max(hi, fv.as_array()[f]);
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < features.size(); ++i) {
      const double v = range > 0.0 ? (features[i].as_array()[f] - lo) / range : 0.0;
      switch (f) {
        case 0: out[i].brightness = v; break;
        case 1: out[i].contrast = v; break;
        case 2: out[i].edge_density = v; break;
        case 3: out[i].hist_corr = v; break;
        default: out[i].shape_sim = v; break;
      }
    }
  }
  return out;
}

SelectionResult select_representatives(const ClusterModel& model,
                                       std::span<const double> points) {
  const int dims = model.dims;
  const std::size_t n = model.assignment.size();
  if (points.size() != n * static_cast<std::size_t>(dims)) {
    throw InvalidArgument("point count does not match the cluster model");
  }
  SelectionResult result;
  result.distance.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = model.assignment[i];
    double s = 0.0;
    for (int d = 0; d < dims; ++d) {
      const double t = points[i * dims + d] - model.centroid(c, d);
      s += t * t;
    }
    result.distance[i] = dims == 1 ? std::fabs(points[i] - model.centroid(c)) : std::sqrt(s);
  }

  std::vector<std::size_t> best(model.k, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& b = best[model.assignment[i]];
    if (b == n || result.distance[i] < result.distance[b]) b = i;
  }
  std::vector<bool> is_rep(n, false);
  for (int c = 0; c < model.k; ++c) {
    if (best[c] == n) throw InvalidArgument("cluster model has an empty cluster");
    result.representatives.push_back(best[c]);
    is_rep[best[c]] = true;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!is_rep[i]) result.ranking.push_back(i);
  }
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [&](std::size_t a, std::size_t b) {
                     return result.distance[a] < result.distance[b];
                   });
  return result;
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kAfse: return "afse";
    case Strategy::kRandom: return "random";
    case Strategy::kUniform: return "uniform";
    case Strategy::kAfseWoScorer: return "afse-wo-scorer";
  }
  return "afse";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "afse") return Strategy::kAfse;
  if (name == "random") return Strategy::kRandom;
  if (name == "uniform") return Strategy::kUniform;
  if (name == "afse-wo-scorer") return Strategy::kAfseWoScorer;
  throw InvalidArgument("unknown selection strategy '" + std::string(name) + "'");
}

namespace {

void check_r(std::size_t n, std::size_t r) {
  if (r < 1 || r > n) {
    throw InvalidArgument("selection count " + std::to_string(r) + " out of range [1, " +
                          std::to_string(n) + "]");
  }
}

}  // namespace

std::vector<std::size_t> select_random(std::size_t n, std::size_t r, std::uint64_t seed) {
  check_r(n, r);
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  SplitMix64 rng(seed);
  shuffle(std::span<std::size_t>(ids), rng);
  ids.resize(r);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::size_t> select_uniform(std::size_t n, std::size_t r) {
  check_r(n, r);
  std::vector<bool> used(n, false);
  std::vector<std::size_t> ids;
  for (std::size_t j = 0; j < r; ++j) {
    // floor(j (n-1) / (r-1) + 1/2) in integers.
    const std::size_t idx = r == 1 ? 0 : (2 * j * (n - 1) + (r - 1)) / (2 * (r - 1));
    if (!used[idx]) {
      used[idx] = true;
      ids.push_back(idx);
    }
  }
  for (std::size_t i = 0; i < n && ids.size() < r; ++i) {
    if (!used[i]) {
      used[i] = true;
      ids.push_back(i);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<double> unweighted_feature_means(std::span<const FeatureVector> features) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& fv : features) {
    lo = std::min(lo, fv.shape_sim);
    hi = std::max(hi, fv.shape_sim);
  }
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& fv : features) {
    const double s = hi > lo ? (fv.shape_sim - lo) / (hi - lo) : 0.0;
    out.push_back((fv.brightness + fv.contrast + fv.edge_density + fv.hist_corr + s) / 5.0);
  }
  return out;
}

std::vector<double> composite_scores(std::span<const FeatureVector> features,
                                     const WeightConfig& weights, bool normalize) {
  weights.validate();
  std::vector<FeatureVector> scaled;
  if (normalize) scaled = normalize_features(features);
  std::span<const FeatureVector> input = normalize ? std::span<const FeatureVector>(scaled) : features;
  std::vector<double> scores;
  scores.reserve(input.size());
  for (const auto& fv : input) scores.push_back(composite_score(fv, weights));
  return scores;
}

SelectionOutcome select_frames(std::span<const FeatureVector> features,
                               const SelectOptions& options) {
  const std::size_t n = features.size();
  if (options.k < 1 || static_cast<std::size_t>(options.k) > n) {
    throw InvalidArgument("k = " + std::to_string(options.k) + " out of range [1, " +
                          std::to_string(n) + "]");
  }
  SelectionOutcome out;
  out.strategy = options.strategy;
  out.scores = composite_scores(features, options.weights, options.normalize_features);
  const auto k = static_cast<std::size_t>(options.k);

  auto complete_plain = [&](std::vector<std::size_t> chosen) {
    std::vector<bool> taken(n, false);
    for (auto i : chosen) taken[i] = true;
    out.selection.representatives = std::move(chosen);
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) out.selection.ranking.push_back(i);
    }
  };

  switch (options.strategy) {
    case Strategy::kRandom:
      complete_plain(select_random(n, k, options.seed));
      break;
    case Strategy::kUniform:
      complete_plain(select_uniform(n, k));
      break;
    case Strategy::kAfseWoScorer: {
      const auto means = unweighted_feature_means(features);
      out.model = kmeans_fit(means, options.k, options.seed, options.kmeans);
      out.selection = select_representatives(*out.model, means);
      break;
    }
    case Strategy::kAfse: {
      if (options.cluster_features) {
        std::vector<FeatureVector> vecs =
            options.normalize_features ? normalize_features(features)
                                       : std::vector<FeatureVector>(features.begin(), features.end());
        std::vector<double> points;
        points.reserve(n * 5);
        for (const auto& fv : vecs) {
          for (double v : fv.as_array()) points.push_back(v);
        }
        out.model = kmeans_fit_nd(points, 5, options.k, options.seed, options.kmeans);
        out.selection = select_representatives(*out.model, points);
      } else {
        out.model = kmeans_fit(out.scores, options.k, options.seed, options.kmeans);
        out.selection = select_representatives(*out.model, out.scores);
      }
      break;
    }
  }
  return out;
}

}  // namespace afse

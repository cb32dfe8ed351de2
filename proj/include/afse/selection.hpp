#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afse/features.hpp"
#include "afse/kmeans.hpp"

namespace afse {

// Weights for B, C, E, H, S in the composite score.
struct WeightConfig {
  double alpha = 0.2;
  double beta = 0.2;
  double gamma = 0.2;
  double delta = 0.2;
  double eps_weight = 0.2;

  void validate() const;
  std::array<double, 5> as_array() const { return {alpha, beta, gamma, delta, eps_weight}; }
  static WeightConfig from_array(const std::array<double, 5>& w);
  // Parses "a,b,c,d,e".
  static WeightConfig parse(std::string_view text);
  bool operator==(const WeightConfig&) const = default;
};

double composite_score(const FeatureVector& fv, const WeightConfig& w);

// Min-max rescales each of the five features to [0, 1] over the set. A
// feature that is constant over the set maps to 0.
std::vector<FeatureVector> normalize_features(std::span<const FeatureVector> features);

// Representatives (one per cluster, nearest its centroid, lowest index on
// ties) and the remaining frames ranked by ascending centroid distance.
struct SelectionResult {
  std::vector<std::size_t> representatives;  // ordered by cluster
  std::vector<std::size_t> ranking;          // non-representatives, best first
  std::vector<double> distance;              // per frame, to its own centroid
};

// `points` holds model.dims values per frame.
SelectionResult select_representatives(const ClusterModel& model,
                                       std::span<const double> points);

enum class Strategy { kAfse, kRandom, kUniform, kAfseWoScorer };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

// r distinct indices from a seeded shuffle, returned sorted.
std::vector<std::size_t> select_random(std::size_t n, std::size_t r, std::uint64_t seed);

// round-half-up(j (N-1) / (r-1)) for j = 0..r-1, deduplicated and padded
// from the lowest unused indices; sorted.
std::vector<std::size_t> select_uniform(std::size_t n, std::size_t r);

// Unweighted per-frame mean of (B, C, E, H, S'), S' being S min-max scaled
// over the set. This is the clustering input of the scorer-free ablation.
std::vector<double> unweighted_feature_means(std::span<const FeatureVector> features);

struct SelectOptions {
  Strategy strategy = Strategy::kAfse;
  WeightConfig weights;
  int k = 5;
  std::uint64_t seed = 2024;
  bool normalize_features = false;
  // Cluster the five-dimensional feature vectors instead of the scalar score.
  bool cluster_features = false;
  KMeansOptions kmeans;
};

struct SelectionOutcome {
  Strategy strategy = Strategy::kAfse;
  std::vector<double> scores;          // composite F per frame
  std::optional<ClusterModel> model;   // absent for random / uniform
  SelectionResult selection;
};

// Composite scores only (no clustering), honouring normalize_features.
std::vector<double> composite_scores(std::span<const FeatureVector> features,
                                     const WeightConfig& weights, bool normalize);

// Runs the chosen strategy over precomputed per-frame features.
SelectionOutcome select_frames(std::span<const FeatureVector> features,
                               const SelectOptions& options);

}  // namespace afse

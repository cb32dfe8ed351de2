#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace afse {

struct KMeansOptions {
  int max_iterations = 100;
  // Stop once (previous - current) / previous objective drops below this.
  double tolerance = 1e-6;
};

// Result of a k-means fit over N points of dimension `dims`.
//
// Invariants after a fit: every cluster is non-empty, each centroid is the
// mean of its members, and `objective` is the sum of squared distances of
// every point to its own centroid.
struct ClusterModel {
  int k = 0;
  int dims = 1;
  std::vector<double> centroids;  // k * dims, row-major
  std::vector<int> assignment;    // per point, in [0, k)
  double objective = 0.0;
  // Objective after each Lloyd iteration of the winning run.
  std::vector<double> objective_trace;
  // "kmeans++" or "interval-dp": which start produced the winning run.
  std::string init;

  double centroid(int cluster, int d = 0) const {
    return centroids[static_cast<std::size_t>(cluster) * dims + d];
  }
};

// k-means++ seeding; returns k centroids (k * dims values).
std::vector<double> kmeanspp_init(std::span<const double> points, int dims, int k,
                                  std::uint64_t seed);

// Lloyd iterations from the given centroids. Empty clusters are repaired by
// moving the point farthest from its own centroid into them.
ClusterModel lloyd(std::span<const double> points, int dims, std::vector<double> centroids,
                   const KMeansOptions& options = {});

// Globally optimal k-partition of scalar values. Optimal 1-D clusters are
// contiguous in sorted order, so a dynamic program over split points finds
// the minimum. Returns a cluster label per input value, labels ascending with
// value.
std::vector<int> optimal_partition_1d(std::span<const double> values, int k);

// Scalar k-means. Runs Lloyd from a seeded k-means++ start and from the
// optimal interval partition and keeps the lower objective, so the fit always
// reaches the global minimum. Clusters are relabelled by ascending centroid.
// Throws InvalidArgument unless 1 <= k <= N.
ClusterModel kmeans_fit(std::span<const double> scores, int k, std::uint64_t seed,
                        const KMeansOptions& options = {});

// Multi-dimensional variant (k-means++ start only).
ClusterModel kmeans_fit_nd(std::span<const double> points, int dims, int k,
                           std::uint64_t seed, const KMeansOptions& options = {});

// Sum of squared distances of each point to the mean of its cluster.
double partition_objective(std::span<const double> points, int dims,
                           std::span<const int> assignment, int k);

}  // namespace afse

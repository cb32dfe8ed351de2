#include "afse/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "afse/error.hpp"
#include "afse/random.hpp"

namespace afse {

namespace {

std::size_t point_count(std::span<const double> points, int dims) {
  if (dims < 1 || points.size() % static_cast<std::size_t>(dims) != 0) {
    throw InvalidArgument("point buffer is not a multiple of the dimension");
  }
  return points.size() / static_cast<std::size_t>(dims);
}

void check_k(int k, std::size_t n) {
  if (k < 1) throw InvalidArgument("k must be >= 1, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > n) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds the number of frames (" +
                          std::to_string(n) + ")");
  }
}

double sq_dist(const double* a, const double* b, int dims) {
  double s = 0.0;
  for (int d = 0; d < dims; ++d) {
    const double t = a[d] - b[d];
    s += t * t;
  }
  return s;
}

// Recomputes centroids as member means; returns false if a cluster is empty.
void update_centroids(std::span<const double> points, int dims,
                      const std::vector<int>& assignment, int k,
                      std::vector<double>& centroids) {
  std::vector<double> sums(static_cast<std::size_t>(k) * dims, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int c = assignment[i];
    ++counts[c];
    for (int d = 0; d < dims; ++d) sums[c * dims + d] += points[i * dims + d];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (int d = 0; d < dims; ++d) {
      centroids[c * dims + d] = sums[c * dims + d] / static_cast<double>(counts[c]);
    }
  }
}

double objective_of(std::span<const double> points, int dims,
                    const std::vector<int>& assignment,
                    const std::vector<double>& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    total += sq_dist(&points[i * dims], &centroids[assignment[i] * dims], dims);
  }
  return total;
}

// Relabels clusters so centroids ascend (first dimension, then first member).
void sort_clusters(ClusterModel& model) {
  const int k = model.k;
  const int dims = model.dims;
  std::vector<std::size_t> first_member(k, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < model.assignment.size(); ++i) {
    auto& f = first_member[model.assignment[i]];
    f = std::min(f, i);
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ca = model.centroid(a), cb = model.centroid(b);
    if (ca != cb) return ca < cb;
    return first_member[a] < first_member[b];
  });
  std::vector<int> relabel(k);
  std::vector<double> centroids(model.centroids.size());
  for (int pos = 0; pos < k; ++pos) {
    relabel[order[pos]] = pos;
    for (int d = 0; d < dims; ++d) centroids[pos * dims + d] = model.centroid(order[pos], d);
  }
  for (auto& a : model.assignment) a = relabel[a];
  model.centroids = std::move(centroids);
}

}  // namespace

std::vector<double> kmeanspp_init(std::span<const double> points, int dims, int k,
                                  std::uint64_t seed) {
  const std::size_t n = point_count(points, dims);
  check_k(k, n);
  SplitMix64 rng(seed);
  std::vector<std::size_t> chosen;
  chosen.push_back(static_cast<std::size_t>(rng.bounded(n)));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(&points[i * dims], &points[chosen[0] * dims], dims);

  while (chosen.size() < static_cast<std::size_t>(k)) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        cum += d2[i];
        pick = i;
        if (cum > r) break;
      }
    } else {
      // Every point coincides with a chosen centre: take the lowest unused index.
      for (std::size_t i = 0; i < n && pick == n; ++i) {
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) pick = i;
      }
    }
    chosen.push_back(pick);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(&points[i * dims], &points[pick * dims], dims));
    }
  }

  std::vector<double> centroids;
  centroids.reserve(static_cast<std::size_t>(k) * dims);
  for (auto c : chosen) {
    for (int d = 0; d < dims; ++d) centroids.push_back(points[c * dims + d]);
  }
  return centroids;
}

ClusterModel lloyd(std::span<const double> points, int dims, std::vector<double> centroids,
                   const KMeansOptions& options) {
  const std::size_t n = point_count(points, dims);
  if (centroids.empty() || centroids.size() % static_cast<std::size_t>(dims) != 0) {
    throw InvalidArgument("initial centroids do not match the point dimension");
  }
  const int k = static_cast<int>(centroids.size() / dims);
  check_k(k, n);

  ClusterModel model;
  model.k = k;
  model.dims = dims;
  std::vector<int> assignment(n, -1);
  double previous = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<int> next(n);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(&points[i * dims], &centroids[0], dims);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(&points[i * dims], &centroids[c * dims], dims);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      next[i] = best;
      ++counts[best];
    }

    // Repair empty clusters with the point farthest from its own centroid,
    // taken only from clusters that can spare a member.
    for (int c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[next[i]] < 2) continue;
        const double d = sq_dist(&points[i * dims], &centroids[next[i] * dims], dims);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --counts[next[far]];
      next[far] = c;
      counts[c] = 1;
      for (int d = 0; d < dims; ++d) centroids[c * dims + d] = points[far * dims + d];
    }

    const bool unchanged = next == assignment;
    assignment = std::move(next);
    update_centroids(points, dims, assignment, k, centroids);
    const double current = objective_of(points, dims, assignment, centroids);
    model.objective_trace.push_back(current);
    if (unchanged || current == 0.0 ||
        (std::isfinite(previous) && (previous - current) <= options.tolerance * previous)) {
      break;
    }
    previous = current;
  }

  model.centroids = std::move(centroids);
  model.assignment = std::move(assignment);
  model.objective = model.objective_trace.back();
  return model;
}

std::vector<int> optimal_partition_1d(std::span<const double> values, int k) {
  const std::size_t n = values.size();
  check_k(k, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  // Centre before forming prefix sums to limit cancellation in the SSE.
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = values[order[i]] - mean;
    s1[i + 1] = s1[i] + v;
    s2[i + 1] = s2[i] + v * v;
  }
  // SSE of sorted[i, j).
  auto cost = [&](std::size_t i, std::size_t j) {
    const double cnt = static_cast<double>(j - i);
    const double s = s1[j] - s1[i];
    return std::max(0.0, (s2[j] - s2[i]) - s * s / cnt);
  };

  const auto inf = std::numeric_limits<double>::infinity();
  // best[m][j]: minimal cost of the first j sorted values in m+1 clusters;
  // split[m][j]: start of the last cluster in that solution.
  std::vector<std::vector<double>> best(k, std::vector<double>(n + 1, inf));
  std::vector<std::vector<std::size_t>> split(k, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t j = 1; j <= n; ++j) best[0][j] = cost(0, j);

  // The optimal split point is monotone in j, which allows divide and conquer
  // over j with a shrinking search window.
  for (int m = 1; m < k; ++m) {
    auto solve = [&](auto&& self, std::size_t lo, std::size_t hi, std::size_t opt_lo,
                     std::size_t opt_hi) -> void {
      if (lo > hi) return;
      const std::size_t mid = lo + (hi - lo) / 2;
      double best_cost = inf;
      std::size_t best_i = std::max<std::size_t>(opt_lo, m);
      const std::size_t last = std::min(opt_hi, mid - 1);
      for (std::size_t i = std::max<std::size_t>(opt_lo, m); i <= last; ++i) {
        const double c = best[m - 1][i] + cost(i, mid);
        if (c < best_cost) {
          best_cost = c;
          best_i = i;
        }
      }
      best[m][mid] = best_cost;
      split[m][mid] = best_i;
      if (mid > lo) self(self, lo, mid - 1, opt_lo, best_i);
      self(self, mid + 1, hi, best_i, opt_hi);
    };
    solve(solve, static_cast<std::size_t>(m) + 1, n, static_cast<std::size_t>(m), n - 1);
  }

  std::vector<int> labels(n);
  std::size_t end = n;
  for (int m = k - 1; m >= 0; --m) {
    const std::size_t start = m == 0 ? 0 : split[m][end];
    for (std::size_t i = start; i < end; ++i) labels[order[i]] = m;
    end = start;
  }
  return labels;
}

double partition_objective(std::span<const double> points, int dims,
                           std::span<const int> assignment, int k) {
  std::vector<double> centroids(static_cast<std::size_t>(k) * dims, 0.0);
  const std::vector<int> labels(assignment.begin(), assignment.end());
  update_centroids(points, dims, labels, k, centroids);
  return objective_of(points, dims, labels, centroids);
}

ClusterModel kmeans_fit(std::span<const double> scores, int k, std::uint64_t seed,
                        const KMeansOptions& options) {
  check_k(k, scores.size());
  for (double v : scores) {
    if (!std::isfinite(v)) throw InvalidArgument("scores must be finite");
  }

  ClusterModel seeded = lloyd(scores, 1, kmeanspp_init(scores, 1, k, seed), options);
  seeded.init = "kmeans++";

  const std::vector<int> labels = optimal_partition_1d(scores, k);
  std::vector<double> start(k, 0.0);
  update_centroids(scores, 1, labels, k, start);
  ClusterModel exact = lloyd(scores, 1, std::move(start), options);
  exact.init = "interval-dp";

  ClusterModel model = exact.objective < seeded.objective ? std::move(exact) : std::move(seeded);
  sort_clusters(model);
  return model;
}

ClusterModel kmeans_fit_nd(std::span<const double> points, int dims, int k,
                           std::uint64_t seed, const KMeansOptions& options) {
  const std::size_t n = point_count(points, dims);
  check_k(k, n);
  for (double v : points) {
    if (!std::isfinite(v)) throw InvalidArgument("points must be finite");
  }
  ClusterModel model = lloyd(points, dims, kmeanspp_init(points, dims, k, seed), options);
  model.init = "kmeans++";
  sort_clusters(model);
  return model;
}

}  // namespace afse

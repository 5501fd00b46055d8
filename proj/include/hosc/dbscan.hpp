#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "hosc/clustering.hpp"
#include "hosc/error.hpp"
#include "hosc/geometry.hpp"

namespace hosc {

struct DbscanParams {
  double eps = 0.3;  // radians
  std::size_t min_pts = 4;

  void validate() const {
    if (!(eps > 0.0 && eps <= std::numbers::pi)) throw Error(ErrorKind::InvalidParams, "eps must lie in (0, pi]");
    if (min_pts < 1) throw Error(ErrorKind::InvalidParams, "min_pts must be at least 1");
  }
};

namespace detail {

/// Condensed upper-triangle angular distances, row i holding pairs (i, j>i).
struct PairwiseAngles {
  std::size_t n = 0;
  std::vector<double> values;

  explicit PairwiseAngles(const PointSet& points) : n(points.size()) {
    values.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) values.push_back(angular_distance(points.row(i), points.row(j)));
  }

  std::vector<std::vector<std::size_t>> neighborhoods(double eps) const {
    std::vector<std::vector<std::size_t>> nbrs(n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      nbrs[i].push_back(i);
      for (std::size_t j = i + 1; j < n; ++j, ++k)
        if (values[k] <= eps) {
          nbrs[i].push_back(j);
          nbrs[j].push_back(i);
        }
    }
    for (auto& l : nbrs) std::sort(l.begin(), l.end());
    return nbrs;
  }
};

inline ClusteringResult dbscan_from_neighborhoods(const std::vector<std::vector<std::size_t>>& nbrs, std::size_t min_pts) {
  const std::size_t n = nbrs.size();
  constexpr long kUnvisited = -2;
  constexpr long kNoise = -1;
  std::vector<long> label(n, kUnvisited);
  long next_cluster = 0;

  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != kUnvisited) continue;
    if (nbrs[p].size() < min_pts) {
      label[p] = kNoise;
      continue;
    }
    const long c = next_cluster++;
    label[p] = c;
    std::vector<std::size_t> frontier(nbrs[p].begin(), nbrs[p].end());
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      const std::size_t q = frontier[k];
      if (label[q] == kNoise) label[q] = c;  // border point
      if (label[q] != kUnvisited) continue;
      label[q] = c;
      if (nbrs[q].size() >= min_pts) frontier.insert(frontier.end(), nbrs[q].begin(), nbrs[q].end());
    }
  }

  ClusteringResult result;
  result.clusters.resize(static_cast<std::size_t>(next_cluster));
  for (std::size_t i = 0; i < n; ++i)
    if (label[i] >= 0) result.clusters[static_cast<std::size_t>(label[i])].push_back(i);
  canonicalize(result, n);
  result.stats.n_points = n;
  return result;
}

}  // namespace detail

/// Classic DBSCAN under the angular metric with brute-force neighborhoods
/// (each point counts as its own neighbor). Points are scanned in id order;
/// a border point reachable from several clusters goes to the first cluster
/// that expands into it.
inline ClusteringResult run_dbscan(const PointSet& points, const DbscanParams& params) {
  params.validate();
  if (points.empty()) throw Error(ErrorKind::EmptySet, "no points to cluster");
  return detail::dbscan_from_neighborhoods(detail::PairwiseAngles(points).neighborhoods(params.eps), params.min_pts);
}

/// One DBSCAN run per eps in an ascending grid; distances are computed once.
inline std::vector<SweepRow> sweep_eps(const PointSet& points, const DbscanParams& params, std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::InvalidParams, "empty eps grid");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1])) throw Error(ErrorKind::InvalidParams, "eps grid must be ascending");
  if (points.empty()) throw Error(ErrorKind::EmptySet, "no points to cluster");
  DbscanParams p = params;
  for (double eps : grid) {
    p.eps = eps;
    p.validate();
  }
  const detail::PairwiseAngles angles(points);
  std::vector<SweepRow> rows;
  for (double eps : grid) {
    const auto r = detail::dbscan_from_neighborhoods(angles.neighborhoods(eps), params.min_pts);
    rows.push_back({eps, r.clusters.size(), r.noise.size()});
  }
  return rows;
}

}  // namespace hosc

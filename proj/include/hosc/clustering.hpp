#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hosc/error.hpp"
#include "hosc/geometry.hpp"
#include "hosc/hypergraph.hpp"
#include "hosc/rotation.hpp"
#include "hosc/sign_label.hpp"

namespace hosc {

enum class CardinalityMode { Labels, Points };

struct HosParams {
  double delta0 = 4.0;
  std::size_t k0 = 2;
  std::optional<unsigned> d0;
  CardinalityMode cardinality = CardinalityMode::Labels;
  bool rotate = true;
  AnnealConfig anneal;
  unsigned threads = 1;

  void validate() const {
    if (!(delta0 > 0.0) || !std::isfinite(delta0)) throw Error(ErrorKind::InvalidParams, "delta0 must be positive");
    if (k0 < 2) throw Error(ErrorKind::InvalidParams, "k0 must be greater than 1");
    if (d0 && *d0 == 0) throw Error(ErrorKind::InvalidParams, "d0 must be at least 1");
    if (rotate) anneal.validate();
  }
};

/// Points grouped by sign label. `labels` is sorted; `members[i]` holds the
/// ascending point ids whose label is labels[i].
struct HyperoctantIndex {
  std::vector<SignLabel> labels;
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> proto;  // indices into labels with more than one point (W0)

  std::size_t index_of(const SignLabel& label) const {
    auto it = std::lower_bound(labels.begin(), labels.end(), label);
    return static_cast<std::size_t>(it - labels.begin());
  }
};

/// One accretion step of a label group: the group's point diameter and the
/// cardinality used in the density test after the label was admitted.
struct AccretionStep {
  double diameter = 0.0;
  std::size_t cardinality = 0;
};

struct ClusteringStats {
  std::size_t n_points = 0;
  std::size_t n_occupied = 0;
  std::size_t proto_cluster_count = 0;
  std::size_t max_resolution = 0;
  double centering_before = 0.0;
  double centering_after = 0.0;
  unsigned d0_used = 0;
  double delta0 = 0.0;
  std::size_t k0 = 0;
};

/// Clusters are disjoint ascending point-id lists ordered by their smallest
/// id, so cluster index equals first-appearance order when scanning ids.
/// `label_groups` and `certificates` are aligned with `clusters` (empty for
/// methods that do not produce them).
struct ClusteringResult {
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> noise;
  std::vector<std::vector<SignLabel>> label_groups;
  std::vector<std::vector<AccretionStep>> certificates;
  ClusteringStats stats;
  RotationPlan rotation;
  std::vector<std::string> warnings;

  /// cluster id per point, -1 for noise.
  std::vector<long> assignments(std::size_t n_points) const {
    std::vector<long> out(n_points, -1);
    for (std::size_t c = 0; c < clusters.size(); ++c)
      for (auto id : clusters[c]) out[id] = static_cast<long>(c);
    return out;
  }
};

inline HyperoctantIndex assign_hyperoctants(const PointSet& points) {
  if (points.empty()) throw Error(ErrorKind::EmptySet, "no points to index");
  std::map<SignLabel, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < points.size(); ++i) by_label[SignLabel::of(points.row(i))].push_back(i);
  HyperoctantIndex index;
  for (auto& [label, ids] : by_label) {
    if (ids.size() > 1) index.proto.push_back(index.labels.size());
    index.labels.push_back(label);
    index.members.push_back(std::move(ids));
  }
  return index;
}

/// Proto-clusters holding at least k0 points.
inline std::size_t max_resolution(const HyperoctantIndex& index, std::size_t k0) {
  std::size_t count = 0;
  for (auto p : index.proto)
    if (index.members[p].size() >= k0) ++count;
  return count;
}

/// A label group under construction: its labels, its points, and the cached
/// angular diameter of those points.
struct GroupState {
  std::vector<std::size_t> labels;  // indices into HyperoctantIndex::labels
  std::vector<std::size_t> points;
  double diameter = 0.0;
};

/// Diameter the group would have after admitting `candidate`; only the new
/// cross and internal distances are evaluated.
inline double diameter_with(const PointSet& points, const GroupState& group, std::span<const std::size_t> candidate) {
  double diam = group.diameter;
  for (std::size_t a = 0; a < candidate.size(); ++a) {
    auto ra = points.row(candidate[a]);
    for (auto p : group.points) diam = std::max(diam, angular_distance(ra, points.row(p)));
    for (std::size_t b = a + 1; b < candidate.size(); ++b)
      diam = std::max(diam, angular_distance(ra, points.row(candidate[b])));
  }
  return diam;
}

inline std::size_t admitted_cardinality(const GroupState& group, std::size_t candidate_points, CardinalityMode mode) {
  return mode == CardinalityMode::Labels ? group.labels.size() + 1 : group.points.size() + candidate_points;
}

/// Density test diam(C + candidate) * delta0 <= |C + candidate|, with the
/// cardinality counted in labels or in points.
inline bool density_admits(double union_diameter, std::size_t union_cardinality, double delta0) {
  return union_diameter * delta0 <= static_cast<double>(union_cardinality);
}

inline bool density_admits(const PointSet& points, const GroupState& group, std::size_t candidate,
                           const HyperoctantIndex& index, const HosParams& params) {
  const auto& cand = index.members[candidate];
  return density_admits(diameter_with(points, group, cand),
                        admitted_cardinality(group, cand.size(), params.cardinality), params.delta0);
}

namespace detail {

inline void canonicalize(ClusteringResult& result, std::size_t n_points) {
  std::vector<std::size_t> order(result.clusters.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (auto& c : result.clusters) std::sort(c.begin(), c.end());
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return result.clusters[a].front() < result.clusters[b].front(); });
  auto permute = [&](auto& v) {
    if (v.empty()) return;
    std::remove_reference_t<decltype(v)> out;
    for (auto i : order) out.push_back(std::move(v[i]));
    v = std::move(out);
  };
  permute(result.clusters);
  permute(result.label_groups);
  permute(result.certificates);

  std::vector<bool> covered(n_points, false);
  for (const auto& c : result.clusters)
    for (auto id : c) {
      if (covered[id]) throw Error(ErrorKind::InvariantViolation, "point assigned to two clusters");
      covered[id] = true;
    }
  result.noise.clear();
  for (std::size_t i = 0; i < n_points; ++i)
    if (!covered[i]) result.noise.push_back(i);
}

}  // namespace detail

/// Clustering on points that are already in their final coordinates (no
/// rotation step). `run_hos` wraps this.
inline ClusteringResult cluster_rotated(const PointSet& points, const HosParams& params) {
  params.validate();
  if (points.empty()) throw Error(ErrorKind::EmptySet, "no points to cluster");

  ClusteringResult result;
  const HyperoctantIndex index = assign_hyperoctants(points);
  const ReducedGraph full = build_reduced_graph(index.labels, params.threads);
  const unsigned d0 = params.d0 ? *params.d0 : default_d0(full, /*permissive=*/true);
  const ReducedGraph graph = threshold_graph(full, d0);
  // graph.nodes == index.labels: both are the sorted unique labels.
  const Walk walk = bfs_walk(graph, start_node(graph));

  const std::size_t n = walk.order.size();
  std::vector<bool> in_group(index.labels.size(), false);
  std::vector<GroupState> accepted;
  std::vector<std::vector<AccretionStep>> certs;

  std::size_t j = 0;
  while (j < n) {
    GroupState group;
    const std::size_t first = walk.order[j];
    group.labels.push_back(first);
    group.points = index.members[first];
    group.diameter = diameter(points, group.points);
    std::vector<AccretionStep> steps{{group.diameter, params.cardinality == CardinalityMode::Labels ? 1 : group.points.size()}};

    // Accretion never crosses into another connected component of the
    // thresholded graph.
    while (j + 1 < n && walk.component[j + 1] == walk.component[j]) {
      const std::size_t cand = walk.order[j + 1];
      const auto& cand_points = index.members[cand];
      const double diam = diameter_with(points, group, cand_points);
      const std::size_t card = admitted_cardinality(group, cand_points.size(), params.cardinality);
      if (!density_admits(diam, card, params.delta0)) break;
      group.labels.push_back(cand);
      group.points.insert(group.points.end(), cand_points.begin(), cand_points.end());
      group.diameter = diam;
      steps.push_back({diam, card});
      ++j;
    }
    if (group.points.size() >= params.k0) {
      for (auto l : group.labels) in_group[l] = true;
      accepted.push_back(std::move(group));
      certs.push_back(std::move(steps));
    }
    ++j;
  }

  // Leftover proto-clusters join as single-label groups, same k0 filter.
  for (auto p : index.proto) {
    if (in_group[p] || index.members[p].size() < params.k0) continue;
    GroupState group;
    group.labels.push_back(p);
    group.points = index.members[p];
    group.diameter = diameter(points, group.points);
    certs.push_back({{group.diameter, params.cardinality == CardinalityMode::Labels ? 1 : group.points.size()}});
    accepted.push_back(std::move(group));
  }

  for (std::size_t g = 0; g < accepted.size(); ++g) {
    result.clusters.push_back(accepted[g].points);
    std::vector<SignLabel> labels;
    for (auto l : accepted[g].labels) labels.push_back(index.labels[l]);
    result.label_groups.push_back(std::move(labels));
  }
  result.certificates = std::move(certs);
  detail::canonicalize(result, points.size());

  auto& s = result.stats;
  s.n_points = points.size();
  s.n_occupied = index.labels.size();
  s.proto_cluster_count = index.proto.size();
  s.max_resolution = max_resolution(index, params.k0);
  s.centering_before = s.centering_after = centering_value(points);
  s.d0_used = d0;
  s.delta0 = params.delta0;
  s.k0 = params.k0;

  if (static_cast<double>(points.dim()) <= std::log2(static_cast<double>(points.size())))
    result.warnings.push_back("dimension " + std::to_string(points.dim()) + " <= log2(N') = " +
                              std::to_string(std::log2(static_cast<double>(points.size()))) +
                              "; shared hyperoctants may reflect pigeonholing rather than proximity");
  return result;
}

/// Full pipeline: optional centering rotation, then hyperoctant grouping.
inline ClusteringResult run_hos(const PointSet& points, const HosParams& params) {
  params.validate();
  if (points.empty()) throw Error(ErrorKind::EmptySet, "no points to cluster");
  if (!params.rotate) return cluster_rotated(points, params);

  const RotationOutcome rot = optimize_rotation(points, params.anneal, params.threads);
  ClusteringResult result = cluster_rotated(rot.rotated, params);
  result.stats.centering_before = rot.report.initial_centering;
  result.stats.centering_after = rot.report.final_centering;
  result.rotation = rot.plan;
  return result;
}

struct SweepRow {
  double param = 0.0;
  std::size_t clusters = 0;
  std::size_t noise = 0;
};

/// One clustering per delta0 in `grid`. The rotation is computed once and
/// reused so only delta0 varies between rows.
inline std::vector<SweepRow> sweep_delta0(const PointSet& points, const HosParams& params, std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::InvalidParams, "empty delta0 grid");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1])) throw Error(ErrorKind::InvalidParams, "delta0 grid must be ascending");
  params.validate();

  PointSet rotated = points;
  if (params.rotate) rotated = optimize_rotation(points, params.anneal, params.threads).rotated;

  std::vector<SweepRow> rows;
  HosParams p = params;
  p.rotate = false;
  for (double delta0 : grid) {
    p.delta0 = delta0;
    const auto r = cluster_rotated(rotated, p);
    rows.push_back({delta0, r.clusters.size(), r.noise.size()});
  }
  return rows;
}

}  // namespace hosc

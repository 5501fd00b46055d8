#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "hosc/clustering.hpp"
#include "hosc/evaluation.hpp"
#include "hosc/synthetic.hpp"
#include "oracles.hpp"

using namespace hosc;

namespace {

HosParams fixed(double delta0) {
  HosParams p;
  p.delta0 = delta0;
  p.rotate = false;
  return p;
}

const PlantedData& reference() {
  static const PlantedData data = make_planted(PlantedSpec{});
  return data;
}

/// Invariants every clustering must satisfy.
void check_invariants(const PointSet& pts, const ClusteringResult& r, const HosParams& p) {
  std::vector<int> seen(pts.size(), 0);
  for (const auto& c : r.clusters) {
    EXPECT_GE(c.size(), p.k0);
    for (auto id : c) ++seen[id];
  }
  for (auto id : r.noise) ++seen[id];
  for (int s : seen) EXPECT_EQ(s, 1);

  const auto labels = r.assignments(pts.size());
  std::map<SignLabel, std::set<long>> by_label;
  for (std::size_t i = 0; i < pts.size(); ++i) by_label[SignLabel::of(pts.row(i))].insert(labels[i]);
  for (const auto& [label, ids] : by_label) EXPECT_EQ(ids.size(), 1u) << label.str();

  ASSERT_EQ(r.certificates.size(), r.clusters.size());
  for (std::size_t c = 0; c < r.clusters.size(); ++c)
    for (std::size_t s = 1; s < r.certificates[c].size(); ++s) {
      const auto& step = r.certificates[c][s];
      EXPECT_TRUE(step.diameter * p.delta0 <= static_cast<double>(step.cardinality));
    }
  for (std::size_t c = 0; c < r.clusters.size(); ++c)
    EXPECT_NEAR(r.certificates[c].back().diameter, diameter(pts, r.clusters[c]), 1e-12);
  for (std::size_t c = 1; c < r.clusters.size(); ++c) EXPECT_LT(r.clusters[c - 1].front(), r.clusters[c].front());
}

}  // namespace

TEST(Hyperoctants, Examples) {
  const double h = 1.0 / std::sqrt(2.0);
  auto idx = assign_hyperoctants(PointSet(2, {h, h, h, h}));
  EXPECT_EQ(idx.labels.size(), 1u);
  EXPECT_EQ(idx.members[0].size(), 2u);
  EXPECT_EQ(idx.proto.size(), 1u);
  idx = assign_hyperoctants(PointSet(2, {h, h, h, -h}));
  EXPECT_EQ(idx.labels.size(), 2u);
  EXPECT_TRUE(idx.proto.empty());
}

TEST(MaxResolution, Examples) {
  HyperoctantIndex idx;
  idx.members = {{0, 1, 2}, {3, 4}, {5, 6, 7, 8, 9}};
  idx.proto = {0, 1, 2};
  EXPECT_EQ(max_resolution(idx, 2), 3u);
  idx.members = {{0, 1}, {2, 3}};
  idx.proto = {0, 1};
  EXPECT_EQ(max_resolution(idx, 3), 0u);
  idx.proto.clear();
  EXPECT_EQ(max_resolution(idx, 2), 0u);
}

TEST(Density, Examples) {
  EXPECT_TRUE(density_admits(0.5, 4, 4.0));
  EXPECT_FALSE(density_admits(0.5, 4, 10.0));
  EXPECT_TRUE(density_admits(0.0, 1, 1e12));
}

TEST(Params, Validation) {
  HosParams p;
  p.k0 = 1;
  EXPECT_THROW(p.validate(), Error);
  p.k0 = 2;
  p.delta0 = 0.0;
  EXPECT_THROW(p.validate(), Error);
}

TEST(RunHos, PlantedRecovery) {
  const auto& data = reference();
  const auto r = run_hos(data.points, HosParams{});
  EXPECT_EQ(r.clusters.size(), 5u);
  EXPECT_TRUE(r.noise.empty());
  const auto pred = r.assignments(data.points.size());
  EXPECT_DOUBLE_EQ(adjusted_mutual_information(std::span<const long>(pred), std::span<const std::size_t>(data.truth)), 1.0);
  check_invariants(apply_rotation(r.rotation, data.points), r, HosParams{});
  EXPECT_GE(r.stats.centering_after, r.stats.centering_before);
}

TEST(RunHos, SmallDelta0MergesComponents) {
  const auto& data = reference();
  const auto p = fixed(1e-9);
  const auto r = run_hos(data.points, p);
  const auto idx = assign_hyperoctants(data.points);
  const auto g = threshold_graph(build_reduced_graph(idx.labels), r.stats.d0_used);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& e : g.edges) edges.emplace_back(e.a, e.b);
  EXPECT_EQ(r.clusters.size(), oracle::component_count(g.nodes.size(), edges));
  check_invariants(data.points, r, p);
}

TEST(RunHos, LargeDelta0GivesProtoClusters) {
  const auto& data = reference();
  const auto p = fixed(1e9);
  const auto r = run_hos(data.points, p);
  EXPECT_EQ(r.clusters.size(), r.stats.max_resolution);
  for (const auto& group : r.label_groups) EXPECT_EQ(group.size(), 1u);
  check_invariants(data.points, r, p);
}

TEST(RunHos, AccretionStopsAtComponentBoundary) {
  // Pairs in "+++" and "---" plus one point in "+-+". At d0 = 1 only the
  // "+++"/"+-+" edge survives, so "---" must not join even at a tiny delta0.
  const double a = 0.6, b = 0.8, c = 0.1;
  const std::vector<std::vector<double>> raw{{a, b, c}, {b, a, c}, {-a, -b, -c}, {-b, -a, -c}, {c, -1, c}};
  std::vector<UnitPoint> pts;
  for (const auto& r : raw) pts.push_back(normalize(r, pts.size()));
  const PointSet set = PointSet::from_points(pts);
  auto p = fixed(1e-9);
  p.d0 = 1;
  const auto r = run_hos(set, p);
  ASSERT_EQ(r.clusters.size(), 2u);
  EXPECT_EQ(r.clusters[0], (std::vector<std::size_t>{0, 1, 4}));
  EXPECT_EQ(r.clusters[1], (std::vector<std::size_t>{2, 3}));
  EXPECT_TRUE(r.noise.empty());
}

TEST(RunHos, RandomDataInvariants) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 3 + rng() % 6, n = 10 + rng() % 80;
    std::vector<UnitPoint> pts;
    std::vector<double> raw(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& x : raw) x = g(rng);
      pts.push_back(normalize(raw, i));
    }
    const auto set = PointSet::from_points(pts);
    HosParams p = fixed(std::exp(std::uniform_real_distribution<double>(-3, 3)(rng)));
    p.k0 = 2 + rng() % 3;
    p.cardinality = rng() % 2 ? CardinalityMode::Points : CardinalityMode::Labels;
    check_invariants(set, run_hos(set, p), p);
  }
}

TEST(RunHos, LowDimensionWarns) {
  const double h = 1.0 / std::sqrt(2.0);
  const auto r = run_hos(PointSet(2, {h, h, h, h, -h, h, -h, h, h, -h}), fixed(4.0));
  EXPECT_FALSE(r.warnings.empty());
}

TEST(RunHos, Deterministic) {
  const auto& data = reference();
  const auto a = run_hos(data.points, HosParams{});
  const auto b = run_hos(data.points, HosParams{});
  EXPECT_EQ(a.clusters, b.clusters);
  EXPECT_EQ(a.rotation.angles, b.rotation.angles);
}

TEST(Sweep, StepFunctionWithPlateau) {
  const auto& data = reference();
  std::vector<double> grid;
  for (int k = -12; k <= 12; ++k) grid.push_back(std::pow(10.0, k * 0.75));
  const auto rows = sweep_delta0(data.points, HosParams{}, grid);
  ASSERT_EQ(rows.size(), grid.size());
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].clusters, rows[i - 1].clusters);
  EXPECT_EQ(rows.front().clusters, 1u);
  EXPECT_EQ(rows.back().clusters, 5u);
  EXPECT_THROW(sweep_delta0(data.points, HosParams{}, std::vector<double>{2.0, 1.0}), Error);
}

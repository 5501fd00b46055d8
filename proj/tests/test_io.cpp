#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hosc/io.hpp"
#include "hosc/synthetic.hpp"

using namespace hosc;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvariantViolation;
}

std::size_t line_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(LoadCsv, Basic) {
  std::istringstream in("x,y\n3,4\n");
  const auto v = load_vectors_csv(in);
  ASSERT_EQ(v.points.size(), 1u);
  EXPECT_DOUBLE_EQ(v.points.row(0)[0], 0.6);
  EXPECT_DOUBLE_EQ(v.points.row(0)[1], 0.8);
}

TEST(LoadCsv, RaggedRowReportsLine) {
  auto load = [] {
    std::istringstream in("x,y\n1,2\n# note\n1,2,3\n");
    load_vectors_csv(in);
  };
  EXPECT_EQ(kind_of(load), ErrorKind::InconsistentDimension);
  EXPECT_EQ(line_of(load), 4u);
}

TEST(LoadCsv, ZeroRowsListed) {
  auto load = [] {
    std::istringstream in("x,y\n0,0\n1,1\n0,0\n");
    load_vectors_csv(in);
  };
  EXPECT_EQ(kind_of(load), ErrorKind::ZeroVector);
  EXPECT_EQ(line_of(load), 2u);
}

TEST(LoadCsv, BadNumber) {
  auto load = [] {
    std::istringstream in("x,y\n1,abc\n");
    load_vectors_csv(in);
  };
  EXPECT_EQ(kind_of(load), ErrorKind::ParseError);
}

TEST(LoadCsv, IdAndLabelColumns) {
  std::istringstream in("label,id,a,b\nq,1,0,2\np,0,5,0\n");
  VectorFileSpec spec;
  spec.id_column = "id";
  spec.label_column = "label";
  const auto v = load_vectors_csv(in, spec);
  EXPECT_EQ(v.labels, (std::vector<std::string>{"p", "q"}));
  EXPECT_DOUBLE_EQ(v.points.row(0)[0], 1.0);
  EXPECT_DOUBLE_EQ(v.points.row(1)[1], 1.0);
}

TEST(LoadCsv, DuplicateId) {
  auto load = [] {
    std::istringstream in("id,a\n0,1\n0,2\n");
    VectorFileSpec spec;
    spec.id_column = "id";
    load_vectors_csv(in, spec);
  };
  EXPECT_EQ(kind_of(load), ErrorKind::DuplicateId);
}

TEST(LoadEmbedding, TokensAndHeader) {
  std::istringstream in("2 2\nking 0.1 0.2\nqueen 3 4\n");
  const auto v = load_vectors_embedding_text(in);
  EXPECT_EQ(v.tokens, (std::vector<std::string>{"king", "queen"}));
  EXPECT_NEAR(v.points.row(0)[1], 0.2 / std::sqrt(0.05), 1e-15);
  EXPECT_DOUBLE_EQ(v.points.row(1)[0], 0.6);
}

TEST(LoadEmbedding, Ragged) {
  auto load = [] {
    std::istringstream in("a 1 2\nb 1\n");
    load_vectors_embedding_text(in);
  };
  EXPECT_EQ(kind_of(load), ErrorKind::InconsistentDimension);
  EXPECT_EQ(line_of(load), 2u);
}

TEST(LoadCorpus, Examples) {
  std::istringstream in(R"({"id":0,"text":"Hello world","label":"tech"}
{"id":1,"text":"","label":"misc"}
)");
  const auto c = load_corpus(in);
  EXPECT_EQ(c.at(0).tokens, (std::vector<std::string>{"hello", "world"}));
  EXPECT_TRUE(c.at(1).tokens.empty());
  EXPECT_EQ(c.at(1).label, "misc");
}

TEST(LoadCorpus, Errors) {
  EXPECT_EQ(kind_of([] {
              std::istringstream in("{\"id\":0,\"text\":\"a\",\"label\":\"x\"}\n{\"id\":0,\"text\":\"b\",\"label\":\"y\"}\n");
              load_corpus(in);
            }),
            ErrorKind::DuplicateId);
  auto bad = [] {
    std::istringstream in("{\"id\":0,\"text\":\"a\",\"label\":\"x\"}\n{oops\n");
    load_corpus(in);
  };
  EXPECT_EQ(kind_of(bad), ErrorKind::ParseError);
  EXPECT_EQ(line_of(bad), 2u);
}

TEST(MeanEmbedding, Examples) {
  const WordEmbeddingTable t{{"a", {3, 4}}, {"b", {1, 0}}, {"n", {-3, -4}}};
  const std::vector<std::string> one{"a", "zzz"};
  EXPECT_DOUBLE_EQ(mean_word_embedding(one, t).coords[0], 0.6);
  const std::vector<std::string> cancel{"a", "n"};
  EXPECT_EQ(kind_of([&] { mean_word_embedding(cancel, t); }), ErrorKind::ZeroVector);
  const std::vector<std::string> multi{"a", "a", "b"};
  const auto p = mean_word_embedding(multi, t);
  const double x = 7.0 / 3, y = 8.0 / 3, n = std::sqrt(x * x + y * y);
  EXPECT_NEAR(p.coords[0], x / n, 1e-15);
  EXPECT_NEAR(p.coords[1], y / n, 1e-15);
  const std::vector<std::string> none{"q"};
  EXPECT_EQ(kind_of([&] { mean_word_embedding(none, t); }), ErrorKind::NoResolvableWords);
}

TEST(Assignments, RoundTrip) {
  ClusteringResult r;
  r.clusters = {{0, 3}, {1, 4}};
  r.noise = {2};
  std::stringstream ss;
  write_assignments(ss, r, 5);
  EXPECT_EQ(ss.str(), "# format_version 1\npoint_id,cluster_id\n0,0\n1,1\n2,-1\n3,0\n4,1\n");
  const auto a = read_assignments(ss);
  EXPECT_EQ(a, (std::vector<long>{0, 1, -1, 0, 1}));
  const auto back = result_from_assignments(a);
  EXPECT_EQ(back.clusters, r.clusters);
  EXPECT_EQ(back.noise, r.noise);
}

TEST(Assignments, EmptyClusteringIsAllNoise) {
  std::stringstream ss;
  write_assignments(ss, ClusteringResult{}, 2);
  EXPECT_EQ(read_assignments(ss), (std::vector<long>{-1, -1}));
}

TEST(PointsCsv, RoundTrip) {
  const auto data = make_planted({6, 2, 3, 0.2, 1});
  std::vector<std::string> labels(data.points.size(), "g");
  std::stringstream ss;
  write_points_csv(ss, data.points, labels);
  VectorFileSpec spec;
  spec.id_column = "id";
  spec.label_column = "label";
  const auto back = load_vectors_csv(ss, spec);
  ASSERT_EQ(back.points.size(), data.points.size());
  for (std::size_t i = 0; i < data.points.size(); ++i)
    for (std::size_t k = 0; k < data.points.dim(); ++k) EXPECT_NEAR(back.points.row(i)[k], data.points.row(i)[k], 1e-15);
  EXPECT_EQ(back.labels, labels);
}

TEST(SignMatrix, PlantedClustersHaveFewRows) {
  const auto data = make_planted({});
  std::stringstream ss;
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < data.points.size(); i += 5) ids.push_back(i);  // group 0
  write_sign_matrix(ss, data.points, ids);
  std::string line;
  std::getline(ss, line);
  std::getline(ss, line);
  EXPECT_EQ(line.substr(0, 15), "point_id,s1,s2,");
  std::set<std::string> rows;
  while (std::getline(ss, line)) rows.insert(line.substr(line.find(',')));
  EXPECT_EQ(ids.size(), 40u);
  EXPECT_LE(rows.size(), 3u);
}

TEST(Plan, JsonRoundTrip) {
  RotationPlan plan{{{0, 2}, {1, 4}}, {0.25, -1.5}};
  const auto [back, dim] = plan_from_json(nlohmann::json::parse(plan_to_json(plan, 5).dump()));
  EXPECT_EQ(dim, 5u);
  EXPECT_EQ(back.pairs, plan.pairs);
  EXPECT_EQ(back.angles, plan.angles);
  EXPECT_THROW(plan_from_json(nlohmann::json::parse(R"({"dim":3,"pairs":[[0,1],[1,2]],"angles":[0,0]})")), Error);
}

#include <gtest/gtest.h>

#include <sstream>

#include "sentclust/vectors.hpp"
#include "support/synthetic.hpp"

using namespace sentclust;

namespace {

EmbeddingStore load(const std::string& text) {
  std::istringstream in(text);
  return load_embeddings(in, "emb");
}

PcAnnotation ann(const std::string& id, double pol, double inten) {
  PcAnnotation a;
  a.sentence_id = id;
  a.coordinate = {pol, inten};
  return a;
}

}  // namespace

TEST(LoadEmbeddings, TwoRecords) {
  const auto s = load("{\"id\": \"a\", \"vector\": [1, 2, 3]}\n{\"id\": \"b\", \"vector\": [4, 5, 6.5]}\n");
  EXPECT_EQ(s.dimension(), 3u);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.at("b")[2], 6.5);
}

TEST(LoadEmbeddings, DimensionMismatchNamesId) {
  try {
    load("{\"id\": \"a\", \"vector\": [1, 2, 3]}\n{\"id\": \"odd\", \"vector\": [1, 2, 3, 4]}\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("odd"), std::string::npos);
  }
}

TEST(LoadEmbeddings, Rejections) {
  EXPECT_THROW(load("{\"id\": \"a\", \"vector\": [1]}\n{\"id\": \"a\", \"vector\": [2]}\n"), ParseError);
  EXPECT_THROW(load("{\"id\": \"a\", \"vector\": []}\n"), ParseError);
  EXPECT_THROW(load("{\"id\": \"a\", \"vector\": [1, \"x\"]}\n"), ParseError);
  EXPECT_THROW(load("{\"id\": \"a\", \"vector\": [1e999]}\n"), ParseError);
  EXPECT_THROW(load("{\"id\": 3, \"vector\": [1]}\n"), ParseError);
  EXPECT_THROW(load("not json\n"), ParseError);
  EXPECT_THROW(load(""), DataError);
}

TEST(LoadEmbeddings, NonFiniteRejectedWhenAddedDirectly) {
  EmbeddingStore s;
  EXPECT_THROW(s.add({"a", {1.0, std::numeric_limits<double>::quiet_NaN()}}), DataError);
  EXPECT_THROW(s.add({"b", {std::numeric_limits<double>::infinity()}}), DataError);
}

TEST(SaveEmbeddings, RoundTripIsBitExact) {
  Rng rng(21);
  EmbeddingStore store;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(16);
    for (auto& x : v) x = rng.normal() * std::pow(10.0, rng.uniform(-30.0, 30.0));
    store.add({"id-" + std::to_string(i), v});
  }
  std::ostringstream out;
  save_embeddings(out, store);
  const auto back = load(out.str());
  ASSERT_EQ(back.size(), store.size());
  for (const auto& r : store.records()) {
    const auto& w = back.at(r.sentence_id);
    for (std::size_t j = 0; j < w.size(); ++j) ASSERT_EQ(w[j], r.vector[j]);
  }
}

TEST(BuildFeatures, ConcatenatesCoordinate) {
  const auto s = load("{\"id\": \"a\", \"vector\": [0.1, 0.2]}\n");
  const std::vector<PcAnnotation> anns{ann("a", 0.75, 0.5)};
  const auto x = build_features(s, anns);
  ASSERT_EQ(x.rows(), 1);
  ASSERT_EQ(x.cols(), 4);
  EXPECT_EQ(x(0, 0), 0.1);
  EXPECT_EQ(x(0, 1), 0.2);
  EXPECT_EQ(x(0, 2), 0.75);
  EXPECT_EQ(x(0, 3), 0.5);
}

TEST(BuildFeatures, EmptyAndWideShapes) {
  const auto s = load("{\"id\": \"a\", \"vector\": [0.1, 0.2]}\n");
  const auto empty = build_features(s, std::vector<PcAnnotation>{});
  EXPECT_EQ(empty.rows(), 0);
  EXPECT_EQ(empty.cols(), 4);

  std::vector<std::string> ids;
  std::vector<SentimentLabel> labels;
  std::vector<PcAnnotation> anns;
  for (int i = 0; i < 44; ++i) {
    ids.push_back("ode-" + std::to_string(i));
    labels.push_back(label_at(i % 4));
    anns.push_back(ann(ids.back(), 0.5, 0.0));
  }
  const auto store = synthetic::embeddings(ids, labels, 768, 1);
  const auto x = build_features(store, anns);
  EXPECT_EQ(x.rows(), 44);
  EXPECT_EQ(x.cols(), 770);
}

TEST(BuildFeatures, MissingIdsAreListed) {
  const auto s = load("{\"id\": \"a\", \"vector\": [0.1]}\n");
  const std::vector<PcAnnotation> anns{ann("a", 0.5, 0.0), ann("ghost", 0.5, 0.0)};
  try {
    build_features(s, anns);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(FeatureScaling, StandardizesAndReapplies) {
  Eigen::MatrixXd x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5;
  const auto s = FeatureScaling::fit(x);
  Eigen::MatrixXd y = x;
  s.apply(y);
  EXPECT_NEAR(y.col(0).mean(), 0.0, 1e-12);
  EXPECT_NEAR(y.col(0).squaredNorm() / 4.0, 1.0, 1e-12);
  EXPECT_EQ(y(0, 1), 0.0);  // constant column keeps scale 1
  Eigen::MatrixXd wrong(1, 3);
  EXPECT_THROW(s.apply(wrong), DataError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sentclust/polarity.hpp"
#include "support/synthetic.hpp"

using namespace sentclust;
using L = SentimentLabel;

namespace {

Lexicon lexicon_from(const std::string& text) {
  std::istringstream in(text);
  return load_lexicon(in, "lex");
}

Sentence sentence_of(std::initializer_list<const char*> forms, const std::string& id = "s") {
  Sentence s;
  s.id = id;
  for (const char* f : forms) s.tokens.push_back(Token{f, f});
  return s;
}

// Written independently of classify_pc: squared distances, explicit tie set.
L brute_force_label(double x, double y) {
  const double cx[4] = {1.0, 0.0, 0.5, 0.5};
  const double cy[4] = {0.5, 0.5, 0.0, 1.0};
  double d[4];
  for (int k = 0; k < 4; ++k) d[k] = std::sqrt((x - cx[k]) * (x - cx[k]) + (y - cy[k]) * (y - cy[k]));
  double m = d[0];
  for (int k = 1; k < 4; ++k) m = d[k] < m ? d[k] : m;
  bool tied[4];
  for (int k = 0; k < 4; ++k) tied[k] = std::fabs(d[k] - m) <= 1e-12;
  if (tied[2]) return L::Neutral;
  for (int k = 0; k < 4; ++k) {
    if (tied[k]) return static_cast<L>(k);
  }
  return L::Neutral;
}

}  // namespace

TEST(ScoreSentence, KeepsMatchedTokensInOrder) {
  const auto lex = lexicon_from("bonus\t1.0\nmalus\t-1.0\n");
  EXPECT_EQ(score_sentence(sentence_of({"bonus", "et", "malus"}), lex), (std::vector<double>{1.0, -1.0}));
  EXPECT_TRUE(score_sentence(sentence_of({"et", "sed"}), lex).empty());
  const auto ferrum = lexicon_from("ferrum\t-0.75\n");
  EXPECT_EQ(score_sentence(sentence_of({"ferrum", "ferrum"}), ferrum), (std::vector<double>{-0.75, -0.75}));
}

TEST(PolarityCoordinate, HandValues) {
  auto pc = [](std::vector<double> s) { return polarity_coordinate(s); };
  EXPECT_NEAR(pc({1.0}).polarity, 1.0, 1e-12);
  EXPECT_NEAR(pc({1.0}).intensity, 1.0, 1e-12);
  EXPECT_NEAR(pc({0.5, -0.5}).polarity, 0.5, 1e-12);
  EXPECT_NEAR(pc({0.5, -0.5}).intensity, 0.5, 1e-12);
  EXPECT_NEAR(pc({-0.5, -1.0}).polarity, 0.125, 1e-12);
  EXPECT_NEAR(pc({-0.5, -1.0}).intensity, 0.75, 1e-12);
}

TEST(PolarityCoordinate, RejectsEmptyAndOutOfRange) {
  EXPECT_THROW(polarity_coordinate(std::vector<double>{}), DataError);
  EXPECT_THROW(polarity_coordinate(std::vector<double>{1.5}), DataError);
}

TEST(PolarityCoordinate, BoundsAndTriangleInequalityOnRandomLists) {
  Rng rng(17);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> s(1 + rng.below(20));
    for (auto& v : s) v = rng.uniform(-1.0, 1.0);
    const auto pc = polarity_coordinate(s);
    ASSERT_GE(pc.polarity, 0.0);
    ASSERT_LE(pc.polarity, 1.0);
    ASSERT_GE(pc.intensity, 0.0);
    ASSERT_LE(pc.intensity, 1.0);
    ASSERT_GE(pc.intensity + 1e-12, std::fabs(2.0 * pc.polarity - 1.0));
  }
}

TEST(ClassifyPc, HandExamples) {
  const auto hit = classify_pc({1.0, 0.5});
  EXPECT_EQ(hit.label, L::Positive);
  EXPECT_DOUBLE_EQ(hit.distances[0], 0.0);

  const auto neg = classify_pc({0.125, 0.75});
  EXPECT_EQ(neg.label, L::Negative);
  EXPECT_NEAR(neg.distances[index_of(L::Negative)], 0.279508, 1e-6);
  EXPECT_NEAR(neg.distances[index_of(L::Mixed)], 0.450694, 1e-6);

  const auto tie = classify_pc({1.0, 1.0});
  EXPECT_DOUBLE_EQ(tie.distances[index_of(L::Positive)], tie.distances[index_of(L::Mixed)]);
  EXPECT_EQ(tie.label, L::Positive);
}

TEST(ClassifyPc, NeutralWinsTiesItTakesPartIn) {
  // Equidistant from Positive and Neutral: (1, 0) lies on the bisector.
  EXPECT_EQ(classify_pc({1.0, 0.0}).label, L::Neutral);
  EXPECT_EQ(classify_pc({0.0, 0.0}).label, L::Neutral);
  // The centre is equidistant from all four.
  EXPECT_EQ(classify_pc({0.5, 0.5}).label, L::Neutral);
  // Negative/Mixed tie goes to the lower index.
  EXPECT_EQ(classify_pc({0.0, 1.0}).label, L::Negative);
}

TEST(ClassifyPc, AgreesWithBruteForceOracle) {
  Rng rng(99);
  for (int i = 0; i < 10000; ++i) {
    double x = rng.uniform();
    double y = rng.uniform();
    // A quarter of the draws land on the diagonals where ties occur.
    switch (i % 8) {
      case 0: y = x; break;
      case 1: y = 1.0 - x; break;
      default: break;
    }
    ASSERT_EQ(classify_pc({x, y}).label, brute_force_label(x, y)) << x << ", " << y;
  }
}

TEST(ClassifyPc, SignProperty) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> pos(1 + rng.below(10)), neg(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
      pos[i] = rng.uniform();
      neg[i] = -pos[i];
    }
    EXPECT_NE(classify_pc(polarity_coordinate(pos)).label, L::Negative);
    EXPECT_NE(classify_pc(polarity_coordinate(neg)).label, L::Positive);
  }
}

TEST(Confidence, HandValues) {
  EXPECT_DOUBLE_EQ(confidence(classify_pc({0.5, 0.5}).distances), 0.0);
  const auto d = classify_pc({0.75, 0.5}).distances;
  EXPECT_NEAR(d[0], 0.25, 1e-12);
  EXPECT_NEAR(d[1], 0.75, 1e-12);
  EXPECT_NEAR(d[2], std::sqrt(0.3125), 1e-12);
  EXPECT_NEAR(confidence(d), 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(confidence(classify_pc({1.0, 0.5}).distances), 1.0);
}

TEST(Confidence, ScaleInvariant) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    Distances d{rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    const double k = rng.uniform(0.01, 100.0);
    Distances scaled{d[0] * k, d[1] * k, d[2] * k, d[3] * k};
    EXPECT_NEAR(confidence(d), confidence(scaled), 1e-12);
  }
}

TEST(AnnotatePc, NoMatchesIsNeutralWithFullConfidence) {
  const auto lex = lexicon_from("bonus\t1.0\n");
  const auto a = annotate_sentence(sentence_of({"et", "sed"}), lex);
  EXPECT_EQ(a.label, L::Neutral);
  EXPECT_DOUBLE_EQ(a.alpha, 1.0);
  EXPECT_EQ(a.matched_count, 0u);
  EXPECT_DOUBLE_EQ(a.coordinate.polarity, 0.5);
  EXPECT_DOUBLE_EQ(a.coordinate.intensity, 0.0);
}

TEST(AnnotatePc, SinglePositiveWord) {
  const auto a = annotate_sentence(sentence_of({"bonus"}), lexicon_from("bonus\t1.0\n"));
  EXPECT_EQ(a.label, L::Positive);
  EXPECT_NEAR(a.alpha, 1.0 - 0.5 / std::sqrt(1.25), 1e-12);
  EXPECT_NEAR(a.alpha, 0.5528, 1e-4);
  EXPECT_EQ(a.matched_count, 1u);
}

TEST(AnnotatePc, AllMissLexiconOnSyntheticCorpus) {
  const auto corpus = synthetic::corpus(50, 1);
  const auto anns = annotate_pc(corpus, lexicon_from("zzz\t0.3\n"));
  ASSERT_EQ(anns.size(), 50u);
  for (const auto& a : anns) {
    EXPECT_EQ(a.label, L::Neutral);
    EXPECT_DOUBLE_EQ(a.alpha, 1.0);
  }
}

TEST(AnnotatePc, DeterministicAndCountsSumToCorpus) {
  const auto corpus = synthetic::corpus(300, 2);
  const auto lex = synthetic::lexicon();
  const auto a = annotate_pc(corpus, lex);
  const auto b = annotate_pc(corpus, lex);
  std::size_t total = 0;
  for (auto c : class_counts(a)) total += c;
  EXPECT_EQ(total, corpus.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].label, b[i].label);
    EXPECT_EQ(a[i].alpha, b[i].alpha);
    EXPECT_GE(a[i].alpha, 0.0);
    EXPECT_LE(a[i].alpha, 1.0);
    EXPECT_LE(a[i].matched_count, corpus.sentences[i].tokens.size());
  }
}

TEST(CentroidSet, ValidatesEquidistance) {
  EXPECT_NO_THROW(CentroidSet({{{0.9, 0.5}, {0.1, 0.5}, {0.5, 0.1}, {0.5, 0.9}}}));
  EXPECT_THROW(CentroidSet({{{1.0, 0.5}, {0.0, 0.5}, {0.5, 0.2}, {0.5, 1.0}}}), DataError);
  EXPECT_THROW(CentroidSet({{{1.0, 0.5}, {1.0, 0.5}, {0.5, 0.0}, {0.5, 1.0}}}), DataError);
  EXPECT_THROW(CentroidSet({{{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}}), DataError);
}

TEST(AnnotationTsv, WriteThenRead) {
  const auto anns = annotate_pc(synthetic::corpus(40, 4), synthetic::lexicon());
  std::ostringstream out;
  write_annotations(out, anns);
  const auto first = out.str().substr(0, out.str().find('\n'));
  EXPECT_EQ(std::count(first.begin(), first.end(), '\t'), 4);
  std::istringstream in(out.str());
  const auto back = read_annotations(in, "anns");
  ASSERT_EQ(back.size(), anns.size());
  for (std::size_t i = 0; i < anns.size(); ++i) {
    EXPECT_EQ(back[i].sentence_id, anns[i].sentence_id);
    EXPECT_EQ(back[i].label, anns[i].label);
    EXPECT_NEAR(back[i].alpha, anns[i].alpha, 5e-7);
    EXPECT_NEAR(back[i].coordinate.polarity, anns[i].coordinate.polarity, 5e-7);
  }
}

TEST(AnnotationTsv, RejectsBadRows) {
  std::istringstream wrong_columns("a\tpositive\t1.0\n");
  EXPECT_THROW(read_annotations(wrong_columns, "x"), ParseError);
  std::istringstream bad_label("a\tjoyful\t1.0\t0.5\t0.5\n");
  EXPECT_THROW(read_annotations(bad_label, "x"), ParseError);
}

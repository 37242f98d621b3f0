#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "sentclust/corpus.hpp"
#include "support/synthetic.hpp"

using namespace sentclust;

namespace {

Corpus parse(const std::string& text, const std::string& source = "fixture") {
  std::istringstream in(text);
  return parse_conllu(in, source);
}

Lexicon lexicon_from(const std::string& text) {
  std::istringstream in(text);
  return load_lexicon(in, "lex");
}

const char* kTwoTokens =
    "# sent_id = hor-1\n"
    "1\tarma\tarma\tNOUN\t_\t_\t2\tobj\t_\t_\n"
    "2\tcano\tcano\tVERB\t_\t_\t0\troot\t_\t_\n"
    "\n";

}  // namespace

TEST(ParseConllu, OneSentenceTwoTokens) {
  const auto c = parse(kTwoTokens);
  ASSERT_EQ(c.size(), 1u);
  const auto& s = c.sentences[0];
  EXPECT_EQ(s.id, "hor-1");
  ASSERT_EQ(s.tokens.size(), 2u);
  EXPECT_EQ(s.tokens[0].form, "arma");
  EXPECT_EQ(s.tokens[0].lemma, "arma");
  EXPECT_EQ(s.tokens[1].lemma, "cano");
}

TEST(ParseConllu, UnderscoreLemmaIsAbsent) {
  const auto c = parse(
      "1\tarma\t_\tNOUN\t_\t_\t2\tobj\t_\t_\n"
      "2\tcano\t_\tVERB\t_\t_\t0\troot\t_\t_\n");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_FALSE(c.sentences[0].tokens[0].lemma.has_value());
  EXPECT_FALSE(c.sentences[0].tokens[1].lemma.has_value());
}

TEST(ParseConllu, RangeAndEmptyNodeLinesSkipped) {
  const auto c = parse(
      "1\ta\ta\t_\t_\t_\t0\t_\t_\t_\n"
      "2\tb\tb\t_\t_\t_\t1\t_\t_\t_\n"
      "3\tc\tc\t_\t_\t_\t1\t_\t_\t_\n"
      "3-4\tcd\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "4\td\td\t_\t_\t_\t1\t_\t_\t_\n"
      "4.1\te\te\t_\t_\t_\t_\t_\t_\t_\n\n");
  ASSERT_EQ(c.size(), 1u);
  std::vector<std::string> forms;
  for (const auto& t : c.sentences[0].tokens) forms.push_back(t.form);
  EXPECT_EQ(forms, (std::vector<std::string>{"a", "b", "c", "d"}));
}

TEST(ParseConllu, DefaultIdsUseSourceAndIndex) {
  const auto c = parse(
      "1\ta\ta\t_\t_\t_\t0\t_\t_\t_\n\n"
      "1\tb\tb\t_\t_\t_\t0\t_\t_\t_\n\n",
      "odes.conllu");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.sentences[0].id, "odes.conllu:1");
  EXPECT_EQ(c.sentences[1].id, "odes.conllu:2");
}

TEST(ParseConllu, GroupAndTextComments) {
  const auto c = parse(
      "# newdoc id = seneca\n"
      "# sent_id = a\n"
      "# text = Ira furor brevis est.\n"
      "1\tira\tira\t_\t_\t_\t0\t_\t_\t_\n\n"
      "# sent_id = b\n"
      "# group = horace\n"
      "1\tcarpe\tcarpo\t_\t_\t_\t0\t_\t_\t_\n\n");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.sentences[0].group, "seneca");
  EXPECT_EQ(c.sentences[0].raw_text, "Ira furor brevis est.");
  EXPECT_EQ(c.sentences[1].group, "horace");
}

TEST(ParseConllu, CrlfAndMissingTrailingBlankLine) {
  const auto c = parse("# sent_id = x\r\n1\ta\ta\t_\t_\t_\t0\t_\t_\t_\r\n");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.sentences[0].id, "x");
  EXPECT_EQ(c.sentences[0].tokens[0].form, "a");
}

TEST(ParseConllu, WrongColumnCountReportsLine) {
  try {
    parse("# sent_id = x\n1\ta\ta\t_\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(ParseConllu, DuplicateIdNamesTheId) {
  try {
    parse(std::string(kTwoTokens) + kTwoTokens);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("hor-1"), std::string::npos);
  }
}

TEST(ParseConllu, EmptyInputIsEmptyCorpus) {
  EXPECT_TRUE(parse("").empty());
  EXPECT_TRUE(parse("\n\n# just a comment\n\n").empty());
}

TEST(ParseConllu, RoundTripOfSyntheticCorpus) {
  const auto original = synthetic::corpus(200, 7);
  const auto parsed = parse(synthetic::to_conllu(original));
  ASSERT_EQ(parsed.size(), original.size());
  for (std::size_t i = 0; i < original.size(); ++i) {
    const auto& a = original.sentences[i];
    const auto& b = parsed.sentences[i];
    EXPECT_EQ(a.id, b.id);
    EXPECT_EQ(a.group, b.group);
    ASSERT_EQ(a.tokens.size(), b.tokens.size());
    for (std::size_t t = 0; t < a.tokens.size(); ++t) {
      EXPECT_EQ(a.tokens[t].form, b.tokens[t].form);
      EXPECT_EQ(a.tokens[t].lemma, b.tokens[t].lemma);
    }
  }
}

TEST(Merge, RejectsIdsRepeatedAcrossFiles) {
  std::vector<Corpus> parts{parse(kTwoTokens), parse(kTwoTokens)};
  EXPECT_THROW(merge(std::move(parts)), DataError);
}

TEST(LoadLexicon, TwoEntries) {
  const auto lex = lexicon_from("bonus\t1.0\nmalus\t-1.0\n");
  EXPECT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.find("bonus"), 1.0);
  EXPECT_EQ(lex.find("malus"), -1.0);
}

TEST(LoadLexicon, DuplicatesAreAveraged) {
  const auto lex = lexicon_from("ferrum\t-0.5\nferrum\t-1.0\n");
  EXPECT_EQ(lex.size(), 1u);
  EXPECT_DOUBLE_EQ(*lex.find("ferrum"), -0.75);
}

TEST(LoadLexicon, OutOfRangeScoreReportsLine) {
  try {
    lexicon_from("gaudium\t1.5\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(LoadLexicon, MalformedRows) {
  EXPECT_THROW(lexicon_from("bonus\tgood\n"), ParseError);
  EXPECT_THROW(lexicon_from("\t0.5\n"), ParseError);
  EXPECT_THROW(lexicon_from("bonus\n"), ParseError);
  EXPECT_THROW(lexicon_from("bonus\tnan\n"), ParseError);
}

TEST(LoadLexicon, CommentsBlankLinesAndCaseFolding) {
  const auto lex = lexicon_from("# lemma\tscore\n\nBonus\t0.5\n");
  EXPECT_EQ(lex.find("bonus"), 0.5);
  EXPECT_EQ(lex.find("BONUS"), 0.5);
}

TEST(LoadLexicon, RandomInputsStayInRange) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::ostringstream tsv;
    for (int i = 0; i < 100; ++i) {
      tsv << "w" << rng.below(20) << '\t' << text::exact(rng.uniform(-1.0, 1.0)) << '\n';
    }
    const auto lex = lexicon_from(tsv.str());
    for (const auto& [k, v] : lex.entries) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(LookupScore, LemmaThenLowercasedForm) {
  const auto bonus = lexicon_from("bonus\t1.0\n");
  EXPECT_EQ(lookup_score(bonus, Token{"Bonus", "bonus"}), 1.0);
  EXPECT_EQ(lookup_score(bonus, Token{"bonum", std::nullopt}), std::nullopt);
  const auto cano = lexicon_from("cano\t0.5\n");
  EXPECT_EQ(lookup_score(cano, Token{"Cano", std::nullopt}), 0.5);
}

TEST(LemmaMap, FillsOnlyMissingLemmata) {
  auto c = parse(
      "1\tbonum\t_\t_\t_\t_\t0\t_\t_\t_\n"
      "2\tmala\tmalus\t_\t_\t_\t1\t_\t_\t_\n");
  std::istringstream map_in("bonum\tbonus\nmala\tmalum\n");
  c = apply_lemma_map(std::move(c), load_lemma_map(map_in));
  EXPECT_EQ(c.sentences[0].tokens[0].lemma, "bonus");
  EXPECT_EQ(c.sentences[0].tokens[1].lemma, "malus");
}

TEST(Split, ReportedCorpusSizes) {
  const auto s = split_sizes(76505);
  EXPECT_EQ(s.train, 61204u);
  EXPECT_EQ(s.validation, 7651u);
  EXPECT_EQ(s.test, 7650u);
  const auto ten = split_sizes(10);
  EXPECT_EQ(ten.train, 8u);
  EXPECT_EQ(ten.validation, 1u);
  EXPECT_EQ(ten.test, 1u);
}

TEST(Split, SizesMatchFloorCeilForAllSmallN) {
  for (std::size_t n = 3; n <= 5000; ++n) {
    const auto s = split_sizes(n);
    EXPECT_EQ(s.train, static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(n) + 1e-9)));
    EXPECT_EQ(s.validation, static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(n) - 1e-9)));
    EXPECT_EQ(s.train + s.validation + s.test, n);
  }
}

TEST(Split, PartitionPropertyForRandomN) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + rng.below(100000 - 3 + 1);
    const auto idx = split_indices(n, rng.next());
    std::vector<char> seen(n, 0);
    for (const auto* part : {&idx.train, &idx.validation, &idx.test}) {
      for (auto i : *part) {
        ASSERT_LT(i, n);
        ASSERT_EQ(seen[i], 0) << "index in two parts";
        seen[i] = 1;
      }
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](char c) { return c == 1; }));
  }
}

TEST(Split, SameSeedSamePartition) {
  const auto c = synthetic::corpus(137, 5);
  const auto a = split_dataset(c, 42);
  const auto b = split_dataset(c, 42);
  auto ids = [](const Corpus& x) {
    std::vector<std::string> out;
    for (const auto& s : x.sentences) out.push_back(s.id);
    return out;
  };
  EXPECT_EQ(ids(a.train), ids(b.train));
  EXPECT_EQ(ids(a.validation), ids(b.validation));
  EXPECT_EQ(ids(a.test), ids(b.test));
  EXPECT_NE(ids(a.train), ids(split_dataset(c, 43).train));
}

TEST(Split, TooSmallIsAnError) {
  EXPECT_THROW(split_indices(2, 1), DataError);
  EXPECT_THROW(split_indices(0, 1), DataError);
  EXPECT_NO_THROW(split_indices(3, 1));
}

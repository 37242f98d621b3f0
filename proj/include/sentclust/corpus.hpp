#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentclust/error.hpp"
#include "sentclust/random.hpp"
#include "sentclust/text.hpp"

namespace sentclust {

struct Token {
  std::string form;
  std::optional<std::string> lemma;
};

struct Sentence {
  std::string id;
  std::optional<std::string> group;
  std::vector<Token> tokens;
  std::optional<std::string> raw_text;
};

struct Corpus {
  std::vector<Sentence> sentences;
  std::string source;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

/// Lemma -> score in [-1, 1]. Keys are stored lowercased.
struct Lexicon {
  std::unordered_map<std::string, double> entries;

  std::size_t size() const { return entries.size(); }

  std::optional<double> find(std::string_view key) const {
    auto it = entries.find(text::to_lower(key));
    if (it == entries.end()) return std::nullopt;
    return it->second;
  }
};

/// Surface form -> lemma, consulted for tokens that carry no lemma.
struct LemmaMap {
  std::unordered_map<std::string, std::string> entries;
};

namespace detail {

inline bool is_multiword_or_empty_node(std::string_view id) {
  return id.find('-') != std::string_view::npos ||
         id.find('.') != std::string_view::npos;
}

/// Value of a "# key = value" comment, if `line` is one.
inline std::optional<std::string_view> comment_value(std::string_view line,
                                                     std::string_view key) {
  auto body = text::trim(line.substr(1));
  if (!body.starts_with(key)) return std::nullopt;
  body.remove_prefix(key.size());
  body = text::trim(body);
  if (body.empty() || body.front() != '=') return std::nullopt;
  return text::trim(body.substr(1));
}

}  // namespace detail

/// Reads CoNLL-U. Only ID, FORM and LEMMA are interpreted.
///
/// Sentence ids come from `# sent_id =`; otherwise "<source>:<n>" with n the
/// 1-based sentence index. `# text =` fills raw_text. The group tag is taken
/// from `# group =` on the sentence, else from the most recent
/// `# newdoc id =`.
inline Corpus parse_conllu(std::istream& in, std::string source = "<input>") {
  Corpus corpus;
  corpus.source = source;
  std::set<std::string> seen_ids;

  Sentence current;
  std::optional<std::string> explicit_id;
  std::optional<std::string> document;
  std::size_t sentence_start_line = 0;
  bool in_block = false;

  auto flush = [&] {
    in_block = false;
    if (current.tokens.empty()) {
      current = Sentence{};
      explicit_id.reset();
      return;
    }
    const auto index = corpus.sentences.size() + 1;
    current.id = explicit_id ? *explicit_id : source + ":" + std::to_string(index);
    if (!current.group) current.group = document;
    if (!seen_ids.insert(current.id).second) {
      throw ParseError(source, sentence_start_line,
                       "duplicate sentence id '" + current.id + "'");
    }
    corpus.sentences.push_back(std::move(current));
    current = Sentence{};
    explicit_id.reset();
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::strip_cr(raw);
    if (text::trim(line).empty()) {
      flush();
      continue;
    }
    if (!in_block) {
      in_block = true;
      sentence_start_line = line_no;
    }
    if (line.front() == '#') {
      if (auto v = detail::comment_value(line, "sent_id")) {
        explicit_id = std::string(*v);
      } else if (auto v = detail::comment_value(line, "text")) {
        current.raw_text = std::string(*v);
      } else if (auto v = detail::comment_value(line, "group")) {
        current.group = std::string(*v);
      } else if (auto v = detail::comment_value(line, "newdoc id")) {
        document = std::string(*v);
      }
      continue;
    }
    const auto fields = text::split(line, '\t');
    if (fields.size() != 10) {
      throw ParseError(source, line_no,
                       "expected 10 tab-separated columns, found " +
                           std::to_string(fields.size()));
    }
    if (detail::is_multiword_or_empty_node(fields[0])) continue;
    if (fields[1].empty()) {
      throw ParseError(source, line_no, "empty FORM column");
    }
    Token token{std::string(fields[1]), std::nullopt};
    if (!fields[2].empty() && fields[2] != "_") token.lemma = std::string(fields[2]);
    current.tokens.push_back(std::move(token));
  }
  flush();
  return corpus;
}

/// Concatenates corpora; sentence ids must stay unique across inputs.
inline Corpus merge(std::vector<Corpus> parts) {
  Corpus merged;
  std::set<std::string> ids;
  for (auto& part : parts) {
    if (!merged.source.empty()) merged.source += ",";
    merged.source += part.source;
    for (auto& s : part.sentences) {
      if (!ids.insert(s.id).second) {
        throw DataError("duplicate sentence id '" + s.id + "' across corpora");
      }
      merged.sentences.push_back(std::move(s));
    }
  }
  return merged;
}

/// Reads "lemma<TAB>score" lines. Repeated lemmata are averaged.
inline Lexicon load_lexicon(std::istream& in, const std::string& source = "<lexicon>") {
  struct Accumulator {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::map<std::string, Accumulator> acc;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::strip_cr(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() < 2) {
      throw ParseError(source, line_no, "expected 'lemma<TAB>score'");
    }
    const auto lemma = text::trim(fields[0]);
    if (lemma.empty()) throw ParseError(source, line_no, "empty lemma");
    const auto score = text::parse_double(fields[1]);
    if (!score) {
      throw ParseError(source, line_no,
                       "non-numeric score '" + std::string(fields[1]) + "'");
    }
    if (*score < -1.0 || *score > 1.0) {
      throw ParseError(source, line_no,
                       "score " + std::string(text::trim(fields[1])) +
                           " outside [-1, 1]");
    }
    auto& a = acc[text::to_lower(lemma)];
    a.sum += *score;
    a.count += 1;
  }
  Lexicon lexicon;
  for (const auto& [key, a] : acc) {
    // A mean of in-range values is in range; clamp only guards rounding.
    lexicon.entries[key] =
        std::clamp(a.sum / static_cast<double>(a.count), -1.0, 1.0);
  }
  return lexicon;
}

/// Reads "form<TAB>lemma" lines; forms are lowercased.
inline LemmaMap load_lemma_map(std::istream& in, const std::string& source = "<lemma-map>") {
  LemmaMap map;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::strip_cr(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() < 2 || text::trim(fields[0]).empty() ||
        text::trim(fields[1]).empty()) {
      throw ParseError(source, line_no, "expected 'form<TAB>lemma'");
    }
    map.entries[text::to_lower(text::trim(fields[0]))] = std::string(text::trim(fields[1]));
  }
  return map;
}

/// Fills in missing lemmata from the map. Existing lemmata are kept.
inline Corpus apply_lemma_map(Corpus corpus, const LemmaMap& map) {
  for (auto& sentence : corpus.sentences) {
    for (auto& token : sentence.tokens) {
      if (token.lemma) continue;
      auto it = map.entries.find(text::to_lower(token.form));
      if (it != map.entries.end()) token.lemma = it->second;
    }
  }
  return corpus;
}

/// Lemma first, then the lowercased surface form.
inline std::optional<double> lookup_score(const Lexicon& lexicon, const Token& token) {
  if (token.lemma) {
    if (auto s = lexicon.find(*token.lemma)) return s;
  }
  return lexicon.find(token.form);
}

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

/// floor(0.8 N) / ceil(0.1 N) / remainder.
constexpr SplitSizes split_sizes(std::size_t n) {
  SplitSizes s;
  s.train = (8 * n) / 10;
  s.validation = (n + 9) / 10;
  s.test = n - s.train - s.validation;
  return s;
}

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Seeded permutation of [0, n) cut into train/validation/test. The
/// permutation is a Fisher-Yates shuffle driven by MT19937-64(seed).
inline SplitIndices split_indices(std::size_t n, std::uint64_t seed) {
  if (n < 3) {
    throw DataError("need at least 3 items to split, got " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto sizes = split_sizes(n);
  SplitIndices out;
  const auto a = order.begin();
  const auto b = a + static_cast<std::ptrdiff_t>(sizes.train);
  const auto c = b + static_cast<std::ptrdiff_t>(sizes.validation);
  out.train.assign(a, b);
  out.validation.assign(b, c);
  out.test.assign(c, order.end());
  return out;
}

template <typename T>
struct Split {
  T train;
  T validation;
  T test;
};

/// Splits any sequence of items by `split_indices`.
template <typename T>
Split<std::vector<T>> split_items(const std::vector<T>& items, std::uint64_t seed) {
  const auto idx = split_indices(items.size(), seed);
  auto gather = [&](const std::vector<std::size_t>& which) {
    std::vector<T> out;
    out.reserve(which.size());
    for (auto i : which) out.push_back(items[i]);
    return out;
  };
  return {gather(idx.train), gather(idx.validation), gather(idx.test)};
}

inline Split<Corpus> split_dataset(const Corpus& corpus, std::uint64_t seed) {
  auto parts = split_items(corpus.sentences, seed);
  return {Corpus{std::move(parts.train), corpus.source + "#train"},
          Corpus{std::move(parts.validation), corpus.source + "#validation"},
          Corpus{std::move(parts.test), corpus.source + "#test"}};
}

}  // namespace sentclust

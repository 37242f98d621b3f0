#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sentclust/corpus.hpp"
#include "sentclust/error.hpp"
#include "sentclust/label.hpp"
#include "sentclust/text.hpp"

namespace sentclust {

/// A sentence's position on the polarity/intensity plane, both in [0, 1].
struct PolarityCoordinate {
  double polarity = 0.5;
  double intensity = 0.0;

  friend bool operator==(const PolarityCoordinate&, const PolarityCoordinate&) = default;
};

/// Relative tolerance used when checking that centroids are equidistant from
/// the plane's center, and absolute tolerance for distance ties.
inline constexpr double kCentroidTolerance = 1e-9;
inline constexpr double kDistanceTieTolerance = 1e-12;

/// One fixed centroid per label, indexed canonically.
class CentroidSet {
 public:
  /// Positive (1, .5), Negative (0, .5), Neutral (.5, 0), Mixed (.5, 1).
  CentroidSet()
      : points_{{{1.0, 0.5}, {0.0, 0.5}, {0.5, 0.0}, {0.5, 1.0}}} {}

  /// Throws DataError unless the four points are pairwise distinct and
  /// equidistant from (0.5, 0.5).
  explicit CentroidSet(const std::array<PolarityCoordinate, kNumClasses>& points)
      : points_(points) {
    validate();
  }

  const PolarityCoordinate& operator[](SentimentLabel label) const {
    return points_[index_of(label)];
  }
  const std::array<PolarityCoordinate, kNumClasses>& points() const { return points_; }

 private:
  void validate() const {
    auto radius = [](const PolarityCoordinate& p) {
      return std::hypot(p.polarity - 0.5, p.intensity - 0.5);
    };
    const double r0 = radius(points_[0]);
    for (std::size_t i = 0; i < kNumClasses; ++i) {
      const auto& p = points_[i];
      if (!std::isfinite(p.polarity) || !std::isfinite(p.intensity)) {
        throw DataError("centroid coordinates must be finite");
      }
      if (std::abs(radius(p) - r0) > kCentroidTolerance * std::max(1.0, r0)) {
        throw DataError("centroid for '" + std::string(to_string(label_at(i))) +
                        "' is not equidistant from (0.5, 0.5)");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (points_[j] == p) throw DataError("centroids must be pairwise distinct");
      }
    }
    if (r0 == 0.0) throw DataError("centroids must not coincide with (0.5, 0.5)");
  }

  std::array<PolarityCoordinate, kNumClasses> points_;
};

using Distances = std::array<double, kNumClasses>;

struct PcAnnotation {
  std::string sentence_id;
  SentimentLabel label = SentimentLabel::Neutral;
  PolarityCoordinate coordinate;
  double alpha = 1.0;
  std::size_t matched_count = 0;
};

/// Scores of the tokens found in the lexicon, in token order.
inline std::vector<double> score_sentence(const Sentence& sentence, const Lexicon& lexicon) {
  std::vector<double> scores;
  for (const auto& token : sentence.tokens) {
    if (auto s = lookup_score(lexicon, token)) scores.push_back(*s);
  }
  return scores;
}

/// polarity = mean(s) / 2 + 1/2, intensity = mean(|s|).
inline PolarityCoordinate polarity_coordinate(std::span<const double> scores) {
  if (scores.empty()) {
    throw DataError("polarity_coordinate needs at least one lexicon score");
  }
  double sum = 0.0;
  double abs_sum = 0.0;
  for (double s : scores) {
    if (!(s >= -1.0 && s <= 1.0)) throw DataError("lexicon score outside [-1, 1]");
    sum += s;
    abs_sum += std::abs(s);
  }
  const auto n = static_cast<double>(scores.size());
  PolarityCoordinate pc;
  pc.polarity = std::clamp(sum / (2.0 * n) + 0.5, 0.0, 1.0);
  pc.intensity = std::clamp(abs_sum / n, 0.0, 1.0);
  return pc;
}

struct PcClassification {
  SentimentLabel label;
  Distances distances;
};

/// Nearest centroid. Ties (within kDistanceTieTolerance) go to Neutral if it
/// is among the tied labels, otherwise to the lowest canonical index.
inline PcClassification classify_pc(const PolarityCoordinate& coordinate,
                                    const CentroidSet& centroids = {}) {
  PcClassification out{SentimentLabel::Positive, {}};
  for (auto label : kAllLabels) {
    const auto& c = centroids[label];
    out.distances[index_of(label)] =
        std::hypot(coordinate.polarity - c.polarity, coordinate.intensity - c.intensity);
  }
  const double best = *std::min_element(out.distances.begin(), out.distances.end());
  if (out.distances[index_of(SentimentLabel::Neutral)] - best <= kDistanceTieTolerance) {
    out.label = SentimentLabel::Neutral;
    return out;
  }
  for (auto label : kAllLabels) {
    if (out.distances[index_of(label)] - best <= kDistanceTieTolerance) {
      out.label = label;
      break;
    }
  }
  return out;
}

/// 1 - min(d / max(d)). Zero when every distance is equal.
inline double confidence(const Distances& distances) {
  const double max_d = *std::max_element(distances.begin(), distances.end());
  const double min_d = *std::min_element(distances.begin(), distances.end());
  if (!(max_d > 0.0)) return 0.0;
  return std::clamp(1.0 - min_d / max_d, 0.0, 1.0);
}

inline PcAnnotation annotate_sentence(const Sentence& sentence, const Lexicon& lexicon,
                                      const CentroidSet& centroids = {}) {
  PcAnnotation a;
  a.sentence_id = sentence.id;
  const auto scores = score_sentence(sentence, lexicon);
  a.matched_count = scores.size();
  if (scores.empty()) {
    // No lexicon evidence: hard Neutral assignment.
    a.label = SentimentLabel::Neutral;
    a.coordinate = {0.5, 0.0};
    a.alpha = 1.0;
    return a;
  }
  a.coordinate = polarity_coordinate(scores);
  const auto cls = classify_pc(a.coordinate, centroids);
  a.label = cls.label;
  a.alpha = confidence(cls.distances);
  return a;
}

inline std::vector<PcAnnotation> annotate_pc(const Corpus& corpus, const Lexicon& lexicon,
                                             const CentroidSet& centroids = {}) {
  std::vector<PcAnnotation> out;
  out.reserve(corpus.size());
  for (const auto& sentence : corpus.sentences) {
    out.push_back(annotate_sentence(sentence, lexicon, centroids));
  }
  return out;
}

inline std::array<std::size_t, kNumClasses> class_counts(std::span<const PcAnnotation> annotations) {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& a : annotations) counts[index_of(a.label)] += 1;
  return counts;
}

/// "id<TAB>label<TAB>alpha<TAB>polarity<TAB>intensity", six decimals.
inline void write_annotations(std::ostream& out, std::span<const PcAnnotation> annotations) {
  for (const auto& a : annotations) {
    out << a.sentence_id << '\t' << to_string(a.label) << '\t' << text::fixed(a.alpha)
        << '\t' << text::fixed(a.coordinate.polarity) << '\t'
        << text::fixed(a.coordinate.intensity) << '\n';
  }
}

/// Reads the five-column annotation TSV. matched_count is not stored in the
/// file and comes back as zero.
inline std::vector<PcAnnotation> read_annotations(std::istream& in,
                                                  const std::string& source = "<annotations>") {
  std::vector<PcAnnotation> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::strip_cr(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto f = text::split(line, '\t');
    if (f.size() != 5) {
      throw ParseError(source, line_no, "expected 5 tab-separated columns");
    }
    PcAnnotation a;
    a.sentence_id = std::string(f[0]);
    auto label = try_parse_label(f[1]);
    auto alpha = text::parse_double(f[2]);
    auto pol = text::parse_double(f[3]);
    auto inten = text::parse_double(f[4]);
    if (!label) throw ParseError(source, line_no, "unknown label '" + std::string(f[1]) + "'");
    if (!alpha || !pol || !inten) throw ParseError(source, line_no, "non-numeric field");
    if (*alpha < 0.0 || *alpha > 1.0) throw ParseError(source, line_no, "alpha outside [0, 1]");
    a.label = *label;
    a.alpha = *alpha;
    a.coordinate = {*pol, *inten};
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace sentclust

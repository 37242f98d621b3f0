#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "sentclust/error.hpp"

namespace sentclust {

/// The four polarity classes, in canonical index order.
enum class SentimentLabel : std::size_t {
  Positive = 0,
  Negative = 1,
  Neutral = 2,
  Mixed = 3,
};

inline constexpr std::size_t kNumClasses = 4;

inline constexpr std::array<SentimentLabel, kNumClasses> kAllLabels = {
    SentimentLabel::Positive, SentimentLabel::Negative, SentimentLabel::Neutral,
    SentimentLabel::Mixed};

constexpr std::size_t index_of(SentimentLabel label) {
  return static_cast<std::size_t>(label);
}

constexpr SentimentLabel label_at(std::size_t index) {
  return kAllLabels.at(index);
}

/// Lowercase serialized name ("positive", ...).
constexpr std::string_view to_string(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::Positive: return "positive";
    case SentimentLabel::Negative: return "negative";
    case SentimentLabel::Neutral: return "neutral";
    case SentimentLabel::Mixed: return "mixed";
  }
  return "?";
}

/// Accepts the serialized names case-insensitively.
inline std::optional<SentimentLabel> try_parse_label(std::string_view text) {
  std::string lowered(text);
  for (auto& c : lowered) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  for (auto label : kAllLabels) {
    if (lowered == to_string(label)) return label;
  }
  return std::nullopt;
}

inline SentimentLabel parse_label(std::string_view text) {
  if (auto label = try_parse_label(text)) return *label;
  throw DataError("unknown sentiment label '" + std::string(text) + "'");
}

}  // namespace sentclust

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <iomanip>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentclust/error.hpp"
#include "sentclust/label.hpp"
#include "sentclust/text.hpp"

namespace sentclust {

/// Rows are gold labels, columns predicted labels.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t& at(SentimentLabel gold, SentimentLabel predicted) {
    return counts[index_of(gold)][index_of(predicted)];
  }
  std::uint64_t at(SentimentLabel gold, SentimentLabel predicted) const {
    return counts[index_of(gold)][index_of(predicted)];
  }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts) {
      for (auto c : row) t += c;
    }
    return t;
  }

  std::uint64_t diagonal() const {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < kNumClasses; ++i) t += counts[i][i];
    return t;
  }
};

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  std::array<ClassScores, kNumClasses> per_class{};
  std::array<std::uint64_t, kNumClasses> support{};
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
};

enum class MacroAverage {
  /// Mean over all four classes; absent classes contribute 0.
  AllClasses,
  /// Mean over classes that occur in the gold labels only.
  GoldClasses,
};

inline ConfusionMatrix confusion(std::span<const SentimentLabel> gold,
                                 std::span<const SentimentLabel> predicted) {
  if (gold.size() != predicted.size()) {
    throw DataError("confusion: " + std::to_string(gold.size()) + " gold labels vs " +
                    std::to_string(predicted.size()) + " predictions");
  }
  if (gold.empty()) throw DataError("confusion: no label pairs");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < gold.size(); ++i) m.at(gold[i], predicted[i]) += 1;
  return m;
}

namespace detail {
inline double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }
}  // namespace detail

inline MetricsReport metrics(const ConfusionMatrix& m,
                             MacroAverage average = MacroAverage::AllClasses) {
  const auto total = m.total();
  if (total == 0) throw DataError("metrics: empty confusion matrix");
  MetricsReport r;
  double f1_sum = 0.0;
  std::size_t averaged = 0;
  std::uint64_t fp_fn = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::uint64_t tp = m.counts[c][c];
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    for (std::size_t o = 0; o < kNumClasses; ++o) {
      if (o == c) continue;
      fp += m.counts[o][c];
      fn += m.counts[c][o];
    }
    fp_fn += fp + fn;
    auto& s = r.per_class[c];
    s.precision = detail::ratio(double(tp), double(tp + fp));
    s.recall = detail::ratio(double(tp), double(tp + fn));
    s.f1 = detail::ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
    r.support[c] = tp + fn;
    if (average == MacroAverage::AllClasses || r.support[c] > 0) {
      f1_sum += s.f1;
      ++averaged;
    }
  }
  r.macro_f1 = detail::ratio(f1_sum, double(averaged));
  const double tp_all = double(m.diagonal());
  r.micro_f1 = tp_all / (tp_all + double(fp_fn) / 2.0);
  return r;
}

inline double macro_f1(std::span<const SentimentLabel> gold,
                       std::span<const SentimentLabel> predicted,
                       MacroAverage average = MacroAverage::AllClasses) {
  return metrics(confusion(gold, predicted), average).macro_f1;
}

struct GroupScore {
  double macro_f1 = 0.0;
  std::uint64_t support = 0;
};

struct GroupedReport {
  std::map<std::string, GroupScore> groups;
  /// Unweighted mean of the per-group Macro-F1 values.
  double mean_macro_f1 = 0.0;
};

inline GroupedReport grouped_macro(std::span<const SentimentLabel> gold,
                                   std::span<const SentimentLabel> predicted,
                                   std::span<const std::string> groups,
                                   MacroAverage average = MacroAverage::AllClasses) {
  if (gold.size() != predicted.size() || gold.size() != groups.size()) {
    throw DataError("grouped_macro: gold, predicted and group lists differ in length");
  }
  std::map<std::string, std::pair<std::vector<SentimentLabel>, std::vector<SentimentLabel>>> parts;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto& p = parts[groups[i]];
    p.first.push_back(gold[i]);
    p.second.push_back(predicted[i]);
  }
  if (parts.empty()) throw DataError("grouped_macro: no groups");
  GroupedReport report;
  double sum = 0.0;
  for (const auto& [name, p] : parts) {
    GroupScore g{macro_f1(p.first, p.second, average), p.first.size()};
    sum += g.macro_f1;
    report.groups.emplace(name, g);
  }
  report.mean_macro_f1 = sum / double(report.groups.size());
  return report;
}

/// (p_o - p_e) / (1 - p_e). Returns 1 or 0 when p_e == 1.
inline double cohen_kappa(std::span<const SentimentLabel> a, std::span<const SentimentLabel> b) {
  if (a.size() != b.size()) {
    throw DataError("cohen_kappa: labelings differ in length (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw DataError("cohen_kappa: empty labelings");
  const auto m = confusion(a, b);
  const double n = double(a.size());
  const double p_o = double(m.diagonal()) / n;
  double p_e = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    double row = 0.0;
    double col = 0.0;
    for (std::size_t o = 0; o < kNumClasses; ++o) {
      row += double(m.counts[c][o]);
      col += double(m.counts[o][c]);
    }
    p_e += (row / n) * (col / n);
  }
  if (p_e >= 1.0) return p_o >= 1.0 ? 1.0 : 0.0;
  return (p_o - p_e) / (1.0 - p_e);
}

// Output formats -----------------------------------------------------------

inline void write_confusion_tsv(std::ostream& out, const ConfusionMatrix& m) {
  out << "gold\\predicted";
  for (auto l : kAllLabels) out << '\t' << to_string(l);
  out << '\n';
  for (auto g : kAllLabels) {
    out << to_string(g);
    for (auto p : kAllLabels) out << '\t' << m.at(g, p);
    out << '\n';
  }
}

inline void write_confusion_table(std::ostream& out, const ConfusionMatrix& m) {
  std::size_t width = 8;
  for (const auto& row : m.counts) {
    for (auto c : row) width = std::max(width, std::to_string(c).size());
  }
  out << std::left << std::setw(10) << "gold/pred";
  for (auto l : kAllLabels) out << ' ' << std::right << std::setw(int(width)) << to_string(l);
  out << '\n';
  for (auto g : kAllLabels) {
    out << std::left << std::setw(10) << to_string(g);
    for (auto p : kAllLabels) out << ' ' << std::right << std::setw(int(width)) << m.at(g, p);
    out << '\n';
  }
  out << std::left;
}

inline nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json classes = nlohmann::ordered_json::object();
  for (auto l : kAllLabels) {
    const auto& s = r.per_class[index_of(l)];
    classes[std::string(to_string(l))] = {{"precision", s.precision},
                                          {"recall", s.recall},
                                          {"f1", s.f1},
                                          {"support", r.support[index_of(l)]}};
  }
  j["macro_f1"] = r.macro_f1;
  j["micro_f1"] = r.micro_f1;
  j["classes"] = std::move(classes);
  return j;
}

inline void write_grouped_tsv(std::ostream& out, const GroupedReport& r) {
  out << "group\tmacro_f1\tsupport\n";
  std::uint64_t total = 0;
  for (const auto& [name, g] : r.groups) {
    out << name << '\t' << text::fixed(g.macro_f1) << '\t' << g.support << '\n';
    total += g.support;
  }
  out << "mean\t" << text::fixed(r.mean_macro_f1) << '\t' << total << '\n';
}

}  // namespace sentclust

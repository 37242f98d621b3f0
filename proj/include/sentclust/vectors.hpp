#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sentclust/error.hpp"
#include "sentclust/polarity.hpp"
#include "sentclust/text.hpp"

namespace sentclust {

struct EmbeddingRecord {
  std::string sentence_id;
  std::vector<double> vector;
};

/// Sentence vectors of a single dimension, kept in file order.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<EmbeddingRecord>& records() const { return records_; }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  const std::vector<double>& at(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw DataError("no embedding for sentence '" + id + "'");
    return records_[it->second].vector;
  }

  /// Validates against the store's dimension (set by the first record).
  void add(EmbeddingRecord record) {
    if (record.vector.empty()) {
      throw DataError("empty vector for '" + record.sentence_id + "'");
    }
    if (records_.empty()) dimension_ = record.vector.size();
    if (record.vector.size() != dimension_) {
      throw DataError("dimension mismatch for '" + record.sentence_id + "': expected " +
                      std::to_string(dimension_) + ", got " +
                      std::to_string(record.vector.size()));
    }
    for (double v : record.vector) {
      if (!std::isfinite(v)) {
        throw DataError("non-finite value in vector for '" + record.sentence_id + "'");
      }
    }
    if (!index_.emplace(record.sentence_id, records_.size()).second) {
      throw DataError("duplicate embedding id '" + record.sentence_id + "'");
    }
    records_.push_back(std::move(record));
  }

 private:
  std::size_t dimension_ = 0;
  std::vector<EmbeddingRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One JSON object per line: {"id": "...", "vector": [...]}.
inline EmbeddingStore load_embeddings(std::istream& in,
                                      const std::string& source = "<embeddings>") {
  EmbeddingStore store;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (text::trim(raw).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("vector") || !obj["vector"].is_array()) {
      throw ParseError(source, line_no, "expected {\"id\": <string>, \"vector\": [...]}");
    }
    EmbeddingRecord rec;
    rec.sentence_id = obj["id"].get<std::string>();
    rec.vector.reserve(obj["vector"].size());
    for (const auto& v : obj["vector"]) {
      if (!v.is_number()) {
        throw ParseError(source, line_no, "non-numeric vector entry for '" + rec.sentence_id + "'");
      }
      rec.vector.push_back(v.get<double>());
    }
    try {
      store.add(std::move(rec));
    } catch (const DataError& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  if (store.empty()) throw DataError(source + ": no embeddings found");
  return store;
}

/// Writes values with 17 significant digits so a reload is bit-exact.
inline void save_embeddings(std::ostream& out, const EmbeddingStore& store) {
  for (const auto& rec : store.records()) {
    out << "{\"id\": " << nlohmann::json(rec.sentence_id).dump() << ", \"vector\": [";
    for (std::size_t i = 0; i < rec.vector.size(); ++i) {
      if (i) out << ", ";
      out << text::exact(rec.vector[i]);
    }
    out << "]}\n";
  }
}

/// Per-column centering and scaling, fitted on one matrix and reusable on
/// others. Constant columns keep scale 1.
struct FeatureScaling {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static FeatureScaling fit(const Eigen::MatrixXd& features) {
    FeatureScaling s;
    const auto rows = static_cast<double>(std::max<Eigen::Index>(features.rows(), 1));
    s.mean = features.colwise().sum() / rows;
    s.scale = ((features.rowwise() - s.mean).array().square().colwise().sum() / rows).sqrt();
    for (Eigen::Index c = 0; c < s.scale.size(); ++c) {
      if (!(s.scale(c) > 0.0)) s.scale(c) = 1.0;
    }
    return s;
  }

  void apply(Eigen::MatrixXd& features) const {
    if (features.cols() != mean.size()) throw DataError("scaling: column count mismatch");
    features.rowwise() -= mean;
    features.array().rowwise() /= scale.array();
  }
};

/// Row i is the embedding of annotations[i] followed by its polarity and
/// intensity. Width is dimension + 2.
inline Eigen::MatrixXd build_features(const EmbeddingStore& store,
                                      std::span<const PcAnnotation> annotations) {
  std::vector<std::string> missing;
  for (const auto& a : annotations) {
    if (!store.contains(a.sentence_id)) missing.push_back(a.sentence_id);
  }
  if (!missing.empty()) {
    std::string msg = "no embeddings for " + std::to_string(missing.size()) + " sentence(s):";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ...";
    throw DataError(msg);
  }
  const auto dim = static_cast<Eigen::Index>(store.dimension());
  Eigen::MatrixXd features(static_cast<Eigen::Index>(annotations.size()), dim + 2);
  for (std::size_t r = 0; r < annotations.size(); ++r) {
    const auto& v = store.at(annotations[r].sentence_id);
    const auto row = static_cast<Eigen::Index>(r);
    features.row(row).head(dim) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), dim);
    features(row, dim) = annotations[r].coordinate.polarity;
    features(row, dim + 1) = annotations[r].coordinate.intensity;
  }
  return features;
}

}  // namespace sentclust

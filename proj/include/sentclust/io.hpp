#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentclust/error.hpp"
#include "sentclust/label.hpp"
#include "sentclust/text.hpp"

#if defined(__unix__) || defined(__APPLE__)
#include <unistd.h>
#endif

namespace sentclust::io {

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
  return in;
}

/// Writes through a sibling temp file and renames it into place, so readers
/// never observe a partial file.
inline void write_atomic(const std::filesystem::path& path,
                         const std::function<void(std::ostream&)>& body) {
  namespace fs = std::filesystem;
  if (path.has_parent_path() && !path.parent_path().empty()) {
    fs::create_directories(path.parent_path());
  }
  long pid = 0;
#if defined(__unix__) || defined(__APPLE__)
  pid = static_cast<long>(::getpid());
#endif
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(pid);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + tmp.string() + "' for writing");
    body(out);
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw DataError("write to '" + path.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot move output into place at '" + path.string() + "'");
  }
}

/// One row of a label file: "id<TAB>label[<TAB>alpha[...]]".
struct LabeledId {
  std::string id;
  SentimentLabel label = SentimentLabel::Neutral;
  double alpha = 1.0;
};

/// Reads label TSVs. A third numeric column is taken as alpha; further
/// columns are ignored. A first line whose label column reads "label" is
/// treated as a header.
inline std::vector<LabeledId> read_labels(std::istream& in, const std::string& source) {
  std::vector<LabeledId> out;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::strip_cr(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto f = text::split(line, '\t');
    if (f.size() < 2) throw ParseError(source, line_no, "expected 'id<TAB>label'");
    if (first && text::trim(f[1]) == "label") {
      first = false;
      continue;
    }
    first = false;
    LabeledId row;
    row.id = std::string(f[0]);
    auto label = try_parse_label(text::trim(f[1]));
    if (!label) throw ParseError(source, line_no, "unknown label '" + std::string(f[1]) + "'");
    row.label = *label;
    if (f.size() >= 3) {
      auto alpha = text::parse_double(f[2]);
      if (!alpha) throw ParseError(source, line_no, "non-numeric alpha");
      if (*alpha < 0.0 || *alpha > 1.0) throw ParseError(source, line_no, "alpha outside [0, 1]");
      row.alpha = *alpha;
    }
    if (!seen.insert(row.id).second) {
      throw ParseError(source, line_no, "duplicate id '" + row.id + "'");
    }
    out.push_back(std::move(row));
  }
  return out;
}

inline std::vector<LabeledId> read_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_labels(in, path.string());
}

/// One id per line.
inline std::vector<std::string> read_ids(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::string> ids;
  std::string raw;
  while (std::getline(in, raw)) {
    const auto id = text::trim(raw);
    if (!id.empty()) ids.emplace_back(id);
  }
  return ids;
}

inline void write_ids(const std::filesystem::path& path, const std::vector<std::string>& ids) {
  write_atomic(path, [&](std::ostream& out) {
    for (const auto& id : ids) out << id << '\n';
  });
}

/// "id<TAB>group" rows.
inline std::unordered_map<std::string, std::string> read_groups(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::unordered_map<std::string, std::string> groups;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::strip_cr(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto f = text::split(line, '\t');
    if (f.size() < 2) throw ParseError(path.string(), line_no, "expected 'id<TAB>group'");
    groups[std::string(f[0])] = std::string(text::trim(f[1]));
  }
  return groups;
}

inline std::string read_all(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sentclust::io

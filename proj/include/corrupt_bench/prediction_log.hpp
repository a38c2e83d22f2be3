#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "corrupt_bench/manifest.hpp"
#include "corrupt_bench/metrics.hpp"

namespace corrupt_bench {

/// Split tag: clean, or a corruption cell.
struct SplitTag {
  std::optional<CorruptionKind> kind;
  int severity = 0;

  bool clean() const { return !kind; }
  bool operator==(const SplitTag&) const = default;

  std::string str() const { return kind ? std::string(name_of(*kind)) + "/" + std::to_string(severity) : "clean"; }
};

struct PredictionRecord {
  std::string image_id;
  std::string pred;
  std::string label;
  std::string split;  // raw tag as written by the runner
};

using PredictionLog = std::vector<PredictionRecord>;

enum class LogErrorCode { Malformed, TrainingSplit, UnknownImage, SplitMismatch, UnknownLabel, Duplicate, EmptyCell };

class PredictionLogError : public Error {
 public:
  PredictionLogError(LogErrorCode code, const std::string& what) : Error(what), code_(code) {}
  LogErrorCode code() const { return code_; }

 private:
  LogErrorCode code_;
};

/// Parses "clean" or "<kind>/<severity>". Any tag naming a training split
/// is a protocol violation against a test-only manifest.
inline SplitTag parse_split_tag(std::string_view tag) {
  if (tag == "clean") return {};
  if (tag == "train" || tag.starts_with("train/") || tag.starts_with("train:"))
    throw PredictionLogError(LogErrorCode::TrainingSplit,
                             "log claims a training split ('" + std::string(tag) +
                                 "') but the manifest is test_only: corrupted images must not be trained on");
  const auto slash = tag.find('/');
  if (slash == std::string_view::npos)
    throw PredictionLogError(LogErrorCode::Malformed, "bad split tag '" + std::string(tag) + "'");
  const auto kind = kind_from_name(tag.substr(0, slash));
  const auto sev = tag.substr(slash + 1);
  if (!kind || sev.size() != 1 || sev[0] < '1' || sev[0] > '5')
    throw PredictionLogError(LogErrorCode::Malformed, "bad split tag '" + std::string(tag) + "'");
  return {*kind, sev[0] - '0'};
}

namespace detail {

inline std::string label_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw PredictionLogError(LogErrorCode::Malformed, "label must be a string or integer");
}

}  // namespace detail

/// One JSON object per line with fields image_id, pred, label, split.
inline PredictionLog parse_prediction_log(std::istream& in) {
  PredictionLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      log.push_back({j.at("image_id").get<std::string>(), detail::label_string(j.at("pred")),
                     detail::label_string(j.at("label")), j.at("split").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw PredictionLogError(LogErrorCode::Malformed, "prediction log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return log;
}

inline PredictionLog load_prediction_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_prediction_log(in);
}

inline std::string dump_prediction_log(const PredictionLog& log) {
  std::string out;
  for (const auto& r : log)
    out += nlohmann::json{{"image_id", r.image_id}, {"pred", r.pred}, {"label", r.label}, {"split", r.split}}.dump() +
           "\n";
  return out;
}

struct ProfileCounts {
  std::size_t clean = 0;
  std::size_t corrupted = 0;
};

/// Top-1 error per cell as the fraction of records with pred != label.
/// Clean records are identified by source paths, corrupted records by
/// output paths. Record order does not matter.
inline ErrorProfile build_error_profile(const PredictionLog& log, const DatasetManifest& manifest,
                                        std::string network_name = "", ProfileCounts* counts = nullptr) {
  const std::set<std::string> labels(manifest.labels.begin(), manifest.labels.end());
  std::set<std::string> seen;
  std::map<std::pair<int, int>, std::pair<std::size_t, std::size_t>> cells;  // (kind, sev) -> (wrong, total)
  std::size_t clean_wrong = 0, clean_total = 0;

  for (const auto& r : log) {
    const SplitTag tag = parse_split_tag(r.split);
    if (tag.clean()) {
      if (!manifest.find_source(r.image_id))
        throw PredictionLogError(LogErrorCode::UnknownImage, "unknown image id '" + r.image_id + "' (clean)");
    } else {
      const ManifestEntry* e = manifest.find_entry(r.image_id);
      if (!e) throw PredictionLogError(LogErrorCode::UnknownImage, "unknown image id '" + r.image_id + "'");
      if (e->kind != *tag.kind || e->severity != tag.severity)
        throw PredictionLogError(LogErrorCode::SplitMismatch, "image '" + r.image_id + "' is " +
                                                                  std::string(name_of(e->kind)) + "/" +
                                                                  std::to_string(e->severity) + ", log says " + r.split);
    }
    if (!labels.contains(r.label))
      throw PredictionLogError(LogErrorCode::UnknownLabel, "label '" + r.label + "' not in manifest label set");
    if (!seen.insert(tag.str() + "\n" + r.image_id).second)
      throw PredictionLogError(LogErrorCode::Duplicate, "duplicate record for '" + r.image_id + "' in " + tag.str());
    const bool wrong = r.pred != r.label;
    if (tag.clean()) {
      ++clean_total;
      clean_wrong += wrong;
    } else {
      auto& c = cells[{static_cast<int>(*tag.kind), tag.severity}];
      c.first += wrong;
      ++c.second;
    }
  }

  ErrorProfile p;
  p.network_name = std::move(network_name);
  if (clean_total) p.clean_error = static_cast<double>(clean_wrong) / static_cast<double>(clean_total);
  std::size_t corrupted = 0;
  for (auto kind : manifest.corruptions)
    for (int sev : manifest.severities) {
      auto it = cells.find({static_cast<int>(kind), sev});
      if (it == cells.end())
        throw PredictionLogError(LogErrorCode::EmptyCell, "no predictions for cell " + std::string(name_of(kind)) +
                                                              "/" + std::to_string(sev));
      p.set(kind, sev, static_cast<double>(it->second.first) / static_cast<double>(it->second.second));
      corrupted += it->second.second;
    }
  if (counts) *counts = {clean_total, corrupted};
  return p;
}

}  // namespace corrupt_bench

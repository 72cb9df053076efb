#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "mixview/config.hpp"
#include "mixview/data.hpp"
#include "mixview/diagnostics.hpp"
#include "mixview/network.hpp"
#include "mixview/trainer.hpp"

namespace mixview {

using json = nlohmann::ordered_json;

// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double x);

json to_json(const ExperimentConfig& cfg);
json to_json(const DataPoint& pt);
json to_json(const FeatureDictionary& dict);
json to_json(const Weights& w);
json to_json(const FeatureLearningReport& rep);
json to_json(const MonotonicityReport& rep);
json to_json(const ProbeResult& pr);
json to_json(const ProbeSeries& series);
json to_json(const SeparabilityResult& sep);
json to_json(const AlignmentGap& gap);
json to_json(const FdCheckResult& fd);
json dataset_json(const ExperimentConfig& cfg, std::span<const DataPoint> points);
json vector_dataset_json(const VectorDataset& ds);

Weights weights_from_json(const json& j);
VectorDataset vector_dataset_from_json(const json& j);

// Trajectory CSV, one row per record. Columns: t, loss, train_acc, then
// lambda_y_l, c_y_l, bsize_y_l for each (y, l), then delta_y, lead_y per
// class, then max_offdiag.
std::string trajectory_csv(const std::vector<TrajectoryRecord>& records, int k);

// FNV-1a over the file's bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& content);

// Run manifest: resolved config, seed, and every artifact with its hash.
class Manifest {
 public:
  Manifest(std::string command, const ExperimentConfig& cfg);
  // Writes `content` into dir/name and records it.
  void emit(const std::filesystem::path& dir, const std::string& name,
            const std::string& content);
  // Writes the manifest itself as manifest.json.
  void finalize(const std::filesystem::path& dir);

 private:
  json doc_;
  json artifacts_ = json::array();
};

}  // namespace mixview

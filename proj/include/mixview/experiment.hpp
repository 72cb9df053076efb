#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixview/config.hpp"
#include "mixview/data.hpp"
#include "mixview/diagnostics.hpp"
#include "mixview/network.hpp"
#include "mixview/trainer.hpp"

namespace mixview {

struct ParseResult {
  ExperimentConfig config;
  std::vector<std::string> errors;  // syntax (with line numbers) + semantic
  bool ok() const { return errors.empty(); }
};

// Line format: `section.key = value`, '#' comments, blank lines ignored.
// Unset keys keep the base config's values (the desk preset unless a
// different base is passed). All violations are collected, not just the
// first.
ParseResult parse_config(const std::string& text);
ParseResult parse_config(const std::string& text, const ExperimentConfig& base);

// b_threshold_mult = 0 means per-objective default: 1 for ERM, 2 for the
// mixup objectives.
double resolve_tau(const TrainConfig& cfg);

// Deterministic materialization of a full experiment: dictionary, train
// set, initial weights, all from named substreams of cfg.seed.
struct RunContext {
  ExperimentConfig cfg;
  FeatureDictionary dict;
  std::vector<DataPoint> points;  // empty when data_kind == Simple
  std::vector<SimplePoint> simple_points;
  PatchDataset train_set;
  Weights init;
};

RunContext prepare_run(const ExperimentConfig& cfg);

// Trains one arm of `ctx` under the given objective, with the B-set
// threshold multiplier resolved per objective.
TrainResult train_arm(const RunContext& ctx, Objective objective);

struct CompareResult {
  TrainResult erm;
  TrainResult mm;
  FeatureLearningReport erm_features;
  FeatureLearningReport mm_features;
};

// Both objectives from the same initialization and dataset, plus the
// feature-learning reports on fresh class-conditional samples.
CompareResult run_compare(const RunContext& ctx);

}  // namespace mixview

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stlfd/metrics.hpp"

namespace stlfd::cli {

struct EvalOptions {
  std::filesystem::path run_dir;
  std::filesystem::path ground_truth;
  std::optional<std::filesystem::path> input_dir;  // overrides the run manifest
  std::optional<std::string> pattern;
  MatchRule rule;
  int roc_steps = 256;
  std::optional<int> ring_width;  // default: per target, ceil(max(w, h))
  int threads = 1;
};

struct EvalReport {
  RocCurve roc;
  DetectionRates operating_point;  // masks written by the run, component matching
  double mean_scrg = 0.0;          // NaN when no frame has a target
  double mean_bsf = 0.0;
  std::size_t frames = 0;
  std::size_t scored_targets = 0;
  int width = 0;
  int height = 0;
};

/// Scores a detect run directory against ground truth. Throws stlfd::Error on
/// missing files or targets that do not fit the frame.
EvalReport evaluate_run(const EvalOptions& opts);

void write_roc_csv(const std::filesystem::path& path, const RocCurve& roc);
void write_summary_csv(const std::filesystem::path& path, const EvalReport& report);

}  // namespace stlfd::cli

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "starseg/metrics.hpp"
#include "starseg/segmentation.hpp"

namespace starseg::pipeline {

namespace fs = std::filesystem;

enum class Command { kDecompose, kSegment, kEvaluate, kAuto };
enum class ReportFormat { kJson, kCsv };

std::string_view to_string(Command c);
std::string_view to_string(ReportFormat f);
std::string_view to_string(Polarity p);

/// Invalid invocation (missing ground truth, level out of range, ...).
/// Data problems are reported as starseg::Error instead.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  static constexpr int kMinLevels = 3;
  static constexpr int kMaxLevels = 12;

  fs::path input;
  std::optional<fs::path> ground_truth;
  int max_level = 9;
  Polarity polarity = Polarity::kDarkFeatures;
  double threshold = 0.0;
  fs::path output_dir = ".";
  ReportFormat format = ReportFormat::kCsv;
  bool dump_raw = false;

  SegmentationConfig segmentation() const { return {max_level, polarity, threshold}; }

  /// Throws UsageError.
  void validate(Command command) const;
};

struct StageTimings {
  double load_ms = 0.0;
  double decompose_ms = 0.0;
  double sweep_ms = 0.0;
  double evaluate_ms = 0.0;
};

struct RunManifest {
  Command command = Command::kDecompose;
  RunConfig config;
  int width = 0;
  int height = 0;
  std::vector<LevelMetrics> per_level;
  std::optional<int> optimal_level;
  std::vector<std::string> outputs;  // relative to config.output_dir
  StageTimings timings;
  std::string created_utc;
};

inline constexpr std::string_view kManifestName = "manifest.json";

/// Runs one command and writes its artifacts plus manifest.json into
/// cfg.output_dir (created if missing).
///
///   decompose  detail_NN.png (min-max normalized), smooth.png
///              [+ detail_NN.pfm, smooth.pfm with dump_raw]
///   segment    mask_LNN.png for every level 3..max_level
///   evaluate   metrics.csv|json, overlay_LNN.png, optimal_mask.png
///   auto       optimal_mask.png, optimal_overlay.png
RunManifest run(Command command, const RunConfig& cfg);

struct BatchEntry {
  std::string stem;
  std::optional<RunManifest> manifest;
  std::string error;  // set when the pair failed
};

struct BatchResult {
  std::vector<BatchEntry> entries;    // sorted by stem
  std::vector<std::string> unmatched;  // files without a partner
  bool all_succeeded() const;
};

inline constexpr std::string_view kSummaryName = "summary.csv";
inline constexpr std::string_view kBatchManifestName = "batch_manifest.json";

/// Pairs `<stem>.<ext>` with `<stem>_gt.<ext>` in `dir` and runs `command`
/// (evaluate or auto) for each pair into `<output_dir>/<stem>/`. Writes
/// summary.csv with one row per successful pair and batch_manifest.json.
/// Unmatched files are reported, not fatal.
BatchResult run_batch(Command command, const RunConfig& base, const fs::path& dir);

/// Header plus one row per level; LF line endings, 5 decimals for rates.
std::string metrics_csv(std::span<const LevelMetrics> rows);
std::string metrics_json(std::span<const LevelMetrics> rows);
std::string manifest_json(const RunManifest& manifest);

/// Per-plane min-max stretch to [0, 255]; a flat plane maps to 128.
GrayImage normalize_for_display(const GrayImage& plane);

}  // namespace starseg::pipeline

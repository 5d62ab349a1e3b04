#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "starseg/image.hpp"
#include "starseg/segmentation.hpp"

namespace starseg {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Fractions in [0, 1].
struct RetrievalScores {
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
};

/// Per-level row of a sweep evaluation. Rates are percentages.
struct LevelMetrics {
  int level = 0;
  ConfusionCounts counts;
  double precision_pct = 0.0;
  double recall_pct = 0.0;
  double accuracy_pct = 0.0;
  double mcc_pct = 0.0;
};

struct LevelCounts {
  int level;
  ConfusionCounts counts;
};

struct LevelScore {
  int level;
  double mcc;
};

struct LevelSelection {
  std::vector<LevelMetrics> per_level;  // ascending level
  int optimal_level = 0;
};

struct LevelReport {
  std::vector<LevelMetrics> per_level;
  int optimal_level;
  BinaryMask optimal_mask;
};

/// Throws DimensionMismatch when the masks differ in size.
ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt);

/// A ratio whose denominator is zero is reported as 0.
/// Throws EmptyInput when the counts are all zero.
RetrievalScores precision_recall_accuracy(const ConfusionCounts& c);

/// Matthews correlation coefficient in [-1, 1]; 0 when any factor under the
/// square root is 0. Counts are promoted to double before multiplying.
/// Throws EmptyInput when the counts are all zero.
double mcc(const ConfusionCounts& c);

LevelMetrics level_metrics(int level, const ConfusionCounts& c);

/// Highest MCC wins; ties go to the lowest level. Throws EmptyInput on an
/// empty list.
int select_optimal_level(std::span<const LevelScore> scores);

LevelSelection select_optimal(std::span<const LevelCounts> rows);

/// Scores every sweep mask against `gt` and keeps the winning mask.
LevelReport evaluate_sweep(std::span<const LevelMask> sweep, const BinaryMask& gt);

/// TP green, FN blue, FP red, TN black.
RgbImage comparison_overlay(const BinaryMask& pred, const BinaryMask& gt);

}  // namespace starseg

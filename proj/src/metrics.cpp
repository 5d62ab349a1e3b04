#include "starseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace starseg {
namespace {

void require_same_shape(const BinaryMask& pred, const BinaryMask& gt) {
  if (!pred.same_shape(gt)) {
    throw Error(Errc::kDimensionMismatch,
                "prediction is " + std::to_string(pred.width()) + "x" + std::to_string(pred.height()) +
                    " but ground truth is " + std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  }
}

void require_nonempty(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(Errc::kEmptyInput, "confusion counts are empty");
}

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred, gt);
  ConfusionCounts c;
  const auto p = pred.pixels();
  const auto g = gt.pixels();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i]) {
      if (g[i]) ++c.tp; else ++c.fp;
    } else {
      if (g[i]) ++c.fn; else ++c.tn;
    }
  }
  return c;
}

RetrievalScores precision_recall_accuracy(const ConfusionCounts& c) {
  require_nonempty(c);
  const double tp = static_cast<double>(c.tp);
  const double tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  return {ratio(tp, tp + fp), ratio(tp, tp + fn), (tp + tn) / static_cast<double>(c.total())};
}

double mcc(const ConfusionCounts& c) {
  require_nonempty(c);
  const double tp = static_cast<double>(c.tp);
  const double tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double radicand = (tp + fn) * (tp + fp) * (tn + fp) * (tn + fn);
  if (radicand == 0.0) return 0.0;
  const double value = (tp * tn - fp * fn) / std::sqrt(radicand);
  return std::clamp(value, -1.0, 1.0);
}

LevelMetrics level_metrics(int level, const ConfusionCounts& c) {
  const RetrievalScores s = precision_recall_accuracy(c);
  return {level, c, 100.0 * s.precision, 100.0 * s.recall, 100.0 * s.accuracy, 100.0 * mcc(c)};
}

int select_optimal_level(std::span<const LevelScore> scores) {
  if (scores.empty()) throw Error(Errc::kEmptyInput, "no levels to select from");
  const LevelScore* best = &scores.front();
  for (const LevelScore& s : scores) {
    if (s.mcc > best->mcc || (s.mcc == best->mcc && s.level < best->level)) best = &s;
  }
  return best->level;
}

LevelSelection select_optimal(std::span<const LevelCounts> rows) {
  if (rows.empty()) throw Error(Errc::kEmptyInput, "no levels to select from");
  LevelSelection out;
  std::vector<LevelScore> scores;
  for (const LevelCounts& r : rows) {
    out.per_level.push_back(level_metrics(r.level, r.counts));
    scores.push_back({r.level, mcc(r.counts)});
  }
  std::sort(out.per_level.begin(), out.per_level.end(),
            [](const LevelMetrics& a, const LevelMetrics& b) { return a.level < b.level; });
  out.optimal_level = select_optimal_level(scores);
  return out;
}

LevelReport evaluate_sweep(std::span<const LevelMask> sweep, const BinaryMask& gt) {
  if (sweep.empty()) throw Error(Errc::kEmptyInput, "no segmentation levels to evaluate");
  std::vector<LevelCounts> rows;
  rows.reserve(sweep.size());
  for (const LevelMask& m : sweep) rows.push_back({m.level, confusion(m.mask, gt)});
  LevelSelection sel = select_optimal(rows);
  const auto winner = std::find_if(sweep.begin(), sweep.end(),
                                   [&](const LevelMask& m) { return m.level == sel.optimal_level; });
  return {std::move(sel.per_level), sel.optimal_level, winner->mask};
}

RgbImage comparison_overlay(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred, gt);
  RgbImage out(pred.width(), pred.height());
  const auto p = pred.pixels();
  const auto g = gt.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] && g[i]) {
      dst[i] = {0, 255, 0};
    } else if (p[i]) {
      dst[i] = {255, 0, 0};
    } else if (g[i]) {
      dst[i] = {0, 0, 255};
    }
  }
  return out;
}

}  // namespace starseg

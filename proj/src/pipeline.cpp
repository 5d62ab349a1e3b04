#include "starseg/pipeline.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>

#include "json.hpp"

#include "starseg/image_io.hpp"
#include "starseg/starlet.hpp"

#ifndef STARSEG_VERSION
#define STARSEG_VERSION "unknown"
#endif

namespace starseg::pipeline {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double round5(double v) { return std::round(v * 1e5) / 1e5; }

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string level_tag(int level) { return fmt::format("{:02d}", level); }

// Records every artifact a command writes, relative to the output directory.
class OutputDir {
 public:
  explicit OutputDir(const fs::path& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::kIoError, "cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  fs::path add(const std::string& name) {
    written_.push_back(name);
    return dir_ / name;
  }

  const fs::path& path() const { return dir_; }
  std::vector<std::string> take() { return std::move(written_); }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
};

json level_json(const LevelMetrics& m) {
  return {{"level", m.level},
          {"tp", m.counts.tp},
          {"tn", m.counts.tn},
          {"fp", m.counts.fp},
          {"fn", m.counts.fn},
          {"precision_pct", round5(m.precision_pct)},
          {"recall_pct", round5(m.recall_pct)},
          {"accuracy_pct", round5(m.accuracy_pct)},
          {"mcc_pct", round5(m.mcc_pct)}};
}

std::string metrics_row(const LevelMetrics& m) {
  return fmt::format("{},{},{},{},{},{:.5f},{:.5f},{:.5f},{:.5f}\n", m.level, m.counts.tp, m.counts.tn,
                     m.counts.fp, m.counts.fn, m.precision_pct, m.recall_pct, m.accuracy_pct, m.mcc_pct);
}

constexpr std::string_view kMetricsHeader =
    "level,tp,tn,fp,fn,precision_pct,recall_pct,accuracy_pct,mcc_pct\n";

GrayImage load_input(const RunConfig& cfg, StageTimings& t) {
  const auto start = Clock::now();
  GrayImage img = load_gray(cfg.input);
  t.load_ms += elapsed_ms(start);
  starlet::require_decomposable(img.width(), img.height(), cfg.max_level);
  spdlog::info("loaded {} ({}x{})", cfg.input.string(), img.width(), img.height());
  return img;
}

BinaryMask load_ground_truth(const RunConfig& cfg, const GrayImage& img, StageTimings& t) {
  const auto start = Clock::now();
  BinaryMask gt = load_mask(*cfg.ground_truth);
  t.load_ms += elapsed_ms(start);
  if (gt.width() != img.width() || gt.height() != img.height()) {
    throw Error(Errc::kDimensionMismatch,
                fmt::format("input {} is {}x{} but ground truth {} is {}x{}", cfg.input.string(), img.width(),
                            img.height(), cfg.ground_truth->string(), gt.width(), gt.height()));
  }
  return gt;
}

std::vector<LevelMask> sweep_levels(const GrayImage& img, const RunConfig& cfg, StageTimings& t) {
  const SegmentationConfig seg = cfg.segmentation();
  auto start = Clock::now();
  const starlet::Decomposition dec = starlet::decompose(img, cfg.max_level);
  t.decompose_ms += elapsed_ms(start);

  start = Clock::now();
  std::vector<LevelMask> masks;
  for (const DetailSum& sum : detail_sums(dec, seg)) masks.push_back({sum.level, binarize(sum, seg)});
  t.sweep_ms += elapsed_ms(start);
  return masks;
}

void run_decompose(const RunConfig& cfg, RunManifest& m, OutputDir& out) {
  const GrayImage img = load_input(cfg, m.timings);
  m.width = img.width();
  m.height = img.height();

  const auto start = Clock::now();
  const starlet::Decomposition dec = starlet::decompose(img, cfg.max_level);
  m.timings.decompose_ms = elapsed_ms(start);

  for (int j = 1; j <= dec.levels(); ++j) {
    const GrayImage& w = dec.details[static_cast<std::size_t>(j - 1)];
    save_image(normalize_for_display(w), out.add("detail_" + level_tag(j) + ".png"));
    if (cfg.dump_raw) save_pfm(w, out.add("detail_" + level_tag(j) + ".pfm"));
  }
  save_image(dec.smooth, out.add("smooth.png"));
  if (cfg.dump_raw) save_pfm(dec.smooth, out.add("smooth.pfm"));
}

void run_segment(const RunConfig& cfg, RunManifest& m, OutputDir& out) {
  const GrayImage img = load_input(cfg, m.timings);
  m.width = img.width();
  m.height = img.height();
  for (const LevelMask& lm : sweep_levels(img, cfg, m.timings)) {
    save_mask(lm.mask, out.add("mask_L" + level_tag(lm.level) + ".png"));
  }
}

LevelReport evaluate(const RunConfig& cfg, RunManifest& m, const std::vector<LevelMask>& masks,
                     const BinaryMask& gt) {
  const auto start = Clock::now();
  LevelReport report = evaluate_sweep(masks, gt);
  m.timings.evaluate_ms = elapsed_ms(start);
  m.per_level = report.per_level;
  m.optimal_level = report.optimal_level;
  spdlog::info("{}: optimal level {}", cfg.input.string(), report.optimal_level);
  return report;
}

void run_evaluate(const RunConfig& cfg, RunManifest& m, OutputDir& out) {
  const GrayImage img = load_input(cfg, m.timings);
  m.width = img.width();
  m.height = img.height();
  const BinaryMask gt = load_ground_truth(cfg, img, m.timings);
  const std::vector<LevelMask> masks = sweep_levels(img, cfg, m.timings);
  const LevelReport report = evaluate(cfg, m, masks, gt);

  if (cfg.format == ReportFormat::kCsv) {
    write_file_atomic(out.add("metrics.csv"), metrics_csv(report.per_level));
  } else {
    write_file_atomic(out.add("metrics.json"), metrics_json(report.per_level));
  }
  for (const LevelMask& lm : masks) {
    save_image(comparison_overlay(lm.mask, gt), out.add("overlay_L" + level_tag(lm.level) + ".png"));
  }
  save_mask(report.optimal_mask, out.add("optimal_mask.png"));
}

void run_auto(const RunConfig& cfg, RunManifest& m, OutputDir& out) {
  const GrayImage img = load_input(cfg, m.timings);
  m.width = img.width();
  m.height = img.height();
  const BinaryMask gt = load_ground_truth(cfg, img, m.timings);
  const LevelReport report = evaluate(cfg, m, sweep_levels(img, cfg, m.timings), gt);
  save_mask(report.optimal_mask, out.add("optimal_mask.png"));
  save_image(comparison_overlay(report.optimal_mask, gt), out.add("optimal_overlay.png"));
}

json config_json(const RunConfig& cfg) {
  return {{"input", cfg.input.string()},
          {"ground_truth", cfg.ground_truth ? json(cfg.ground_truth->string()) : json(nullptr)},
          {"levels", cfg.max_level},
          {"polarity", to_string(cfg.polarity)},
          {"threshold", cfg.threshold},
          {"output_dir", cfg.output_dir.string()},
          {"format", to_string(cfg.format)},
          {"dump_raw", cfg.dump_raw}};
}

std::string summary_csv(const std::vector<BatchEntry>& entries) {
  std::string out = "stem," + std::string(kMetricsHeader);
  for (const BatchEntry& e : entries) {
    if (!e.manifest || !e.manifest->optimal_level) continue;
    const int level = *e.manifest->optimal_level;
    const auto it = std::find_if(e.manifest->per_level.begin(), e.manifest->per_level.end(),
                                 [&](const LevelMetrics& r) { return r.level == level; });
    out += e.stem + "," + metrics_row(*it);
  }
  return out;
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::kDecompose: return "decompose";
    case Command::kSegment: return "segment";
    case Command::kEvaluate: return "evaluate";
    case Command::kAuto: return "auto";
  }
  return "unknown";
}

std::string_view to_string(ReportFormat f) { return f == ReportFormat::kJson ? "json" : "csv"; }

std::string_view to_string(Polarity p) { return p == Polarity::kDarkFeatures ? "dark" : "bright"; }

void RunConfig::validate(Command command) const {
  if (max_level < kMinLevels || max_level > kMaxLevels) {
    throw UsageError(fmt::format("--levels must be in [{}, {}], got {}", kMinLevels, kMaxLevels, max_level));
  }
  if (!std::isfinite(threshold)) throw UsageError("--threshold must be finite");
  if ((command == Command::kEvaluate || command == Command::kAuto) && !ground_truth) {
    throw UsageError(fmt::format("'{}' requires a ground-truth mask (--gt)", to_string(command)));
  }
}

RunManifest run(Command command, const RunConfig& cfg) {
  cfg.validate(command);
  RunManifest m;
  m.command = command;
  m.config = cfg;
  OutputDir out(cfg.output_dir);

  switch (command) {
    case Command::kDecompose: run_decompose(cfg, m, out); break;
    case Command::kSegment: run_segment(cfg, m, out); break;
    case Command::kEvaluate: run_evaluate(cfg, m, out); break;
    case Command::kAuto: run_auto(cfg, m, out); break;
  }

  m.outputs = out.take();
  m.created_utc = utc_now();
  write_file_atomic(out.path() / kManifestName, manifest_json(m));
  return m;
}

bool BatchResult::all_succeeded() const {
  return std::all_of(entries.begin(), entries.end(), [](const BatchEntry& e) { return e.error.empty(); });
}

BatchResult run_batch(Command command, const RunConfig& base, const fs::path& dir) {
  if (command != Command::kEvaluate && command != Command::kAuto) {
    throw UsageError("--batch is only supported by 'evaluate' and 'auto'");
  }
  if (!fs::is_directory(dir)) throw Error(Errc::kIoError, "batch directory not found: " + dir.string());

  // stem -> {has image, has ground truth}; std::map keeps the order stable.
  struct Pair {
    std::optional<fs::path> image;
    std::optional<fs::path> gt;
  };
  std::map<std::string, Pair> pairs;
  constexpr std::string_view kGtSuffix = "_gt";
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext != ".png" && ext != ".pgm" && ext != ".ppm") continue;
    std::string stem = p.stem().string();
    if (stem.size() > kGtSuffix.size() && stem.ends_with(kGtSuffix)) {
      pairs[stem.substr(0, stem.size() - kGtSuffix.size())].gt = p;
    } else {
      pairs[stem].image = p;
    }
  }

  BatchResult result;
  for (const auto& [stem, pair] : pairs) {
    if (!pair.image || !pair.gt) {
      const fs::path& lone = pair.image ? *pair.image : *pair.gt;
      spdlog::warn("no partner for {}", lone.filename().string());
      result.unmatched.push_back(lone.filename().string());
      continue;
    }
    RunConfig cfg = base;
    cfg.input = *pair.image;
    cfg.ground_truth = *pair.gt;
    cfg.output_dir = base.output_dir / stem;
    BatchEntry entry{stem, std::nullopt, {}};
    try {
      entry.manifest = run(command, cfg);
    } catch (const Error& e) {
      spdlog::error("{}: {}", stem, e.what());
      entry.error = e.what();
    }
    result.entries.push_back(std::move(entry));
  }

  fs::create_directories(base.output_dir);
  write_file_atomic(base.output_dir / kSummaryName, summary_csv(result.entries));

  json manifest = {{"tool", "starseg"},
                   {"version", STARSEG_VERSION},
                   {"command", to_string(command)},
                   {"batch_dir", dir.string()},
                   {"config", config_json(base)},
                   {"pairs", json::array()},
                   {"unmatched", result.unmatched},
                   {"created_utc", utc_now()}};
  for (const BatchEntry& e : result.entries) {
    json row = {{"stem", e.stem}, {"output_dir", (base.output_dir / e.stem).string()}};
    if (e.manifest) {
      row["optimal_level"] = *e.manifest->optimal_level;
    } else {
      row["error"] = e.error;
    }
    manifest["pairs"].push_back(std::move(row));
  }
  write_file_atomic(base.output_dir / kBatchManifestName, manifest.dump(2) + "\n");
  return result;
}

std::string metrics_csv(std::span<const LevelMetrics> rows) {
  std::string out(kMetricsHeader);
  for (const LevelMetrics& m : rows) out += metrics_row(m);
  return out;
}

std::string metrics_json(std::span<const LevelMetrics> rows) {
  json arr = json::array();
  for (const LevelMetrics& m : rows) arr.push_back(level_json(m));
  return arr.dump(2) + "\n";
}

std::string manifest_json(const RunManifest& m) {
  json levels = json::array();
  for (const LevelMetrics& r : m.per_level) levels.push_back(level_json(r));
  json doc = {{"tool", "starseg"},
              {"version", STARSEG_VERSION},
              {"command", to_string(m.command)},
              {"config", config_json(m.config)},
              {"image", {{"width", m.width}, {"height", m.height}}},
              {"levels", std::move(levels)},
              {"optimal_level", m.optimal_level ? json(*m.optimal_level) : json(nullptr)},
              {"outputs", m.outputs},
              {"timings_ms",
               {{"load", m.timings.load_ms},
                {"decompose", m.timings.decompose_ms},
                {"sweep", m.timings.sweep_ms},
                {"evaluate", m.timings.evaluate_ms}}},
              {"created_utc", m.created_utc}};
  return doc.dump(2) + "\n";
}

GrayImage normalize_for_display(const GrayImage& plane) {
  const auto [lo, hi] = std::minmax_element(plane.pixels().begin(), plane.pixels().end());
  const double min = *lo;
  const double span = *hi - *lo;
  GrayImage out(plane.width(), plane.height(), 128.0);
  if (span == 0.0) return out;
  const auto src = plane.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = 255.0 * (src[i] - min) / span;
  return out;
}

}  // namespace starseg::pipeline

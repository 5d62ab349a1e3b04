// starseg: starlet-based segmentation of dark linear features.
//
//   starseg decompose IMAGE [--levels N] [--out DIR] [--dump-raw]
//   starseg segment   IMAGE [--levels N] [--polarity dark|bright] [--threshold T] [--out DIR]
//   starseg evaluate  IMAGE --gt MASK [...] [--format csv|json]
//   starseg auto      IMAGE --gt MASK [...]
//   starseg evaluate|auto --batch DIR [...]
//
// Exit status: 0 success, 1 usage error, 2 data or validation error.
// STARSEG_LOG=trace|debug|info|warn|error|off sets log verbosity (default warn).

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "starseg/pipeline.hpp"

namespace {

namespace pl = starseg::pipeline;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("starseg");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("STARSEG_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

struct Options {
  std::string input;
  std::string gt;
  std::string batch;
  int levels = 9;
  std::string polarity = "dark";
  double threshold = 0.0;
  std::string out = ".";
  std::string format = "csv";
  bool dump_raw = false;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help, Options& opt,
                      bool evaluates) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("image", opt.input, "Input photomicrograph (PNG, PGM or PPM)");
  sub->add_option("--levels,-L", opt.levels, "Number of starlet levels")
      ->check(CLI::Range(pl::RunConfig::kMinLevels, pl::RunConfig::kMaxLevels));
  sub->add_option("--out,-o", opt.out, "Output directory");
  if (name == "decompose") {
    sub->add_flag("--dump-raw", opt.dump_raw, "Also write raw planes as PFM");
  } else {
    sub->add_option("--polarity", opt.polarity, "Feature polarity: dark or bright")
        ->check(CLI::IsMember({"dark", "bright"}));
    sub->add_option("--threshold,-t", opt.threshold, "Binarization threshold on the detail sum");
  }
  if (evaluates) {
    sub->add_option("--gt,-g", opt.gt, "Ground-truth mask (white = feature)");
    sub->add_option("--format,-f", opt.format, "Metrics table format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--batch", opt.batch, "Directory of <stem>.png / <stem>_gt.png pairs");
  }
  return sub;
}

int run(pl::Command command, const Options& opt) {
  pl::RunConfig cfg;
  cfg.max_level = opt.levels;
  cfg.polarity = opt.polarity == "bright" ? starseg::Polarity::kBrightFeatures : starseg::Polarity::kDarkFeatures;
  cfg.threshold = opt.threshold;
  cfg.output_dir = opt.out;
  cfg.format = opt.format == "json" ? pl::ReportFormat::kJson : pl::ReportFormat::kCsv;
  cfg.dump_raw = opt.dump_raw;

  if (!opt.batch.empty()) {
    if (!opt.input.empty() || !opt.gt.empty()) throw pl::UsageError("--batch does not take IMAGE or --gt");
    const pl::BatchResult result = pl::run_batch(command, cfg, opt.batch);
    std::cout << "processed " << result.entries.size() << " pair(s), " << result.unmatched.size()
              << " unmatched file(s); summary in " << (cfg.output_dir / pl::kSummaryName).string() << "\n";
    return result.all_succeeded() ? 0 : kExitData;
  }

  if (opt.input.empty()) throw pl::UsageError("missing IMAGE argument");
  cfg.input = opt.input;
  if (!opt.gt.empty()) cfg.ground_truth = opt.gt;
  const pl::RunManifest m = pl::run(command, cfg);
  if (m.optimal_level) std::cout << "optimal level: " << *m.optimal_level << "\n";
  std::cout << "wrote " << m.outputs.size() << " file(s) and " << pl::kManifestName << " to "
            << cfg.output_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Starlet wavelet segmentation of dark linear features with MCC-based level selection"};
  app.require_subcommand(1);
  Options opt;
  const std::map<CLI::App*, pl::Command> commands{
      {add_command(app, "decompose", "Write starlet detail planes and the smooth residual", opt, false),
       pl::Command::kDecompose},
      {add_command(app, "segment", "Write binary masks for levels 3..L", opt, false), pl::Command::kSegment},
      {add_command(app, "evaluate", "Score every level against ground truth", opt, true),
       pl::Command::kEvaluate},
      {add_command(app, "auto", "Keep only the level with the highest MCC", opt, true), pl::Command::kAuto},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const pl::Command command = commands.at(app.get_subcommands().front());
  try {
    return run(command, opt);
  } catch (const pl::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const starseg::Error& e) {
    std::cerr << "error [" << starseg::to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

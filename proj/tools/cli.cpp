#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "evaluate.hpp"
#include "ini.hpp"
#include "stlfd/parallel.hpp"
#include "stlfd/pipeline.hpp"
#include "stlfd/sequence.hpp"
#include "stlfd/synth.hpp"

#ifndef STLFD_VERSION
#define STLFD_VERSION "0.0.0"
#endif

namespace stlfd::cli {
namespace {

namespace fs = std::filesystem;

// Raised for argument problems found after CLI11 has finished parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

const CLI::Validator kOddPositive(
    [](std::string& s) -> std::string {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size() || v < 1 || v % 2 == 0) return "must be an odd integer >= 1";
      return {};
    },
    "ODD");

const CLI::Validator kPair(
    [](std::string& s) -> std::string {
      const auto comma = s.find(',');
      if (comma == std::string::npos) return "expected two comma-separated numbers";
      try {
        std::size_t used = 0;
        std::stod(s.substr(0, comma), &used);
        if (used != comma) return "expected two comma-separated numbers";
        const std::string rest = s.substr(comma + 1);
        std::stod(rest, &used);
        if (used != rest.size()) return "expected two comma-separated numbers";
      } catch (const std::exception&) {
        return "expected two comma-separated numbers";
      }
      return {};
    },
    "X,Y");

synth::Vec2 parse_pair(const std::string& s) {
  const auto comma = s.find(',');
  return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

std::string format_pair(const synth::Vec2& v) { return format_number(v.x) + "," + format_number(v.y); }

std::string bool_str(bool b) { return b ? "true" : "false"; }

// Fills options not given on the command line from the subcommand's section.
void apply_config(CLI::App* sub, const fs::path& path) {
  if (!fs::is_regular_file(path)) throw UsageError("config file not found: " + path.string());
  const IniFile ini = IniFile::load(path);
  const IniFile::Section* section = ini.section(sub->get_name());
  if (!section) return;
  for (const auto& [key, value] : *section) {
    CLI::Option* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
    if (!opt) throw UsageError("unknown key '" + key + "' in [" + sub->get_name() + "] of " + path.string());
    if (!opt->empty()) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(path.string() + ": " + e.what());
    }
  }
}

void write_manifest(const fs::path& path, const std::string& command, const std::vector<std::pair<std::string, std::string>>& run,
                    const std::vector<std::pair<std::string, std::string>>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# stlfd run manifest; reproduce with: stlfd " << command << " --config <this file> --out <dir>\n";
  out << "[run]\n";
  out << "command=" << command << '\n';
  out << "tool_version=" << STLFD_VERSION << '\n';
  for (const auto& [k, v] : run) out << k << '=' << v << '\n';
  out << '[' << command << "]\n";
  for (const auto& [k, v] : values) out << k << '=' << v << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

struct DetectArgs {
  CLI::App* app = nullptr;
  std::string config;
  std::string input;
  std::string pattern = "*.p[gn][gm]";
  std::string out = "stlfd_run";
  int gap = 5;
  int abs_kernel = 15;
  bool no_abs = false;
  double k_sigma = 10.0;
  int patch = 3;
  bool emit_intermediate = false;
  bool no_timing = false;
};

void add_detect(CLI::App& app, DetectArgs& a) {
  a.app = app.add_subcommand("detect", "Run the detector over an image sequence");
  auto* d = a.app;
  d->add_option("--config", a.config, "key=value file; its [detect] section fills flags not given");
  d->add_option("--input", a.input, "Directory of frames (PNG or PGM, index in filename)");
  d->add_option("--pattern", a.pattern, "Filename glob inside --input")->capture_default_str();
  d->add_option("--out", a.out, "Output directory")->capture_default_str();
  d->add_option("--gap", a.gap, "Temporal gap n")->check(CLI::PositiveNumber)->capture_default_str();
  d->add_option("--abs-kernel", a.abs_kernel, "ABS window side (odd)")->check(kOddPositive)->capture_default_str();
  d->add_flag("--no-abs", a.no_abs, "Disable adaptive background suppression");
  d->add_option("--k-sigma", a.k_sigma, "Threshold = mean + k_sigma * std")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  d->add_option("--patch", a.patch, "Spatial patch side (odd, >= 3)")
      ->check(kOddPositive & CLI::Range(3, 1001))
      ->capture_default_str();
  d->add_flag("--emit-intermediate", a.emit_intermediate, "Also write Smap/Tmap/STmap/STLFD maps as 16-bit PGM");
  d->add_flag("--no-timing", a.no_timing, "Do not write timing.csv");
}

int run_detect(DetectArgs& a, std::ostream& out, std::ostream& err) {
  if (!a.config.empty()) apply_config(a.app, a.config);
  if (a.input.empty()) throw UsageError("detect: --input is required");

  DetectorConfig cfg;
  cfg.spatial.patch = a.patch;
  cfg.temporal.gap = a.gap;
  cfg.abs.kernel = a.abs_kernel;
  cfg.abs.enabled = !a.no_abs;
  cfg.threshold.k_sigma = a.k_sigma;
  cfg.emit_intermediate = a.emit_intermediate;
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }

  SequenceSource source = open_sequence(a.input, a.pattern);
  for (const auto& w : source.warnings()) err << "warning: " << w << '\n';

  RunOptions options;
  options.write_timing = !a.no_timing;
  const RunSummary s = run_sequence(source, cfg, a.out, options);

  write_manifest(fs::path(a.out) / "manifest.ini", "detect",
                 {{"width", std::to_string(s.width)}, {"height", std::to_string(s.height)},
                  {"frames", std::to_string(s.frames)}},
                 {{"input", a.input},
                  {"pattern", a.pattern},
                  {"gap", std::to_string(cfg.temporal.gap)},
                  {"abs-kernel", std::to_string(cfg.abs.kernel)},
                  {"no-abs", bool_str(!cfg.abs.enabled)},
                  {"k-sigma", format_number(cfg.threshold.k_sigma)},
                  {"patch", std::to_string(cfg.spatial.patch)},
                  {"emit-intermediate", bool_str(cfg.emit_intermediate)},
                  {"no-timing", bool_str(a.no_timing)}});

  auto ms = [](std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); };
  out << "frames " << s.frames << " (warming-up " << s.warming_frames << ", detected " << s.detected_frames << ")\n";
  out << "detections " << s.detections << '\n';
  out << "mean ms/frame:";
  for (std::size_t i = 0; i < kStageCount; ++i) {
    out << ' ' << to_string(static_cast<Stage>(i)) << '=' << ms(s.mean_timing.by_stage[i]);
  }
  out << "\ndetect throughput " << s.detect_fps << " frames/s\n";
  out << "outputs in " << a.out << '\n';
  return kExitOk;
}

struct EvalArgs {
  CLI::App* app = nullptr;
  std::string config;
  std::string run;
  std::string gt;
  std::string input;
  std::string pattern;
  std::string out;
  double match_radius = 4.0;
  std::string match_mode = "distance";
  int roc_steps = 256;
  int ring_width = 0;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  a.app = app.add_subcommand("eval", "Score a detect run against ground truth");
  auto* e = a.app;
  e->add_option("--config", a.config, "key=value file; its [eval] section fills flags not given");
  e->add_option("--run", a.run, "Directory written by detect");
  e->add_option("--gt", a.gt, "Ground-truth CSV (frame,cx,cy,w,h)");
  e->add_option("--input", a.input, "Input frames (default: from the run manifest)");
  e->add_option("--pattern", a.pattern, "Filename glob for --input");
  e->add_option("--out", a.out, "Where roc.csv and summary.csv go (default: the run directory)");
  e->add_option("--match-radius", a.match_radius, "Hit radius in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  e->add_option("--match-mode", a.match_mode, "distance or containment")
      ->check(CLI::IsMember({"distance", "containment"}))
      ->capture_default_str();
  e->add_option("--roc-steps", a.roc_steps, "Thresholds in the ROC sweep")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  e->add_option("--ring-width", a.ring_width, "Background ring width (0: max(w,h) per target)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

int run_eval(EvalArgs& a, std::ostream& out, std::ostream&) {
  if (!a.config.empty()) apply_config(a.app, a.config);
  if (a.run.empty() || a.gt.empty()) throw UsageError("eval: --run and --gt are required");

  EvalOptions opts;
  opts.run_dir = a.run;
  opts.ground_truth = a.gt;
  if (!a.input.empty()) opts.input_dir = a.input;
  if (!a.pattern.empty()) opts.pattern = a.pattern;
  opts.rule.radius = a.match_radius;
  opts.rule.mode = a.match_mode == "containment" ? MatchMode::kContainment : MatchMode::kDistance;
  opts.roc_steps = a.roc_steps;
  if (a.ring_width > 0) opts.ring_width = a.ring_width;
  opts.threads = configured_threads();

  const EvalReport r = evaluate_run(opts);
  const fs::path dest = a.out.empty() ? fs::path(a.run) : fs::path(a.out);
  fs::create_directories(dest);
  write_roc_csv(dest / "roc.csv", r.roc);
  write_summary_csv(dest / "summary.csv", r);

  auto na = [](double v) { return std::isnan(v) ? std::string("NA") : format_number(v); };
  out << "frames " << r.frames << ", targets " << r.scored_targets << '\n';
  out << "auc " << na(r.roc.auc) << " (pf up to " << format_number(r.roc.pf_limit) << ")\n";
  out << "pd " << na(r.operating_point.pd) << " pf " << format_number(r.operating_point.pf) << '\n';
  out << "mean_scrg " << na(r.mean_scrg) << " dB, mean_bsf " << na(r.mean_bsf) << " dB\n";
  out << "wrote " << (dest / "roc.csv").string() << ", " << (dest / "summary.csv").string() << '\n';
  return kExitOk;
}

struct SynthArgs {
  CLI::App* app = nullptr;
  std::string config;
  std::string out;
  std::string preset = "drift";
  std::uint64_t seed = 1;
  int frames = 0;
  int width = 0;
  int height = 0;
  double amplitude = 0.0;
  double psf_sigma = 0.0;
  std::string drift;
  std::string velocity;
  std::string start;
  int jitter = 0;
  double noise = 0.0;
  double smoothness = 0.0;
  double level = 0.0;
  double contrast = 0.0;
};

void add_synth(CLI::App& app, SynthArgs& a) {
  a.app = app.add_subcommand("synth", "Generate a synthetic sequence with ground truth");
  auto* s = a.app;
  s->add_option("--config", a.config, "key=value file; its [synth] section fills flags not given");
  s->add_option("--out", a.out, "Output directory");
  s->add_option("--preset", a.preset, "drift, jitter or static")
      ->check(CLI::IsMember({"drift", "jitter", "static"}))
      ->capture_default_str();
  s->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  s->add_option("--frames", a.frames, "Number of frames")->check(CLI::PositiveNumber);
  s->add_option("--width", a.width, "Frame width")->check(CLI::PositiveNumber);
  s->add_option("--height", a.height, "Frame height")->check(CLI::PositiveNumber);
  s->add_option("--amplitude", a.amplitude, "Target peak contrast")->check(CLI::NonNegativeNumber);
  s->add_option("--psf-sigma", a.psf_sigma, "Target Gaussian sigma (px)")->check(CLI::PositiveNumber);
  s->add_option("--drift", a.drift, "Background drift DX,DY (px/frame)")->check(kPair);
  s->add_option("--velocity", a.velocity, "Target velocity VX,VY (px/frame)")->check(kPair);
  s->add_option("--start", a.start, "Target position X,Y at frame 0")->check(kPair);
  s->add_option("--jitter", a.jitter, "Max integer jitter per axis (px)")->check(CLI::NonNegativeNumber);
  s->add_option("--noise", a.noise, "Gaussian noise sigma")->check(CLI::NonNegativeNumber);
  s->add_option("--smoothness", a.smoothness, "Background blur radius (px)")->check(CLI::NonNegativeNumber);
  s->add_option("--level", a.level, "Background mean intensity")->check(CLI::Range(0.0, 1.0));
  s->add_option("--contrast", a.contrast, "Background peak-to-peak range")->check(CLI::Range(0.0, 1.0));
}

int run_synth(SynthArgs& a, std::ostream& out, std::ostream&) {
  if (!a.config.empty()) apply_config(a.app, a.config);
  if (a.out.empty()) throw UsageError("synth: --out is required");

  const auto preset = synth::parse_preset(a.preset);
  if (!preset) throw UsageError("unknown preset " + a.preset);
  synth::SynthConfig cfg = synth::preset_config(*preset);
  auto given = [&](const char* name) { return !a.app->get_option(name)->empty(); };
  cfg.seed = a.seed;
  if (given("--frames")) cfg.frames = a.frames;
  if (given("--width")) cfg.width = a.width;
  if (given("--height")) cfg.height = a.height;
  if (given("--amplitude")) cfg.target.amplitude = a.amplitude;
  if (given("--psf-sigma")) cfg.target.psf_sigma = a.psf_sigma;
  if (given("--drift")) cfg.background.drift = parse_pair(a.drift);
  if (given("--velocity")) cfg.target.velocity = parse_pair(a.velocity);
  if (given("--start")) cfg.target.start = parse_pair(a.start);
  if (given("--jitter")) cfg.background.jitter_amp = a.jitter;
  if (given("--noise")) cfg.noise_sigma = a.noise;
  if (given("--smoothness")) cfg.background.smoothness = a.smoothness;
  if (given("--level")) cfg.background.level = a.level;
  if (given("--contrast")) cfg.background.contrast = a.contrast;
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }

  const auto files = synth::generate(cfg, a.out, configured_threads());
  write_manifest(fs::path(a.out) / "manifest.ini", "synth", {},
                 {{"preset", a.preset},
                  {"seed", std::to_string(cfg.seed)},
                  {"frames", std::to_string(cfg.frames)},
                  {"width", std::to_string(cfg.width)},
                  {"height", std::to_string(cfg.height)},
                  {"amplitude", format_number(cfg.target.amplitude)},
                  {"psf-sigma", format_number(cfg.target.psf_sigma)},
                  {"velocity", format_pair(cfg.target.velocity)},
                  {"start", format_pair(cfg.target.start)},
                  {"drift", format_pair(cfg.background.drift)},
                  {"jitter", std::to_string(cfg.background.jitter_amp)},
                  {"noise", format_number(cfg.noise_sigma)},
                  {"smoothness", format_number(cfg.background.smoothness)},
                  {"level", format_number(cfg.background.level)},
                  {"contrast", format_number(cfg.background.contrast)}});
  out << "wrote " << files.frames.size() << " frames and " << files.ground_truth.filename().string() << " to "
      << a.out << '\n';
  return kExitOk;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Small moving target detection in infrared image sequences", "stlfd"};
  app.set_version_flag("--version", STLFD_VERSION);
  app.require_subcommand(1);
  DetectArgs detect;
  EvalArgs eval;
  SynthArgs synth_args;
  add_detect(app, detect);
  add_eval(app, eval);
  add_synth(app, synth_args);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << STLFD_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'stlfd --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (detect.app->parsed()) return run_detect(detect, out, err);
    if (eval.app->parsed()) return run_eval(eval, out, err);
    return run_synth(synth_args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace stlfd::cli

#include "stlfd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stlfd/ground_truth.hpp"
#include "stlfd/image_io.hpp"
#include "stlfd/parallel.hpp"

namespace stlfd::synth {
namespace {

enum Stream : std::uint64_t { kBackgroundStream = 0, kNoiseStream = 1, kJitterStream = 2 };

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

int round_half_up(double v) noexcept { return static_cast<int>(std::floor(v + 0.5)); }

int wrap(int v, int n) noexcept {
  const int m = v % n;
  return m < 0 ? m + n : m;
}

// Circular box blur along rows then columns.
void box_blur_wrapped(Grid<double>& g, int radius) {
  const int w = g.width();
  const int h = g.height();
  const double inv = 1.0 / (2 * radius + 1);
  std::vector<double> line;
  for (int y = 0; y < h; ++y) {
    auto row = g.row(y);
    line.assign(row.begin(), row.end());
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) sum += line[wrap(k, w)];
    for (int x = 0; x < w; ++x) {
      row[x] = sum * inv;
      sum += line[wrap(x + radius + 1, w)] - line[wrap(x - radius, w)];
    }
  }
  for (int x = 0; x < w; ++x) {
    line.resize(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) line[y] = g.at(x, y);
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) sum += line[wrap(k, h)];
    for (int y = 0; y < h; ++y) {
      g.at(x, y) = sum * inv;
      sum += line[wrap(y + radius + 1, h)] - line[wrap(y - radius, h)];
    }
  }
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t frame, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(splitmix64(seed) ^ frame) ^ (stream * 0xD1B54A32D192ED03ull))) {}

double Rng::uniform() {
  // 53 random bits mapped to (0, 1].
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

void SynthConfig::validate() const {
  if (width < 2 * kTrajectoryMargin + 1 || height < 2 * kTrajectoryMargin + 1 || width < kMinFrameSide ||
      height < kMinFrameSide) {
    throw InvalidArgument("synthetic frame too small");
  }
  if (frames < 1) throw InvalidArgument("synthetic sequence needs at least one frame");
  if (!(target.psf_sigma > 0.0)) throw InvalidArgument("psf_sigma must be > 0");
  if (!(target.amplitude >= 0.0)) throw InvalidArgument("target amplitude must be >= 0");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be >= 0");
  if (background.jitter_amp < 0) throw InvalidArgument("jitter amplitude must be >= 0");
  if (!(background.smoothness >= 0.0)) throw InvalidArgument("background smoothness must be >= 0");
  if (!(background.contrast >= 0.0)) throw InvalidArgument("background contrast must be >= 0");
  for (int f = 0; f < frames; f += std::max(1, frames - 1)) {
    // The trajectory is linear, so checking both ends covers every frame.
    const Vec2 c = target_center(*this, f);
    if (c.x < kTrajectoryMargin || c.y < kTrajectoryMargin || c.x > width - 1 - kTrajectoryMargin ||
        c.y > height - 1 - kTrajectoryMargin) {
      throw InvalidArgument("target trajectory leaves the " + std::to_string(kTrajectoryMargin) +
                            " px margin at frame " + std::to_string(f));
    }
    if (!box_inside(ground_truth(*this, f), width, height)) {
      throw InvalidArgument("target box leaves the frame at frame " + std::to_string(f));
    }
    if (frames == 1) break;
  }
}

std::optional<Preset> parse_preset(std::string_view name) noexcept {
  if (name == "drift") return Preset::kDrift;
  if (name == "jitter") return Preset::kJitter;
  if (name == "static") return Preset::kStatic;
  return std::nullopt;
}

std::string_view to_string(Preset preset) noexcept {
  switch (preset) {
    case Preset::kDrift: return "drift";
    case Preset::kJitter: return "jitter";
    case Preset::kStatic: return "static";
  }
  return "unknown";
}

SynthConfig preset_config(Preset preset) {
  SynthConfig cfg;
  switch (preset) {
    case Preset::kDrift:
      break;
    case Preset::kJitter:
      cfg.background.drift = {0.0, 0.0};
      cfg.background.jitter_amp = 2;
      break;
    case Preset::kStatic:
      cfg.background.drift = {0.0, 0.0};
      cfg.background.jitter_amp = 0;
      cfg.noise_sigma = 0.0;
      break;
  }
  return cfg;
}

Vec2 target_center(const SynthConfig& cfg, int frame) {
  return {cfg.target.start.x + frame * cfg.target.velocity.x, cfg.target.start.y + frame * cfg.target.velocity.y};
}

GroundTruthRecord ground_truth(const SynthConfig& cfg, int frame) {
  const Vec2 c = target_center(cfg, frame);
  const double side = std::ceil(6.0 * cfg.target.psf_sigma);
  return {frame, c.x, c.y, side, side};
}

std::pair<int, int> background_offset(const SynthConfig& cfg, int frame) {
  int ox = round_half_up(frame * cfg.background.drift.x);
  int oy = round_half_up(frame * cfg.background.drift.y);
  if (cfg.background.jitter_amp > 0) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(frame), kJitterStream);
    ox += rng.uniform_int(-cfg.background.jitter_amp, cfg.background.jitter_amp);
    oy += rng.uniform_int(-cfg.background.jitter_amp, cfg.background.jitter_amp);
  }
  return {ox, oy};
}

Grid<double> render_background(const SynthConfig& cfg) {
  Grid<double> g(cfg.width, cfg.height);
  Rng rng(cfg.seed, 0, kBackgroundStream);
  for (double& v : g.values()) v = rng.uniform();
  const int radius = round_half_up(cfg.background.smoothness);
  if (radius > 0) {
    for (int pass = 0; pass < 3; ++pass) box_blur_wrapped(g, radius);
  }
  const auto [lo_it, hi_it] = std::minmax_element(g.values().begin(), g.values().end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  const double base = cfg.background.level - cfg.background.contrast / 2.0;
  for (double& v : g.values()) {
    const double unit = range > 0.0 ? (v - lo) / range : 0.5;
    v = std::clamp(base + unit * cfg.background.contrast, 0.0, 1.0);
  }
  return g;
}

Frame render_frame(const SynthConfig& cfg, const Grid<double>& background, int frame) {
  const int w = cfg.width;
  const int h = cfg.height;
  const auto [ox, oy] = background_offset(cfg, frame);
  Grid<double> px(w, h);
  for (int y = 0; y < h; ++y) {
    const auto src = background.row(wrap(y + oy, h));
    auto dst = px.row(y);
    for (int x = 0; x < w; ++x) dst[x] = src[wrap(x + ox, w)];
  }

  if (cfg.target.amplitude > 0.0) {
    const Vec2 c = target_center(cfg, frame);
    const double s = cfg.target.psf_sigma;
    const int reach = static_cast<int>(std::ceil(4.0 * s)) + 1;
    const int cx = round_half_up(c.x);
    const int cy = round_half_up(c.y);
    for (int y = std::max(0, cy - reach); y <= std::min(h - 1, cy + reach); ++y) {
      for (int x = std::max(0, cx - reach); x <= std::min(w - 1, cx + reach); ++x) {
        const double r2 = (x - c.x) * (x - c.x) + (y - c.y) * (y - c.y);
        px.at(x, y) += cfg.target.amplitude * std::exp(-r2 / (2.0 * s * s));
      }
    }
  }

  if (cfg.noise_sigma > 0.0) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(frame), kNoiseStream);
    for (double& v : px.values()) v += cfg.noise_sigma * rng.normal();
  }
  for (double& v : px.values()) v = quantize16(std::clamp(v, 0.0, 1.0)) / 65535.0;
  return Frame(frame, std::move(px));
}

std::vector<Frame> generate_frames(const SynthConfig& cfg) {
  cfg.validate();
  const Grid<double> bg = render_background(cfg);
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(cfg.frames));
  for (int f = 0; f < cfg.frames; ++f) frames.push_back(render_frame(cfg, bg, f));
  return frames;
}

std::vector<GroundTruthRecord> generate_ground_truth(const SynthConfig& cfg) {
  std::vector<GroundTruthRecord> gt;
  gt.reserve(static_cast<std::size_t>(cfg.frames));
  for (int f = 0; f < cfg.frames; ++f) gt.push_back(ground_truth(cfg, f));
  return gt;
}

GeneratedFiles generate(const SynthConfig& cfg, const std::filesystem::path& out_dir, int threads) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const Grid<double> bg = render_background(cfg);
  GeneratedFiles out;
  out.frames.resize(static_cast<std::size_t>(cfg.frames));
  parallel_for(out.frames.size(), threads, [&](std::size_t i) {
    const int f = static_cast<int>(i);
    const Frame frame = render_frame(cfg, bg, f);
    out.frames[i] = out_dir / indexed_name("frame", f, "png");
    write_frame_png16(out.frames[i], frame.pixels());
  });
  out.ground_truth = out_dir / "ground_truth.csv";
  const auto gt = generate_ground_truth(cfg);
  write_ground_truth(out.ground_truth, gt);
  return out;
}

}  // namespace stlfd::synth

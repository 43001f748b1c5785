#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "stlfd/types.hpp"

namespace stlfd::synth {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct BackgroundConfig {
  double smoothness = 4.0;  // box-blur radius in pixels (three passes)
  Vec2 drift{0.5, 0.25};    // pixels per frame
  int jitter_amp = 0;       // max integer offset per axis
  double level = 0.35;      // mean intensity
  double contrast = 0.3;    // peak-to-peak range of the texture
};

struct TargetConfig {
  double amplitude = 0.09;  // peak contrast added on top of the background
  double psf_sigma = 1.0;
  Vec2 velocity{0.5, 0.25};
  Vec2 start{60.0, 90.0};
};

/// Scene description. Defaults are the drifting-background scene.
struct SynthConfig {
  int width = 256;
  int height = 256;
  int frames = 200;
  std::uint64_t seed = 1;
  BackgroundConfig background;
  TargetConfig target;
  double noise_sigma = 0.01;

  /// Throws InvalidArgument on bad sizes, non-positive psf_sigma, negative
  /// amplitude/noise/jitter, or a trajectory that comes within 10 px of a
  /// border in any frame.
  void validate() const;
};

inline constexpr int kTrajectoryMargin = 10;

enum class Preset { kDrift, kJitter, kStatic };

std::optional<Preset> parse_preset(std::string_view name) noexcept;
std::string_view to_string(Preset preset) noexcept;

/// drift: background drifts (0.5, 0.25) px/frame.
/// jitter: no drift, integer jitter up to 2 px per axis.
/// static: no drift, no jitter, no noise.
SynthConfig preset_config(Preset preset);

/// Target center in frame f: start + f * velocity.
Vec2 target_center(const SynthConfig& cfg, int frame);

/// Ground-truth box: target center with side ceil(6 * psf_sigma).
GroundTruthRecord ground_truth(const SynthConfig& cfg, int frame);

/// Integer background offset of frame f: round(f * drift) plus jitter.
std::pair<int, int> background_offset(const SynthConfig& cfg, int frame);

/// Tileable low-pass noise texture, width x height, values in
/// [level - contrast/2, level + contrast/2].
Grid<double> render_background(const SynthConfig& cfg);

/// Frame f: shifted background + target blob + noise, clamped to [0,1] and
/// quantized to 16 bits so that in-memory frames equal frames read back from
/// disk.
Frame render_frame(const SynthConfig& cfg, const Grid<double>& background, int frame);

std::vector<Frame> generate_frames(const SynthConfig& cfg);
std::vector<GroundTruthRecord> generate_ground_truth(const SynthConfig& cfg);

struct GeneratedFiles {
  std::vector<std::filesystem::path> frames;
  std::filesystem::path ground_truth;
};

/// Writes frame_<index>.png (16-bit) per frame and ground_truth.csv.
GeneratedFiles generate(const SynthConfig& cfg, const std::filesystem::path& out_dir, int threads = 1);

/// Random stream used throughout generation: std::mt19937_64 seeded with a
/// splitmix64 mix of (seed, frame, stream). Normal deviates use Box-Muller, so
/// output does not depend on the standard library's distributions.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t frame, std::uint64_t stream);
  double uniform();  // in (0, 1]
  double normal();
  int uniform_int(int lo, int hi);  // inclusive

 private:
  std::mt19937_64 engine_;
};

}  // namespace stlfd::synth

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stlfd/fusion.hpp"
#include "stlfd/sequence.hpp"
#include "stlfd/spatial.hpp"
#include "stlfd/temporal.hpp"
#include "stlfd/types.hpp"

namespace stlfd {

struct DetectorConfig {
  SpatialConfig spatial;
  TemporalConfig temporal;
  AbsConfig abs;
  ThresholdConfig threshold;
  bool emit_intermediate = false;  // keep Smap/Tmap/STmap in results and on disk

  void validate() const;
};

enum class FrameStatus { kWarmingUp, kDetected };

std::string_view to_string(FrameStatus status) noexcept;

enum class Stage { kSpatial, kTemporal, kFusion, kAbs, kSegment, kExtract };
inline constexpr std::size_t kStageCount = 6;
std::string_view to_string(Stage stage) noexcept;

/// Wall-clock time spent per stage on one frame.
struct StageTimings {
  std::array<std::chrono::nanoseconds, kStageCount> by_stage{};

  std::chrono::nanoseconds& operator[](Stage s) noexcept { return by_stage[static_cast<std::size_t>(s)]; }
  std::chrono::nanoseconds operator[](Stage s) const noexcept { return by_stage[static_cast<std::size_t>(s)]; }
  std::chrono::nanoseconds total() const noexcept;
};

struct IntermediateMaps {
  FeatureMap smap;
  FeatureMap tmap;
  FeatureMap stmap;

  friend bool operator==(const IntermediateMaps&, const IntermediateMaps&) = default;
};

struct FrameResult {
  std::int64_t frame_index = 0;
  FrameStatus status = FrameStatus::kWarmingUp;
  std::optional<FeatureMap> stlfd_map;  // set iff status == kDetected
  std::optional<BinaryMask> mask;       // set iff status == kDetected
  std::vector<Detection> detections;
  std::optional<IntermediateMaps> intermediate;  // detected frames with emit_intermediate
  StageTimings timing;
};

/// Equality of everything except timing.
bool same_outputs(const FrameResult& a, const FrameResult& b) noexcept;

/// Streaming detector for one sequence. Holds at most 2n+1 spatial maps.
/// Not thread-safe; use one instance per stream.
class Detector {
 public:
  explicit Detector(DetectorConfig cfg);

  /// Consumes the next frame. The first frame fixes the stream dimensions and
  /// may carry any index; each later frame must carry the previous index + 1.
  /// Frames before the buffer holds k, k-n, k-2n return kWarmingUp.
  FrameResult process(const Frame& frame);

  const DetectorConfig& config() const noexcept { return cfg_; }
  const SmapBuffer& buffer() const noexcept { return buffer_; }
  void reset() noexcept;

 private:
  DetectorConfig cfg_;
  SmapBuffer buffer_;
  int width_ = 0;
  int height_ = 0;
};

/// Whole-sequence evaluation: every spatial map first, then every detected
/// frame, both spread over `threads` workers. Results match Detector::process
/// frame by frame. Frames must be consecutive and equally sized.
std::vector<FrameResult> detect_batch(std::span<const Frame> frames, const DetectorConfig& cfg, int threads = 1);

struct RunOptions {
  bool write_timing = true;
  /// Observes each result before its outputs are written.
  std::function<void(const FrameResult&)> on_result;
};

struct RunSummary {
  std::size_t frames = 0;
  std::size_t detected_frames = 0;
  std::size_t warming_frames = 0;
  std::size_t detections = 0;
  int width = 0;
  int height = 0;
  StageTimings mean_timing;  // over detected frames (spatial over all frames)
  double detect_fps = 0.0;   // detected frames per second of stage time
  std::vector<std::filesystem::path> files;
};

/// Streams `source` through a Detector and persists under out_dir:
///   masks/mask_<k>.png, maps/stlfd_<k>.f32 for every detected frame;
///   maps/{smap,tmap,stmap,stlfd}_<k>.pgm when emit_intermediate;
///   detections.csv (frame,cx,cy,score); timing.csv (frame,stage,micros).
/// Errors are rethrown as stlfd::Error prefixed with the failing frame index.
RunSummary run_sequence(FrameSource& source, const DetectorConfig& cfg, const std::filesystem::path& out_dir,
                        const RunOptions& options = {});

}  // namespace stlfd

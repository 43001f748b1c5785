#include "stlfd/pipeline.hpp"

#include <cstdio>
#include <fstream>

#include "stlfd/output_writer.hpp"
#include "stlfd/parallel.hpp"

namespace stlfd {
namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  explicit StageTimer(StageTimings& t) : timings_(t), start_(Clock::now()) {}
  void lap(Stage s) {
    const auto now = Clock::now();
    timings_[s] += std::chrono::duration_cast<std::chrono::nanoseconds>(now - start_);
    start_ = now;
  }

 private:
  StageTimings& timings_;
  Clock::time_point start_;
};

FrameResult finish_frame(std::int64_t frame_index, const FeatureMap& smap, FeatureMap tmap, const DetectorConfig& cfg,
                         StageTimings timing) {
  FrameResult r;
  r.frame_index = frame_index;
  r.status = FrameStatus::kDetected;
  StageTimer timer(timing);
  FeatureMap stmap = fuse(smap, tmap);
  timer.lap(Stage::kFusion);
  FeatureMap stlfd = abs_suppress(stmap, cfg.abs);
  timer.lap(Stage::kAbs);
  BinaryMask mask = segment(stlfd, cfg.threshold);
  timer.lap(Stage::kSegment);
  r.detections = extract_detections(mask, stlfd, frame_index);
  timer.lap(Stage::kExtract);
  r.stlfd_map = std::move(stlfd);
  r.mask = std::move(mask);
  if (cfg.emit_intermediate) r.intermediate = IntermediateMaps{smap, std::move(tmap), std::move(stmap)};
  r.timing = timing;
  return r;
}

}  // namespace

void DetectorConfig::validate() const {
  spatial.validate();
  temporal.validate();
  abs.validate();
  threshold.validate();
}

std::string_view to_string(FrameStatus status) noexcept {
  return status == FrameStatus::kDetected ? "detected" : "warming-up";
}

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::kSpatial: return "spatial";
    case Stage::kTemporal: return "temporal";
    case Stage::kFusion: return "fusion";
    case Stage::kAbs: return "abs";
    case Stage::kSegment: return "segment";
    case Stage::kExtract: return "extract";
  }
  return "unknown";
}

std::chrono::nanoseconds StageTimings::total() const noexcept {
  std::chrono::nanoseconds sum{0};
  for (auto d : by_stage) sum += d;
  return sum;
}

bool same_outputs(const FrameResult& a, const FrameResult& b) noexcept {
  return a.frame_index == b.frame_index && a.status == b.status && a.stlfd_map == b.stlfd_map && a.mask == b.mask &&
         a.detections == b.detections && a.intermediate == b.intermediate;
}

Detector::Detector(DetectorConfig cfg) : cfg_(std::move(cfg)), buffer_((cfg_.validate(), cfg_.temporal.gap)) {}

void Detector::reset() noexcept {
  buffer_.clear();
  width_ = height_ = 0;
}

FrameResult Detector::process(const Frame& frame) {
  if (const auto newest = buffer_.newest_index()) {
    if (frame.index() != *newest + 1) {
      throw InvalidArgument("frame " + std::to_string(frame.index()) + " does not follow frame " +
                            std::to_string(*newest));
    }
    if (frame.width() != width_ || frame.height() != height_) {
      throw InvalidArgument("frame " + std::to_string(frame.index()) + " is " + std::to_string(frame.width()) + "x" +
                            std::to_string(frame.height()) + ", stream is " + std::to_string(width_) + "x" +
                            std::to_string(height_));
    }
  } else {
    width_ = frame.width();
    height_ = frame.height();
  }

  StageTimings timing;
  StageTimer timer(timing);
  buffer_.push(compute_smap(frame, cfg_.spatial), frame.index());
  timer.lap(Stage::kSpatial);

  auto tmap = compute_tmap(buffer_, cfg_.temporal);
  timer.lap(Stage::kTemporal);
  if (!tmap) {
    FrameResult r;
    r.frame_index = frame.index();
    r.status = FrameStatus::kWarmingUp;
    r.timing = timing;
    return r;
  }
  return finish_frame(frame.index(), *buffer_.find(frame.index()), std::move(*tmap), cfg_, timing);
}

std::vector<FrameResult> detect_batch(std::span<const Frame> frames, const DetectorConfig& cfg, int threads) {
  cfg.validate();
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].index() != frames[i - 1].index() + 1) throw InvalidArgument("detect_batch: frames not consecutive");
    if (frames[i].width() != frames[0].width() || frames[i].height() != frames[0].height()) {
      throw InvalidArgument("detect_batch: frame dimensions differ");
    }
  }
  const std::size_t n = frames.size();
  const std::size_t back = static_cast<std::size_t>(2 * cfg.temporal.gap);
  std::vector<FeatureMap> smaps(n);
  std::vector<StageTimings> timings(n);
  parallel_for(n, threads, [&](std::size_t i) {
    StageTimer timer(timings[i]);
    smaps[i] = compute_smap(frames[i], cfg.spatial);
    timer.lap(Stage::kSpatial);
  });

  std::vector<FrameResult> results(n);
  parallel_for(n, threads, [&](std::size_t i) {
    if (i < back) {
      results[i].frame_index = frames[i].index();
      results[i].status = FrameStatus::kWarmingUp;
      results[i].timing = timings[i];
      return;
    }
    StageTimer timer(timings[i]);
    const auto gap = static_cast<std::size_t>(cfg.temporal.gap);
    FeatureMap tmap = normalize_by_max(temporal_range(smaps[i], smaps[i - gap], smaps[i - 2 * gap]));
    timer.lap(Stage::kTemporal);
    results[i] = finish_frame(frames[i].index(), smaps[i], std::move(tmap), cfg, timings[i]);
  });
  return results;
}

RunSummary run_sequence(FrameSource& source, const DetectorConfig& cfg, const std::filesystem::path& out_dir,
                        const RunOptions& options) {
  Detector detector(cfg);
  OutputWriter writer(out_dir);

  const auto det_path = out_dir / "detections.csv";
  std::ofstream det_csv(det_path, std::ios::binary | std::ios::trunc);
  if (!det_csv) throw IoError("cannot write " + det_path.string());
  det_csv << "frame,cx,cy,score\n";

  const auto timing_path = out_dir / "timing.csv";
  std::ofstream timing_csv;
  if (options.write_timing) {
    timing_csv.open(timing_path, std::ios::binary | std::ios::trunc);
    if (!timing_csv) throw IoError("cannot write " + timing_path.string());
    timing_csv << "frame,stage,micros\n";
  }

  RunSummary summary;
  StageTimings sums;
  std::chrono::nanoseconds spatial_all{0};
  std::optional<std::int64_t> last_index;
  char line[128];

  while (true) {
    std::optional<Frame> frame;
    try {
      frame = source.next();
    } catch (const std::exception& e) {
      const std::string where = last_index ? "after frame " + std::to_string(*last_index) : "at first frame";
      throw Error("ingestion failed " + where + ": " + e.what());
    }
    if (!frame) break;
    const std::int64_t k = frame->index();

    FrameResult result;
    try {
      result = detector.process(*frame);
    } catch (const std::exception& e) {
      throw Error("frame " + std::to_string(k) + ": " + e.what());
    }
    if (options.on_result) options.on_result(result);

    if (summary.frames == 0) {
      summary.width = frame->width();
      summary.height = frame->height();
    }
    ++summary.frames;
    last_index = k;
    spatial_all += result.timing[Stage::kSpatial];

    try {
      if (result.status == FrameStatus::kDetected) {
        ++summary.detected_frames;
        summary.detections += result.detections.size();
        for (std::size_t s = 0; s < kStageCount; ++s) sums.by_stage[s] += result.timing.by_stage[s];
        writer.write_mask(k, *result.mask);
        writer.write_map_raw("stlfd", k, *result.stlfd_map);
        if (cfg.emit_intermediate) {
          writer.write_map_pgm("smap", k, result.intermediate->smap);
          writer.write_map_pgm("tmap", k, result.intermediate->tmap);
          writer.write_map_pgm("stmap", k, result.intermediate->stmap);
          writer.write_map_pgm("stlfd", k, *result.stlfd_map);
        }
        for (const auto& d : result.detections) {
          std::snprintf(line, sizeof(line), "%lld,%.6f,%.6f,%.6f\n", static_cast<long long>(k), d.centroid.x,
                        d.centroid.y, d.score);
          det_csv << line;
        }
      } else {
        ++summary.warming_frames;
      }
      if (options.write_timing) {
        for (std::size_t s = 0; s < kStageCount; ++s) {
          std::snprintf(line, sizeof(line), "%lld,%s,%.3f\n", static_cast<long long>(k),
                        to_string(static_cast<Stage>(s)).data(), result.timing.by_stage[s].count() / 1000.0);
          timing_csv << line;
        }
      }
    } catch (const std::exception& e) {
      throw Error("frame " + std::to_string(k) + ": " + e.what());
    }
  }
  if (summary.frames == 0) throw IoError("input sequence is empty");

  det_csv.close();
  if (!det_csv) throw IoError("write failed: " + det_path.string());
  summary.files = writer.written();
  summary.files.push_back(det_path);
  if (options.write_timing) {
    timing_csv.close();
    if (!timing_csv) throw IoError("write failed: " + timing_path.string());
    summary.files.push_back(timing_path);
  }

  if (summary.detected_frames > 0) {
    const auto n = static_cast<std::int64_t>(summary.detected_frames);
    for (std::size_t s = 0; s < kStageCount; ++s) summary.mean_timing.by_stage[s] = sums.by_stage[s] / n;
    const double secs = std::chrono::duration<double>(sums.total()).count();
    summary.detect_fps = secs > 0.0 ? static_cast<double>(summary.detected_frames) / secs : 0.0;
  }
  summary.mean_timing[Stage::kSpatial] = spatial_all / static_cast<std::int64_t>(summary.frames);
  return summary;
}

}  // namespace stlfd

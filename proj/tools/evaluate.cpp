#include "evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include "cli.hpp"
#include "ini.hpp"
#include "stlfd/fusion.hpp"
#include "stlfd/ground_truth.hpp"
#include "stlfd/image_io.hpp"
#include "stlfd/parallel.hpp"
#include "stlfd/sequence.hpp"

namespace stlfd::cli {
namespace {

namespace fs = std::filesystem;

std::string na_or(double v) { return std::isnan(v) ? "NA" : format_number(v); }

BinaryMask load_mask(const fs::path& path) {
  const RawImage raw = read_image(path);
  BinaryMask mask(raw.width, raw.height);
  auto bits = mask.values();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = raw.samples[i] != 0 ? 1 : 0;
  return mask;
}

int parse_dim(const IniFile& ini, const char* key) {
  const std::string v = ini.get("run", key);
  try {
    return std::stoi(v);
  } catch (const std::exception&) {
    throw IoError(std::string("run manifest lacks a valid ") + key);
  }
}

}  // namespace

EvalReport evaluate_run(const EvalOptions& opts) {
  opts.rule.validate();
  const IniFile manifest = IniFile::load(opts.run_dir / "manifest.ini");
  EvalReport report;
  report.width = parse_dim(manifest, "width");
  report.height = parse_dim(manifest, "height");

  std::vector<std::int64_t> indices;
  const fs::path maps_dir = opts.run_dir / "maps";
  if (fs::is_directory(maps_dir)) {
    for (const auto& de : fs::directory_iterator(maps_dir)) {
      const std::string name = de.path().filename().string();
      if (name.rfind("stlfd_", 0) != 0 || de.path().extension() != ".f32") continue;
      if (const auto idx = filename_index(de.path())) indices.push_back(*idx);
    }
  }
  if (indices.empty()) throw IoError("no output maps in " + maps_dir.string());
  std::sort(indices.begin(), indices.end());
  report.frames = indices.size();

  const std::vector<GroundTruthRecord> gt = load_ground_truth(opts.ground_truth);
  for (std::int64_t k : indices) {
    for (const auto& r : records_for_frame(gt, k)) {
      if (!box_inside(r, report.width, report.height)) {
        throw InvalidArgument("ground truth box at frame " + std::to_string(k) + " does not fit the " +
                              std::to_string(report.width) + "x" + std::to_string(report.height) + " frame");
      }
    }
  }

  std::vector<FeatureMap> maps(indices.size());
  std::vector<FrameTally> tallies(indices.size());
  parallel_for(indices.size(), opts.threads, [&](std::size_t i) {
    const std::int64_t k = indices[i];
    maps[i] = read_map_f32(maps_dir / indexed_name("stlfd", k, "f32"), report.width, report.height);
    const BinaryMask mask = load_mask(opts.run_dir / "masks" / indexed_name("mask", k, "png"));
    if (!mask.same_shape(maps[i])) throw InvalidArgument("mask and map dimensions differ at frame " + std::to_string(k));
    const auto dets = extract_detections(mask, maps[i], k);
    tallies[i] = match_frame(dets, mask, records_for_frame(gt, k), opts.rule);
  });

  report.roc = roc_sweep(maps, indices, gt, opts.rule, opts.roc_steps);
  report.operating_point = aggregate_pd_pf(tallies, report.width, report.height, indices.size());

  // Input frames for the SCR family.
  const fs::path input = opts.input_dir ? *opts.input_dir : fs::path(manifest.get("detect", "input"));
  const std::string pattern = opts.pattern ? *opts.pattern : manifest.get("detect", "pattern", "*");
  if (input.empty()) throw IoError("run manifest names no input directory; pass --input");
  const SequenceSource seq = open_sequence(input, pattern);
  if (seq.width() != report.width || seq.height() != report.height) {
    throw InvalidArgument("input frames are " + std::to_string(seq.width()) + "x" + std::to_string(seq.height()) +
                          ", run maps are " + std::to_string(report.width) + "x" + std::to_string(report.height));
  }
  std::map<std::int64_t, fs::path> frame_paths;
  for (const auto& e : seq.entries()) frame_paths[e.index] = e.path;

  std::vector<std::vector<ScrgBsf>> per_frame(indices.size());
  parallel_for(indices.size(), opts.threads, [&](std::size_t i) {
    const std::int64_t k = indices[i];
    const auto targets = records_for_frame(gt, k);
    if (targets.empty()) return;
    const auto it = frame_paths.find(k);
    if (it == frame_paths.end()) throw IoError("input frame " + std::to_string(k) + " not found in " + input.string());
    const Frame frame = load_frame(it->second, k);
    for (const auto& r : targets) {
      per_frame[i].push_back(scrg_bsf(frame.pixels(), maps[i], r, opts.ring_width.value_or(default_ring_width(r))));
    }
  });
  double scrg_sum = 0.0;
  double bsf_sum = 0.0;
  for (const auto& v : per_frame) {
    for (const auto& s : v) {
      scrg_sum += s.scrg;
      bsf_sum += s.bsf;
      ++report.scored_targets;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.mean_scrg = report.scored_targets ? scrg_sum / static_cast<double>(report.scored_targets) : nan;
  report.mean_bsf = report.scored_targets ? bsf_sum / static_cast<double>(report.scored_targets) : nan;
  return report;
}

void write_roc_csv(const fs::path& path, const RocCurve& roc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "threshold,pd,pf\n";
  for (const auto& p : roc.points) out << format_number(p.threshold) << ',' << na_or(p.pd) << ',' << format_number(p.pf) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_summary_csv(const fs::path& path, const EvalReport& r) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "metric,value\n";
  out << "auc," << na_or(r.roc.auc) << '\n';
  out << "pf_limit," << format_number(r.roc.pf_limit) << '\n';
  out << "pd," << na_or(r.operating_point.pd) << '\n';
  out << "pf," << format_number(r.operating_point.pf) << '\n';
  out << "mean_scrg," << na_or(r.mean_scrg) << '\n';
  out << "mean_bsf," << na_or(r.mean_bsf) << '\n';
  out << "frames," << r.frames << '\n';
  out << "targets," << r.scored_targets << '\n';
  out << "roc_points," << r.roc.points.size() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace stlfd::cli

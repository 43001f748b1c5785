#include "stlfd/ground_truth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stlfd {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no) {
  field = trim(field);
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw IoError("ground truth line " + std::to_string(line_no) + ": bad field '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<GroundTruthRecord> parse_ground_truth(std::string_view text) {
  std::vector<GroundTruthRecord> records;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "frame,cx,cy,w,h") throw IoError("ground truth: expected header 'frame,cx,cy,w,h'");
      header_seen = true;
      continue;
    }
    std::string_view fields[5];
    std::size_t n = 0;
    while (n < 5) {
      const auto comma = line.find(',');
      fields[n++] = line.substr(0, comma);
      if (comma == std::string_view::npos) {
        line = {};
        break;
      }
      line.remove_prefix(comma + 1);
    }
    if (n != 5 || !line.empty()) {
      throw IoError("ground truth line " + std::to_string(line_no) + ": expected 5 fields");
    }
    GroundTruthRecord r;
    r.frame_index = parse_field<std::int64_t>(fields[0], line_no);
    r.cx = parse_field<double>(fields[1], line_no);
    r.cy = parse_field<double>(fields[2], line_no);
    r.w = parse_field<double>(fields[3], line_no);
    r.h = parse_field<double>(fields[4], line_no);
    if (r.frame_index < 0) throw IoError("ground truth line " + std::to_string(line_no) + ": negative frame");
    if (!(r.w >= 1.0) || !(r.h >= 1.0)) {
      throw IoError("ground truth line " + std::to_string(line_no) + ": box extent must be >= 1");
    }
    if (!std::isfinite(r.cx) || !std::isfinite(r.cy) || !std::isfinite(r.w) || !std::isfinite(r.h)) {
      throw IoError("ground truth line " + std::to_string(line_no) + ": non-finite value");
    }
    records.push_back(r);
  }
  if (!header_seen) throw IoError("ground truth: missing header");
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.frame_index < b.frame_index; });
  return records;
}

std::vector<GroundTruthRecord> load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open ground truth " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ground_truth(ss.str());
}

void write_ground_truth(const std::filesystem::path& path, std::span<const GroundTruthRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "frame,cx,cy,w,h\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%lld,%.6f,%.6f,%g,%g\n", static_cast<long long>(r.frame_index), r.cx, r.cy,
                  r.w, r.h);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path.string());
}

PixelRect pixel_rect(const GroundTruthRecord& gt) noexcept {
  return {static_cast<int>(std::ceil(gt.cx - gt.w / 2.0)), static_cast<int>(std::ceil(gt.cy - gt.h / 2.0)),
          static_cast<int>(std::ceil(gt.cx + gt.w / 2.0)) - 1, static_cast<int>(std::ceil(gt.cy + gt.h / 2.0)) - 1};
}

bool box_contains(const GroundTruthRecord& gt, int x, int y) noexcept { return pixel_rect(gt).contains(x, y); }

bool box_inside(const GroundTruthRecord& gt, int width, int height) noexcept {
  const PixelRect r = pixel_rect(gt);
  return !r.empty() && r.x0 >= 0 && r.y0 >= 0 && r.x1 < width && r.y1 < height;
}

std::span<const GroundTruthRecord> records_for_frame(std::span<const GroundTruthRecord> sorted,
                                                     std::int64_t frame_index) noexcept {
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), frame_index,
                                   [](const GroundTruthRecord& r, std::int64_t f) { return r.frame_index < f; });
  auto hi = lo;
  while (hi != sorted.end() && hi->frame_index == frame_index) ++hi;
  return {lo, hi};
}

}  // namespace stlfd

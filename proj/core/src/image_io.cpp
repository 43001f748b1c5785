#include "stlfd/image_io.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace stlfd {
namespace {

namespace fs = std::filesystem;

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  return f;
}

// libpng reports through longjmp; the message is stashed here first.
struct PngErrorState {
  std::jmp_buf jump;
  char message[256] = {};
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  std::longjmp(state->jump, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

bool is_png(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<unsigned char, 8> sig{};
  in.read(reinterpret_cast<char*>(sig.data()), sig.size());
  return in.gcount() == 8 && png_sig_cmp(sig.data(), 0, 8) == 0;
}

RawImage read_png(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  PngErrorState err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);

  RawImage img;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  const char* volatile failure = nullptr;

  if (setjmp(err.jump)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string() + ": " + err.message);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  if (color != PNG_COLOR_TYPE_GRAY) {
    failure = "unsupported PNG color type (need single-channel grayscale)";
  } else if (depth != 8 && depth != 16) {
    failure = "unsupported PNG bit depth (need 8 or 16)";
  } else {
    img.bit_depth = depth;
    img.maxval = depth == 8 ? 255u : 65535u;
    const std::size_t stride = png_get_rowbytes(png, info);
    buffer.resize(stride * static_cast<std::size_t>(img.height));
    rows.resize(static_cast<std::size_t>(img.height));
    for (int y = 0; y < img.height; ++y) rows[y] = buffer.data() + stride * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (failure) throw IoError(path.string() + ": " + failure);

  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  img.samples.resize(n);
  if (img.bit_depth == 8) {
    for (std::size_t i = 0; i < n; ++i) img.samples[i] = buffer[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      img.samples[i] = static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]);
    }
  }
  return img;
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

RawImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (pgm_token(in) != "P5") throw IoError(path.string() + ": not a binary PGM (P5)");
  RawImage img;
  try {
    img.width = std::stoi(pgm_token(in));
    img.height = std::stoi(pgm_token(in));
    img.maxval = static_cast<std::uint32_t>(std::stoul(pgm_token(in)));
  } catch (const std::exception&) {
    throw IoError(path.string() + ": malformed PGM header");
  }
  if (img.width <= 0 || img.height <= 0 || img.maxval == 0 || img.maxval > 65535) {
    throw IoError(path.string() + ": unsupported PGM header values");
  }
  img.bit_depth = img.maxval < 256 ? 8 : 16;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  const std::size_t bytes = n * (img.bit_depth / 8);
  std::vector<unsigned char> buf(bytes);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) throw IoError(path.string() + ": truncated PGM data");
  img.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    img.samples[i] = img.bit_depth == 8 ? buf[i] : static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
    if (img.samples[i] > img.maxval) throw IoError(path.string() + ": sample exceeds maxval");
  }
  return img;
}

void write_png(const fs::path& path, int width, int height, int depth, const std::vector<png_byte>& buffer) {
  FilePtr file = open_file(path, "wb");
  PngErrorState err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  const std::size_t stride = static_cast<std::size_t>(width) * (depth / 8);
  for (int y = 0; y < height; ++y) rows[y] = const_cast<png_bytep>(buffer.data()) + stride * y;

  if (setjmp(err.jump)) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path.string() + ": " + err.message);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError("write failed: " + path.string());
}

void write_binary(const fs::path& path, const std::string& header, const std::vector<unsigned char>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

ImageHeader read_png_header(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  PngErrorState err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  ImageHeader hdr;
  if (setjmp(err.jump)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string() + ": " + err.message);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  hdr.width = static_cast<int>(png_get_image_width(png, info));
  hdr.height = static_cast<int>(png_get_image_height(png, info));
  hdr.bit_depth = png_get_bit_depth(png, info);
  png_destroy_read_struct(&png, &info, nullptr);
  return hdr;
}

ImageHeader read_pgm_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (pgm_token(in) != "P5") throw IoError(path.string() + ": not a binary PGM (P5)");
  ImageHeader hdr;
  try {
    hdr.width = std::stoi(pgm_token(in));
    hdr.height = std::stoi(pgm_token(in));
    hdr.bit_depth = std::stoul(pgm_token(in)) < 256 ? 8 : 16;
  } catch (const std::exception&) {
    throw IoError(path.string() + ": malformed PGM header");
  }
  return hdr;
}

}  // namespace

ImageHeader read_image_header(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("not a readable file: " + path.string());
  return is_png(path) ? read_png_header(path) : read_pgm_header(path);
}

RawImage read_image(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("not a readable file: " + path.string());
  return is_png(path) ? read_png(path) : read_pgm(path);
}

Frame load_frame(const fs::path& path, std::int64_t index) {
  const RawImage raw = read_image(path);
  if (raw.width < kMinFrameSide || raw.height < kMinFrameSide) {
    throw IoError(path.string() + ": image smaller than 9x9");
  }
  const double full_scale = static_cast<double>(raw.maxval);
  std::vector<double> px(raw.samples.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = raw.samples[i] / full_scale;
  return Frame(index, Grid<double>(raw.width, raw.height, std::move(px)));
}

std::uint16_t quantize16(double v) noexcept {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 65535;
  return static_cast<std::uint16_t>(std::floor(v * 65535.0 + 0.5));
}

void write_png8(const fs::path& path, const Grid<std::uint8_t>& image) {
  std::vector<png_byte> buf(image.values().begin(), image.values().end());
  write_png(path, image.width(), image.height(), 8, buf);
}

void write_png16(const fs::path& path, const Grid<std::uint16_t>& image) {
  std::vector<png_byte> buf(image.size() * 2);
  std::size_t i = 0;
  for (std::uint16_t s : image.values()) {
    buf[i++] = static_cast<png_byte>(s >> 8);
    buf[i++] = static_cast<png_byte>(s & 0xFF);
  }
  write_png(path, image.width(), image.height(), 16, buf);
}

void write_pgm16(const fs::path& path, const Grid<std::uint16_t>& image) {
  std::vector<unsigned char> body(image.size() * 2);
  std::size_t i = 0;
  for (std::uint16_t s : image.values()) {
    body[i++] = static_cast<unsigned char>(s >> 8);
    body[i++] = static_cast<unsigned char>(s & 0xFF);
  }
  const std::string header =
      "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n65535\n";
  write_binary(path, header, body);
}

void write_mask_png(const fs::path& path, const BinaryMask& mask) {
  Grid<std::uint8_t> img(mask.width(), mask.height());
  auto out = img.values();
  auto in = mask.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] ? 255 : 0;
  write_png8(path, img);
}

void write_map_pgm16(const fs::path& path, const FeatureMap& map) {
  Grid<std::uint16_t> img(map.width(), map.height());
  auto out = img.values();
  auto in = map.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = quantize16(in[i]);
  write_pgm16(path, img);
}

void write_frame_png16(const fs::path& path, const Grid<double>& pixels) {
  Grid<std::uint16_t> img(pixels.width(), pixels.height());
  auto out = img.values();
  auto in = pixels.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = quantize16(in[i]);
  write_png16(path, img);
}

void write_map_f32(const fs::path& path, const FeatureMap& map) {
  std::vector<unsigned char> body(map.size() * 4);
  std::size_t i = 0;
  for (double v : map.values()) {
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b) body[i++] = static_cast<unsigned char>((bits >> (8 * b)) & 0xFF);
  }
  write_binary(path, {}, body);
}

FeatureMap read_map_f32(const fs::path& path, int width, int height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<unsigned char> buf(n * 4);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size() || in.peek() != EOF) {
    throw IoError(path.string() + ": size does not match " + std::to_string(width) + "x" + std::to_string(height));
  }
  FeatureMap map(width, height);
  auto out = map.values();
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(buf[4 * i + b]) << (8 * b);
    out[i] = std::bit_cast<float>(bits);
  }
  return map;
}

FeatureMap read_map_pgm(const fs::path& path) {
  const RawImage raw = read_image(path);
  FeatureMap map(raw.width, raw.height);
  const double full_scale = static_cast<double>(raw.maxval);
  auto out = map.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = raw.samples[i] / full_scale;
  return map;
}

std::string indexed_name(std::string_view stem, std::int64_t index, std::string_view ext) {
  char digits[32];
  std::snprintf(digits, sizeof(digits), "%06lld", static_cast<long long>(index));
  std::string name(stem);
  name += '_';
  name += digits;
  name += '.';
  name += ext;
  return name;
}

}  // namespace stlfd

#include "stlfd/window.hpp"

#include <algorithm>
#include <vector>

namespace stlfd::window {
namespace {

// Clipped sliding extremum over a strided 1-D line of length n. `keep(a, b)`
// is true when a dominates b (>= for max, <= for min).
template <typename Keep>
void sliding_line(const double* in, std::ptrdiff_t in_stride, double* out, std::ptrdiff_t out_stride, int n,
                  int radius, std::vector<int>& deque, Keep keep) {
  deque.resize(static_cast<std::size_t>(n));
  int head = 0;
  int tail = 0;
  int next = 0;  // next input position to enter the window
  for (int i = 0; i < n; ++i) {
    const int hi = std::min(n - 1, i + radius);
    for (; next <= hi; ++next) {
      const double v = in[next * in_stride];
      while (tail > head && keep(v, in[deque[tail - 1] * in_stride])) --tail;
      deque[tail++] = next;
    }
    while (deque[head] < i - radius) ++head;
    out[i * out_stride] = in[deque[head] * in_stride];
  }
}

}  // namespace

Grid<double> box_mean(const Grid<double>& in, int side) {
  const int w = in.width();
  const int h = in.height();
  const int r = side / 2;
  Grid<double> rows(w, h);
  Grid<double> out(w, h);
  if (w < side || h < side) return out;

  for (int y = 0; y < h; ++y) {
    const auto src = in.row(y);
    auto dst = rows.row(y);
    for (int x = r; x < w - r; ++x) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k) s += src[x + k];
      dst[x] = s;
    }
  }
  const double inv = 1.0 / (static_cast<double>(side) * side);
  for (int y = r; y < h - r; ++y) {
    auto dst = out.row(y);
    for (int k = -r; k <= r; ++k) {
      const auto src = rows.row(y + k);
      for (int x = r; x < w - r; ++x) dst[x] += src[x];
    }
    for (int x = r; x < w - r; ++x) dst[x] *= inv;
  }
  return out;
}

namespace {

template <typename Keep>
Grid<double> extremum_filter(const Grid<double>& in, int side, Keep keep) {
  const int w = in.width();
  const int h = in.height();
  const int r = side / 2;
  Grid<double> tmp(w, h);
  Grid<double> out(w, h);
  std::vector<int> deque;
  for (int y = 0; y < h; ++y) {
    sliding_line(in.row(y).data(), 1, tmp.row(y).data(), 1, w, r, deque, keep);
  }
  for (int x = 0; x < w; ++x) {
    sliding_line(&tmp.at(x, 0), w, &out.at(x, 0), w, h, r, deque, keep);
  }
  return out;
}

}  // namespace

Grid<double> max_filter(const Grid<double>& in, int side) {
  return extremum_filter(in, side, [](double a, double b) { return a >= b; });
}

Grid<double> min_filter(const Grid<double>& in, int side) {
  return extremum_filter(in, side, [](double a, double b) { return a <= b; });
}

}  // namespace stlfd::window

#pragma once

#include "stlfd/types.hpp"

// Separable sliding-window kernels shared by the spatial filter and ABS.
namespace stlfd::window {

/// Mean over the side x side window centered on each pixel. Only pixels whose
/// window fits in the grid are meaningful; the rest are left at 0.
Grid<double> box_mean(const Grid<double>& in, int side);

/// Max over the side x side window centered on each pixel, window clipped at
/// the borders. Computed as a row pass then a column pass, each with a
/// monotone deque, so the cost per pixel is independent of side.
Grid<double> max_filter(const Grid<double>& in, int side);

/// Min counterpart of max_filter.
Grid<double> min_filter(const Grid<double>& in, int side);

}  // namespace stlfd::window

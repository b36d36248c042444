// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace stagewise {

// Coordinates: origin top-left, x grows right, y grows down. All masks live
// on the image canvas (the backend's latent grid) and are rescaled when they
// meet a coarser attention grid.

struct Canvas {
    int width = 0;
    int height = 0;

    int cells() const { return width * height; }
    bool operator==(const Canvas&) const = default;
};

struct BBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }
    int bottom() const { return y + h; }
    long area() const { return static_cast<long>(w) * h; }
    bool operator==(const BBox&) const = default;
};

enum class Position { left, bottom, right, top };

std::string_view to_string(Position position);
std::optional<Position> position_from_string(std::string_view text);

inline bool is_first_position(Position p) { return p == Position::left || p == Position::bottom; }
inline bool is_next_position(Position p) { return p == Position::right || p == Position::top; }

bool within(const BBox& box, const Canvas& canvas);
std::optional<BBox> intersection(const BBox& a, const BBox& b);
BBox full_canvas(const Canvas& canvas);

/// Row-major grid of 0/1 cells.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> cells;

    std::uint8_t at(int x, int y) const { return cells[static_cast<size_t>(y) * width + x]; }
    long count() const;
};

/// Row-major grid of reals, used for averaged attention maps.
struct ScalarGrid {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
};

/// Rough mask of the first object: the left (or bottom) one of `count`
/// equal strips of the canvas.
BBox rough_mask_first(Position position, int count, const Canvas& canvas);

/// All `count` strips of the first-object split, ordered from the painting
/// start (left, or bottom). Strip 0 equals rough_mask_first.
std::vector<BBox> first_split_strips(Position position, int count, const Canvas& canvas);

/// Rough mask of object n > 1, placed right of or above the previous
/// object's precise mask and sized as one of `count` shares of the space left
/// in that direction. Throws layout_exhausted when no space remains.
BBox rough_mask_next(Position position, int count, const BBox& previous, const Canvas& canvas);

struct OverlapCandidate {
    BBox bbox;
    bool clamped = false;
};

/// Rough mask of object n that intrudes into the previous object by a
/// fraction `ratio` of its extent along the stacking axis.
OverlapCandidate overlap_candidate(Position position, int count, const BBox& previous,
                                   const Canvas& canvas, double ratio);

/// Half-open cell range [begin, end) on a grid of `grid_extent` cells whose
/// centers fall inside [lo, lo + extent) of a `canvas_extent`-wide canvas.
struct CellRange {
    int begin = 0;
    int end = 0;
};
CellRange rescale_range(int lo, int extent, int canvas_extent, int grid_extent);

/// 0-1 indicator of `box` (canvas coordinates) on a grid of `resolution`.
/// A grid cell is inside when its center, mapped back to the canvas, is.
BinaryMask indicator_mask(const BBox& box, const Canvas& canvas, const Canvas& resolution);

/// Linear-interpolation quantile of `values` (q in [0, 1]).
double quantile(std::span<const double> values, double q);

/// Tightest box around the cells of `map` strictly above its `q`-quantile.
/// When no cell is strictly above (flat top), the cells equal to the maximum
/// are used. Throws precise_mask_extraction when the map carries no positive
/// mass or contains non-finite values.
BBox bbox_from_attention(const ScalarGrid& map, double q);

}  // namespace stagewise

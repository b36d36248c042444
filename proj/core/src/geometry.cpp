// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stagewise/errors.hpp"

namespace stagewise {

namespace {

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

long ceil_div(long a, long b) {
    return -floor_div(-a, b);
}

void check_canvas(const Canvas& canvas) {
    if (canvas.width < 1 || canvas.height < 1)
        raise(ErrorKind::contract, "canvas must be at least 1x1");
}

void check_previous(const BBox& previous, const Canvas& canvas) {
    if (previous.w < 1 || previous.h < 1 || !within(previous, canvas))
        raise(ErrorKind::contract, "previous mask lies outside the canvas");
}

void check_count(int count) {
    if (count < 1)
        raise(ErrorKind::invalid_plan, "object count must be >= 1, got " + std::to_string(count));
}

}  // namespace

std::string_view to_string(Position position) {
    switch (position) {
    case Position::left: return "left";
    case Position::bottom: return "bottom";
    case Position::right: return "right";
    case Position::top: return "top";
    }
    return "left";
}

std::optional<Position> position_from_string(std::string_view text) {
    if (text == "left") return Position::left;
    if (text == "bottom") return Position::bottom;
    if (text == "right") return Position::right;
    if (text == "top") return Position::top;
    return std::nullopt;
}

bool within(const BBox& box, const Canvas& canvas) {
    return box.x >= 0 && box.y >= 0 && box.w >= 0 && box.h >= 0 && box.right() <= canvas.width &&
           box.bottom() <= canvas.height;
}

std::optional<BBox> intersection(const BBox& a, const BBox& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.right(), b.right());
    const int y1 = std::min(a.bottom(), b.bottom());
    if (x1 <= x0 || y1 <= y0)
        return std::nullopt;
    return BBox{x0, y0, x1 - x0, y1 - y0};
}

BBox full_canvas(const Canvas& canvas) {
    return {0, 0, canvas.width, canvas.height};
}

long BinaryMask::count() const {
    return static_cast<long>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

BBox rough_mask_first(Position position, int count, const Canvas& canvas) {
    check_canvas(canvas);
    check_count(count);
    if (!is_first_position(position))
        raise(ErrorKind::invalid_plan, "first object must be placed left or bottom");

    if (position == Position::left) {
        const int w = canvas.width / count;
        if (w < 1)
            raise(ErrorKind::invalid_plan, "too many horizontal objects for the canvas width");
        return {0, 0, w, canvas.height};
    }
    if (count > canvas.height)
        raise(ErrorKind::invalid_plan, "too many vertical objects for the canvas height");
    // Floor the offset and ceil the extent so the strip always reaches y = H.
    const int y = static_cast<int>(floor_div(static_cast<long>(count - 1) * canvas.height, count));
    const int h = static_cast<int>(ceil_div(canvas.height, count));
    return {0, y, canvas.width, h};
}

std::vector<BBox> first_split_strips(Position position, int count, const Canvas& canvas) {
    const BBox first = rough_mask_first(position, count, canvas);
    std::vector<BBox> strips{first};
    strips.reserve(static_cast<size_t>(count));
    for (int i = 1; i < count; ++i) {
        if (position == Position::left) {
            const int x0 = static_cast<int>(floor_div(static_cast<long>(i) * canvas.width, count));
            const int x1 = static_cast<int>(floor_div(static_cast<long>(i + 1) * canvas.width, count));
            strips.push_back({x0, 0, x1 - x0, canvas.height});
        } else {
            const int y0 = static_cast<int>(floor_div(static_cast<long>(count - 1 - i) * canvas.height, count));
            const int y1 = static_cast<int>(floor_div(static_cast<long>(count - i) * canvas.height, count));
            strips.push_back({0, y0, canvas.width, y1 - y0});
        }
    }
    return strips;
}

BBox rough_mask_next(Position position, int count, const BBox& previous, const Canvas& canvas) {
    check_canvas(canvas);
    check_count(count);
    check_previous(previous, canvas);
    if (!is_next_position(position))
        raise(ErrorKind::invalid_plan, "objects after the first must be placed right or top");

    if (position == Position::right) {
        const int remaining = canvas.width - previous.right();
        const int w = remaining / count;
        if (remaining <= 0 || w < 1)
            raise(ErrorKind::layout_exhausted, "no horizontal space right of the previous object");
        return {previous.right(), 0, w, canvas.height};
    }
    if (previous.y <= 0)
        raise(ErrorKind::layout_exhausted, "no vertical space above the previous object");
    const int y = static_cast<int>(floor_div(static_cast<long>(previous.y) * (count - 1), count));
    const int h = static_cast<int>(ceil_div(previous.y, count));
    return {0, y, canvas.width, h};
}

OverlapCandidate overlap_candidate(Position position, int count, const BBox& previous,
                                   const Canvas& canvas, double ratio) {
    check_canvas(canvas);
    check_count(count);
    check_previous(previous, canvas);
    if (!is_next_position(position))
        raise(ErrorKind::invalid_plan, "overlap candidates exist only for right or top placement");
    if (!(ratio >= 0.0 && ratio < 1.0))
        raise(ErrorKind::contract, "overlap ratio must lie in [0, 1)");

    OverlapCandidate out;
    if (position == Position::right) {
        const int remaining = canvas.width - previous.right();
        if (remaining <= 0)
            raise(ErrorKind::layout_exhausted, "no horizontal space right of the previous object");
        const int x = previous.x + static_cast<int>(std::lround(previous.w * (1.0 - ratio)));
        const int w = static_cast<int>(std::lround(previous.w * ratio)) + remaining / count;
        if (w < 1)
            raise(ErrorKind::layout_exhausted, "overlap candidate has no width");
        out.bbox = {x, previous.y, w, previous.h};
    } else {
        if (previous.y <= 0)
            raise(ErrorKind::layout_exhausted, "no vertical space above the previous object");
        const int y = static_cast<int>(floor_div(static_cast<long>(count - 1) * previous.y, count));
        const int h = static_cast<int>(std::lround(previous.h * ratio)) + static_cast<int>(ceil_div(previous.y, count));
        out.bbox = {previous.x, y, previous.w, h};
    }

    if (out.bbox.right() > canvas.width) {
        out.bbox.w = canvas.width - out.bbox.x;
        out.clamped = true;
    }
    if (out.bbox.bottom() > canvas.height) {
        out.bbox.h = canvas.height - out.bbox.y;
        out.clamped = true;
    }
    return out;
}

CellRange rescale_range(int lo, int extent, int canvas_extent, int grid_extent) {
    // cell u is inside iff lo <= (u + 1/2) * C / G < lo + extent, i.e.
    // 2*lo*G <= (2u + 1) * C < 2*(lo + extent)*G.
    const long c = canvas_extent;
    const long g = grid_extent;
    const long hi = static_cast<long>(lo) + extent;
    long begin = ceil_div(2 * lo * g - c, 2 * c);
    long end = ceil_div(2 * hi * g - c, 2 * c);
    begin = std::clamp<long>(begin, 0, g);
    end = std::clamp<long>(end, begin, g);
    return {static_cast<int>(begin), static_cast<int>(end)};
}

BinaryMask indicator_mask(const BBox& box, const Canvas& canvas, const Canvas& resolution) {
    check_canvas(canvas);
    check_canvas(resolution);
    BinaryMask mask{resolution.width, resolution.height,
                    std::vector<std::uint8_t>(static_cast<size_t>(resolution.cells()), 0)};
    const CellRange xs = rescale_range(box.x, box.w, canvas.width, resolution.width);
    const CellRange ys = rescale_range(box.y, box.h, canvas.height, resolution.height);
    for (int v = ys.begin; v < ys.end; ++v)
        for (int u = xs.begin; u < xs.end; ++u)
            mask.cells[static_cast<size_t>(v) * resolution.width + u] = 1;
    return mask;
}

double quantile(std::span<const double> values, double q) {
    require(!values.empty(), "quantile of an empty set");
    require(q >= 0.0 && q <= 1.0, "quantile level must lie in [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0)
        return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BBox bbox_from_attention(const ScalarGrid& map, double q) {
    require(map.width > 0 && map.height > 0 &&
                map.values.size() == static_cast<size_t>(map.width) * map.height,
            "attention grid shape mismatch");
    double max_value = -std::numeric_limits<double>::infinity();
    for (double v : map.values) {
        if (!std::isfinite(v))
            raise(ErrorKind::precise_mask_extraction, "attention map contains non-finite values");
        max_value = std::max(max_value, v);
    }
    if (!(max_value > 0.0))
        raise(ErrorKind::precise_mask_extraction, "attention map carries no positive mass");

    const double threshold = quantile(map.values, q);
    const bool flat_top = !(max_value > threshold);

    int x0 = map.width, y0 = map.height, x1 = -1, y1 = -1;
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const double v = map.at(x, y);
            const bool hot = flat_top ? (v == max_value) : (v > threshold);
            if (!hot)
                continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0)
        raise(ErrorKind::precise_mask_extraction, "no cell passes the attention threshold");
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

}  // namespace stagewise

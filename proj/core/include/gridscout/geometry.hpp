#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace gridscout {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }

inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

struct CellIndex {
    int x = 0;
    int y = 0;
    friend bool operator==(CellIndex a, CellIndex b) { return a.x == b.x && a.y == b.y; }
    friend bool operator<(CellIndex a, CellIndex b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    }
};

/// All cells whose closed unit square is touched by the closed segment a-b,
/// in traversal order from a to b. Corner crossings include both side cells.
/// Conservative: used for edge collision checks, where grazing a wall counts
/// as a hit.
std::vector<CellIndex> supercover_cells(Point a, Point b, double cell_size);

enum class TraceOutcome { Reached, Blocked };

struct TraceHit {
    CellIndex primary{};
    bool has_secondary = false;
    CellIndex secondary{};
};

/// Walks the cells whose interior the segment a-b crosses, in order.
/// `blocked(cell)` decides opacity. At an exact corner crossing the ray
/// squeezes through diagonally unless BOTH corner-side cells are blocked
/// (no sight through the junction of two wall cells). Side cells that are
/// merely grazed are not reported as crossed.
///
/// `on_cross(cell)` fires for every crossed non-blocked cell including the
/// start and (if reached) end cells. Returns Blocked with the blocking cell
/// (or the blocking pair, at a corner) as soon as opacity stops the walk.
template <typename IsBlocked, typename OnCross>
TraceOutcome trace_segment(Point a, Point b, double cell_size,
                           IsBlocked&& blocked, OnCross&& on_cross,
                           TraceHit* hit = nullptr) {
    const double ux0 = a.x / cell_size, uy0 = a.y / cell_size;
    const double ux1 = b.x / cell_size, uy1 = b.y / cell_size;
    int ix = static_cast<int>(std::floor(ux0));
    int iy = static_cast<int>(std::floor(uy0));
    const int ex = static_cast<int>(std::floor(ux1));
    const int ey = static_cast<int>(std::floor(uy1));

    const double dx = ux1 - ux0, dy = uy1 - uy0;
    const int sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    const int sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
    const double inf = std::numeric_limits<double>::infinity();
    const double tdx = sx != 0 ? 1.0 / std::abs(dx) : inf;
    const double tdy = sy != 0 ? 1.0 / std::abs(dy) : inf;
    double tmx = sx != 0 ? ((sx > 0 ? ix + 1 - ux0 : ux0 - ix) * tdx) : inf;
    double tmy = sy != 0 ? ((sy > 0 ? iy + 1 - uy0 : uy0 - iy) * tdy) : inf;

    auto emit = [&](CellIndex c) -> bool {
        if (blocked(c)) {
            if (hit) *hit = TraceHit{c, false, {}};
            return false;
        }
        on_cross(c);
        return true;
    };

    if (!emit({ix, iy})) return TraceOutcome::Blocked;
    // Guard against fp drift: never walk more cells than the bounding box holds.
    int guard = 2 * (std::abs(ex - ix) + std::abs(ey - iy)) + 4;
    while ((ix != ex || iy != ey) && guard-- > 0) {
        constexpr double kTieTol = 1e-12;
        if (std::abs(tmx - tmy) < kTieTol && sx != 0 && sy != 0) {
            const CellIndex side_a{ix + sx, iy};
            const CellIndex side_b{ix, iy + sy};
            if (blocked(side_a) && blocked(side_b)) {
                if (hit) *hit = TraceHit{side_a, true, side_b};
                return TraceOutcome::Blocked;
            }
            ix += sx;
            iy += sy;
            tmx += tdx;
            tmy += tdy;
        } else if (tmx < tmy) {
            ix += sx;
            tmx += tdx;
        } else {
            iy += sy;
            tmy += tdy;
        }
        if (!emit({ix, iy})) return TraceOutcome::Blocked;
    }
    return TraceOutcome::Reached;
}

/// True when the segment crosses only cells accepted by `free_cell`
/// under the trace_segment visibility rules.
template <typename IsFree>
bool line_of_sight(Point a, Point b, double cell_size, IsFree&& free_cell) {
    auto blocked = [&](CellIndex c) { return !free_cell(c); };
    return trace_segment(a, b, cell_size, blocked, [](CellIndex) {}) ==
           TraceOutcome::Reached;
}

}  // namespace gridscout

#include "gridscout/geometry.hpp"

#include <algorithm>
#include <limits>

namespace gridscout {

std::vector<CellIndex> supercover_cells(Point a, Point b, double cell_size) {
    std::vector<CellIndex> cells;
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

    cells.push_back({ix, iy});
    int guard = 2 * (std::abs(ex - ix) + std::abs(ey - iy)) + 8;
    while ((ix != ex || iy != ey) && guard-- > 0) {
        constexpr double kTieTol = 1e-12;
        if (std::abs(tmx - tmy) < kTieTol && sx != 0 && sy != 0) {
            cells.push_back({ix + sx, iy});
            cells.push_back({ix, iy + sy});
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
        cells.push_back({ix, iy});
    }
    return cells;
}

}  // namespace gridscout

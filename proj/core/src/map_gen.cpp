#include "gridscout/map_gen.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gridscout/geometry.hpp"
#include "gridscout/rng.hpp"

namespace gridscout {
namespace {

constexpr int kMinSide = 16;
// Doorways and aisles stay at least this many cells wide so a robot with a
// sensing footprint of a couple of cells can always pass.
constexpr int kMinGap = 4;

struct Rect {
  int x, y, w, h;  // cell units, [x, x+w) x [y, y+h)
};

void fill_rect(GroundTruthMap& m, const Rect& r, Cell value) {
  for (int y = r.y; y < r.y + r.h; ++y)
    for (int x = r.x; x < r.x + r.w; ++x)
      if (m.in_bounds({x, y})) m.set({x, y}, value);
}

void carve_border_walls(GroundTruthMap& m) {
  for (int x = 0; x < m.width; ++x) {
    m.set({x, 0}, Cell::Occupied);
    m.set({x, m.height - 1}, Cell::Occupied);
  }
  for (int y = 0; y < m.height; ++y) {
    m.set({0, y}, Cell::Occupied);
    m.set({m.width - 1, y}, Cell::Occupied);
  }
}

// ---------------------------------------------------------------- indoor ---

// Recursive binary splits; every split wall gets a doorway of >= kMinGap
// cells so all rooms stay mutually reachable.
void split_room(GroundTruthMap& m, Rng& rng, const Rect& r, int depth) {
  const int min_room = 2 * kMinGap + 1;  // room side small enough to stop
  if (depth <= 0) return;
  const bool can_v = r.w >= 2 * min_room + 1;
  const bool can_h = r.h >= 2 * min_room + 1;
  if (!can_v && !can_h) return;

  bool vertical;
  if (can_v && can_h)
    vertical = r.w > r.h ? true : (r.h > r.w ? false : rng.uniform() < 0.5);
  else
    vertical = can_v;

  if (vertical) {
    const int lo = r.x + min_room;
    const int hi = r.x + r.w - 1 - min_room;
    const int wall_x = lo + rng.uniform_int(hi - lo + 1);
    for (int y = r.y; y < r.y + r.h; ++y) m.set({wall_x, y}, Cell::Occupied);
    const int door_lo = r.y + rng.uniform_int(std::max(1, r.h - kMinGap));
    for (int y = door_lo; y < std::min(door_lo + kMinGap, r.y + r.h); ++y)
      m.set({wall_x, y}, Cell::Free);
    split_room(m, rng, {r.x, r.y, wall_x - r.x, r.h}, depth - 1);
    split_room(m, rng, {wall_x + 1, r.y, r.x + r.w - wall_x - 1, r.h},
               depth - 1);
  } else {
    const int lo = r.y + min_room;
    const int hi = r.y + r.h - 1 - min_room;
    const int wall_y = lo + rng.uniform_int(hi - lo + 1);
    for (int x = r.x; x < r.x + r.w; ++x) m.set({x, wall_y}, Cell::Occupied);
    const int door_lo = r.x + rng.uniform_int(std::max(1, r.w - kMinGap));
    for (int x = door_lo; x < std::min(door_lo + kMinGap, r.x + r.w); ++x)
      m.set({x, wall_y}, Cell::Free);
    split_room(m, rng, {r.x, r.y, r.w, wall_y - r.y}, depth - 1);
    split_room(m, rng, {r.x, wall_y + 1, r.w, r.y + r.h - wall_y - 1},
               depth - 1);
  }
}

void gen_indoor(GroundTruthMap& m, Rng& rng) {
  fill_rect(m, {0, 0, m.width, m.height}, Cell::Free);
  carve_border_walls(m);
  const int depth = 2 + static_cast<int>(std::log2(std::min(m.width, m.height) / kMinSide + 1));
  split_room(m, rng, {1, 1, m.width - 2, m.height - 2}, depth);
  // A few freestanding partitions (cubicle walls): short wall stubs off the
  // room walls, never sealing a gap narrower than kMinGap.
  const int stubs = std::max(1, m.width * m.height / 600);
  for (int s = 0; s < stubs; ++s) {
    const int x = 2 + rng.uniform_int(std::max(1, m.width - 4));
    const int y = 2 + rng.uniform_int(std::max(1, m.height - 4));
    const int len = 2 + rng.uniform_int(3);
    const bool horiz = rng.uniform() < 0.5;
    for (int i = 0; i < len; ++i) {
      const CellIndex c = horiz ? CellIndex{x + i, y} : CellIndex{x, y + i};
      if (!m.in_bounds(c)) break;
      m.set(c, Cell::Occupied);
    }
  }
}

// ---------------------------------------------------------------- forest ---

void stamp_disc(GroundTruthMap& m, double cx, double cy, double radius) {
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
  const int x1 = std::min(m.width - 1, static_cast<int>(std::ceil(cx + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
  const int y1 = std::min(m.height - 1, static_cast<int>(std::ceil(cy + radius)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const double dx = (x + 0.5) - cx;
      const double dy = (y + 0.5) - cy;
      if (dx * dx + dy * dy <= radius * radius)
        m.set({x, y}, Cell::Occupied);
    }
}

void gen_forest(GroundTruthMap& m, Rng& rng) {
  fill_rect(m, {0, 0, m.width, m.height}, Cell::Free);
  carve_border_walls(m);
  // Dart-throwing Poisson disc: trunks never closer than min_sep centers,
  // which keeps gaps between canopies wide enough to walk.
  const double min_radius = 1.0;
  const double max_radius = std::min(3.0, std::min(m.width, m.height) / 12.0);
  const double min_sep = 2.0 * max_radius + kMinGap;
  std::vector<Point> centers;
  const int target = static_cast<int>(m.width * m.height /
                                      (min_sep * min_sep));
  int attempts = target * 30;
  while (static_cast<int>(centers.size()) < target && attempts-- > 0) {
    const Point p{rng.uniform(2.0, m.width - 2.0),
                  rng.uniform(2.0, m.height - 2.0)};
    bool ok = true;
    for (const Point& q : centers)
      if (distance(p, q) < min_sep) {
        ok = false;
        break;
      }
    if (!ok) continue;
    centers.push_back(p);
    stamp_disc(m, p.x, p.y, rng.uniform(min_radius, max_radius));
  }
}

// ------------------------------------------------------------- warehouse ---

void gen_warehouse(GroundTruthMap& m, Rng& rng) {
  fill_rect(m, {0, 0, m.width, m.height}, Cell::Free);
  carve_border_walls(m);
  // Regular rack grid: box stacks of stack_w x stack_h separated by aisles.
  const int aisle = kMinGap + rng.uniform_int(2);          // 4..5 cells
  const int stack_w = 3 + rng.uniform_int(3);              // 3..5
  const int stack_h = 4 + rng.uniform_int(4);              // 4..7
  const int margin = 1 + aisle;
  for (int y = margin; y + stack_h + 1 < m.height - margin + aisle;
       y += stack_h + aisle) {
    for (int x = margin; x + stack_w + 1 < m.width - margin + aisle;
         x += stack_w + aisle) {
      if (y + stack_h >= m.height - 1 || x + stack_w >= m.width - 1) continue;
      // Occasional missing stack reads as a loading bay / open patch.
      if (rng.uniform() < 0.12) continue;
      fill_rect(m, {x, y, stack_w, stack_h}, Cell::Occupied);
    }
  }
}

// --------------------------------------------------- traversability gate ---

// Reference exploration robot, in cell units: the default planner lattice
// pitch (1.2 m over 0.4 m cells) and the default sensor reach (4.0 m). Rooms
// behind passages narrower than the lattice pitch are walls as far as that
// robot is concerned, so a world is usable only when a lattice viewpoint
// observing every reachable free cell is itself lattice-reachable.
constexpr int kLatticePitch = 3;
constexpr double kSensingReachCells = 10.0;

bool straight_run_free(const GroundTruthMap& m, CellIndex a, CellIndex b) {
  const int dx = (b.x > a.x) - (b.x < a.x);
  const int dy = (b.y > a.y) - (b.y < a.y);
  for (CellIndex c = a;; c = {c.x + dx, c.y + dy}) {
    if (m.at(c) != Cell::Free) return false;
    if (c.x == b.x && c.y == b.y) return true;
  }
}

bool cell_visible_from(const GroundTruthMap& m, CellIndex node, CellIndex cell) {
  const double dx = node.x - cell.x;
  const double dy = node.y - cell.y;
  if (dx * dx + dy * dy > kSensingReachCells * kSensingReachCells) return false;
  for (CellIndex c : supercover_cells({node.x + 0.5, node.y + 0.5},
                                      {cell.x + 0.5, cell.y + 0.5}, 1.0))
    if (!m.in_bounds(c) || m.at(c) != Cell::Free) return false;
  return true;
}

bool reference_robot_completes(const GroundTruthMap& m) {
  const CellIndex start = default_start_cell(m);
  const std::vector<uint8_t> reach = reachable_free_mask(m, start);

  // Viewpoint admission mirrors the graph builder: one node per lattice cell
  // whose center cell is free.
  const int lw = (m.width - kLatticePitch / 2 + kLatticePitch - 1) / kLatticePitch;
  const int lh = (m.height - kLatticePitch / 2 + kLatticePitch - 1) / kLatticePitch;
  std::vector<int> node_id(static_cast<size_t>(lw) * lh, -1);
  std::vector<CellIndex> nodes;
  for (int iy = 0; iy < lh; ++iy)
    for (int ix = 0; ix < lw; ++ix) {
      const CellIndex c{ix * kLatticePitch + kLatticePitch / 2,
                        iy * kLatticePitch + kLatticePitch / 2};
      if (!m.in_bounds(c) || m.at(c) != Cell::Free) continue;
      node_id[static_cast<size_t>(iy) * lw + ix] = static_cast<int>(nodes.size());
      nodes.push_back(c);
    }
  if (nodes.empty()) return false;

  int start_node = -1;
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < nodes.size(); ++i) {
    const double dx = nodes[i].x - start.x;
    const double dy = nodes[i].y - start.y;
    const double d = dx * dx + dy * dy;
    if (d < best) {
      best = d;
      start_node = static_cast<int>(i);
    }
  }
  if (best > kSensingReachCells * kSensingReachCells) return false;

  // Orthogonal lattice moves with a free straight corridor are a subset of
  // the collision-checked k-NN edges, so reachability proven here transfers.
  std::vector<uint8_t> in_comp(nodes.size(), 0);
  std::deque<int> queue{start_node};
  in_comp[start_node] = 1;
  auto lattice_of = [&](CellIndex c) {
    return std::pair{(c.x - kLatticePitch / 2) / kLatticePitch,
                     (c.y - kLatticePitch / 2) / kLatticePitch};
  };
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    const auto [ux, uy] = lattice_of(nodes[u]);
    constexpr int kDx[4] = {1, -1, 0, 0};
    constexpr int kDy[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int vx = ux + kDx[d];
      const int vy = uy + kDy[d];
      if (vx < 0 || vx >= lw || vy < 0 || vy >= lh) continue;
      const int v = node_id[static_cast<size_t>(vy) * lw + vx];
      if (v < 0 || in_comp[v]) continue;
      if (!straight_run_free(m, nodes[u], nodes[v])) continue;
      in_comp[v] = 1;
      queue.push_back(v);
    }
  }

  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      if (!reach[static_cast<size_t>(y) * m.width + x]) continue;
      const CellIndex cell{x, y};
      // The enclosing lattice cell's node sees most cells immediately.
      const auto [lx, ly] = lattice_of(cell);
      bool seen = false;
      if (lx >= 0 && lx < lw && ly >= 0 && ly < lh) {
        const int n = node_id[static_cast<size_t>(ly) * lw + lx];
        seen = n >= 0 && in_comp[n] && cell_visible_from(m, nodes[n], cell);
      }
      for (size_t i = 0; !seen && i < nodes.size(); ++i)
        seen = in_comp[i] && cell_visible_from(m, nodes[i], cell);
      if (!seen) return false;
    }
  return true;
}

}  // namespace

GroundTruthMap generate_map(MapKind kind, uint64_t seed, int width, int height,
                            double resolution) {
  if (width < kMinSide || height < kMinSide)
    throw std::invalid_argument("generate_map: dimensions below 16 cells");
  if (resolution <= 0.0)
    throw std::invalid_argument("generate_map: resolution must be positive");
  if (kind == MapKind::Custom)
    throw std::invalid_argument("generate_map: custom maps are loaded, not generated");

  GroundTruthMap m;
  m.width = width;
  m.height = height;
  m.resolution = resolution;
  m.kind = kind;
  m.seed = seed;

  // Feature interactions (wall ends inside a doorway, a stub beside a gap)
  // can pinch a passage below the lattice pitch; such worlds are unfinishable
  // no matter what the planner does. Redraw deterministically until the
  // reference robot can complete the map.
  const uint64_t base = mix_seed(seed, static_cast<uint64_t>(kind) + 1);
  for (uint32_t attempt = 0; attempt < 64; ++attempt) {
    m.cells.assign(static_cast<size_t>(width) * height, Cell::Free);
    Rng rng(attempt == 0 ? base : mix_seed(base, attempt));
    switch (kind) {
      case MapKind::Indoor: gen_indoor(m, rng); break;
      case MapKind::Forest: gen_forest(m, rng); break;
      case MapKind::Warehouse: gen_warehouse(m, rng); break;
      case MapKind::Custom: break;  // unreachable
    }
    if (reference_robot_completes(m)) return m;
  }
  throw std::runtime_error("generate_map: no traversable layout for kind " +
                           to_string(kind) + " seed " + std::to_string(seed));
}

CellIndex default_start_cell(const GroundTruthMap& truth) {
  const CellIndex center{truth.width / 2, truth.height / 2};
  const int max_r = std::max(truth.width, truth.height);
  for (int r = 0; r <= max_r; ++r) {
    // Scan the ring at Chebyshev radius r in row-major order; first free
    // cell wins, so the choice is deterministic.
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
        const CellIndex c{center.x + dx, center.y + dy};
        if (truth.in_bounds(c) && truth.at(c) == Cell::Free) return c;
      }
  }
  throw std::invalid_argument("default_start_cell: map has no free cell");
}

}  // namespace gridscout

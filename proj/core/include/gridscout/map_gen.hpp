#pragma once

#include "gridscout/grid_map.hpp"

namespace gridscout {

/// Procedural ground-truth environments. Deterministic for a fixed
/// (kind, seed, dims, resolution). Throws std::invalid_argument when the grid
/// is too small (< 16 cells a side) to place the required structure, or for
/// MapKind::Custom (custom maps come from files).
///
/// Indoor:    rooms and corridors from recursive splits with doorways.
/// Forest:    Poisson-disc scattered circular obstacles.
/// Warehouse: axis-aligned box stacks forming aisles.
GroundTruthMap generate_map(MapKind kind, uint64_t seed, int width, int height,
                            double resolution);

/// Free cell nearest the map center (deterministic ring scan). The free
/// component containing it is the mission's start region.
CellIndex default_start_cell(const GroundTruthMap& truth);

}  // namespace gridscout

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridscout/geometry.hpp"

namespace gridscout {

enum class Cell : uint8_t { Free, Occupied };
enum class Belief : uint8_t { Unknown, Free, Occupied };
enum class MapKind : uint8_t { Indoor, Forest, Warehouse, Custom };

std::string to_string(MapKind kind);
MapKind map_kind_from_string(const std::string& s);

/// Ground-truth environment. Immutable after generation; border cells are
/// always Occupied so the world is bounded.
struct GroundTruthMap {
    int width = 0;
    int height = 0;
    double resolution = 0.0;  // meters per cell
    MapKind kind = MapKind::Custom;
    uint64_t seed = 0;
    std::vector<Cell> cells;  // row-major, index = y * width + x

    bool in_bounds(CellIndex c) const {
        return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
    }
    Cell at(CellIndex c) const { return cells[static_cast<size_t>(c.y) * width + c.x]; }
    void set(CellIndex c, Cell v) { cells[static_cast<size_t>(c.y) * width + c.x] = v; }
    Point cell_center(CellIndex c) const {
        return {(c.x + 0.5) * resolution, (c.y + 0.5) * resolution};
    }
    CellIndex cell_of(Point p) const {
        return {static_cast<int>(std::floor(p.x / resolution)),
                static_cast<int>(std::floor(p.y / resolution))};
    }
    double width_m() const { return width * resolution; }
    double height_m() const { return height * resolution; }
};

/// The robot's evolving map. Labels partition into Unknown and Known, the
/// known part into Free and Occupied. Cells never return to Unknown and a
/// non-Unknown label always matches ground truth.
struct OccupancyBelief {
    int width = 0;
    int height = 0;
    double resolution = 0.0;
    std::vector<Belief> cells;

    static OccupancyBelief unknown_like(const GroundTruthMap& truth);

    bool in_bounds(CellIndex c) const {
        return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
    }
    Belief at(CellIndex c) const { return cells[static_cast<size_t>(c.y) * width + c.x]; }
    void set(CellIndex c, Belief v) { cells[static_cast<size_t>(c.y) * width + c.x] = v; }
    Point cell_center(CellIndex c) const {
        return {(c.x + 0.5) * resolution, (c.y + 0.5) * resolution};
    }
    CellIndex cell_of(Point p) const {
        return {static_cast<int>(std::floor(p.x / resolution)),
                static_cast<int>(std::floor(p.y / resolution))};
    }
    size_t count(Belief label) const;
};

struct Pose {
    Point position;
};

/// Free cells 4-adjacent to at least one Unknown cell.
struct FrontierSet {
    double resolution = 0.0;
    std::vector<CellIndex> cells;

    Point center(size_t i) const {
        return {(cells[i].x + 0.5) * resolution, (cells[i].y + 0.5) * resolution};
    }
    bool empty() const { return cells.empty(); }
    size_t size() const { return cells.size(); }
};

struct SenseResult {
    std::vector<CellIndex> revealed;  // cells newly labeled this scan
};

/// Omnidirectional scan: ray_count evenly spaced rays of length sensing_range.
/// Cells crossed before the first occupied hit become Free, the hit cell
/// becomes Occupied. Only cells whose center lies within sensing_range of the
/// pose are labeled. Throws std::invalid_argument when the pose is outside the
/// map or inside an occupied ground-truth cell.
SenseResult sense_and_update(OccupancyBelief& belief, const GroundTruthMap& truth,
                             Pose pose, double sensing_range, int ray_count);

FrontierSet detect_frontiers(const OccupancyBelief& belief);

/// Sum of Euclidean segment lengths. Single pose -> 0.
double path_length(std::span<const Pose> trajectory);

/// Cells of the ground-truth Free region 4-connected to `start`.
std::vector<uint8_t> reachable_free_mask(const GroundTruthMap& truth, CellIndex start);

struct CompletionStatus {
    bool frontier_empty = false;     // deployment criterion
    bool reachable_covered = false;  // evaluation criterion (needs ground truth)
    bool complete() const { return frontier_empty && reachable_covered; }
};

CompletionStatus completion_status(const OccupancyBelief& belief,
                                   const GroundTruthMap& truth, CellIndex start);

bool is_complete(const OccupancyBelief& belief, const GroundTruthMap& truth,
                 CellIndex start);

/// Fraction of start-reachable ground-truth Free cells already labeled.
double reachable_coverage(const OccupancyBelief& belief, const GroundTruthMap& truth,
                          CellIndex start);

// Text map format: header line, then one row of cell characters per grid row
// ('.' Free, '#' Occupied, 'U' Unknown). Round-trips bit-exactly.
std::string save_map(const GroundTruthMap& truth);
GroundTruthMap load_map(const std::string& text);
std::string save_belief(const OccupancyBelief& belief);
OccupancyBelief load_belief(const std::string& text);

}  // namespace gridscout

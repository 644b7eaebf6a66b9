#include "gridscout/grid_map.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace gridscout {

std::string to_string(MapKind kind) {
    switch (kind) {
        case MapKind::Indoor: return "indoor";
        case MapKind::Forest: return "forest";
        case MapKind::Warehouse: return "warehouse";
        case MapKind::Custom: return "custom";
    }
    return "custom";
}

MapKind map_kind_from_string(const std::string& s) {
    if (s == "indoor") return MapKind::Indoor;
    if (s == "forest") return MapKind::Forest;
    if (s == "warehouse") return MapKind::Warehouse;
    if (s == "custom") return MapKind::Custom;
    throw std::invalid_argument("unknown map kind: " + s);
}

OccupancyBelief OccupancyBelief::unknown_like(const GroundTruthMap& truth) {
    OccupancyBelief b;
    b.width = truth.width;
    b.height = truth.height;
    b.resolution = truth.resolution;
    b.cells.assign(truth.cells.size(), Belief::Unknown);
    return b;
}

size_t OccupancyBelief::count(Belief label) const {
    return static_cast<size_t>(std::count(cells.begin(), cells.end(), label));
}

namespace {

void label_cell(OccupancyBelief& belief, const GroundTruthMap& truth, CellIndex c,
                SenseResult& result) {
    if (!belief.in_bounds(c)) return;
    if (belief.at(c) != Belief::Unknown) return;
    belief.set(c, truth.at(c) == Cell::Free ? Belief::Free : Belief::Occupied);
    result.revealed.push_back(c);
}

}  // namespace

SenseResult sense_and_update(OccupancyBelief& belief, const GroundTruthMap& truth,
                             Pose pose, double sensing_range, int ray_count) {
    if (sensing_range <= 0.0) throw std::invalid_argument("sensing_range must be > 0");
    if (ray_count < 8) throw std::invalid_argument("ray_count must be >= 8");
    const CellIndex pc = truth.cell_of(pose.position);
    if (!truth.in_bounds(pc)) throw std::invalid_argument("pose outside map");
    if (truth.at(pc) != Cell::Free) throw std::invalid_argument("pose inside occupied cell");
    if (belief.at(pc) == Belief::Occupied)
        throw std::invalid_argument("pose in cell believed occupied");

    SenseResult result;
    const double two_pi = 6.283185307179586476925286766559;
    const double range_sq = sensing_range * sensing_range;
    auto in_range = [&](CellIndex c) {
        const Point ctr = truth.cell_center(c);
        const double dx = ctr.x - pose.position.x, dy = ctr.y - pose.position.y;
        return dx * dx + dy * dy <= range_sq;
    };
    auto blocked = [&](CellIndex c) {
        return !truth.in_bounds(c) || truth.at(c) == Cell::Occupied;
    };
    for (int r = 0; r < ray_count; ++r) {
        const double angle = two_pi * r / ray_count;
        const Point tip{pose.position.x + sensing_range * std::cos(angle),
                        pose.position.y + sensing_range * std::sin(angle)};
        TraceHit hit;
        const TraceOutcome out = trace_segment(
            pose.position, tip, truth.resolution, blocked,
            [&](CellIndex c) {
                if (in_range(c)) label_cell(belief, truth, c, result);
            },
            &hit);
        if (out == TraceOutcome::Blocked) {
            if (in_range(hit.primary)) label_cell(belief, truth, hit.primary, result);
            if (hit.has_secondary && in_range(hit.secondary))
                label_cell(belief, truth, hit.secondary, result);
        }
    }
    return result;
}

FrontierSet detect_frontiers(const OccupancyBelief& belief) {
    FrontierSet fs;
    fs.resolution = belief.resolution;
    static constexpr int kDx[4] = {1, -1, 0, 0};
    static constexpr int kDy[4] = {0, 0, 1, -1};
    for (int y = 0; y < belief.height; ++y) {
        for (int x = 0; x < belief.width; ++x) {
            const CellIndex c{x, y};
            if (belief.at(c) != Belief::Free) continue;
            for (int d = 0; d < 4; ++d) {
                const CellIndex n{x + kDx[d], y + kDy[d]};
                if (belief.in_bounds(n) && belief.at(n) == Belief::Unknown) {
                    fs.cells.push_back(c);
                    break;
                }
            }
        }
    }
    return fs;
}

double path_length(std::span<const Pose> trajectory) {
    if (trajectory.empty()) throw std::invalid_argument("trajectory is empty");
    double total = 0.0;
    for (size_t i = 1; i < trajectory.size(); ++i)
        total += distance(trajectory[i - 1].position, trajectory[i].position);
    return total;
}

std::vector<uint8_t> reachable_free_mask(const GroundTruthMap& truth, CellIndex start) {
    std::vector<uint8_t> mask(truth.cells.size(), 0);
    if (!truth.in_bounds(start) || truth.at(start) != Cell::Free) return mask;
    std::deque<CellIndex> queue{start};
    mask[static_cast<size_t>(start.y) * truth.width + start.x] = 1;
    static constexpr int kDx[4] = {1, -1, 0, 0};
    static constexpr int kDy[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        const CellIndex c = queue.front();
        queue.pop_front();
        for (int d = 0; d < 4; ++d) {
            const CellIndex n{c.x + kDx[d], c.y + kDy[d]};
            if (!truth.in_bounds(n) || truth.at(n) != Cell::Free) continue;
            uint8_t& seen = mask[static_cast<size_t>(n.y) * truth.width + n.x];
            if (!seen) {
                seen = 1;
                queue.push_back(n);
            }
        }
    }
    return mask;
}

CompletionStatus completion_status(const OccupancyBelief& belief,
                                   const GroundTruthMap& truth, CellIndex start) {
    CompletionStatus st;
    st.frontier_empty = detect_frontiers(belief).empty();
    const std::vector<uint8_t> mask = reachable_free_mask(truth, start);
    st.reachable_covered = true;
    for (size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] && belief.cells[i] == Belief::Unknown) {
            st.reachable_covered = false;
            break;
        }
    }
    return st;
}

bool is_complete(const OccupancyBelief& belief, const GroundTruthMap& truth,
                 CellIndex start) {
    return completion_status(belief, truth, start).complete();
}

double reachable_coverage(const OccupancyBelief& belief, const GroundTruthMap& truth,
                          CellIndex start) {
    const std::vector<uint8_t> mask = reachable_free_mask(truth, start);
    size_t total = 0, covered = 0;
    for (size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        ++total;
        if (belief.cells[i] != Belief::Unknown) ++covered;
    }
    return total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
}

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) throw std::invalid_argument("bad number: " + s);
    return v;
}

}  // namespace

std::string save_map(const GroundTruthMap& truth) {
    std::string out = "map " + std::to_string(truth.width) + " " +
                      std::to_string(truth.height) + " " + format_double(truth.resolution) +
                      " " + to_string(truth.kind) + " " + std::to_string(truth.seed) + "\n";
    for (int y = 0; y < truth.height; ++y) {
        for (int x = 0; x < truth.width; ++x)
            out += truth.at({x, y}) == Cell::Free ? '.' : '#';
        out += '\n';
    }
    return out;
}

GroundTruthMap load_map(const std::string& text) {
    std::istringstream in(text);
    std::string tag, kind_str, res_str;
    GroundTruthMap m;
    in >> tag >> m.width >> m.height >> res_str >> kind_str >> m.seed;
    if (tag != "map" || m.width <= 0 || m.height <= 0)
        throw std::invalid_argument("malformed map header");
    m.resolution = parse_double(res_str);
    m.kind = map_kind_from_string(kind_str);
    m.cells.resize(static_cast<size_t>(m.width) * m.height);
    std::string row;
    std::getline(in, row);  // consume end of header line
    for (int y = 0; y < m.height; ++y) {
        if (!std::getline(in, row) || static_cast<int>(row.size()) < m.width)
            throw std::invalid_argument("truncated map body");
        for (int x = 0; x < m.width; ++x) {
            if (row[x] == '.') m.set({x, y}, Cell::Free);
            else if (row[x] == '#') m.set({x, y}, Cell::Occupied);
            else throw std::invalid_argument("bad map cell character");
        }
    }
    return m;
}

std::string save_belief(const OccupancyBelief& belief) {
    std::string out = "belief " + std::to_string(belief.width) + " " +
                      std::to_string(belief.height) + " " +
                      format_double(belief.resolution) + "\n";
    for (int y = 0; y < belief.height; ++y) {
        for (int x = 0; x < belief.width; ++x) {
            const Belief b = belief.at({x, y});
            out += b == Belief::Free ? '.' : (b == Belief::Occupied ? '#' : 'U');
        }
        out += '\n';
    }
    return out;
}

OccupancyBelief load_belief(const std::string& text) {
    std::istringstream in(text);
    std::string tag, res_str;
    OccupancyBelief b;
    in >> tag >> b.width >> b.height >> res_str;
    if (tag != "belief" || b.width <= 0 || b.height <= 0)
        throw std::invalid_argument("malformed belief header");
    b.resolution = parse_double(res_str);
    b.cells.resize(static_cast<size_t>(b.width) * b.height);
    std::string row;
    std::getline(in, row);
    for (int y = 0; y < b.height; ++y) {
        if (!std::getline(in, row) || static_cast<int>(row.size()) < b.width)
            throw std::invalid_argument("truncated belief body");
        for (int x = 0; x < b.width; ++x) {
            if (row[x] == '.') b.set({x, y}, Belief::Free);
            else if (row[x] == '#') b.set({x, y}, Belief::Occupied);
            else if (row[x] == 'U') b.set({x, y}, Belief::Unknown);
            else throw std::invalid_argument("bad belief cell character");
        }
    }
    return b;
}

}  // namespace gridscout

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "gridscout/mission.hpp"

namespace gridscout {
namespace {

std::string fmt(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

// Green at zero deviation fading to red at one.
std::string deviation_color(double d) {
  const double t = std::clamp(d, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(40 + t * 180));
  const int g = static_cast<int>(std::lround(160 - t * 140));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x30", r, g);
  return buf;
}

}  // namespace

std::string render_trajectory_svg(const GroundTruthMap& map,
                                  const EpisodeLog& log,
                                  const RenderOptions& options) {
  const double s = options.cell_px / map.resolution;  // meters -> pixels
  const int prec = options.precision;
  const double w_px = map.width * options.cell_px;
  const double h_px = map.height * options.cell_px;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         fmt(w_px, prec) + "\" height=\"" + fmt(h_px, prec) +
         "\" viewBox=\"0 0 " + fmt(w_px, prec) + ' ' + fmt(h_px, prec) +
         "\">\n";
  svg += "<rect width=\"" + fmt(w_px, prec) + "\" height=\"" + fmt(h_px, prec) +
         "\" fill=\"#f4f1e8\"/>\n";

  svg += "<g fill=\"#3a3633\">\n";
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (map.at({x, y}) == Cell::Occupied)
        svg += "<rect x=\"" + fmt(x * options.cell_px, prec) + "\" y=\"" +
               fmt(y * options.cell_px, prec) + "\" width=\"" +
               fmt(options.cell_px, prec) + "\" height=\"" +
               fmt(options.cell_px, prec) + "\"/>\n";
  svg += "</g>\n";

  if (log.poses.size() >= 2) {
    svg += "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" "
           "points=\"";
    for (size_t i = 0; i < log.poses.size(); ++i) {
      if (i) svg += ' ';
      svg += fmt(log.poses[i].x * s, prec) + ',' + fmt(log.poses[i].y * s, prec);
    }
    svg += "\"/>\n";
  }

  // replan locations: cross at the pose the robot held when the path was cut
  for (const IssuedPath& p : log.paths) {
    if (p.step < 0 || static_cast<size_t>(p.step) >= log.poses.size()) continue;
    const Point at = log.poses[static_cast<size_t>(p.step)];
    const double cx = at.x * s, cy = at.y * s, r = options.cell_px * 0.6;
    svg += "<path stroke=\"#7a4f9d\" stroke-width=\"1.2\" d=\"M " +
           fmt(cx - r, prec) + ' ' + fmt(cy - r, prec) + " L " +
           fmt(cx + r, prec) + ' ' + fmt(cy + r, prec) + " M " +
           fmt(cx - r, prec) + ' ' + fmt(cy + r, prec) + " L " +
           fmt(cx + r, prec) + ' ' + fmt(cy - r, prec) + "\"/>\n";
  }

  // one marker per executed step, colored by deviation from guidance
  for (size_t i = 0; i < log.steps.size(); ++i) {
    const Point at = log.steps[i].pose;
    svg += "<circle cx=\"" + fmt(at.x * s, prec) + "\" cy=\"" +
           fmt(at.y * s, prec) + "\" r=\"" + fmt(options.cell_px * 0.3, prec) +
           "\" fill=\"" + deviation_color(log.steps[i].deviation) + "\"/>\n";
  }

  if (!log.poses.empty()) {
    svg += "<circle cx=\"" + fmt(log.poses.front().x * s, prec) + "\" cy=\"" +
           fmt(log.poses.front().y * s, prec) + "\" r=\"" +
           fmt(options.cell_px * 0.5, prec) +
           "\" fill=\"none\" stroke=\"#1d7a33\" stroke-width=\"1.5\"/>\n";
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace gridscout

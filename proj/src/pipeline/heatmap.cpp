#include "geoknit/pipeline/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "geoknit/brep/mesh.hpp"
#include "geoknit/error.hpp"

namespace geoknit {

int OccupancyGrid::max_count() const { return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end()); }

OccupancyGrid top_down_occupancy(std::span<const PartModel> models, int pixels) {
  if (pixels < 1) throw Error("invalid-argument", "pixel count must be positive");
  OccupancyGrid g;
  g.pixels = pixels;
  bool any = false;
  for (const auto& m : models)
    for (const auto& f : m.faces) {
      const BoundingBox b = bounding_box_of(f.grid.points.data(), f.grid.points.size());
      g.bounds = any ? box_union(g.bounds, b) : b;
      any = true;
    }
  if (!any) throw Error("empty-set", "no faces to plot");
  const double w = std::max(g.bounds.dims().x, 1e-9), h = std::max(g.bounds.dims().y, 1e-9);
  const double sx = w / pixels, sy = h / pixels;
  g.counts.assign(static_cast<std::size_t>(pixels) * static_cast<std::size_t>(pixels), 0);
  std::vector<std::uint8_t> covered(g.counts.size());
  for (const auto& m : models) {
    std::fill(covered.begin(), covered.end(), 0);
    for (const Triangle& t : triangulate(m).triangles) {
      const double det = (t.b.x - t.a.x) * (t.c.y - t.a.y) - (t.b.y - t.a.y) * (t.c.x - t.a.x);
      if (std::abs(det) < 1e-18) continue;  // edge-on in the top-down view
      const int c0 = std::max(0, static_cast<int>(std::floor((std::min({t.a.x, t.b.x, t.c.x}) - g.bounds.min_corner.x) / sx)));
      const int c1 = std::min(pixels - 1, static_cast<int>((std::max({t.a.x, t.b.x, t.c.x}) - g.bounds.min_corner.x) / sx));
      const int r0 = std::max(0, static_cast<int>(std::floor((g.bounds.max_corner.y - std::max({t.a.y, t.b.y, t.c.y})) / sy)));
      const int r1 = std::min(pixels - 1, static_cast<int>((g.bounds.max_corner.y - std::min({t.a.y, t.b.y, t.c.y})) / sy));
      for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) {
          const double x = g.bounds.min_corner.x + (c + 0.5) * sx, y = g.bounds.max_corner.y - (r + 0.5) * sy;
          const double u = ((x - t.a.x) * (t.c.y - t.a.y) - (y - t.a.y) * (t.c.x - t.a.x)) / det;
          const double v = ((t.b.x - t.a.x) * (y - t.a.y) - (t.b.y - t.a.y) * (x - t.a.x)) / det;
          if (u >= 0.0 && v >= 0.0 && u + v <= 1.0) covered[static_cast<std::size_t>(r * pixels + c)] = 1;
        }
    }
    for (std::size_t i = 0; i < covered.size(); ++i) g.counts[i] += covered[i];
  }
  return g;
}

void write_heatmap_svg(std::ostream& out, const OccupancyGrid& grid, int pixel_size) {
  const int size = grid.pixels * pixel_size;
  const int peak = std::max(grid.max_count(), 1);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
      << size << ' ' << size << "\" shape-rendering=\"crispEdges\">\n";
  out << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"#ffffff\"/>\n";
  for (int r = 0; r < grid.pixels; ++r)
    for (int c = 0; c < grid.pixels; ++c) {
      const int n = grid.counts[static_cast<std::size_t>(r * grid.pixels + c)];
      if (n == 0) continue;
      const int level = 255 - static_cast<int>(std::lround(255.0 * n / peak));
      char color[8];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", level, level, level);
      out << "<rect x=\"" << c * pixel_size << "\" y=\"" << r * pixel_size << "\" width=\"" << pixel_size
          << "\" height=\"" << pixel_size << "\" fill=\"" << color << "\"/>\n";
    }
  out << "</svg>\n";
}

}  // namespace geoknit

#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "geoknit/brep/face.hpp"

namespace geoknit {

/// Per-pixel count of models whose top-down (xy) projection covers the
/// pixel centre. Pixel (r, c) has row r counted from max y downward.
struct OccupancyGrid {
  int pixels = 64;
  BoundingBox bounds;  // only x and y are used
  std::vector<int> counts;  // pixels * pixels, row-major
  int max_count() const;
};

/// Throws Error "empty-set" when no model has a face.
OccupancyGrid top_down_occupancy(std::span<const PartModel> models, int pixels = 64);
/// Linear grayscale, black = highest count.
void write_heatmap_svg(std::ostream& out, const OccupancyGrid& grid, int pixel_size = 6);

}  // namespace geoknit

#pragma once

#include <span>

#include "geoknit/brep/geometry.hpp"

namespace geoknit {

/// Mean over a of the distance to the nearest point of b.
double mean_nearest_distance(std::span<const Point3> a, std::span<const Point3> b);
/// Symmetric Chamfer distance: half the sum of both directed means.
/// Throws Error "empty-set".
double chamfer_distance(std::span<const Point3> a, std::span<const Point3> b);

}  // namespace geoknit

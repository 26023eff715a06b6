#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "geoknit/brep/geometry.hpp"

namespace geoknit {

/// The diffusion state: `count` rows of `dim` values each (dim = 6 for face
/// boxes, min corner then max corner). Rows of a noisy state need not be
/// ordered boxes.
struct BoxSet {
  std::size_t count = 0;
  std::size_t dim = 6;
  std::vector<double> values;             // count * dim, row-major
  std::vector<std::uint8_t> contact_mask;  // count entries, 1 on contact slots

  BoxSet() = default;
  BoxSet(std::size_t n, std::size_t d = 6) : count(n), dim(d), values(n * d, 0.0), contact_mask(n, 0) {}

  double* row(std::size_t i) { return values.data() + i * dim; }
  const double* row(std::size_t i) const { return values.data() + i * dim; }

  /// Requires dim == 6.
  Point3 center(std::size_t i) const;
  /// max - min, not clamped (negative on disordered rows).
  Point3 dims(std::size_t i) const;
  BoundingBox box(std::size_t i) const;  // from_unordered
  void set_box(std::size_t i, const BoundingBox& b);

  friend bool operator==(const BoxSet&, const BoxSet&) = default;
};

BoxSet box_set_of(const std::vector<BoundingBox>& boxes);
/// Rows whose contact_mask entry is set, in order.
BoxSet contact_rows(const BoxSet& x);

}  // namespace geoknit

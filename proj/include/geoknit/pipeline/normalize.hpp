#pragma once

#include "geoknit/brep/face.hpp"
#include "geoknit/pipeline/synth.hpp"

namespace geoknit {

/// p -> scale * (p + translation)
struct NormalizationTransform {
  Point3 translation;
  double scale = 1.0;

  Point3 apply(Point3 p) const { return scale * (p + translation); }
};

inline constexpr double kNormalizedHalfExtent = 3.0;

/// Centres the condition's grid-point bounds at the origin and scales its
/// largest half-extent to 3. Throws Error "degenerate-model" on zero extent.
NormalizationTransform normalization_for(const PartModel& condition);
/// Transforms every grid point and recomputes face boxes.
PartModel apply_transform(const PartModel& model, const NormalizationTransform& tf);
/// Same transform on both parts; contact pairs are relabelled at the
/// sample's delta.
std::pair<AssemblySample, NormalizationTransform> normalize(const AssemblySample& sample);

}  // namespace geoknit

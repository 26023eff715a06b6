#include "geoknit/pipeline/normalize.hpp"

#include <algorithm>

#include "geoknit/error.hpp"

namespace geoknit {

NormalizationTransform normalization_for(const PartModel& condition) {
  if (condition.faces.empty()) throw Error("degenerate-model", "condition has no faces");
  BoundingBox b = bounding_box_of(condition.faces.front().grid.points.data(), condition.faces.front().grid.points.size());
  for (const auto& f : condition.faces) b = box_union(b, bounding_box_of(f.grid.points.data(), f.grid.points.size()));
  if (!b.valid()) throw Error("degenerate-model", "condition has non-finite points");
  const Point3 d = b.dims();
  const double half = 0.5 * std::max({d.x, d.y, d.z});
  if (!(half > 0.0)) throw Error("degenerate-model", "condition has zero extent");
  return {-b.center(), kNormalizedHalfExtent / half};
}

PartModel apply_transform(const PartModel& model, const NormalizationTransform& tf) {
  PartModel out = model;
  for (auto& f : out.faces) {
    for (auto& p : f.grid.points) p = tf.apply(p);
    f.box = face_box(f.grid);
  }
  return out;
}

std::pair<AssemblySample, NormalizationTransform> normalize(const AssemblySample& sample) {
  const NormalizationTransform tf = normalization_for(sample.condition);
  AssemblySample out = sample;
  out.condition = apply_transform(sample.condition, tf);
  out.target = apply_transform(sample.target, tf);
  out.contact_pairs = label_contacts(out.condition, out.target, sample.contact_pairs.delta);
  return {std::move(out), tf};
}

}  // namespace geoknit

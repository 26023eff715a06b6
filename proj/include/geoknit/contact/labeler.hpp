#pragma once

#include <utility>
#include <vector>

#include "geoknit/brep/mesh.hpp"

namespace geoknit {

inline constexpr double kDefaultDelta = 0.1;
/// Normals count as opposed when n_p . n_q < -kOpposedNormalEps.
inline constexpr double kOpposedNormalEps = 1e-9;

/// True iff the closest point q of `face` lies within delta of p and the face
/// normal at the grid sample nearest q opposes n_p.
bool point_contact(Point3 p, Point3 n_p, const FaceGrid& face, double delta = kDefaultDelta);
bool point_contact(Point3 p, Point3 n_p, const FaceQuery& face, double delta = kDefaultDelta);

struct FaceContact {
  bool in_contact = false;
  bool witnesses_on_a = true;  // false when the witnesses come from face b
  std::vector<int> witnesses;  // flat grid indices, ascending
};

/// Every grid point of a is tested against b; if none fires, every point of b
/// against a.
FaceContact faces_in_contact(const FaceGrid& a, const FaceGrid& b, double delta = kDefaultDelta);
FaceContact faces_in_contact(const FaceQuery& a, const FaceQuery& b, double delta = kDefaultDelta);

struct ContactPair {
  int a = 0;
  int b = 0;
  bool witnesses_on_a = true;
  std::vector<int> witnesses;
  friend bool operator==(const ContactPair&, const ContactPair&) = default;
};

struct ContactReport {
  std::vector<ContactPair> pairs;  // sorted by (a, b)
  double delta = kDefaultDelta;
};

/// All contacting face pairs between two models in a shared frame. Throws
/// Error "empty-model".
ContactReport find_contacts(const PartModel& a, const PartModel& b, double delta = kDefaultDelta);
/// find_contacts, then sets each model's contact_indices to its contacted faces.
ContactReport label_contacts(PartModel& a, PartModel& b, double delta = kDefaultDelta);

/// Face indices of one side that appear in the report.
std::vector<int> contacted_faces(const ContactReport& report, bool side_a);

}  // namespace geoknit

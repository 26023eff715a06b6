#include "geoknit/pipeline/synth.hpp"

#include <algorithm>
#include <array>

#include "geoknit/diffusion/sampler.hpp"
#include "geoknit/error.hpp"
#include "geoknit/pipeline/parallel.hpp"

namespace geoknit {

std::string to_string(Family f) {
  switch (f) {
    case Family::peg_socket: return "peg_socket";
    case Family::flange_ring: return "flange_ring";
    case Family::bracket_plate: return "bracket_plate";
  }
  throw Error("invalid-argument", "unknown family");
}

Family family_from_string(const std::string& s) {
  if (s == "peg_socket") return Family::peg_socket;
  if (s == "flange_ring") return Family::flange_ring;
  if (s == "bracket_plate") return Family::bracket_plate;
  throw Error("invalid-argument", "unknown family '" + s + "'");
}

namespace {

/// Accumulates axis-aligned quads with outward normals.
class SolidBuilder {
 public:
  /// Rectangle on the plane axis = c spanning [lo1, hi1] x [lo2, hi2] over the
  /// two following axes (cyclic); normal along +axis if sign > 0.
  int rect(int axis, double c, double lo1, double hi1, double lo2, double hi2, int sign) {
    const int b = (axis + 1) % 3, d = (axis + 2) % 3;
    auto pt = [&](double s, double t) {
      Point3 p;
      p[axis] = c;
      p[b] = s;
      p[d] = t;
      return p;
    };
    FaceGrid g = sign > 0 ? bilinear_face(pt(lo1, lo2), pt(hi1, lo2), pt(lo1, hi2), pt(hi1, hi2))
                          : bilinear_face(pt(lo1, lo2), pt(lo1, hi2), pt(hi1, lo2), pt(hi1, hi2));
    model_.faces.push_back(make_face_entry(std::move(g)));
    return static_cast<int>(model_.faces.size()) - 1;
  }
  // Convenience wrappers taking bounds in x/y/z order.
  int z_rect(double z, double x0, double x1, double y0, double y1, int sign) { return rect(2, z, x0, x1, y0, y1, sign); }
  int x_rect(double x, double y0, double y1, double z0, double z1, int sign) { return rect(0, x, y0, y1, z0, z1, sign); }
  int y_rect(double y, double x0, double x1, double z0, double z1, int sign) { return rect(1, y, z0, z1, x0, x1, sign); }

  PartModel take() { return std::move(model_); }

 private:
  PartModel model_;
};

struct BlockFaces {
  std::array<int, 4> center_walls{};  // -x, +x, -y, +y
  int center_cap = -1;
};

/// Slab [X0,X3] x [Y0,Y3] x [z0,z1] whose top is split 3x3 at X1,X2 / Y1,Y2.
/// The centre cell is either a blind hole down to `feature_z` (< z1) or a
/// post up to `feature_z` (> z1).
BlockFaces build_block(SolidBuilder& sb, const std::array<double, 4>& X, const std::array<double, 4>& Y, double z0,
                       double z1, double feature_z) {
  const bool hole = feature_z < z1;
  BlockFaces out;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      if (i != 1 || j != 1) sb.z_rect(z1, X[i], X[i + 1], Y[j], Y[j + 1], +1);
  const double lo = hole ? feature_z : z1, hi = hole ? z1 : feature_z;
  const int s = hole ? +1 : -1;  // hole walls face into the opening, post walls out of the post
  out.center_walls[0] = sb.x_rect(X[1], Y[1], Y[2], lo, hi, s);
  out.center_walls[1] = sb.x_rect(X[2], Y[1], Y[2], lo, hi, -s);
  out.center_walls[2] = sb.y_rect(Y[1], X[1], X[2], lo, hi, s);
  out.center_walls[3] = sb.y_rect(Y[2], X[1], X[2], lo, hi, -s);
  out.center_cap = sb.z_rect(feature_z, X[1], X[2], Y[1], Y[2], +1);
  for (int i = 0; i < 3; ++i) {
    sb.y_rect(Y[0], X[i], X[i + 1], z0, z1, -1);
    sb.y_rect(Y[3], X[i], X[i + 1], z0, z1, +1);
    sb.x_rect(X[0], Y[i], Y[i + 1], z0, z1, -1);
    sb.x_rect(X[3], Y[i], Y[i + 1], z0, z1, +1);
  }
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) sb.z_rect(z0, X[i], X[i + 1], Y[j], Y[j + 1], -1);
  return out;
}

struct BoxFaces {
  int nx, px, ny, py, nz, pz;
};

BoxFaces build_box(SolidBuilder& sb, Point3 lo, Point3 hi) {
  BoxFaces f{};
  f.nx = sb.x_rect(lo.x, lo.y, hi.y, lo.z, hi.z, -1);
  f.px = sb.x_rect(hi.x, lo.y, hi.y, lo.z, hi.z, +1);
  f.ny = sb.y_rect(lo.y, lo.x, hi.x, lo.z, hi.z, -1);
  f.py = sb.y_rect(hi.y, lo.x, hi.x, lo.z, hi.z, +1);
  f.nz = sb.z_rect(lo.z, lo.x, hi.x, lo.y, hi.y, -1);
  f.pz = sb.z_rect(hi.z, lo.x, hi.x, lo.y, hi.y, +1);
  return f;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error("infeasible-params", what);
}

AssemblySample finish(PartModel cond, PartModel target, std::string prompt, Family family,
                      std::vector<std::pair<int, int>> intended) {
  AssemblySample s;
  s.condition = std::move(cond);
  s.target = std::move(target);
  s.condition.prompt = prompt;
  s.target.prompt = prompt;
  s.prompt = std::move(prompt);
  s.family = family;
  std::sort(intended.begin(), intended.end());
  s.intended_pairs = std::move(intended);
  s.contact_pairs = label_contacts(s.condition, s.target, kDefaultDelta);
  return s;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

template <std::size_t N>
const char* pick(std::mt19937_64& rng, const std::array<const char*, N>& options) {
  return options[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

}  // namespace

AssemblySample synth_peg_socket(const PegSocketParams& p) {
  const double d = kDefaultDelta;
  require(p.block_half_y > 0 && p.height > 0, "block extents must be positive");
  require(p.hole_half_x > 0 && p.hole_half_x < 3.0 - 0.2, "hole must leave a wall in x");
  require(p.hole_half_y > 0 && p.hole_half_y < p.block_half_y - 0.2, "hole must leave a wall in y");
  require(p.hole_depth > 0 && p.hole_depth < p.height - 0.2, "hole must leave a floor");
  require(p.clearance >= 0 && p.clearance < p.hole_half_x, "peg must fit the hole in x");
  require(p.one_sided_gap >= 0 && p.one_sided_gap < p.hole_half_x, "one-sided gap out of range");
  require(p.one_sided_gap == 0 || p.clearance == 0, "one-sided placement needs zero clearance");
  require(p.y_gap >= 0 && p.y_gap < p.hole_half_y, "peg must fit the hole in y");
  require(p.bottom_gap >= 0 && p.bottom_gap < p.hole_depth - 0.2, "peg must reach into the hole");
  require(p.peg_above > 0, "peg must stick out of the hole");

  SolidBuilder cb;
  const double z0 = -0.5 * p.height, z1 = 0.5 * p.height, zh = z1 - p.hole_depth;
  const BlockFaces block = build_block(cb, {-3.0, -p.hole_half_x, p.hole_half_x, 3.0},
                                       {-p.block_half_y, -p.hole_half_y, p.hole_half_y, p.block_half_y}, z0, z1, zh);

  double px0 = -p.hole_half_x + p.clearance, px1 = p.hole_half_x - p.clearance;
  if (p.one_sided_gap > 0) px1 = p.hole_half_x - p.one_sided_gap;
  SolidBuilder tb;
  const BoxFaces peg = build_box(tb, {px0, -p.hole_half_y + p.y_gap, zh + p.bottom_gap},
                                 {px1, p.hole_half_y - p.y_gap, z1 + p.peg_above});

  std::vector<std::pair<int, int>> intended;
  const double gap_nx = px0 + p.hole_half_x, gap_px = p.hole_half_x - px1;
  if (gap_nx <= d) intended.emplace_back(block.center_walls[0], peg.nx);
  if (gap_px <= d) intended.emplace_back(block.center_walls[1], peg.px);
  if (p.y_gap <= d) {
    intended.emplace_back(block.center_walls[2], peg.ny);
    intended.emplace_back(block.center_walls[3], peg.py);
  }
  if (p.bottom_gap <= d) intended.emplace_back(block.center_cap, peg.nz);
  return finish(cb.take(), tb.take(), "a square peg that fits the hole of the given block", Family::peg_socket,
                std::move(intended));
}

AssemblySample synth_flange_ring(const FlangeRingParams& p) {
  const double d = kDefaultDelta;
  const double* g = p.wall_gaps;
  require(p.block_half_y > 0 && p.height > 0, "block extents must be positive");
  require(p.base_thickness > 0 && p.base_thickness < p.height - 0.5, "post must rise above the base");
  require(p.post_half_x > 0 && p.post_half_y > 0, "post extents must be positive");
  for (int k = 0; k < 4; ++k) require(g[k] >= 0, "wall gaps must be non-negative");
  require(p.post_half_x + std::max(g[0], g[1]) + p.ring_width < 3.0 - 0.2, "ring must stay over the base in x");
  require(p.post_half_y + std::max(g[2], g[3]) + p.ring_width < p.block_half_y - 0.2,
          "ring must stay over the base in y");
  require(p.ring_width > 0 && p.ring_thickness > 0, "ring extents must be positive");
  require(p.lift > d, "ring must float above the base");

  const double z0 = -0.5 * p.height, zb = z0 + p.base_thickness, zt = 0.5 * p.height;
  const double r0 = zb + p.lift, r1 = r0 + p.ring_thickness;
  require(r1 < zt - 0.2, "post must rise above the ring");

  SolidBuilder cb;
  const BlockFaces base = build_block(cb, {-3.0, -p.post_half_x, p.post_half_x, 3.0},
                                      {-p.block_half_y, -p.post_half_y, p.post_half_y, p.block_half_y}, z0, zb, zt);

  const std::array<double, 4> X{-p.post_half_x - g[0] - p.ring_width, -p.post_half_x - g[0], p.post_half_x + g[1],
                                p.post_half_x + g[1] + p.ring_width};
  const std::array<double, 4> Y{-p.post_half_y - g[2] - p.ring_width, -p.post_half_y - g[2], p.post_half_y + g[3],
                                p.post_half_y + g[3] + p.ring_width};
  SolidBuilder tb;
  std::array<int, 4> inner{};
  inner[0] = tb.x_rect(X[1], Y[1], Y[2], r0, r1, +1);
  inner[1] = tb.x_rect(X[2], Y[1], Y[2], r0, r1, -1);
  inner[2] = tb.y_rect(Y[1], X[1], X[2], r0, r1, +1);
  inner[3] = tb.y_rect(Y[2], X[1], X[2], r0, r1, -1);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      if (i != 1 || j != 1) {
        tb.z_rect(r1, X[i], X[i + 1], Y[j], Y[j + 1], +1);
        tb.z_rect(r0, X[i], X[i + 1], Y[j], Y[j + 1], -1);
      }
  for (int i = 0; i < 3; ++i) {
    tb.y_rect(Y[0], X[i], X[i + 1], r0, r1, -1);
    tb.y_rect(Y[3], X[i], X[i + 1], r0, r1, +1);
    tb.x_rect(X[0], Y[i], Y[i + 1], r0, r1, -1);
    tb.x_rect(X[3], Y[i], Y[i + 1], r0, r1, +1);
  }

  std::vector<std::pair<int, int>> intended;
  for (int k = 0; k < 4; ++k)
    if (g[k] <= d) intended.emplace_back(base.center_walls[static_cast<std::size_t>(k)], inner[static_cast<std::size_t>(k)]);
  return finish(cb.take(), tb.take(), "a square ring that slides over the post of the given base", Family::flange_ring,
                std::move(intended));
}

AssemblySample synth_bracket_plate(const BracketPlateParams& p) {
  const double d = kDefaultDelta;
  require(p.block_half_y > 0 && p.plate_thickness > 0, "plate extents must be positive");
  require(p.thickness > 0 && p.foot_length > p.thickness && p.flange_height > p.thickness, "bracket profile is not an L");
  require(p.width > 0 && 0.5 * p.width < p.block_half_y - 0.2, "bracket must fit the plate in y");
  require(p.x_offset > -3.0 + 0.2 && p.x_offset + p.foot_length < 3.0 - 0.2, "bracket must fit the plate in x");
  require(p.gap >= 0, "bracket cannot sink into the plate");

  SolidBuilder cb;
  const double zt = 0.5 * p.plate_thickness;
  const BoxFaces plate = build_box(cb, {-3.0, -p.block_half_y, -zt}, {3.0, p.block_half_y, zt});

  // L profile in (x, z), extruded over y in [y0, y1].
  const double x0 = p.x_offset, xt = x0 + p.thickness, xl = x0 + p.foot_length;
  const double b = zt + p.gap, bt = b + p.thickness, bh = b + p.flange_height;
  const double y0 = -0.5 * p.width, y1 = 0.5 * p.width;
  SolidBuilder tb;
  const int bottom_corner = tb.z_rect(b, x0, xt, y0, y1, -1);
  const int bottom_foot = tb.z_rect(b, xt, xl, y0, y1, -1);
  tb.x_rect(xl, y0, y1, b, bt, +1);
  tb.z_rect(bt, xt, xl, y0, y1, +1);
  tb.x_rect(xt, y0, y1, bt, bh, +1);
  tb.z_rect(bh, x0, xt, y0, y1, +1);
  tb.x_rect(x0, y0, y1, bt, bh, -1);
  tb.x_rect(x0, y0, y1, b, bt, -1);
  for (int side = 0; side < 2; ++side) {
    const double y = side == 0 ? y0 : y1;
    const int s = side == 0 ? -1 : +1;
    tb.y_rect(y, x0, xt, b, bt, s);
    tb.y_rect(y, xt, xl, b, bt, s);
    tb.y_rect(y, x0, xt, bt, bh, s);
  }

  std::vector<std::pair<int, int>> intended;
  if (p.gap <= d) {
    intended.emplace_back(plate.pz, bottom_corner);
    intended.emplace_back(plate.pz, bottom_foot);
  }
  return finish(cb.take(), tb.take(), "an L-shaped bracket that stands on the given plate", Family::bracket_plate,
                std::move(intended));
}

PegSocketParams random_peg_socket(std::mt19937_64& rng) {
  PegSocketParams p;
  p.block_half_y = uniform(rng, 2.2, 3.0);
  p.height = uniform(rng, 3.0, 5.0);
  p.hole_half_x = uniform(rng, 0.7, 1.5);
  p.hole_half_y = uniform(rng, 0.7, std::min(1.5, p.block_half_y - 0.6));
  p.hole_depth = uniform(rng, 0.5, 0.8) * p.height;
  p.y_gap = uniform(rng, 0.2, 0.45) * p.hole_half_y;
  p.bottom_gap = uniform(rng, 0.25, 0.5);
  p.peg_above = uniform(rng, 0.8, 2.0);
  if (std::bernoulli_distribution(0.5)(rng)) p.one_sided_gap = uniform(rng, 0.2, 0.45) * p.hole_half_x;
  return p;
}

FlangeRingParams random_flange_ring(std::mt19937_64& rng) {
  FlangeRingParams p;
  p.height = uniform(rng, 4.0, 5.5);
  p.base_thickness = uniform(rng, 0.8, 1.4);
  p.post_half_x = uniform(rng, 0.6, 1.2);
  p.post_half_y = uniform(rng, 0.6, 1.2);
  // 2, 3 or 4 touching walls; the x pair always touches.
  const int touching = std::uniform_int_distribution<int>(2, 4)(rng);
  for (int k = 0; k < 4; ++k) p.wall_gaps[k] = k < touching ? 0.0 : uniform(rng, 0.25, 0.5);
  p.ring_width = uniform(rng, 0.5, 0.9);
  // The base must reach past the ring in y; at most 1.2 + 0.5 + 0.9 + 0.25.
  const double y_need = p.post_half_y + std::max(p.wall_gaps[2], p.wall_gaps[3]) + p.ring_width + 0.25;
  p.block_half_y = uniform(rng, std::max(2.4, y_need), 3.0);
  p.ring_thickness = uniform(rng, 0.5, 1.0);
  p.lift = uniform(rng, 0.3, 0.7);
  const double room = 0.5 * p.height - 0.3 - (-0.5 * p.height + p.base_thickness + p.lift);
  p.ring_thickness = std::min(p.ring_thickness, room);
  return p;
}

BracketPlateParams random_bracket_plate(std::mt19937_64& rng) {
  BracketPlateParams p;
  p.block_half_y = uniform(rng, 2.0, 3.0);
  p.plate_thickness = uniform(rng, 0.6, 1.2);
  p.thickness = uniform(rng, 0.3, 0.5);
  p.foot_length = uniform(rng, 1.4, 2.6);
  p.flange_height = uniform(rng, 1.4, 2.6);
  p.width = uniform(rng, 1.0, std::min(2.4, 2.0 * (p.block_half_y - 0.4)));
  p.x_offset = uniform(rng, -2.6, 2.6 - p.foot_length);
  return p;
}

AssemblySample synth_assembly(Family family, std::mt19937_64& rng) {
  AssemblySample s;
  switch (family) {
    case Family::peg_socket: {
      s = synth_peg_socket(random_peg_socket(rng));
      s.prompt = pick<3>(rng, {"a square peg that fits the hole of the given block",
                               "a rectangular pin that slots into the socket of the block",
                               "a peg inserted into the blind hole of the given part"});
      break;
    }
    case Family::flange_ring: {
      s = synth_flange_ring(random_flange_ring(rng));
      s.prompt = pick<3>(rng, {"a square ring that slides over the post of the given base",
                               "a flange collar fitted around the post",
                               "a rectangular ring hugging the post of the given part"});
      break;
    }
    case Family::bracket_plate: {
      s = synth_bracket_plate(random_bracket_plate(rng));
      s.prompt = pick<3>(rng, {"an L-shaped bracket that stands on the given plate",
                               "a right-angle bracket mounted on top of the plate",
                               "an angle bracket resting on the given base plate"});
      break;
    }
  }
  s.condition.prompt = s.prompt;
  s.target.prompt = s.prompt;
  return s;
}

std::vector<AssemblySample> synth_dataset(const std::vector<Family>& families, std::size_t count, std::uint64_t seed) {
  if (families.empty()) throw Error("invalid-argument", "no families requested");
  std::vector<AssemblySample> out(count);
  parallel_for(count, [&](std::size_t i) {
    auto rng = rng_stream(seed, {kStreamSynth, i});
    out[i] = synth_assembly(families[i % families.size()], rng);
  });
  return out;
}

}  // namespace geoknit

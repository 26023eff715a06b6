#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "geoknit/brep/face.hpp"
#include "geoknit/contact/labeler.hpp"

namespace geoknit {

enum class Family { peg_socket, flange_ring, bracket_plate };

std::string to_string(Family f);
/// Throws Error "invalid-argument" on an unknown name.
Family family_from_string(const std::string& s);

struct AssemblySample {
  PartModel condition;
  PartModel target;
  std::string prompt;
  ContactReport contact_pairs;  // label_contacts(condition, target) at delta 0.1
  Family family = Family::peg_socket;
  /// (condition face, target face) pairs the generator built to touch, sorted.
  std::vector<std::pair<int, int>> intended_pairs;
};

/// Block with a rectangular blind hole (34 faces) and a box peg (6 faces).
/// The peg spans the hole in x minus `clearance` per side; with
/// `one_sided_gap` > 0 it is instead pushed against the -x wall, leaving that
/// gap on the +x side.
struct PegSocketParams {
  double block_half_y = 3.0;
  double height = 4.0;
  double hole_half_x = 1.0;
  double hole_half_y = 1.0;
  double hole_depth = 3.0;
  double clearance = 0.0;
  double one_sided_gap = 0.0;
  double y_gap = 0.4;
  double bottom_gap = 0.4;
  double peg_above = 1.5;
};

/// Base plate with a box post (34 faces) and a square ring (32 faces) around
/// the post, floating `lift` above the base. wall_gaps: -x, +x, -y, +y.
struct FlangeRingParams {
  double block_half_y = 3.0;
  double height = 5.0;  // base bottom to post top
  double base_thickness = 1.2;
  double post_half_x = 1.0;
  double post_half_y = 1.0;
  double wall_gaps[4] = {0.0, 0.0, 0.4, 0.4};
  double ring_width = 0.8;
  double ring_thickness = 0.8;
  double lift = 0.5;
};

/// Plate (6 faces) with an L-bracket (14 faces) standing on it; the two
/// bottom faces of the bracket's foot share one plate face.
struct BracketPlateParams {
  double block_half_y = 3.0;
  double plate_thickness = 1.0;
  double foot_length = 2.0;
  double thickness = 0.4;
  double flange_height = 2.0;
  double width = 1.5;
  double x_offset = -1.0;  // bracket profile origin
  double gap = 0.0;        // bracket bottom above plate top
};

AssemblySample synth_peg_socket(const PegSocketParams& p);
AssemblySample synth_flange_ring(const FlangeRingParams& p);
AssemblySample synth_bracket_plate(const BracketPlateParams& p);

PegSocketParams random_peg_socket(std::mt19937_64& rng);
FlangeRingParams random_flange_ring(std::mt19937_64& rng);
BracketPlateParams random_bracket_plate(std::mt19937_64& rng);

/// Random family parameters and prompt template drawn from rng. Throws Error
/// "infeasible-params" from the builders.
AssemblySample synth_assembly(Family family, std::mt19937_64& rng);

/// count samples cycling through families; sample i uses
/// rng_stream(seed, {kStreamSynth, i}). Built in parallel, returned in order.
std::vector<AssemblySample> synth_dataset(const std::vector<Family>& families, std::size_t count, std::uint64_t seed);

}  // namespace geoknit

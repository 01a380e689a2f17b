#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "floppy/network.hpp"

namespace floppy {

enum class GeneratorKind { triangular_lattice, bidisperse_packing, robot_arm, molecule_fixture };
enum class Boundary { open, fixed_circle, fixed_rows };

GeneratorKind parse_generator_kind(const std::string& name);
Boundary parse_boundary(const std::string& name);
const char* to_string(GeneratorKind kind);
const char* to_string(Boundary boundary);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::triangular_lattice;
  int nx = 4;
  int ny = 4;
  // Fraction of lattice edges kept.
  double dilution_fraction = 1.0;
  std::uint64_t seed = 0;
  Boundary boundary = Boundary::open;

  // Packing controls.
  int particles = 90;
  double packing_fraction = 0.86;
  int target_dof = 18;
  int max_iterations = 200000;
};

// Lattice spacing is 1, rows are sqrt(3)/2 apart and odd rows are shifted
// by half a spacing. Node id = row * nx + column.
Network generate_triangular(const GeneratorSpec& spec);

// Every nearest-neighbor pair of the full nx x ny triangular lattice.
std::vector<std::pair<int, int>> triangular_lattice_edges(int nx, int ny);
int triangular_lattice_edge_count(int nx, int ny);

// Full lattice, then edges removed in seeded random order until the
// null space reaches `target_dof`. Throws "target-dof-unreachable".
Network generate_triangular_with_dof(int nx, int ny, int target_dof, std::uint64_t seed,
                                     Boundary boundary = Boundary::fixed_rows);

// Jammed bidisperse disk packing in a circle, mapped to a contact network
// with the wall disks fixed, then diluted to spec.target_dof.
Network generate_bidisperse_packing(const GeneratorSpec& spec);

// The undiluted contact network (no edge removal). Radii are stored in
// `radii` when non-null.
Network generate_contact_network(const GeneratorSpec& spec, std::vector<double>* radii = nullptr);

// Removes interior edges in seeded random order until dof == target_dof.
// Returns false when all interior edges are gone first.
bool dilute_to_dof(Network& network, int target_dof, std::uint64_t seed);

Network fixture(GeneratorKind kind);
Network generate(const GeneratorSpec& spec);

// Two diluted lattice patches that share exactly one node, so the right
// patch can rotate about it. The left patch's bottom row is fixed.
Network generate_hinged_patches(std::uint64_t seed);

}  // namespace floppy

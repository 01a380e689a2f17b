#pragma once

#include <vector>

#include "floppy/network.hpp"
#include "floppy/nullspace.hpp"

namespace floppy {

struct BiconnectedComponent {
  std::vector<int> nodes;  // ascending
  std::vector<int> edges;  // indices into Network::edges(), ascending
};

// Biconnected components of the network graph. Every edge belongs to
// exactly one component; articulation nodes are the nodes shared by two or
// more components. Isolated nodes belong to no component.
struct HingeDecomposition {
  std::vector<BiconnectedComponent> components;
  std::vector<int> articulation_nodes;           // ascending
  std::vector<std::vector<int>> component_tree;  // components sharing an articulation node
};

HingeDecomposition find_hinges(const Network& network);

struct MultiscaleOptions {
  SndOptions snd;
  std::uint64_t seed = 0;  // row shuffle seed for the per-component SND runs
  int max_depth = 1;
  double residual_tol = 1e-8;
};

// Hinge rotations first (the section on the far side of each hinge rotating
// rigidly about it), then SND inside every component with articulation and
// fixed nodes held, de-duplicated against the span collected so far. Any
// deficit against dof(R) is filled from plain SND and flags `incomplete`.
ModeBasis multiscale_basis(const Network& network, MultiscaleOptions options = {});

}  // namespace floppy

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "floppy/loadpredict.hpp"
#include "floppy/network.hpp"
#include "floppy/nullspace.hpp"

namespace floppy {

enum class Overlay { none, mode, globality, extensions, prediction };

struct RenderSpec {
  Overlay overlay = Overlay::none;
  int mode = 0;  // for Overlay::mode
  std::optional<double> lo, hi;  // color scale bounds; data range when unset
  double scale = 60.0;           // pixels per length unit
};

// "none", "mode:k", "globality", "extensions", "prediction".
RenderSpec parse_overlay(const std::string& text);

struct RenderData {
  ModeBasis basis;                    // mode overlay
  std::vector<double> node_values;    // globality overlay, one per node
  std::vector<double> edge_values;    // extension overlay, one per edge
  std::vector<EdgeKey> highlighted;   // prediction overlay
};

// Edges as lines, nodes as circles (fixed nodes filled dark). Mode overlays
// add arrows with length proportional to the entry magnitude; value
// overlays color from dark (low) to bright (high).
std::string render_svg(const Network& net, const RenderSpec& spec, const RenderData& data = {});

}  // namespace floppy

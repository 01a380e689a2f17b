#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "floppy/network.hpp"
#include "floppy/springsim.hpp"

namespace floppy {

// Node globality f_i: the ensemble mean of the smallest mode size touching i.
struct GlobalityMap {
  std::vector<double> f;
  std::vector<bool> rigid;  // node lies in no floppy mode (f = 0)
  int m = 0;
  double threshold = 12.0;
};

GlobalityMap globality(const Network& net, std::span<const std::uint64_t> seeds);
GlobalityMap globality(const Network& net, int m, std::uint64_t seed);

using EdgeKey = std::pair<int, int>;  // (min id, max id)

struct Prediction {
  std::vector<int> eligible_nodes;
  std::vector<EdgeKey> predicted_edges;  // ascending
  double threshold = 0.0;
  bool all_ties = false;
  std::string warning;
};

// Boundary = fixed nodes. Eligible nodes are boundary nodes, rigid nodes and
// nodes with f > t. From each unvisited boundary node (ascending id) a BFS
// over eligible-eligible edges runs until another boundary node is reached
// and the edges of that shortest path are marked.
Prediction predict_loaded_edges(const Network& net, const GlobalityMap& g, double t, bool all_ties = false);

struct PredictionReport {
  std::vector<EdgeKey> predicted;
  std::vector<EdgeKey> reference;
  int n_b = 0;  // loaded in both
  int n_o = 0;  // unloaded in both
  int n_t = 0;
  double eta = 0.0;
  double e = 0.0;
};

// Reference set = edges whose |scaled extension| exceeds e.
PredictionReport score(const Network& net, const std::vector<EdgeKey>& predicted,
                       const std::vector<EdgeExtension>& extensions, double e);

struct SweepPoint {
  double e = 0.0;
  double eta = 0.0;
};

struct Sweep {
  std::vector<SweepPoint> points;
  std::size_t best = 0;
};

Sweep threshold_sweep(const Network& net, const std::vector<EdgeKey>& predicted,
                      const std::vector<EdgeExtension>& extensions, const std::vector<double>& e_grid);

// 0 followed by the sorted distinct |scaled extensions|; eta is constant
// between consecutive entries, so sweeping this grid visits every value.
std::vector<double> breakpoint_grid(const std::vector<EdgeExtension>& extensions);

}  // namespace floppy

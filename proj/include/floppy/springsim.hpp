#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "floppy/network.hpp"

namespace floppy {

enum class SimProtocol { none, shear_top_row, radial_stretch };

struct SimConfig {
  double stiffness = 1.0;    // k
  double rest_length = 1.0;  // l_0 in the energy prefactor k / l_0
  double drag = 1.0;         // zeta
  double dt = 0.05;
  int steps = 20000;
  double noise_amplitude = 1e-4;
  std::uint64_t seed = 0;
  SimProtocol protocol = SimProtocol::none;
  double strain = 0.08;   // shear gamma
  double stretch = 0.10;  // radial stretch fraction
  bool record_energy = false;
};

struct EdgeExtension {
  int a = 0;
  int b = 0;
  double extension = 0.0;  // final length - rest length
  double scaled = 0.0;     // extension / network diameter
};

struct SimResult {
  Eigen::VectorXd positions;
  double energy = 0.0;
  std::vector<EdgeExtension> per_edge;
  std::optional<double> shear_modulus;
  bool noise_floor = false;  // energy indistinguishable from injected noise
  std::vector<double> energy_trace;
};

// E = 1/2 (k / l_0) sum_edges (|x_a - x_b| - rest)^2.
double stretching_energy(const Network& net, const Eigen::VectorXd& x, double stiffness, double rest_length);

// F = -dE/dx with cached incidence lists. The parallel kernel gathers per
// node over incident edges; the serial reference scatters per edge.
class SpringForces {
 public:
  SpringForces(const Network& net, double stiffness, double rest_length);
  void parallel(const Eigen::VectorXd& x, Eigen::VectorXd& force) const;
  void serial(const Eigen::VectorXd& x, Eigen::VectorXd& force) const;

 private:
  const Network* net_;
  double scale_;
  std::vector<std::vector<int>> incident_;
};

// F = -dE/dx. The parallel kernel gathers per node over incident edges;
// the serial reference scatters per edge.
void stretching_forces(const Network& net, const Eigen::VectorXd& x, double stiffness, double rest_length,
                       Eigen::VectorXd& force);
void stretching_forces_serial(const Network& net, const Eigen::VectorXd& x, double stiffness, double rest_length,
                              Eigen::VectorXd& force);

// Overdamped relaxation from the network's current positions: each step
// x += (dt / zeta) F + noise on non-fixed coordinates.
SimResult relax(const Network& net, const SimConfig& config);

// Clamps bottom and top rows, shifts the top row by gamma * height and
// relaxes. G = (2 / A) E / gamma^2 with A the undeformed lattice area.
SimResult shear_modulus(const Network& lattice, const SimConfig& config);

// Moves boundary (fixed) nodes radially outward by `stretch` of their
// distance from the boundary centroid and relaxes.
SimResult radial_stretch(const Network& net, const SimConfig& config);

// Twice the mean distance of the fixed nodes from their centroid.
double boundary_diameter(const Network& net);

// Energy below which a result is flagged as noise-dominated.
double noise_floor_energy(const Network& net, const SimConfig& config);

}  // namespace floppy

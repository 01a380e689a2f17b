#include "floppy/springsim.hpp"

#include <cmath>
#include <string>

#include "floppy/error.hpp"
#include "floppy/random.hpp"

namespace floppy {

namespace {

constexpr double kRowHeight = 0.8660254037844386;

// Below this many nodes the OpenMP fork costs more than the loop.
constexpr int kParallelThreshold = 256;

int lattice_dim(const Network& net, const char* key) {
  const auto it = net.metadata().find(key);
  if (it == net.metadata().end()) throw Error("missing-rows", std::string("network has no lattice metadata '") + key + "'");
  return std::stoi(it->second);
}

}  // namespace

double stretching_energy(const Network& net, const Eigen::VectorXd& x, double stiffness, double rest_length) {
  double sum = 0.0;
  for (const auto& e : net.edges()) {
    const double ext = (x.segment<2>(2 * e.a) - x.segment<2>(2 * e.b)).norm() - e.rest_length;
    sum += ext * ext;
  }
  return 0.5 * stiffness / rest_length * sum;
}

void stretching_forces_serial(const Network& net, const Eigen::VectorXd& x, double stiffness, double rest_length,
                              Eigen::VectorXd& force) {
  force.setZero(x.size());
  const double kk = stiffness / rest_length;
  for (const auto& e : net.edges()) {
    const Vec2 d = x.segment<2>(2 * e.a) - x.segment<2>(2 * e.b);
    const double len = d.norm();
    const Vec2 f = -kk * (len - e.rest_length) / len * d;
    force.segment<2>(2 * e.a) += f;
    force.segment<2>(2 * e.b) -= f;
  }
}

SpringForces::SpringForces(const Network& net, double stiffness, double rest_length)
    : net_(&net), scale_(stiffness / rest_length), incident_(static_cast<std::size_t>(net.node_count())) {
  for (int i = 0; i < net.edge_count(); ++i) {
    incident_[net.edge(i).a].push_back(i);
    incident_[net.edge(i).b].push_back(i);
  }
}

void SpringForces::parallel(const Eigen::VectorXd& x, Eigen::VectorXd& force) const {
  force.setZero(x.size());
  const int n = net_->node_count();
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (int v = 0; v < n; ++v) {
    Vec2 f = Vec2::Zero();
    for (int i : incident_[v]) {
      const Edge& e = net_->edge(i);
      const int other = e.a == v ? e.b : e.a;
      const Vec2 d = x.segment<2>(2 * v) - x.segment<2>(2 * other);
      const double len = d.norm();
      f -= scale_ * (len - e.rest_length) / len * d;
    }
    force.segment<2>(2 * v) = f;
  }
}

void SpringForces::serial(const Eigen::VectorXd& x, Eigen::VectorXd& force) const {
  stretching_forces_serial(*net_, x, scale_, 1.0, force);
}

void stretching_forces(const Network& net, const Eigen::VectorXd& x, double stiffness, double rest_length,
                       Eigen::VectorXd& force) {
  SpringForces(net, stiffness, rest_length).parallel(x, force);
}

double noise_floor_energy(const Network& net, const SimConfig& config) {
  return 100.0 * net.edge_count() * config.noise_amplitude * config.noise_amplitude * config.stiffness /
         config.rest_length;
}

SimResult relax(const Network& net, const SimConfig& config) {
  if (!(config.dt > 0.0) || config.steps < 1 || !(config.noise_amplitude >= 0.0) || !(config.drag > 0.0)) {
    throw Error("bad-sim-config", "dt > 0, steps >= 1, noise >= 0 and drag > 0 required");
  }
  const int n = net.node_count();
  std::vector<int> free_nodes;
  for (const auto& node : net.nodes()) {
    if (!node.fixed) free_nodes.push_back(node.id);
  }
  Eigen::VectorXd x = net.coordinates();
  Eigen::VectorXd force(x.size());
  const SpringForces forces(net, config.stiffness, config.rest_length);
  Rng rng(config.seed);
  const double mobility = config.dt / config.drag;

  SimResult result;
  if (config.record_energy) {
    result.energy_trace.reserve(static_cast<std::size_t>(config.steps) + 1);
    result.energy_trace.push_back(stretching_energy(net, x, config.stiffness, config.rest_length));
  }
  for (int step = 0; step < config.steps; ++step) {
    if (n >= kParallelThreshold) {
      forces.parallel(x, force);
    } else {
      forces.serial(x, force);
    }
    for (int v : free_nodes) {
      x.segment<2>(2 * v) += mobility * force.segment<2>(2 * v);
      if (config.noise_amplitude > 0.0) {
        x(2 * v) += rng.uniform(-config.noise_amplitude, config.noise_amplitude);
        x(2 * v + 1) += rng.uniform(-config.noise_amplitude, config.noise_amplitude);
      }
    }
    if ((step & 127) == 0 || step + 1 == config.steps) {
      if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e9) {
        throw Error("integration-diverged", "non-finite positions at step " + std::to_string(step) +
                                                " with dt = " + std::to_string(config.dt));
      }
    }
    if (config.record_energy) {
      result.energy_trace.push_back(stretching_energy(net, x, config.stiffness, config.rest_length));
    }
  }

  result.positions = x;
  result.energy = stretching_energy(net, x, config.stiffness, config.rest_length);
  result.noise_floor = config.noise_amplitude > 0.0 && result.energy < noise_floor_energy(net, config);
  result.per_edge.reserve(net.edges().size());
  for (const auto& e : net.edges()) {
    const double len = (x.segment<2>(2 * e.a) - x.segment<2>(2 * e.b)).norm();
    result.per_edge.push_back({e.a, e.b, len - e.rest_length, 0.0});
  }
  return result;
}

SimResult shear_modulus(const Network& lattice, const SimConfig& config) {
  const int nx = lattice_dim(lattice, "nx");
  const int ny = lattice_dim(lattice, "ny");
  if (nx * ny != lattice.node_count() || ny < 2) throw Error("missing-rows", "lattice metadata does not match nodes");
  const double l0 = config.rest_length;
  const double height = (ny - 1) * l0 * kRowHeight;
  const double shift = config.strain * height;

  Network sheared = lattice;
  for (int i = 0; i < nx; ++i) {
    sheared.set_fixed(i, true);
    const int top = (ny - 1) * nx + i;
    sheared.set_fixed(top, true);
    sheared.set_position(top, lattice.node(top).position + Vec2(shift, 0.0));
  }
  SimResult result = relax(sheared, config);
  const double area = (nx - 1) * l0 * height;
  result.shear_modulus = 2.0 / area * result.energy / (config.strain * config.strain);
  return result;
}

namespace {

Vec2 boundary_centroid(const Network& net) {
  Vec2 centroid = Vec2::Zero();
  int boundary = 0;
  for (const auto& node : net.nodes()) {
    if (!node.fixed) continue;
    centroid += node.position;
    ++boundary;
  }
  if (boundary == 0) throw Error("no-boundary", "radial stretch needs fixed boundary nodes");
  return centroid / boundary;
}

}  // namespace

double boundary_diameter(const Network& net) {
  const Vec2 centroid = boundary_centroid(net);
  double radius = 0.0;
  for (const auto& node : net.nodes()) {
    if (node.fixed) radius += (node.position - centroid).norm();
  }
  return 2.0 * radius / net.fixed_count();
}

SimResult radial_stretch(const Network& net, const SimConfig& config) {
  const Vec2 centroid = boundary_centroid(net);
  const double diameter = boundary_diameter(net);

  Network stretched = net;
  for (const auto& node : net.nodes()) {
    if (node.fixed) stretched.set_position(node.id, centroid + (1.0 + config.stretch) * (node.position - centroid));
  }
  SimResult result = relax(stretched, config);
  for (auto& e : result.per_edge) e.scaled = e.extension / diameter;
  return result;
}

}  // namespace floppy

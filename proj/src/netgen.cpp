#include "floppy/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "floppy/error.hpp"
#include "floppy/random.hpp"
#include "floppy/rigidity.hpp"

namespace floppy {

namespace {

constexpr double kRowHeight = 0.8660254037844386;  // sqrt(3)/2

Vec2 lattice_position(int i, int j) { return {i + 0.5 * (j % 2), j * kRowHeight}; }

}  // namespace

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "triangular_lattice" || name == "triangular") return GeneratorKind::triangular_lattice;
  if (name == "bidisperse_packing" || name == "packing") return GeneratorKind::bidisperse_packing;
  if (name == "robot_arm") return GeneratorKind::robot_arm;
  if (name == "molecule_fixture" || name == "molecule") return GeneratorKind::molecule_fixture;
  throw Error("bad-generator-spec", "unknown generator kind '" + name + "'");
}

Boundary parse_boundary(const std::string& name) {
  if (name == "open") return Boundary::open;
  if (name == "fixed_circle") return Boundary::fixed_circle;
  if (name == "fixed_rows") return Boundary::fixed_rows;
  throw Error("bad-generator-spec", "unknown boundary '" + name + "'");
}

const char* to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::triangular_lattice: return "triangular_lattice";
    case GeneratorKind::bidisperse_packing: return "bidisperse_packing";
    case GeneratorKind::robot_arm: return "robot_arm";
    case GeneratorKind::molecule_fixture: return "molecule_fixture";
  }
  return "?";
}

const char* to_string(Boundary boundary) {
  switch (boundary) {
    case Boundary::open: return "open";
    case Boundary::fixed_circle: return "fixed_circle";
    case Boundary::fixed_rows: return "fixed_rows";
  }
  return "?";
}

std::vector<std::pair<int, int>> triangular_lattice_edges(int nx, int ny) {
  std::vector<std::pair<int, int>> edges;
  auto id = [nx](int i, int j) { return j * nx + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) edges.emplace_back(id(i, j), id(i + 1, j));
    if (j + 1 == ny) continue;
    // Row j+1 is shifted right (j even) or left (j odd) relative to row j.
    for (int i = 0; i < nx; ++i) {
      edges.emplace_back(id(i, j), id(i, j + 1));
      const int other = (j % 2 == 0) ? i - 1 : i + 1;
      if (other >= 0 && other < nx) edges.emplace_back(id(i, j), id(other, j + 1));
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

int triangular_lattice_edge_count(int nx, int ny) { return ny * (nx - 1) + (ny - 1) * (2 * nx - 1); }

namespace {

Network lattice_nodes(int nx, int ny, Boundary boundary) {
  if (nx < 2 || ny < 2) throw Error("bad-generator-spec", "lattice dimensions must be >= 2");
  if (boundary == Boundary::fixed_circle) throw Error("bad-generator-spec", "fixed_circle boundary needs a packing");
  Network net;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const bool fixed = boundary == Boundary::fixed_rows && (j == 0 || j == ny - 1);
      net.add_node(lattice_position(i, j), fixed);
    }
  }
  net.metadata()["generator"] = "triangular_lattice";
  net.metadata()["nx"] = std::to_string(nx);
  net.metadata()["ny"] = std::to_string(ny);
  net.metadata()["boundary"] = to_string(boundary);
  return net;
}

}  // namespace

Network generate_triangular(const GeneratorSpec& spec) {
  if (!(spec.dilution_fraction >= 0.0 && spec.dilution_fraction <= 1.0)) {
    throw Error("bad-generator-spec", "dilution_fraction must lie in [0,1]");
  }
  Network net = lattice_nodes(spec.nx, spec.ny, spec.boundary);
  auto all = triangular_lattice_edges(spec.nx, spec.ny);
  const auto keep = static_cast<std::size_t>(std::llround(spec.dilution_fraction * static_cast<double>(all.size())));
  std::vector<int> order(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(spec.seed);
  rng.shuffle(order);
  order.resize(keep);
  std::sort(order.begin(), order.end());
  for (int k : order) net.add_edge(all[k].first, all[k].second);
  net.metadata()["seed"] = std::to_string(spec.seed);
  return net;
}

bool dilute_to_dof(Network& network, int target_dof, std::uint64_t seed) {
  int current = dof(build_rigidity(network));
  if (current > target_dof) return false;
  std::vector<std::pair<int, int>> interior;
  for (const auto& e : network.edges()) {
    if (!(network.node(e.a).fixed && network.node(e.b).fixed)) interior.emplace_back(e.a, e.b);
  }
  Rng rng(seed);
  rng.shuffle(interior);
  for (const auto& [a, b] : interior) {
    if (current == target_dof) break;
    network.remove_edge(a, b);
    current = dof(build_rigidity(network));
  }
  return current == target_dof;
}

Network generate_triangular_with_dof(int nx, int ny, int target_dof, std::uint64_t seed, Boundary boundary) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Network net = lattice_nodes(nx, ny, boundary);
    for (const auto& [a, b] : triangular_lattice_edges(nx, ny)) net.add_edge(a, b);
    if (dilute_to_dof(net, target_dof, derive_seed(seed, static_cast<std::uint64_t>(attempt)))) {
      net.metadata()["seed"] = std::to_string(seed);
      net.metadata()["target_dof"] = std::to_string(target_dof);
      return net;
    }
  }
  throw Error("target-dof-unreachable", "could not dilute lattice to " + std::to_string(target_dof) + " DoF");
}

namespace {

struct Packing {
  std::vector<Vec2> centers;
  std::vector<double> radii;
  double container = 0.0;
};

// Soft-disk energy 1/2 sum overlap^2 for pairs and for the circular wall.
double packing_forces(const Packing& p, std::vector<Vec2>& force) {
  const std::size_t n = p.centers.size();
  std::fill(force.begin(), force.end(), Vec2::Zero());
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2 d = p.centers[i] - p.centers[j];
      const double sum = p.radii[i] + p.radii[j];
      const double d2 = d.squaredNorm();
      if (d2 >= sum * sum) continue;
      const double dist = std::sqrt(d2);
      const double overlap = sum - dist;
      energy += 0.5 * overlap * overlap;
      const Vec2 f = dist > 0.0 ? Vec2(overlap * d / dist) : Vec2(overlap, 0.0);
      force[i] += f;
      force[j] -= f;
    }
    const double r = p.centers[i].norm();
    const double overlap = r + p.radii[i] - p.container;
    if (overlap > 0.0 && r > 0.0) {
      energy += 0.5 * overlap * overlap;
      force[i] -= overlap * p.centers[i] / r;
    }
  }
  return energy;
}

// FIRE minimization of the soft-disk energy. Returns the final max force.
double relax_packing(Packing& p, int max_iterations) {
  const std::size_t n = p.centers.size();
  std::vector<Vec2> v(n, Vec2::Zero()), f(n);
  double dt = 0.02, alpha = 0.1;
  int since_negative = 0;
  double fmax = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    packing_forces(p, f);
    fmax = 0.0;
    double power = 0.0, vnorm = 0.0, fnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      fmax = std::max(fmax, f[i].norm());
      power += f[i].dot(v[i]);
      vnorm += v[i].squaredNorm();
      fnorm += f[i].squaredNorm();
    }
    if (fmax < 1e-12) break;
    vnorm = std::sqrt(vnorm);
    fnorm = std::sqrt(fnorm);
    if (power > 0.0) {
      for (std::size_t i = 0; i < n; ++i) v[i] = (1.0 - alpha) * v[i] + alpha * vnorm * f[i] / fnorm;
      if (++since_negative > 5) {
        dt = std::min(dt * 1.1, 0.1);
        alpha *= 0.99;
      }
    } else {
      for (auto& vi : v) vi.setZero();
      dt *= 0.5;
      alpha = 0.1;
      since_negative = 0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      v[i] += dt * f[i];
      p.centers[i] += dt * v[i];
    }
  }
  return fmax;
}

}  // namespace

Network generate_contact_network(const GeneratorSpec& spec, std::vector<double>* radii_out) {
  if (spec.particles < 3) throw Error("bad-generator-spec", "packing needs at least 3 particles");
  if (!(spec.packing_fraction > 0.0 && spec.packing_fraction < 1.0)) {
    throw Error("bad-generator-spec", "packing_fraction must lie in (0,1)");
  }
  Rng rng(spec.seed);
  Packing p;
  double area = 0.0;
  for (int i = 0; i < spec.particles; ++i) {
    const double r = (i % 2 == 0) ? 0.5 : 0.7;
    p.radii.push_back(r);
    area += r * r;
  }
  p.container = std::sqrt(area / spec.packing_fraction);

  // Densify slowly: start from shrunken disks and grow them to full size.
  const std::vector<double> target = p.radii;
  for (int i = 0; i < spec.particles; ++i) {
    Vec2 c;
    do {
      c = Vec2(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    } while (c.squaredNorm() > 1.0);
    p.centers.push_back(c * (p.container - target[i]));
  }
  double fmax = 0.0;
  const int stages = 6;
  for (int s = 1; s <= stages; ++s) {
    const double scale = 0.75 + 0.25 * s / stages;
    for (std::size_t i = 0; i < target.size(); ++i) p.radii[i] = scale * target[i];
    fmax = relax_packing(p, spec.max_iterations / stages);
  }
  if (!(fmax < 1e-8)) {
    throw Error("packing-not-converged", "max residual force " + std::to_string(fmax) + " after " +
                                             std::to_string(spec.max_iterations) + " iterations");
  }

  // Contacts, wall disks, then drop rattlers (< 3 contacts, not on the wall).
  const std::size_t n = p.centers.size();
  const double wall_tol = 1e-9;
  std::vector<bool> wall(n), alive(n, true);
  for (std::size_t i = 0; i < n; ++i) wall[i] = p.centers[i].norm() + p.radii[i] >= p.container - wall_tol;
  std::vector<std::vector<int>> contacts(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((p.centers[i] - p.centers[j]).norm() < p.radii[i] + p.radii[j]) {
        contacts[i].push_back(static_cast<int>(j));
        contacts[j].push_back(static_cast<int>(i));
      }
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i] || wall[i]) continue;
      const auto live = std::count_if(contacts[i].begin(), contacts[i].end(), [&](int j) { return alive[j]; });
      if (live < 3) {
        alive[i] = false;
        changed = true;
      }
    }
  }

  Network net;
  std::vector<int> id(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    id[i] = net.add_node(p.centers[i], wall[i]);
    if (radii_out) radii_out->push_back(p.radii[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    for (int j : contacts[i]) {
      if (static_cast<std::size_t>(j) > i && alive[j]) net.add_edge(id[i], id[j]);
    }
  }
  net.metadata()["generator"] = "bidisperse_packing";
  net.metadata()["seed"] = std::to_string(spec.seed);
  net.metadata()["container_radius"] = std::to_string(p.container);
  net.metadata()["boundary"] = "fixed_circle";
  return net;
}

Network generate_bidisperse_packing(const GeneratorSpec& spec) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    GeneratorSpec s = spec;
    s.seed = attempt == 0 ? spec.seed : derive_seed(spec.seed, static_cast<std::uint64_t>(attempt));
    Network net = generate_contact_network(s);
    const int total = net.edge_count();
    if (!dilute_to_dof(net, spec.target_dof, derive_seed(s.seed, 0xD1))) continue;
    net.reset_rest_lengths();
    net.metadata()["seed"] = std::to_string(spec.seed);
    net.metadata()["target_dof"] = std::to_string(spec.target_dof);
    net.metadata()["removed_fraction"] = std::to_string(1.0 - static_cast<double>(net.edge_count()) / total);
    return net;
  }
  throw Error("target-dof-unreachable", "no packing reached " + std::to_string(spec.target_dof) + " DoF");
}

Network fixture(GeneratorKind kind) {
  Network net;
  switch (kind) {
    case GeneratorKind::robot_arm: {
      // shoulder (fixed) -> elbow -> wrist -> two fingers
      const int shoulder = net.add_node({0.0, 0.0}, true);
      const int elbow = net.add_node({1.1, 0.7});
      const int wrist = net.add_node({2.0, 0.3});
      const int finger_a = net.add_node({2.45, 0.62});
      const int finger_b = net.add_node({2.5, 0.05});
      net.add_edge(shoulder, elbow);
      net.add_edge(elbow, wrist);
      net.add_edge(wrist, finger_a);
      net.add_edge(wrist, finger_b);
      net.metadata()["generator"] = "robot_arm";
      return net;
    }
    case GeneratorKind::molecule_fixture: {
      // Backbone atoms are fixed. The left side chain is a mutually bonded
      // triple; the bottom-right side chain is a single unbonded atom.
      const double backbone[][2] = {{0.0, 0.0}, {1.0, 0.3}, {2.0, 0.0}, {3.0, 0.3}, {4.0, 0.0}};
      for (const auto& b : backbone) net.add_node({b[0], b[1]}, true);
      for (int i = 0; i + 1 < 5; ++i) net.add_edge(i, i + 1);
      const int a = net.add_node({-0.6, 0.9});
      const int b = net.add_node({0.35, 1.15});
      const int c = net.add_node({-0.15, 1.8});
      net.add_node({4.7, -0.8});
      net.add_edge(a, b);
      net.add_edge(b, c);
      net.add_edge(a, c);
      net.metadata()["generator"] = "molecule_fixture";
      return net;
    }
    default:
      throw Error("bad-generator-spec", std::string("no fixture named ") + to_string(kind));
  }
}

Network generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::triangular_lattice: return generate_triangular(spec);
    case GeneratorKind::bidisperse_packing: return generate_bidisperse_packing(spec);
    default: return fixture(spec.kind);
  }
}

Network generate_hinged_patches(std::uint64_t seed) {
  constexpr int side = 4;
  Network net;
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) net.add_node(lattice_position(i, j), j == 0);
  }
  const int hinge = (side - 1) * side + (side - 1);
  const Vec2 offset = net.node(hinge).position - lattice_position(0, 0);
  std::vector<int> right(side * side);
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      right[j * side + i] = (i == 0 && j == 0) ? hinge : net.add_node(lattice_position(i, j) + offset);
    }
  }
  for (const auto& [a, b] : triangular_lattice_edges(side, side)) net.add_edge(a, b);
  for (const auto& [a, b] : triangular_lattice_edges(side, side)) net.add_edge(right[a], right[b]);
  net.metadata()["generator"] = "hinged_patches";
  net.metadata()["seed"] = std::to_string(seed);

  // One rotation of the right patch about the shared node plus local floppiness.
  for (int attempt = 0; attempt < 64; ++attempt) {
    Network trial = net;
    if (dilute_to_dof(trial, 6, derive_seed(seed, static_cast<std::uint64_t>(attempt)))) return trial;
  }
  throw Error("target-dof-unreachable", "hinged patches");
}

}  // namespace floppy

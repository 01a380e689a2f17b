#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "floppy/error.hpp"
#include "floppy/netgen.hpp"
#include "floppy/random.hpp"
#include "floppy/springsim.hpp"

using namespace floppy;

namespace {

Network jiggled(int side, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.nx = side;
  spec.ny = side;
  spec.boundary = Boundary::fixed_rows;
  Network net = generate_triangular(spec);
  Rng rng(seed);
  for (const auto& node : net.nodes()) {
    if (!node.fixed) net.set_position(node.id, node.position + Vec2(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)));
  }
  return net;
}

Network square_with_center() {
  Network net;
  net.add_node({-1, -1}, true);
  net.add_node({1, -1}, true);
  net.add_node({1, 1}, true);
  net.add_node({-1, 1}, true);
  net.add_node({0, 0});
  for (int i = 0; i < 4; ++i) {
    net.add_edge(i, (i + 1) % 4);
    net.add_edge(i, 4);
  }
  return net;
}

}  // namespace

TEST_CASE("forces are the negative energy gradient") {
  const Network net = jiggled(4, 1);
  Eigen::VectorXd x = net.coordinates();
  Eigen::VectorXd f;
  stretching_forces(net, x, 1.7, 1.3, f);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    const double grad = (stretching_energy(net, xp, 1.7, 1.3) - stretching_energy(net, xm, 1.7, 1.3)) / (2 * h);
    CHECK(f(i) == doctest::Approx(-grad).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("parallel forces match serial") {
  const Network net = jiggled(9, 2);
  Eigen::VectorXd a, b;
  stretching_forces(net, net.coordinates(), 1.0, 1.0, a);
  stretching_forces_serial(net, net.coordinates(), 1.0, 1.0, b);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("energy prefactor") {
  Network net;
  net.add_node({0, 0});
  net.add_node({1, 0});
  net.add_edge(0, 1, 0.5);
  CHECK(stretching_energy(net, net.coordinates(), 2.0, 0.5) == doctest::Approx(0.5 * 4.0 * 0.25));
}

TEST_CASE("noise-free relaxation only lowers the energy") {
  const Network net = jiggled(5, 3);
  SimConfig cfg;
  cfg.noise_amplitude = 0.0;
  cfg.steps = 2000;
  cfg.record_energy = true;
  const SimResult r = relax(net, cfg);
  REQUIRE(r.energy_trace.size() >= 2);
  for (std::size_t i = 1; i < r.energy_trace.size(); ++i) CHECK(r.energy_trace[i] <= r.energy_trace[i - 1] + 1e-15);
  CHECK(r.energy < stretching_energy(net, net.coordinates(), 1.0, 1.0));
}

TEST_CASE("fixed nodes do not move") {
  const Network net = jiggled(4, 4);
  SimConfig cfg;
  cfg.steps = 200;
  const SimResult r = relax(net, cfg);
  for (const auto& node : net.nodes()) {
    if (node.fixed) CHECK(r.positions.segment<2>(2 * node.id) == node.position);
  }
}

TEST_CASE("shear modulus of a full lattice is positive and linear in k") {
  GeneratorSpec spec;
  spec.nx = 5;
  spec.ny = 5;
  spec.boundary = Boundary::fixed_rows;
  const Network net = generate_triangular(spec);
  SimConfig cfg;
  cfg.protocol = SimProtocol::shear_top_row;
  cfg.steps = 5000;
  const double g1 = *shear_modulus(net, cfg).shear_modulus;
  cfg.stiffness = 2.0;
  const double g2 = *shear_modulus(net, cfg).shear_modulus;
  CHECK(g1 > 0.1);
  CHECK(g2 / g1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("floppy lattice shears for free") {
  GeneratorSpec spec;
  spec.nx = 5;
  spec.ny = 5;
  spec.boundary = Boundary::fixed_rows;
  spec.dilution_fraction = 0.3;
  spec.seed = 1;
  SimConfig cfg;
  cfg.steps = 5000;
  const SimResult r = shear_modulus(generate_triangular(spec), cfg);
  CHECK(*r.shear_modulus < 1e-4);
}

TEST_CASE("radial stretch of a rigid ring") {
  const Network net = square_with_center();
  CHECK(boundary_diameter(net) == doctest::Approx(2.0 * std::sqrt(2.0)));
  SimConfig cfg;
  cfg.steps = 4000;
  const SimResult r = radial_stretch(net, cfg);
  REQUIRE(r.per_edge.size() == 8);
  for (const auto& e : r.per_edge) {
    const double rest = net.edge(net.edge_index(e.a, e.b)).rest_length;
    CHECK(e.extension == doctest::Approx(0.1 * rest).epsilon(1e-3));
    CHECK(e.scaled == doctest::Approx(e.extension / boundary_diameter(net)));
  }
}

TEST_CASE("configuration errors") {
  const Network net = jiggled(4, 5);
  SimConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(relax(net, cfg), Error);
  Network bare;
  bare.add_node({0, 0});
  bare.add_node({1, 0});
  bare.add_edge(0, 1);
  try {
    shear_modulus(bare, SimConfig{});
    FAIL("expected missing-rows");
  } catch (const Error& e) {
    CHECK(std::string(e.code()) == "missing-rows");
  }
  try {
    radial_stretch(bare, SimConfig{});
    FAIL("expected no-boundary");
  } catch (const Error& e) {
    CHECK(std::string(e.code()) == "no-boundary");
  }
}

TEST_CASE("same seed, same result") {
  const Network net = jiggled(4, 6);
  SimConfig cfg;
  cfg.steps = 300;
  cfg.seed = 9;
  CHECK(relax(net, cfg).positions == relax(net, cfg).positions);
}

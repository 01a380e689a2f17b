#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "floppy/error.hpp"
#include "floppy/netgen.hpp"
#include "floppy/rigidity.hpp"

using namespace floppy;

TEST_CASE("full lattice edge count") {
  for (int nx = 2; nx <= 7; ++nx) {
    for (int ny = 2; ny <= 6; ++ny) {
      const int expected = (nx - 1) * ny + (ny - 1) * (2 * nx - 1);
      CHECK(triangular_lattice_edge_count(nx, ny) == expected);
      CHECK(static_cast<int>(triangular_lattice_edges(nx, ny).size()) == expected);
    }
  }
}

TEST_CASE("lattice geometry") {
  GeneratorSpec spec;
  spec.nx = 3;
  spec.ny = 3;
  const Network net = generate_triangular(spec);
  CHECK(net.node_count() == 9);
  CHECK(net.node(4).position.x() == doctest::Approx(1.5));
  CHECK(net.node(4).position.y() == doctest::Approx(std::sqrt(3.0) / 2));
  for (int i = 0; i < net.edge_count(); ++i) CHECK(net.length(i) == doctest::Approx(1.0));
  // Open full lattice: only rigid-body motions remain.
  CHECK(dof(build_rigidity(net)) == 3);
}

TEST_CASE("fixed rows pin top and bottom") {
  GeneratorSpec spec;
  spec.nx = 4;
  spec.ny = 5;
  spec.boundary = Boundary::fixed_rows;
  const Network net = generate_triangular(spec);
  CHECK(net.fixed_count() == 8);
  CHECK(net.node(0).fixed);
  CHECK(net.node(19).fixed);
  CHECK_FALSE(net.node(4).fixed);
}

TEST_CASE("dilution hits the requested dof") {
  for (int target : {2, 5, 9}) {
    const Network net = generate_triangular_with_dof(5, 5, target, 3);
    CHECK(dof(build_rigidity(net)) == target);
  }
  CHECK_THROWS_AS(generate_triangular_with_dof(3, 3, 500, 1), Error);
}

TEST_CASE("dilution is deterministic") {
  GeneratorSpec spec;
  spec.nx = 6;
  spec.ny = 6;
  spec.dilution_fraction = 0.7;
  spec.seed = 11;
  CHECK(generate_triangular(spec) == generate_triangular(spec));
  const int kept = generate_triangular(spec).edge_count();
  CHECK(kept == static_cast<int>(std::lround(0.7 * triangular_lattice_edge_count(6, 6))));
}

TEST_CASE("fixtures") {
  const Network arm = fixture(GeneratorKind::robot_arm);
  CHECK(dof(build_rigidity(arm)) == 4);
  const Network mol = fixture(GeneratorKind::molecule_fixture);
  CHECK(dof(build_rigidity(mol)) == 5);
  CHECK_THROWS_AS(fixture(GeneratorKind::triangular_lattice), Error);
}

TEST_CASE("bad specs") {
  GeneratorSpec spec;
  spec.nx = 1;
  CHECK_THROWS_AS(generate_triangular(spec), Error);
  spec.nx = 4;
  spec.dilution_fraction = 1.5;
  CHECK_THROWS_AS(generate_triangular(spec), Error);
  CHECK_THROWS_AS(parse_generator_kind("hexagon"), Error);
  CHECK(parse_boundary("fixed_rows") == Boundary::fixed_rows);
}

TEST_CASE("packing reaches the target dof with a fixed wall") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::bidisperse_packing;
  spec.seed = 1;
  const Network net = generate(spec);
  CHECK(dof(build_rigidity(net)) == 18);
  CHECK(net.fixed_count() > 0);
  CHECK(net.fixed_count() < net.node_count());
  CHECK(generate(spec) == net);
}

TEST_CASE("hinged patches") {
  const Network net = generate_hinged_patches(2);
  CHECK(dof(build_rigidity(net)) == 6);
}

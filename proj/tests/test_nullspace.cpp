#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "floppy/error.hpp"
#include "floppy/netgen.hpp"
#include "floppy/nullspace.hpp"
#include "floppy/random.hpp"

using namespace floppy;

namespace {

Network lattice() { return generate_triangular_with_dof(5, 5, 6, 291); }

}  // namespace

TEST_CASE("robot arm modes") {
  const RigidityMatrix r = build_rigidity(fixture(GeneratorKind::robot_arm));
  const ModeBasis basis = snd_basis(r);
  REQUIRE(basis.dimension() == 4);
  CHECK(max_residual(r, basis) < 1e-8);
  // Each finger swings alone about the wrist.
  CHECK(basis.modes[0].size() == 2);
  CHECK(basis.modes[1].size() == 2);
  CHECK(basis.modes[0].node_support == std::vector<int>{3});
  CHECK(basis.modes[1].node_support == std::vector<int>{4});
}

TEST_CASE("molecule modes split by side chain") {
  const Network net = fixture(GeneratorKind::molecule_fixture);
  const ModeBasis basis = snd_basis(build_rigidity(net));
  REQUIRE(basis.dimension() == 5);
  int lone = 0, chain = 0;
  for (const Mode& m : basis.modes) {
    if (m.node_support == std::vector<int>{8}) ++lone;
    bool in_chain = true;
    for (int i : m.node_support) in_chain = in_chain && i >= 5 && i <= 7;
    chain += in_chain;
  }
  CHECK(lone == 2);
  CHECK(chain == 3);
}

TEST_CASE("bases span the null space") {
  const RigidityMatrix r = build_rigidity(lattice());
  const ModeBasis snd = snd_basis(r, 5);
  const ModeBasis svd = svd_basis(r);
  CHECK(snd.dimension() == dof(r));
  CHECK(svd.dimension() == dof(r));
  CHECK(max_residual(r, snd) < 1e-8);
  CHECK(max_residual(r, svd) < 1e-8);
  CHECK(projection_residual(snd.modes, svd.modes) < 1e-8);
  CHECK(projection_residual(svd.modes, snd.modes) < 1e-8);
  for (const Mode& m : snd.modes) CHECK(m.vector.norm() == doctest::Approx(1.0));
}

TEST_CASE("modes are sorted by size then first node") {
  const ModeBasis basis = snd_basis(build_rigidity(lattice()), 8);
  for (int i = 1; i < basis.dimension(); ++i) {
    const Mode& a = basis.modes[i - 1];
    const Mode& b = basis.modes[i];
    CHECK((a.size() < b.size() || (a.size() == b.size() && a.node_support.front() <= b.node_support.front())));
  }
}

TEST_CASE("elimination keeps H orthogonal to processed rows") {
  const RigidityMatrix r = shuffle_rows(build_rigidity(lattice()), 3);
  SndEliminator elim(r);
  int redundant = 0;
  while (!elim.done()) {
    redundant += !elim.step();
    const int k = elim.processed();
    CHECK(static_cast<int>(elim.rows().size()) == r.col_count() - (k - redundant));
    double worst = 0.0;
    for (const auto& h : elim.rows()) {
      for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(r.entries.row(i).dot(h)));
    }
    CHECK(worst < 1e-8);
  }
  CHECK(static_cast<int>(elim.rows().size()) == dof(r));
}

TEST_CASE("SND is sparser than SVD on average") {
  const RigidityMatrix r = build_rigidity(generate_triangular_with_dof(4, 4, 4, 9));
  double snd = 0, svd = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const RigidityMatrix sh = shuffle_rows(r, s);
    snd += snd_basis(sh).participation();
    svd += svd_basis(sh).participation();
  }
  CHECK(snd < svd);
}

TEST_CASE("participation and involvement") {
  ModeBasis basis;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(6), b = Eigen::VectorXd::Zero(6);
  a(0) = 1;
  a(1) = 1;
  b(1) = 1;
  b(4) = 2;
  basis.modes = {make_mode(a, 1e-8), make_mode(b, 1e-8)};
  CHECK(basis.participation() == 4);
  CHECK(involvement(basis, 3) == std::vector<int>{2, 0, 1});
  CHECK(basis.modes[1].support == std::vector<int>{1, 4});
}

TEST_CASE("make_mode zeroes tiny entries") {
  Eigen::VectorXd v(3);
  v << 1.0, 1e-12, -1.0;
  const Mode m = make_mode(v, 1e-8);
  CHECK(m.vector(1) == 0.0);
  CHECK(m.support == std::vector<int>{0, 2});
  CHECK(m.node_support == std::vector<int>{0, 1});
  CHECK_THROWS_AS(make_mode(Eigen::VectorXd::Zero(3), 1e-8), Error);
}

TEST_CASE("ensembles are deterministic and thread independent") {
  const RigidityMatrix r = build_rigidity(lattice());
  const auto seeds = ensemble_seeds(7, 12);
  const DecompositionEnsemble par = ensemble(r, seeds);
  const DecompositionEnsemble ser = ensemble_serial(r, seeds);
  REQUIRE(par.size() == 12);
  for (int i = 0; i < 12; ++i) {
    REQUIRE(par.bases[i].dimension() == ser.bases[i].dimension());
    for (int k = 0; k < par.bases[i].dimension(); ++k) {
      CHECK(par.bases[i].modes[k].vector == ser.bases[i].modes[k].vector);
    }
  }
  CHECK(par.mean_participation() == ser.mean_participation());
  CHECK_THROWS_AS(ensemble(r, std::vector<std::uint64_t>{}), Error);
}

TEST_CASE("bad tolerances") {
  SndOptions o;
  o.drop_tol = 0;
  CHECK_THROWS_AS(SndEliminator(build_rigidity(lattice()), o), Error);
}

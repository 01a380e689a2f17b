#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <sstream>

#include "floppy/netgen.hpp"
#include "floppy/nullspace.hpp"
#include "floppy/rigidity.hpp"

using namespace floppy;

namespace {

Network bar() {
  Network net;
  net.add_node({0, 0}, true);
  net.add_node({2, 1});
  net.add_edge(0, 1);
  return net;
}

}  // namespace

TEST_CASE("raw rows") {
  const RigidityMatrix r = build_rigidity(bar(), false);
  REQUIRE(r.row_count() == 3);
  REQUIRE(r.col_count() == 4);
  CHECK(r.rows[0].kind == RowTag::Kind::edge);
  // 2 (x_p - x_q) on p, the negation on q.
  CHECK(r.entries(0, 0) == -4.0);
  CHECK(r.entries(0, 1) == -2.0);
  CHECK(r.entries(0, 2) == 4.0);
  CHECK(r.entries(0, 3) == 2.0);
  CHECK(r.rows[1].kind == RowTag::Kind::anchor);
  CHECK(r.entries(1, 0) == 1.0);
  CHECK(r.entries(2, 1) == 1.0);
  CHECK(r.has_anchors);
}

TEST_CASE("normalized rows have unit norm") {
  const Network net = generate_triangular_with_dof(4, 4, 4, 9);
  const RigidityMatrix r = build_rigidity(net);
  CHECK(r.normalized);
  for (int i = 0; i < r.row_count(); ++i) CHECK(r.entries.row(i).norm() == doctest::Approx(1.0));
  CHECK(r.row_count() == net.edge_count() + 2 * net.fixed_count());
}

TEST_CASE("rank and dof") {
  CHECK(dof(build_rigidity(bar())) == 1);
  Eigen::MatrixXd m(3, 3);
  m << 1, 2, 3, 2, 4, 6, 0, 0, 1;
  CHECK(numeric_rank(m) == 2);
  CHECK(numeric_rank(Eigen::MatrixXd::Zero(2, 2)) == 0);
}

TEST_CASE("shuffling permutes rows and keeps rank") {
  const Network net = generate_triangular_with_dof(5, 5, 6, 291);
  const RigidityMatrix r = build_rigidity(net);
  const RigidityMatrix s = shuffle_rows(r, 42);
  REQUIRE(s.row_count() == r.row_count());
  std::vector<int> order = s.row_order;
  std::sort(order.begin(), order.end());
  for (int i = 0; i < r.row_count(); ++i) {
    CHECK(order[i] == i);
    CHECK(s.rows[i] == r.rows[s.row_order[i]]);
    CHECK(s.entries.row(i) == r.entries.row(s.row_order[i]));
  }
  CHECK(dof(s) == dof(r));
  CHECK(shuffle_rows(r, 42).row_order == s.row_order);
  CHECK(shuffle_rows(r, 43).row_order != s.row_order);
}

TEST_CASE("null vectors keep edge lengths to second order") {
  const Network net = generate_triangular_with_dof(5, 5, 6, 291);
  const RigidityMatrix r = build_rigidity(net);
  const ModeBasis basis = svd_basis(r);
  REQUIRE(basis.dimension() == 6);
  const Eigen::VectorXd x = net.coordinates();
  for (const Mode& m : basis.modes) {
    const double a = constraint_residual(net, x + 1e-3 * m.vector).cwiseAbs().maxCoeff();
    const double b = constraint_residual(net, x + 5e-4 * m.vector).cwiseAbs().maxCoeff();
    CHECK(a < 1e-5);
    CHECK(b / a == doctest::Approx(0.25).epsilon(0.05));
  }
}

TEST_CASE("sparse rows") {
  const RigidityMatrix r = build_rigidity(bar(), false);
  const SparseRow row = r.sparse_row(0);
  CHECK(row.cols == std::vector<int>{0, 1, 2, 3});
  CHECK(r.sparse_row(2).cols == std::vector<int>{1});
}

TEST_CASE("matrix market dump") {
  std::ostringstream out;
  write_matrix_market(out, build_rigidity(bar(), false));
  const std::string text = out.str();
  CHECK(text.rfind("%%MatrixMarket matrix coordinate real general", 0) == 0);
  CHECK(text.find("3 4 6") != std::string::npos);
}

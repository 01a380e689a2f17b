#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "floppy/error.hpp"
#include "floppy/network.hpp"

using namespace floppy;

namespace {

std::string code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("nodes and edges") {
  Network net;
  CHECK(net.add_node({0, 0}, true) == 0);
  CHECK(net.add_node({3, 4}) == 1);
  CHECK(net.add_node({3, 0}) == 2);
  net.add_edge(0, 1);
  net.add_edge(2, 1, 2.5);
  CHECK(net.edge_count() == 2);
  CHECK(net.edge(0).rest_length == doctest::Approx(5.0));
  CHECK(net.edge(1).rest_length == 2.5);
  CHECK(net.has_edge(1, 0));
  CHECK(net.edge_index(1, 2) == 1);
  CHECK(net.edge_index(0, 2) == -1);
  CHECK(net.fixed_count() == 1);
  CHECK(net.coordinate_count() == 6);
  CHECK(net.length(0) == doctest::Approx(5.0));
  CHECK(net.mean_edge_length() == doctest::Approx(4.5));

  const auto adj = net.adjacency();
  CHECK(adj[1] == std::vector<int>{0, 2});

  net.remove_edge(1, 0);
  CHECK(net.edge_count() == 1);
  CHECK_FALSE(net.has_edge(0, 1));
}

TEST_CASE("structural errors") {
  Network net;
  net.add_node({0, 0});
  net.add_node({1, 0});
  net.add_node({1, 0});
  net.add_edge(0, 1);
  CHECK(code_of([&] { net.add_edge(0, 0); }) == "self-loop");
  CHECK(code_of([&] { net.add_edge(1, 0); }) == "duplicate-edge");
  CHECK(code_of([&] { net.add_edge(0, 7); }) == "unknown-node");
  CHECK(code_of([&] { net.add_edge(1, 2); }) == "degenerate-edge");
  CHECK(code_of([&] { net.add_edge(0, 2, -1.0); }) == "bad-rest-length");
  CHECK(code_of([&] { net.remove_edge(0, 2); }) == "unknown-edge");
  CHECK(code_of([&] { net.node(9); }) == "unknown-node");
}

TEST_CASE("coordinates round trip") {
  Network net;
  net.add_node({0.5, -1.0});
  net.add_node({2.0, 3.0});
  Eigen::VectorXd x = net.coordinates();
  CHECK(x.size() == 4);
  CHECK(x(1) == -1.0);
  x(2) = 7.0;
  net.set_coordinates(x);
  CHECK(net.node(1).position.x() == 7.0);
}

TEST_CASE("rest lengths reset to current geometry") {
  Network net;
  net.add_node({0, 0});
  net.add_node({1, 0});
  net.add_edge(0, 1, 3.0);
  net.reset_rest_lengths();
  CHECK(net.edge(0).rest_length == doctest::Approx(1.0));
}

TEST_CASE("equality covers metadata") {
  Network a;
  a.add_node({0, 0});
  Network b = a;
  CHECK(a == b);
  b.metadata()["k"] = "v";
  CHECK_FALSE(a == b);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "floppy/error.hpp"
#include "floppy/loadpredict.hpp"
#include "floppy/netgen.hpp"
#include "floppy/nullspace.hpp"

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

// Three fixed nodes in a row plus a dangling floppy node.
Network comb() {
  Network net;
  net.add_node({0, 0}, true);
  net.add_node({2, 0}, true);
  net.add_node({4, 0}, true);
  net.add_node({1, 1});
  net.add_edge(0, 1);
  net.add_edge(1, 2);
  net.add_edge(0, 3);
  return net;
}

Network chain(int edges) {
  Network net;
  for (int i = 0; i <= edges; ++i) net.add_node({double(i), 0.0}, i == 0);
  for (int i = 0; i < edges; ++i) net.add_edge(i, i + 1);
  return net;
}

std::vector<EdgeExtension> measured(const Network& net, const std::vector<double>& scaled) {
  std::vector<EdgeExtension> out;
  for (int i = 0; i < net.edge_count(); ++i) out.push_back({net.edge(i).a, net.edge(i).b, scaled[i], scaled[i]});
  return out;
}

}  // namespace

TEST_CASE("pendulum globality") {
  Network net;
  net.add_node({0, 0}, true);
  net.add_node({0.6, 0.8});
  net.add_edge(0, 1);
  const GlobalityMap g = globality(net, 5, 1);
  CHECK(g.m == 5);
  CHECK(g.f[0] == 0.0);
  CHECK(g.rigid[0]);
  CHECK(g.f[1] == 2.0);
  CHECK_FALSE(g.rigid[1]);
}

TEST_CASE("braced node is rigid") {
  Network net;
  net.add_node({0, 0}, true);
  net.add_node({2, 0}, true);
  net.add_node({1, 1});
  net.add_node({2, 2});
  net.add_edge(0, 2);
  net.add_edge(1, 2);
  net.add_edge(2, 3);
  const GlobalityMap g = globality(net, 4, 0);
  CHECK(g.rigid[2]);
  CHECK(g.f[2] == 0.0);
  CHECK_FALSE(g.rigid[3]);
  CHECK(g.f[3] == 2.0);
  CHECK_THROWS_AS(globality(net, 0, 0), Error);
}

TEST_CASE("globality is the mean smallest mode size") {
  const Network net = generate_triangular_with_dof(5, 5, 6, 291);
  const auto seeds = ensemble_seeds(3, 6);
  const GlobalityMap g = globality(net, seeds);
  const DecompositionEnsemble runs = ensemble_serial(build_rigidity(net), seeds);
  for (int i = 0; i < net.node_count(); ++i) {
    double sum = 0.0;
    for (const auto& b : runs.bases) {
      int s = 0;
      for (const auto& m : b.modes) {
        if (std::binary_search(m.node_support.begin(), m.node_support.end(), i) && (s == 0 || m.size() < s)) s = m.size();
      }
      sum += s;
    }
    CHECK(g.f[i] == doctest::Approx(sum / 6));
  }
}

TEST_CASE("high threshold leaves boundary paths only") {
  const Network net = comb();
  const GlobalityMap g = globality(net, 3, 0);
  const Prediction p = predict_loaded_edges(net, g, 1e9);
  CHECK(p.eligible_nodes == std::vector<int>{0, 1, 2});
  CHECK(p.predicted_edges == std::vector<EdgeKey>{{0, 1}, {1, 2}});
  CHECK(p.warning.empty());
  // The floppy node is a dead end either way.
  CHECK(predict_loaded_edges(net, g, 0.0).predicted_edges == p.predicted_edges);
}

TEST_CASE("no path gives a warning") {
  Network net;
  net.add_node({0, 0}, true);
  net.add_node({1, 0});
  net.add_node({2, 0.5}, true);
  net.add_edge(0, 1);
  const Prediction p = predict_loaded_edges(net, globality(net, 2, 0), 12);
  CHECK(p.predicted_edges.empty());
  CHECK_FALSE(p.warning.empty());
}

TEST_CASE("prediction errors") {
  const Network net = comb();
  GlobalityMap g = globality(net, 2, 0);
  g.f.pop_back();
  CHECK(code_of([&] { predict_loaded_edges(net, g, 12); }) == "globality-mismatch");
  Network loose;
  loose.add_node({0, 0});
  loose.add_node({1, 0});
  loose.add_edge(0, 1);
  CHECK(code_of([&] { predict_loaded_edges(loose, globality(loose, 1, 0), 12); }) == "no-boundary");
}

TEST_CASE("eligibility shrinks as the threshold rises") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::bidisperse_packing;
  spec.particles = 40;
  spec.target_dof = 8;
  spec.seed = 2;
  const Network net = generate(spec);
  const GlobalityMap g = globality(net, 10, 0);
  std::set<int> prev;
  for (double t : {0.0, 4.0, 8.0, 12.0, 20.0, 1e9}) {
    const Prediction p = predict_loaded_edges(net, g, t);
    const std::set<int> now(p.eligible_nodes.begin(), p.eligible_nodes.end());
    if (t > 0) CHECK(std::includes(prev.begin(), prev.end(), now.begin(), now.end()));
    for (const auto& [a, b] : p.predicted_edges) {
      CHECK(now.count(a));
      CHECK(now.count(b));
      CHECK(net.has_edge(a, b));
    }
    for (const auto& [a, b] : predict_loaded_edges(net, g, t, true).predicted_edges) {
      CHECK(now.count(a));
      CHECK(now.count(b));
    }
    prev = now;
  }
}

TEST_CASE("score arithmetic") {
  const Network net = chain(20);
  std::vector<double> x(20, 0.0);
  std::vector<EdgeKey> predicted;
  for (int i = 0; i < 5; ++i) {
    x[i] = 1.0;  // loaded and predicted
    predicted.push_back({i, i + 1});
  }
  for (int i = 15; i < 20; ++i) predicted.push_back({i, i + 1});  // predicted, unloaded
  const PredictionReport r = score(net, predicted, measured(net, x), 0.5);
  CHECK(r.n_b == 5);
  CHECK(r.n_o == 10);
  CHECK(r.n_t == 20);
  CHECK(r.eta == doctest::Approx(0.75));
  CHECK(r.reference.size() == 5);
}

TEST_CASE("a prediction equal to the reference scores 1") {
  const Network net = chain(6);
  const std::vector<double> x{0.3, -0.2, 0.0, 0.01, -0.5, 0.0};
  std::vector<EdgeKey> predicted{{0, 1}, {1, 2}, {4, 5}};
  CHECK(score(net, predicted, measured(net, x), 0.1).eta == 1.0);
}

TEST_CASE("measurement mismatches") {
  const Network net = chain(3);
  auto ext = measured(net, {0.1, 0.2, 0.3});
  CHECK(code_of([&] { score(net, {{0, 3}}, ext, 0.0); }) == "edge-mismatch");
  auto dup = ext;
  dup[2] = dup[1];
  CHECK(code_of([&] { score(net, {}, dup, 0.0); }) == "edge-mismatch");
  ext.pop_back();
  CHECK(code_of([&] { score(net, {}, ext, 0.0); }) == "edge-mismatch");
}

TEST_CASE("sweep is constant between breakpoints") {
  const Network net = chain(8);
  const std::vector<double> x{0.4, -0.1, 0.25, 0.0, 0.4, -0.7, 0.05, 0.3};
  const auto ext = measured(net, x);
  const std::vector<EdgeKey> predicted{{0, 1}, {4, 5}, {5, 6}};
  const auto grid = breakpoint_grid(ext);
  CHECK(grid == std::vector<double>{0.0, 0.05, 0.1, 0.25, 0.3, 0.4, 0.7});
  const Sweep s = threshold_sweep(net, predicted, ext, grid);
  REQUIRE(s.points.size() == grid.size());
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double mid = 0.5 * (grid[i] + grid[i + 1]);
    CHECK(score(net, predicted, ext, mid).eta == s.points[i].eta);
  }
  // Only the three predicted edges exceed 0.3.
  CHECK(s.points[s.best].eta == 1.0);
  CHECK(s.points[s.best].e == 0.3);
  CHECK_THROWS_AS(threshold_sweep(net, predicted, ext, {0.2, 0.1}), Error);
}

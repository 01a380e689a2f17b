#include "floppy/loadpredict.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include "floppy/error.hpp"
#include "floppy/nullspace.hpp"
#include "floppy/random.hpp"
#include "floppy/rigidity.hpp"

namespace floppy {

GlobalityMap globality(const Network& net, std::span<const std::uint64_t> seeds) {
  const RigidityMatrix r = build_rigidity(net);
  const DecompositionEnsemble runs = ensemble(r, seeds);
  const int n = net.node_count();

  GlobalityMap g;
  g.m = runs.size();
  g.f.assign(static_cast<std::size_t>(n), 0.0);
  g.rigid.assign(static_cast<std::size_t>(n), true);
  std::vector<int> smallest(static_cast<std::size_t>(n));
  for (const auto& basis : runs.bases) {
    std::fill(smallest.begin(), smallest.end(), 0);
    for (const auto& mode : basis.modes) {
      for (int i : mode.node_support) {
        int& s = smallest[static_cast<std::size_t>(i)];
        if (s == 0 || mode.size() < s) s = mode.size();
      }
    }
    for (int i = 0; i < n; ++i) {
      if (smallest[i] == 0) continue;
      g.f[i] += smallest[i];
      g.rigid[i] = false;
    }
  }
  for (double& f : g.f) f /= g.m;
  return g;
}

GlobalityMap globality(const Network& net, int m, std::uint64_t seed) {
  if (m < 1) throw Error("bad-ensemble", "ensemble size must be >= 1");
  const auto seeds = ensemble_seeds(seed, m);
  return globality(net, std::span<const std::uint64_t>(seeds));
}

namespace {

EdgeKey make_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

}  // namespace

Prediction predict_loaded_edges(const Network& net, const GlobalityMap& g, double t, bool all_ties) {
  const int n = net.node_count();
  if (static_cast<int>(g.f.size()) != n || static_cast<int>(g.rigid.size()) != n) {
    throw Error("globality-mismatch", "globality map does not match the network");
  }
  Prediction out;
  out.threshold = t;
  out.all_ties = all_ties;

  std::vector<bool> boundary(n, false), eligible(n, false);
  for (const auto& node : net.nodes()) {
    boundary[node.id] = node.fixed;
    eligible[node.id] = node.fixed || g.rigid[node.id] || g.f[node.id] > t;
    if (eligible[node.id]) out.eligible_nodes.push_back(node.id);
  }
  if (std::count(boundary.begin(), boundary.end(), true) == 0) {
    throw Error("no-boundary", "load prediction needs fixed boundary nodes");
  }

  std::vector<std::vector<int>> adj = net.adjacency();
  for (int i = 0; i < n; ++i) {
    if (!eligible[i]) {
      adj[i].clear();
      continue;
    }
    std::erase_if(adj[i], [&](int j) { return !eligible[j]; });
  }

  std::set<EdgeKey> marked;
  std::vector<bool> visited(n, false);
  std::vector<int> dist(n);
  std::vector<int> parent(n);
  for (int source = 0; source < n; ++source) {
    if (!boundary[source] || visited[source]) continue;
    visited[source] = true;

    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent.begin(), parent.end(), -1);
    std::deque<int> queue{source};
    dist[source] = 0;
    int reach = -1;  // distance of the nearest other boundary node
    std::vector<int> terminals;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      if (reach >= 0 && dist[u] >= reach) break;
      if (u != source && boundary[u]) continue;  // paths end at boundary nodes
      for (int v : adj[u]) {
        if (dist[v] >= 0) continue;
        dist[v] = dist[u] + 1;
        parent[v] = u;
        if (boundary[v]) {
          if (reach < 0) reach = dist[v];
          terminals.push_back(v);
        }
        queue.push_back(v);
      }
    }
    if (terminals.empty()) continue;

    if (!all_ties) {
      const int target = terminals.front();
      visited[target] = true;
      for (int v = target; v != source; v = parent[v]) marked.insert(make_key(v, parent[v]));
      continue;
    }
    // Every edge on some shortest path to any nearest terminal.
    std::vector<bool> on_path(n, false);
    std::vector<int> layer;
    for (int v : terminals) {
      visited[v] = true;
      on_path[v] = true;
      layer.push_back(v);
    }
    while (!layer.empty()) {
      std::vector<int> next;
      for (int v : layer) {
        for (int u : adj[v]) {
          if (dist[u] != dist[v] - 1 || (u != source && boundary[u])) continue;
          marked.insert(make_key(u, v));
          if (!on_path[u]) {
            on_path[u] = true;
            next.push_back(u);
          }
        }
      }
      layer = std::move(next);
    }
  }
  out.predicted_edges.assign(marked.begin(), marked.end());
  if (out.predicted_edges.empty()) out.warning = "no eligible path between boundary nodes";
  return out;
}

PredictionReport score(const Network& net, const std::vector<EdgeKey>& predicted,
                       const std::vector<EdgeExtension>& extensions, double e) {
  std::map<EdgeKey, double> ext;
  for (const auto& x : extensions) {
    if (!ext.emplace(make_key(x.a, x.b), x.scaled).second) {
      throw Error("edge-mismatch", "duplicate measurement for edge " + std::to_string(x.a) + "-" + std::to_string(x.b));
    }
  }
  if (static_cast<int>(ext.size()) != net.edge_count()) {
    throw Error("edge-mismatch", "measurements cover " + std::to_string(ext.size()) + " edges, network has " +
                                     std::to_string(net.edge_count()));
  }
  for (const auto& edge : net.edges()) {
    if (!ext.count(make_key(edge.a, edge.b))) {
      throw Error("edge-mismatch", "no measurement for edge " + std::to_string(edge.a) + "-" + std::to_string(edge.b));
    }
  }
  std::set<EdgeKey> pred;
  for (const auto& [a, b] : predicted) {
    const EdgeKey k = make_key(a, b);
    if (!ext.count(k)) {
      throw Error("edge-mismatch", "predicted edge " + std::to_string(a) + "-" + std::to_string(b) + " not in network");
    }
    pred.insert(k);
  }

  PredictionReport rep;
  rep.e = e;
  rep.predicted.assign(pred.begin(), pred.end());
  for (const auto& [k, x] : ext) {
    const bool loaded = std::abs(x) > e;
    const bool p = pred.count(k) != 0;
    if (loaded) rep.reference.push_back(k);
    if (loaded && p) ++rep.n_b;
    if (!loaded && !p) ++rep.n_o;
  }
  rep.n_t = static_cast<int>(ext.size());
  rep.eta = rep.n_t == 0 ? 0.0 : static_cast<double>(rep.n_b + rep.n_o) / rep.n_t;
  return rep;
}

Sweep threshold_sweep(const Network& net, const std::vector<EdgeKey>& predicted,
                      const std::vector<EdgeExtension>& extensions, const std::vector<double>& e_grid) {
  if (!std::is_sorted(e_grid.begin(), e_grid.end())) throw Error("bad-grid", "threshold grid must be ascending");
  Sweep s;
  for (double e : e_grid) {
    const PredictionReport rep = score(net, predicted, extensions, e);
    s.points.push_back({e, rep.eta});
    if (rep.eta > s.points[s.best].eta) s.best = s.points.size() - 1;
  }
  return s;
}

std::vector<double> breakpoint_grid(const std::vector<EdgeExtension>& extensions) {
  std::vector<double> grid{0.0};
  for (const auto& x : extensions) grid.push_back(std::abs(x.scaled));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace floppy

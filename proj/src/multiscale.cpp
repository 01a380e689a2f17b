#include "floppy/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "floppy/error.hpp"
#include "floppy/rigidity.hpp"

namespace floppy {

HingeDecomposition find_hinges(const Network& network) {
  const int n = network.node_count();
  // incident[v] = (neighbor, edge index), ascending by neighbor.
  std::vector<std::vector<std::pair<int, int>>> incident(static_cast<std::size_t>(n));
  for (int e = 0; e < network.edge_count(); ++e) {
    incident[network.edge(e).a].emplace_back(network.edge(e).b, e);
    incident[network.edge(e).b].emplace_back(network.edge(e).a, e);
  }
  for (auto& list : incident) std::sort(list.begin(), list.end());

  HingeDecomposition out;
  std::vector<int> disc(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<int> edge_stack;
  std::vector<bool> is_articulation(static_cast<std::size_t>(n), false);
  int timer = 0;

  struct Frame {
    int node;
    int parent_edge;
    std::size_t next;
  };

  auto pop_component = [&](int until_edge) {
    BiconnectedComponent comp;
    std::set<int> nodes;
    while (!edge_stack.empty()) {
      const int e = edge_stack.back();
      edge_stack.pop_back();
      comp.edges.push_back(e);
      nodes.insert(network.edge(e).a);
      nodes.insert(network.edge(e).b);
      if (e == until_edge) break;
    }
    std::sort(comp.edges.begin(), comp.edges.end());
    comp.nodes.assign(nodes.begin(), nodes.end());
    out.components.push_back(std::move(comp));
  };

  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    std::vector<Frame> stack{{root, -1, 0}};
    disc[root] = low[root] = timer++;
    int root_children = 0;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const int v = f.node;
      if (f.next < incident[v].size()) {
        const auto [w, e] = incident[v][f.next++];
        if (e == f.parent_edge) continue;
        if (disc[w] < 0) {
          edge_stack.push_back(e);
          disc[w] = low[w] = timer++;
          if (v == root) ++root_children;
          stack.push_back({w, e, 0});
        } else if (disc[w] < disc[v]) {
          edge_stack.push_back(e);
          low[v] = std::min(low[v], disc[w]);
        }
      } else {
        const int parent_edge = f.parent_edge;
        stack.pop_back();
        if (stack.empty()) break;
        const int u = stack.back().node;
        low[u] = std::min(low[u], low[v]);
        if (low[v] >= disc[u]) {
          if (u != root) is_articulation[u] = true;
          pop_component(parent_edge);
        }
      }
    }
    if (root_children > 1) is_articulation[root] = true;
  }

  for (int v = 0; v < n; ++v) {
    if (is_articulation[v]) out.articulation_nodes.push_back(v);
  }
  std::sort(out.components.begin(), out.components.end(),
            [](const BiconnectedComponent& a, const BiconnectedComponent& b) { return a.edges < b.edges; });

  const std::size_t k = out.components.size();
  out.component_tree.assign(k, {});
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto& a = out.components[i].nodes;
      const auto& b = out.components[j].nodes;
      std::vector<int> shared;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
      if (!shared.empty()) {
        out.component_tree[i].push_back(static_cast<int>(j));
        out.component_tree[j].push_back(static_cast<int>(i));
      }
    }
  }
  return out;
}

namespace {

// Incremental orthonormal span used to drop candidates that add nothing.
class SpanCollector {
 public:
  explicit SpanCollector(int n) : n_(n) {}

  bool try_add(const Eigen::VectorXd& v) {
    Eigen::VectorXd r = v.normalized();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis_) r -= q.dot(r) * q;
    }
    if (r.norm() < 1e-6) return false;
    basis_.push_back(r.normalized());
    return true;
  }

  int size() const { return static_cast<int>(basis_.size()); }
  int dimension() const { return n_; }

 private:
  int n_;
  std::vector<Eigen::VectorXd> basis_;
};

std::vector<int> branch_from(const std::vector<std::vector<int>>& adj, int pivot, int start, std::vector<int>& seen,
                             int stamp) {
  std::vector<int> nodes{start};
  seen[start] = stamp;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (int w : adj[nodes[i]]) {
      if (w == pivot || seen[w] == stamp) continue;
      seen[w] = stamp;
      nodes.push_back(w);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

// Rigid rotation of `branch` about `pivot`, in full coordinates.
Eigen::VectorXd rotation_about(const Network& net, int pivot, const std::vector<int>& branch) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(net.coordinate_count());
  const Vec2 c = net.node(pivot).position;
  for (int i : branch) {
    const Vec2 r = net.node(i).position - c;
    v(2 * i) = -r.y();
    v(2 * i + 1) = r.x();
  }
  return v;
}

struct Candidate {
  Eigen::VectorXd vector;
  ModeTag tag;
};

void collect_candidates(const Network& net, const MultiscaleOptions& options, int depth,
                        std::vector<Candidate>& out);

void rotational_candidates(const Network& net, const HingeDecomposition& hinges, const RigidityMatrix& r,
                           const MultiscaleOptions& options, std::vector<Candidate>& out) {
  const auto adj = net.adjacency();
  std::set<int> pivots(hinges.articulation_nodes.begin(), hinges.articulation_nodes.end());
  for (const auto& node : net.nodes()) {
    if (node.fixed && !adj[node.id].empty()) pivots.insert(node.id);
  }
  std::vector<int> seen(static_cast<std::size_t>(net.node_count()), -1);
  for (int h : pivots) {
    std::vector<std::vector<int>> branches;
    for (int w : adj[h]) {
      if (seen[w] == h) continue;
      branches.push_back(branch_from(adj, h, w, seen, h));
    }
    auto has_fixed = [&](const std::vector<int>& b) {
      return std::any_of(b.begin(), b.end(), [&](int i) { return net.node(i).fixed; });
    };
    const bool any_fixed = net.node(h).fixed ||
                           std::any_of(branches.begin(), branches.end(), [&](const auto& b) { return has_fixed(b); });
    // Without any anchored side the largest branch (lowest id on ties) stays put.
    int proximal = -1;
    if (!any_fixed) {
      for (int i = 0; i < static_cast<int>(branches.size()); ++i) {
        if (proximal < 0 || branches[i].size() > branches[proximal].size() ||
            (branches[i].size() == branches[proximal].size() && branches[i].front() < branches[proximal].front())) {
          proximal = i;
        }
      }
    }
    for (int i = 0; i < static_cast<int>(branches.size()); ++i) {
      if (i == proximal || has_fixed(branches[i])) continue;
      Eigen::VectorXd v = rotation_about(net, h, branches[i]);
      if (!(v.norm() > 0.0)) continue;
      v.normalize();
      if (r.row_count() > 0 && (r.entries * v).cwiseAbs().maxCoeff() > options.residual_tol) continue;
      out.push_back({v, ModeTag::rotational});
    }
  }
}

// Sub-network of one component, articulation nodes held fixed. Fills
// `global` with the original id of every local node.
Network component_network(const Network& net, const BiconnectedComponent& comp, const std::set<int>& held,
                          std::vector<int>& global) {
  Network sub;
  std::vector<int> local(static_cast<std::size_t>(net.node_count()), -1);
  global.clear();
  for (int i : comp.nodes) {
    local[i] = sub.add_node(net.node(i).position, net.node(i).fixed || held.count(i) != 0);
    global.push_back(i);
  }
  for (int e : comp.edges) {
    const Edge& edge = net.edge(e);
    sub.add_edge(local[edge.a], local[edge.b], edge.rest_length);
  }
  return sub;
}

void collect_candidates(const Network& net, const MultiscaleOptions& options, int depth,
                        std::vector<Candidate>& out) {
  const HingeDecomposition hinges = find_hinges(net);
  const RigidityMatrix r = build_rigidity(net);
  rotational_candidates(net, hinges, r, options, out);

  const std::set<int> held(hinges.articulation_nodes.begin(), hinges.articulation_nodes.end());
  for (const auto& comp : hinges.components) {
    std::vector<int> global;
    const Network sub = component_network(net, comp, held, global);
    std::vector<Candidate> local;
    if (depth < options.max_depth) {
      collect_candidates(sub, options, depth + 1, local);
    } else {
      for (const auto& m : snd_basis(build_rigidity(sub), options.seed, options.snd).modes) {
        local.push_back({m.vector, ModeTag::component_local});
      }
    }
    for (const auto& c : local) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(net.coordinate_count());
      for (std::size_t k = 0; k < global.size(); ++k) {
        v.segment<2>(2 * global[k]) = c.vector.segment<2>(2 * static_cast<Eigen::Index>(k));
      }
      out.push_back({v, c.tag});
    }
  }
  // Nodes without edges translate freely.
  const auto adj = net.adjacency();
  for (const auto& node : net.nodes()) {
    if (node.fixed || !adj[node.id].empty()) continue;
    for (int axis = 0; axis < 2; ++axis) {
      out.push_back({Eigen::VectorXd::Unit(net.coordinate_count(), 2 * node.id + axis), ModeTag::component_local});
    }
  }
}

}  // namespace

ModeBasis multiscale_basis(const Network& network, MultiscaleOptions options) {
  if (options.max_depth < 1 || options.max_depth > 3) throw Error("bad-option", "max_depth must lie in [1,3]");
  const RigidityMatrix r = build_rigidity(network);
  const int target = dof(r);

  std::vector<Candidate> candidates;
  collect_candidates(network, options, 1, candidates);

  ModeBasis basis;
  basis.method = BasisMethod::multiscale;
  basis.seed = options.seed;
  SpanCollector span(network.coordinate_count());
  for (const auto& c : candidates) {
    if (span.size() == target) break;
    if (r.row_count() > 0 && (r.entries * c.vector.normalized()).cwiseAbs().maxCoeff() > options.residual_tol) continue;
    if (span.try_add(c.vector)) basis.modes.push_back(make_mode(c.vector, options.snd.zero_tol, c.tag));
  }
  if (span.size() < target) {
    basis.incomplete = true;
    for (const auto& m : snd_basis(r, options.seed, options.snd).modes) {
      if (span.size() == target) break;
      if (span.try_add(m.vector)) basis.modes.push_back(m);
    }
  }
  sort_modes(basis.modes);
  return basis;
}

}  // namespace floppy

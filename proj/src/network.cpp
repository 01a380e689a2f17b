#include "floppy/network.hpp"

#include <algorithm>
#include <cmath>

#include "floppy/error.hpp"

namespace floppy {

int Network::add_node(const Vec2& position, bool fixed) {
  if (!position.allFinite()) throw Error("bad-node", "non-finite position");
  const int id = node_count();
  nodes_.push_back(Node{id, position, fixed});
  return id;
}

void Network::check_node(int id) const {
  if (id < 0 || id >= node_count()) {
    throw Error("unknown-node", "node id " + std::to_string(id) + " out of range");
  }
}

int Network::add_edge(int a, int b, std::optional<double> rest_length) {
  check_node(a);
  check_node(b);
  if (a == b) throw Error("self-loop", "edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
  if (edge_keys_.count(key(a, b)) != 0) {
    throw Error("duplicate-edge", "edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
  }
  const double embedded = (nodes_[a].position - nodes_[b].position).norm();
  const double rest = rest_length.value_or(embedded);
  if (!(rest > 0.0) || !std::isfinite(rest)) {
    throw Error(embedded == 0.0 ? "degenerate-edge" : "bad-rest-length",
                "edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
  }
  edges_.push_back(Edge{a, b, rest});
  edge_keys_.insert(key(a, b));
  return edge_count() - 1;
}

void Network::remove_edge(int a, int b) {
  const int idx = edge_index(a, b);
  if (idx < 0) throw Error("unknown-edge", "edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
  edges_.erase(edges_.begin() + idx);
  edge_keys_.erase(key(a, b));
}

bool Network::has_edge(int a, int b) const { return edge_keys_.count(key(a, b)) != 0; }

int Network::edge_index(int a, int b) const {
  if (!has_edge(a, b)) return -1;
  const auto k = key(a, b);
  for (int i = 0; i < edge_count(); ++i) {
    if (key(edges_[i].a, edges_[i].b) == k) return i;
  }
  return -1;
}

void Network::set_fixed(int id, bool fixed) {
  check_node(id);
  nodes_[id].fixed = fixed;
}

void Network::set_position(int id, const Vec2& position) {
  check_node(id);
  nodes_[id].position = position;
}

void Network::reset_rest_lengths() {
  for (auto& e : edges_) {
    const double l = (nodes_[e.a].position - nodes_[e.b].position).norm();
    if (!(l > 0.0)) throw Error("degenerate-edge", "edge (" + std::to_string(e.a) + "," + std::to_string(e.b) + ")");
    e.rest_length = l;
  }
}

int Network::fixed_count() const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.fixed; }));
}

const Node& Network::node(int id) const {
  check_node(id);
  return nodes_[id];
}

double Network::length(int edge_index) const {
  const Edge& e = edge(edge_index);
  return (nodes_[e.a].position - nodes_[e.b].position).norm();
}

Eigen::VectorXd Network::coordinates() const {
  Eigen::VectorXd x(coordinate_count());
  for (const auto& n : nodes_) x.segment<2>(2 * n.id) = n.position;
  return x;
}

void Network::set_coordinates(const Eigen::VectorXd& coords) {
  if (coords.size() != coordinate_count()) throw Error("dimension-mismatch", "coordinate vector size");
  for (auto& n : nodes_) n.position = coords.segment<2>(2 * n.id);
}

std::vector<std::vector<int>> Network::adjacency() const {
  std::vector<std::vector<int>> adj(nodes_.size());
  for (const auto& e : edges_) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

double Network::mean_edge_length() const {
  if (edges_.empty()) return 1.0;
  double sum = 0.0;
  for (int i = 0; i < edge_count(); ++i) sum += length(i);
  return sum / edge_count();
}

bool Network::operator==(const Network& other) const {
  if (nodes_.size() != other.nodes_.size() || edges_.size() != other.edges_.size()) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& p = nodes_[i];
    const auto& q = other.nodes_[i];
    if (p.id != q.id || p.fixed != q.fixed || p.position != q.position) return false;
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    const auto& f = other.edges_[i];
    if (e.a != f.a || e.b != f.b || e.rest_length != f.rest_length) return false;
  }
  return metadata_ == other.metadata_;
}

}  // namespace floppy

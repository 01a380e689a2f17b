#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace floppy {

using Vec2 = Eigen::Vector2d;

struct Node {
  int id = 0;
  Vec2 position = Vec2::Zero();
  bool fixed = false;
};

struct Edge {
  int a = 0;
  int b = 0;
  double rest_length = 0.0;
};

// Embedded 2D graph. Node ids are contiguous from 0; edges are unordered
// pairs without self-loops or duplicates and always have a positive rest
// length. Mutators enforce these invariants and throw floppy::Error.
class Network {
 public:
  using Metadata = std::map<std::string, std::string>;

  Network() = default;

  int add_node(const Vec2& position, bool fixed = false);

  // rest_length defaults to the current endpoint distance.
  int add_edge(int a, int b, std::optional<double> rest_length = std::nullopt);

  void remove_edge(int a, int b);
  bool has_edge(int a, int b) const;
  // Index into edges() or -1.
  int edge_index(int a, int b) const;

  void set_fixed(int id, bool fixed);
  void set_position(int id, const Vec2& position);

  // Rest lengths := embedded lengths, so the network is unstressed.
  void reset_rest_lengths();

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int coordinate_count() const { return 2 * node_count(); }
  int fixed_count() const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Node& node(int id) const;
  const Edge& edge(int index) const { return edges_.at(static_cast<std::size_t>(index)); }

  double length(int edge_index) const;

  // Flat [x0, y0, x1, y1, ...] coordinate vector.
  Eigen::VectorXd coordinates() const;
  void set_coordinates(const Eigen::VectorXd& coords);

  // adjacency()[i] lists neighbor ids of node i in ascending order.
  std::vector<std::vector<int>> adjacency() const;

  double mean_edge_length() const;

  Metadata& metadata() { return metadata_; }
  const Metadata& metadata() const { return metadata_; }

  bool operator==(const Network& other) const;

 private:
  static std::pair<int, int> key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }
  void check_node(int id) const;

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::set<std::pair<int, int>> edge_keys_;
  Metadata metadata_;
};

}  // namespace floppy

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "floppy/network.hpp"

namespace floppy {

inline constexpr double kDefaultRankTol = 1e-9;

// Provenance of one constraint row.
struct RowTag {
  enum class Kind { edge, anchor };
  Kind kind = Kind::edge;
  int a = 0;  // first endpoint, or the anchored node
  int b = 0;  // second endpoint, or the axis (0 = x, 1 = y)

  bool operator==(const RowTag&) const = default;
};

// Sparse view of one row: (column, value) pairs in ascending column order.
struct SparseRow {
  std::vector<int> cols;
  std::vector<double> vals;
};

// Constraint Jacobian of a network: one row per edge length constraint,
// two rows per fixed node. Columns are the 2N node coordinates.
struct RigidityMatrix {
  Eigen::MatrixXd entries;
  std::vector<RowTag> rows;
  bool normalized = false;
  std::vector<int> row_order;  // row_order[i] = original index of row i
  bool has_anchors = false;    // false => rigid-body motions are in the null space

  int row_count() const { return static_cast<int>(entries.rows()); }
  int col_count() const { return static_cast<int>(entries.cols()); }
  SparseRow sparse_row(int i) const;
};

// Builds R with squared-distance gradients for edges and unit anchor rows,
// then scales every row to unit norm when `normalize` is set.
RigidityMatrix build_rigidity(const Network& network, bool normalize = true);

// Seeded uniform row permutation; row tags follow their rows.
RigidityMatrix shuffle_rows(const RigidityMatrix& r, std::uint64_t seed);

// Singular values above tol * sigma_max.
int numeric_rank(const Eigen::MatrixXd& m, double tol = kDefaultRankTol);
int numeric_rank(const RigidityMatrix& r, double tol = kDefaultRankTol);
int dof(const RigidityMatrix& r, double tol = kDefaultRankTol);

// Edge constraints g = |x_a - x_b|^2 - l^2 evaluated at flat coordinates x.
Eigen::VectorXd constraint_residual(const Network& network, const Eigen::VectorXd& x);

// MatrixMarket coordinate dump of the nonzero entries.
void write_matrix_market(std::ostream& out, const RigidityMatrix& r);

}  // namespace floppy

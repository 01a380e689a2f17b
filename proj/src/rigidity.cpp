#include "floppy/rigidity.hpp"

#include <lapacke.h>

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "floppy/error.hpp"
#include "floppy/random.hpp"

namespace floppy {

SparseRow RigidityMatrix::sparse_row(int i) const {
  SparseRow row;
  for (int c = 0; c < col_count(); ++c) {
    const double v = entries(i, c);
    if (v != 0.0) {
      row.cols.push_back(c);
      row.vals.push_back(v);
    }
  }
  return row;
}

RigidityMatrix build_rigidity(const Network& network, bool normalize) {
  const int n = network.coordinate_count();
  const int m = network.edge_count() + 2 * network.fixed_count();
  RigidityMatrix r;
  r.entries = Eigen::MatrixXd::Zero(m, n);
  r.rows.reserve(static_cast<std::size_t>(m));

  int row = 0;
  for (const auto& e : network.edges()) {
    const Vec2 d = network.node(e.a).position - network.node(e.b).position;
    if (d.squaredNorm() == 0.0) {
      throw Error("degenerate-edge", "edge (" + std::to_string(e.a) + "," + std::to_string(e.b) + ") has zero length");
    }
    r.entries.block<1, 2>(row, 2 * e.a) = 2.0 * d.transpose();
    r.entries.block<1, 2>(row, 2 * e.b) = -2.0 * d.transpose();
    r.rows.push_back({RowTag::Kind::edge, e.a, e.b});
    ++row;
  }
  for (const auto& node : network.nodes()) {
    if (!node.fixed) continue;
    for (int axis = 0; axis < 2; ++axis) {
      r.entries(row, 2 * node.id + axis) = 1.0;
      r.rows.push_back({RowTag::Kind::anchor, node.id, axis});
      ++row;
    }
  }
  r.has_anchors = network.fixed_count() > 0;

  if (normalize) {
    for (int i = 0; i < m; ++i) r.entries.row(i) /= r.entries.row(i).norm();
    r.normalized = true;
  }
  r.row_order.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) r.row_order[i] = i;
  return r;
}

RigidityMatrix shuffle_rows(const RigidityMatrix& r, std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<int> perm = rng.permutation(r.row_count());
  RigidityMatrix out;
  out.entries.resize(r.entries.rows(), r.entries.cols());
  out.rows.resize(r.rows.size());
  out.row_order.resize(r.row_order.size());
  for (int i = 0; i < r.row_count(); ++i) {
    out.entries.row(i) = r.entries.row(perm[i]);
    out.rows[i] = r.rows[perm[i]];
    out.row_order[i] = r.row_order[perm[i]];
  }
  out.normalized = r.normalized;
  out.has_anchors = r.has_anchors;
  return out;
}

int numeric_rank(const Eigen::MatrixXd& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::MatrixXd a = m;
  const lapack_int rows = static_cast<lapack_int>(a.rows());
  const lapack_int cols = static_cast<lapack_int>(a.cols());
  Eigen::VectorXd s(std::min(rows, cols));
  double dummy = 0.0;
  const lapack_int info =
      LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, a.data(), rows, s.data(), &dummy, 1, &dummy, 1);
  if (info != 0) throw Error("numerical-breakdown", "dgesdd failed with info " + std::to_string(info));
  if (s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol * s(0)) ++rank;
  }
  return rank;
}

int numeric_rank(const RigidityMatrix& r, double tol) { return numeric_rank(r.entries, tol); }

int dof(const RigidityMatrix& r, double tol) { return r.col_count() - numeric_rank(r, tol); }

Eigen::VectorXd constraint_residual(const Network& network, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(network.edge_count());
  for (int i = 0; i < network.edge_count(); ++i) {
    const Edge& e = network.edge(i);
    const Vec2 d = x.segment<2>(2 * e.a) - x.segment<2>(2 * e.b);
    g(i) = d.squaredNorm() - e.rest_length * e.rest_length;
  }
  return g;
}

void write_matrix_market(std::ostream& out, const RigidityMatrix& r) {
  int nnz = 0;
  for (int i = 0; i < r.row_count(); ++i) nnz += static_cast<int>(r.sparse_row(i).cols.size());
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << r.row_count() << ' ' << r.col_count() << ' ' << nnz << '\n';
  out << std::setprecision(17);
  for (int i = 0; i < r.row_count(); ++i) {
    const SparseRow row = r.sparse_row(i);
    for (std::size_t k = 0; k < row.cols.size(); ++k) {
      out << i + 1 << ' ' << row.cols[k] + 1 << ' ' << row.vals[k] << '\n';
    }
  }
}

}  // namespace floppy
